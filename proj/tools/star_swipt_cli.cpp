#include "star_swipt/pipeline.hpp"

int main(int argc, char** argv) { return star_swipt::cli_main(argc, argv); }
