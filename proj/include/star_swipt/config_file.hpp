#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "star_swipt/types.hpp"

namespace star_swipt {

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

/// Reads a flat `key = value` file. Blank lines and lines starting with
/// '#' or ';' are skipped. Throws ConfigError naming the path when the file
/// cannot be opened or a line has no '='.
std::vector<KeyValue> read_key_values(const std::filesystem::path& path);

double parse_double(const KeyValue& kv);
int parse_int(const KeyValue& kv);
std::uint64_t parse_u64(const KeyValue& kv);
Vec3 parse_vec3(const KeyValue& kv);

}  // namespace star_swipt
