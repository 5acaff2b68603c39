#include "star_swipt/config_file.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace star_swipt {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const KeyValue& kv, const char* what) {
  std::ostringstream os;
  os << "line " << kv.line << ": key '" << kv.key << "' expects " << what
     << ", got '" << kv.value << "'";
  throw ConfigError(os.str());
}

}  // namespace

std::vector<KeyValue> read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::vector<KeyValue> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": expected 'key = value'");
    }
    KeyValue kv{trim(t.substr(0, eq)), trim(t.substr(eq + 1)), lineno};
    if (kv.key.empty()) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) +
                        ": empty key");
    }
    out.push_back(std::move(kv));
  }
  return out;
}

double parse_double(const KeyValue& kv) {
  double v = 0.0;
  const char* b = kv.value.data();
  const char* e = b + kv.value.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) bad_value(kv, "a number");
  return v;
}

int parse_int(const KeyValue& kv) {
  int v = 0;
  const char* b = kv.value.data();
  const char* e = b + kv.value.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) bad_value(kv, "an integer");
  return v;
}

std::uint64_t parse_u64(const KeyValue& kv) {
  std::uint64_t v = 0;
  const char* b = kv.value.data();
  const char* e = b + kv.value.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) bad_value(kv, "a nonnegative integer");
  return v;
}

Vec3 parse_vec3(const KeyValue& kv) {
  Vec3 out;
  std::stringstream ss(kv.value);
  std::string item;
  int i = 0;
  while (std::getline(ss, item, ',')) {
    if (i >= 3) bad_value(kv, "three comma-separated numbers");
    KeyValue part{kv.key, trim(item), kv.line};
    out[i++] = parse_double(part);
  }
  if (i != 3) bad_value(kv, "three comma-separated numbers");
  return out;
}

}  // namespace star_swipt
