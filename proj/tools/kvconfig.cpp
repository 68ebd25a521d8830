#include "kvconfig.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "crisp/errors.hpp"

namespace crisp::tools {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(s);
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& s) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE) {
    throw ConfigError(key + ": not a number: '" + s + "'");
  }
  return v;
}

long long parse_ll(const std::string& key, const std::string& s) {
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE) {
    throw ConfigError(key + ": not an integer: '" + s + "'");
  }
  return v;
}

}  // namespace

KvConfig::KvConfig(std::vector<KeySpec> keys) : specs_(std::move(keys)) {
  for (const KeySpec& k : specs_) values_[k.name] = k.default_value;
}

const KeySpec& KvConfig::spec(const std::string& key) const {
  for (const KeySpec& k : specs_) {
    if (k.name == key) return k;
  }
  std::string known;
  for (const KeySpec& k : specs_) {
    if (!known.empty()) known += ", ";
    known += k.name;
  }
  throw ConfigError("unknown key '" + key + "' (known keys: " + known + ")");
}

void KvConfig::load_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config: " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
    }
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

void KvConfig::set(const std::string& key, const std::string& value) {
  spec(key);  // reject unknown keys
  values_[key] = value;
}

bool KvConfig::has(const std::string& key) const { return !raw(key).empty(); }

std::string KvConfig::raw(const std::string& key) const {
  spec(key);
  return values_.at(key);
}

std::string KvConfig::get_string(const std::string& key) const {
  const std::string v = raw(key);
  if (v.empty() && spec(key).required) throw ConfigError("missing required key '" + key + "'");
  return v;
}

int KvConfig::get_int(const std::string& key) const {
  const long long v = parse_ll(key, get_string(key));
  if (v < INT32_MIN || v > INT32_MAX) throw ConfigError(key + ": out of range");
  return static_cast<int>(v);
}

std::uint64_t KvConfig::get_u64(const std::string& key) const {
  const std::string s = get_string(key);
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0' || errno == ERANGE || s[0] == '-') {
    throw ConfigError(key + ": not a non-negative integer: '" + s + "'");
  }
  return v;
}

double KvConfig::get_double(const std::string& key) const {
  return parse_double(key, get_string(key));
}

float KvConfig::get_float(const std::string& key) const {
  return static_cast<float>(get_double(key));
}

bool KvConfig::get_bool(const std::string& key) const {
  std::string s = get_string(key);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw ConfigError(key + ": not a boolean: '" + s + "'");
}

std::vector<double> KvConfig::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const std::string& item : split_commas(get_string(key))) {
    out.push_back(parse_double(key, item));
  }
  return out;
}

std::vector<std::string> KvConfig::get_strings(const std::string& key) const {
  return split_commas(get_string(key));
}

void KvConfig::write_effective(const std::string& path, const std::string& command) const {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw IoError("cannot write config echo: " + path);
  f << "# crisp " << command << ": effective configuration\n";
  for (const KeySpec& k : specs_) {
    f << k.name << " = " << values_.at(k.name) << "\n";
  }
  if (!f) throw IoError("write failed: " + path);
}

std::string KvConfig::describe() const {
  std::string out;
  for (const KeySpec& k : specs_) {
    out += "  " + k.name;
    if (k.required) {
      out += " (required)";
    } else if (!k.default_value.empty()) {
      out += " [" + k.default_value + "]";
    }
    out += "\n      " + k.help + "\n";
  }
  return out;
}

}  // namespace crisp::tools
