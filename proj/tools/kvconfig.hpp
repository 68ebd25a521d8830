#ifndef CRISP_TOOLS_KVCONFIG_HPP
#define CRISP_TOOLS_KVCONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace crisp::tools {

struct KeySpec {
  std::string name;
  std::string default_value;  // "" together with required=false means optional
  std::string help;
  bool required = false;
};

// Layered key=value configuration: declared defaults, then an optional
// config file, then command-line overrides. Unknown keys are rejected at
// every layer; the merged result can be echoed to a sidecar file.
class KvConfig {
 public:
  explicit KvConfig(std::vector<KeySpec> keys);

  // Parses `key = value` lines; '#' starts a comment, blank lines are
  // skipped. Values may be empty to explicitly unset an optional key.
  void load_file(const std::string& path);
  void set(const std::string& key, const std::string& value);

  bool has(const std::string& key) const;  // set to a non-empty value

  std::string get_string(const std::string& key) const;
  int get_int(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;
  float get_float(const std::string& key) const;
  bool get_bool(const std::string& key) const;  // true/false, yes/no, on/off, 1/0
  std::vector<double> get_doubles(const std::string& key) const;      // comma-separated
  std::vector<std::string> get_strings(const std::string& key) const;  // comma-separated

  // Writes every key (declaration order) as `key = value` lines.
  void write_effective(const std::string& path, const std::string& command) const;

  // One `key<TAB>default<TAB>help` line per key, for --help text.
  std::string describe() const;

 private:
  const KeySpec& spec(const std::string& key) const;
  std::string raw(const std::string& key) const;

  std::vector<KeySpec> specs_;
  std::map<std::string, std::string> values_;
};

}  // namespace crisp::tools

#endif
