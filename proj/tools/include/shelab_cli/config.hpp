//! \file config.hpp
//! Flat-key run configuration for the shelab tool.
#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace shelab::cli {

using json = nlohmann::json;

//! Raised for schema violations; `field()` is the flat key path. Maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& msg)
      : std::runtime_error(field + ": " + msg), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class ValueType { number, integer, string, boolean };

struct KeySpec {
  std::string key;    //!< flat path, e.g. "model.s"
  ValueType type;
  json fallback;      //!< default value
  std::string flag;   //!< long flag without dashes, e.g. "s"
  std::string help;
};

extern const std::vector<std::string> kCommands;

//! Keys understood by a command, in a stable order.
const std::vector<KeySpec>& schema(const std::string& command);

//! Keys that affect where or how fast a run happens but never its results. They are kept
//! out of the canonical config and its hash.
bool is_runtime_key(const std::string& key);

struct RunConfig {
  std::string command;
  json values = json::object();  //!< every schema key of the command, defaults filled in
  std::string output = "shelab-out";
  unsigned threads = 0;

  //! Canonical serialization: sorted keys, command included, runtime keys excluded.
  std::string canonical() const;
  //! FNV-1a 64 of canonical(), as 16 hex digits.
  std::string hash() const;
  std::uint64_t seed() const;

  double num(const std::string& key) const;
  long long integer(const std::string& key) const;
  const std::string& str(const std::string& key) const;
  bool flag(const std::string& key) const;

  bool operator==(const RunConfig& o) const { return canonical() == o.canonical(); }
};

//! Builds a config for `command` from a flat JSON object (values may be strings, which are
//! converted by the schema type) layered over defaults. A manifest object is accepted
//! too: its "config" member is used. Unknown keys and type errors raise ConfigError.
RunConfig make_config(const std::string& command, const json& file_values,
                      const std::map<std::string, std::string>& overrides = {});

//! Reads a JSON file; ConfigError("config") when unreadable or malformed.
json load_json_file(const std::string& path);

//! Parses a list like "10,20,40"; ConfigError(key) on bad entries.
std::vector<double> parse_list(const std::string& key, const std::string& text);

} // namespace shelab::cli
