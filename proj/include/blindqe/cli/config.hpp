#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace blindqe::cli {

/// Bad configuration: unknown key, wrong type or a violated constraint.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class KeyType { Real, Int, Bool, String, IntList };

struct KeySpec {
  std::string name;  // config key; the flag is the same with '_' -> '-'
  KeyType type;
  std::string help;
};

inline std::string flag_name(const std::string& key) {
  std::string f = key;
  std::replace(f.begin(), f.end(), '_', '-');
  return "--" + f;
}

/// Keys accepted by every command.
inline const std::vector<KeySpec>& common_keys() {
  static const std::vector<KeySpec> keys{
      {"seed", KeyType::Int, "64-bit seed, default 0"},
      {"out", KeyType::String, "output path, default stdout"},
      {"format", KeyType::String, "csv or json"},
  };
  return keys;
}

namespace detail {

inline const std::vector<KeySpec>& gadget_keys() {
  static const std::vector<KeySpec> keys{
      {"alpha_sq", KeyType::Real, "mean photon number per pulse"},
      {"eta1", KeyType::Real, "single-photon emission efficiency"},
      {"n", KeyType::Int, "pulses per gadget"},
      {"t", KeyType::Real, "abort threshold, abort iff |S| <= t (default n(eta1+p2)/2)"},
  };
  return keys;
}

inline const std::vector<KeySpec>& graph_keys() {
  static const std::vector<KeySpec> keys{
      {"graph", KeyType::String, "preset: path-N, cluster-RxC or triangle"},
      {"graph_file", KeyType::String, "graph document (JSON)"},
      {"angles", KeyType::IntList, "measurement angles in units of pi/4, one per vertex"},
      {"input", KeyType::IntList, "classical input bits, one per input vertex"},
      {"source", KeyType::String, "ideal, resource or gadget"},
      {"emitters", KeyType::String, "auto, single, per-vertex or rows"},
      {"merge", KeyType::Bool, "fold gadget corrections into measurement angles"},
  };
  return keys;
}

inline std::vector<KeySpec> concat(std::initializer_list<std::vector<KeySpec>> parts) {
  std::vector<KeySpec> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

}  // namespace detail

inline const std::map<std::string, std::vector<KeySpec>>& command_table() {
  using detail::concat;
  static const std::map<std::string, std::vector<KeySpec>> table{
      {"bounds", concat({detail::gadget_keys(),
                         {{"n_max", KeyType::Int, "sweep n = n_step, 2 n_step, ..., n_max"},
                          {"n_step", KeyType::Int, "sweep step, default 1"},
                          {"V", KeyType::Int, "vertices for the composed blind bound, default 1"},
                          {"N", KeyType::Int, "repetitions for the composed verified bound"},
                          {"eps_S", KeyType::Real, "verification error for the composed verified bound"}}})},
      {"gadget-sim", concat({detail::gadget_keys(),
                             {{"theta", KeyType::Int, "target angle in units of pi/4"},
                              {"runs", KeyType::Int, "Monte Carlo trials"},
                              {"protocol", KeyType::String, "threshold or postselected"},
                              {"server", KeyType::String, "honest or multiphoton"},
                              {"transcripts", KeyType::Int, "number of trial transcripts to keep"},
                              {"transcript_out", KeyType::String, "JSONL path for kept transcripts"}}})},
      {"rsp-sim", concat({detail::gadget_keys(),
                          {{"graph", KeyType::String, "preset: path-N, cluster-RxC or triangle"},
                           {"graph_file", KeyType::String, "graph document (JSON)"},
                           {"emitters", KeyType::String, "auto, single, per-vertex or rows"},
                           {"extender", KeyType::String, "resource or gadget"},
                           {"runs", KeyType::Int, "trials"}}})},
      {"ubqc-sim", concat({detail::gadget_keys(), detail::graph_keys(),
                           {{"runs", KeyType::Int, "trials"}, {"encrypt", KeyType::Bool, "pad angles (default true)"}}})},
      {"sdqc-sim", concat({detail::gadget_keys(), detail::graph_keys(),
                           {{"runs", KeyType::Int, "protocol executions"},
                            {"N", KeyType::Int, "rounds per execution"},
                            {"test_fraction", KeyType::Real, "fraction of test rounds"},
                            {"w", KeyType::Int, "tolerated failed tests, default #tests/10"},
                            {"server", KeyType::String, "honest, z:<vertex> or flip:<vertex>"}}})},
      {"blindness-verify", {{"n", KeyType::Int, "pulses, 1..3"}}},
      {"physics-sweep", {{"alpha_min", KeyType::Real, "first alpha_sq"},
                         {"alpha_max", KeyType::Real, "last alpha_sq"},
                         {"points", KeyType::Int, "number of alpha_sq values"},
                         {"model", KeyType::String, "two_level, ideal_lambda or both"},
                         {"coupling", KeyType::Real, "Lambda-emitter coupling in (0, 1]"}}},
      {"physics-opt", {{"alpha_sq", KeyType::Real, "mean photon number"},
                       {"crossing", KeyType::Bool, "locate where eta1_max meets p2 instead"}}},
  };
  return table;
}

inline const std::vector<KeySpec>& command_keys(const std::string& command) {
  const auto& t = command_table();
  const auto it = t.find(command);
  if (it == t.end()) throw ConfigError("unknown command '" + command + "'");
  return it->second;
}

inline const KeySpec* find_key(const std::string& command, const std::string& key) {
  for (const auto* list : {&common_keys(), &command_keys(command)})
    for (const auto& k : *list)
      if (k.name == key) return &k;
  return nullptr;
}

inline void check_type(const KeySpec& spec, const nlohmann::json& v) {
  bool ok = false;
  switch (spec.type) {
    case KeyType::Real: ok = v.is_number(); break;
    case KeyType::Int: ok = v.is_number_integer(); break;
    case KeyType::Bool: ok = v.is_boolean(); break;
    case KeyType::String: ok = v.is_string(); break;
    case KeyType::IntList:
      ok = v.is_array() && std::all_of(v.begin(), v.end(), [](const auto& e) { return e.is_number_integer(); });
      break;
  }
  if (!ok) {
    static const char* names[] = {"a number", "an integer", "a boolean", "a string", "a list of integers"};
    throw ConfigError("key '" + spec.name + "' must be " + names[static_cast<int>(spec.type)]);
  }
}

/// Parses a flat JSON object and rejects keys the command does not know.
inline nlohmann::json parse_config_text(const std::string& text, const std::string& command) {
  command_keys(command);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    const auto* spec = find_key(command, key);
    if (!spec) throw ConfigError("unknown config key '" + key + "' for command " + command);
    check_type(*spec, value);
  }
  return j;
}

inline nlohmann::json load_config_file(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config_text(ss.str(), command);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

/// Converts a command-line flag value into the key's JSON type.
inline nlohmann::json coerce_flag(const KeySpec& spec, const std::string& text) {
  auto fail = [&]() -> nlohmann::json { throw ConfigError("bad value '" + text + "' for " + flag_name(spec.name)); };
  auto to_int = [&](const std::string& s) -> std::int64_t {
    std::size_t pos = 0;
    std::int64_t v = 0;
    try {
      v = std::stoll(s, &pos);
    } catch (const std::logic_error&) {
      fail();
    }
    if (pos != s.size()) fail();
    return v;
  };
  switch (spec.type) {
    case KeyType::Real: {
      std::size_t pos = 0;
      double v = 0;
      try {
        v = std::stod(text, &pos);
      } catch (const std::logic_error&) {
        return fail();
      }
      if (pos != text.size()) return fail();
      return v;
    }
    case KeyType::Int:
      if (!text.empty() && text[0] != '-') {
        std::size_t pos = 0;
        std::uint64_t v = 0;
        try {
          v = std::stoull(text, &pos);
        } catch (const std::logic_error&) {
          return fail();
        }
        if (pos != text.size()) return fail();
        return v;
      }
      return to_int(text);
    case KeyType::Bool:
      if (text == "true" || text == "1") return true;
      if (text == "false" || text == "0") return false;
      return fail();
    case KeyType::String: return text;
    case KeyType::IntList: {
      auto arr = nlohmann::json::array();
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) arr.push_back(to_int(item));
      return arr;
    }
  }
  return fail();
}

/// Typed, defaulted access to a validated parameter object.
class Params {
 public:
  Params() : j_(nlohmann::json::object()) {}
  explicit Params(nlohmann::json j) : j_(std::move(j)) {}

  bool has(const std::string& key) const { return j_.contains(key); }
  const nlohmann::json& raw() const { return j_; }
  void set(const std::string& key, nlohmann::json v) { j_[key] = std::move(v); }

  double real(const std::string& key, double fallback) const { return has(key) ? j_.at(key).get<double>() : fallback; }
  std::optional<double> opt_real(const std::string& key) const {
    return has(key) ? std::optional<double>(j_.at(key).get<double>()) : std::nullopt;
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback) const {
    return has(key) ? j_.at(key).get<std::int64_t>() : fallback;
  }
  std::optional<std::int64_t> opt_integer(const std::string& key) const {
    return has(key) ? std::optional<std::int64_t>(j_.at(key).get<std::int64_t>()) : std::nullopt;
  }

  /// Non-negative integer with a named constraint.
  std::size_t count(const std::string& key, std::size_t fallback, std::size_t min = 0) const {
    const auto v = integer(key, static_cast<std::int64_t>(fallback));
    if (v < static_cast<std::int64_t>(min))
      throw ConfigError("key '" + key + "' must be >= " + std::to_string(min) + ", got " + std::to_string(v));
    return static_cast<std::size_t>(v);
  }
  std::optional<std::size_t> opt_count(const std::string& key, std::size_t min = 0) const {
    if (!has(key)) return std::nullopt;
    return count(key, 0, min);
  }

  bool boolean(const std::string& key, bool fallback) const { return has(key) ? j_.at(key).get<bool>() : fallback; }

  std::string string(const std::string& key, const std::string& fallback) const {
    return has(key) ? j_.at(key).get<std::string>() : fallback;
  }

  std::optional<std::vector<std::int64_t>> int_list(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return j_.at(key).get<std::vector<std::int64_t>>();
  }

  /// One of a fixed set of strings.
  std::string choice(const std::string& key, const std::string& fallback, const std::vector<std::string>& allowed) const {
    const auto v = string(key, fallback);
    if (std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      throw ConfigError("key '" + key + "' must be one of {" + list + "}, got '" + v + "'");
    }
    return v;
  }

 private:
  nlohmann::json j_;
};

struct RunConfig {
  std::string command;
  Params params;
  std::uint64_t seed = 0;
  std::optional<std::string> out;
  std::string format = "csv";
};

/// Merges the config file (if any) with flag values; flags win.
inline RunConfig make_run_config(const std::string& command, const std::optional<std::string>& config_path,
                                 const std::map<std::string, std::string>& flags) {
  RunConfig rc;
  rc.command = command;
  nlohmann::json j = config_path ? load_config_file(*config_path, command) : nlohmann::json::object();
  // file paths inside a config are relative to the config itself
  if (config_path)
    for (const char* key : {"graph_file"})
      if (j.contains(key)) {
        const std::filesystem::path path = j.at(key).get<std::string>();
        if (path.is_relative()) j[key] = (std::filesystem::path(*config_path).parent_path() / path).string();
      }
  for (const auto& [key, text] : flags) {
    const auto* spec = find_key(command, key);
    if (!spec) throw ConfigError("unknown option " + flag_name(key) + " for command " + command);
    j[key] = coerce_flag(*spec, text);
  }
  if (j.contains("seed")) {
    const auto& s = j.at("seed");
    if (s.is_number_unsigned()) rc.seed = s.get<std::uint64_t>();
    else throw ConfigError("key 'seed' must be >= 0");
    j.erase("seed");
  }
  if (j.contains("out")) {
    rc.out = j.at("out").get<std::string>();
    j.erase("out");
  }
  if (j.contains("format")) {
    rc.format = j.at("format").get<std::string>();
    j.erase("format");
  }
  if (rc.format != "csv" && rc.format != "json") throw ConfigError("key 'format' must be csv or json, got '" + rc.format + "'");
  rc.params = Params(std::move(j));
  return rc;
}

}  // namespace blindqe::cli
