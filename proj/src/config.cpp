#include "swarmsim/config.hpp"

#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "json.hpp"

namespace swarmsim {

using json = nlohmann::json;

namespace {

const std::array<const char*, kTaskTypeCount> kTypeSuffix = {"t1", "t2", "t3", "t4", "t5"};

// One mutable view over every file-settable field, shared by the key=value
// parser, the JSON parser and the manifest writer.
struct Field {
  enum class Type { Str, Int, U64, Dbl, Bool } type;
  std::function<void(ScenarioConfig&, const std::string&, const std::string&)> set;
  std::function<json(const ScenarioConfig&)> get;
};

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected integer, got '" + value + "'");
  }
}

double parse_dbl(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw ConfigError("config key '" + key + "': expected boolean, got '" + value + "'");
}

std::map<std::string, Field> make_schema() {
  std::map<std::string, Field> m;
  auto add_str = [&](const char* key, std::string ScenarioConfig::* ptr) {
    m[key] = {Field::Type::Str,
              [ptr](ScenarioConfig& c, const std::string&, const std::string& v) { c.*ptr = v; },
              [ptr](const ScenarioConfig& c) { return json(c.*ptr); }};
  };
  auto add_int = [&](const char* key, int ScenarioConfig::* ptr) {
    m[key] = {Field::Type::Int,
              [ptr](ScenarioConfig& c, const std::string& k, const std::string& v) {
                c.*ptr = static_cast<int>(parse_int(k, v));
              },
              [ptr](const ScenarioConfig& c) { return json(c.*ptr); }};
  };
  auto add_dbl = [&](const char* key, double ScenarioConfig::* ptr) {
    m[key] = {Field::Type::Dbl,
              [ptr](ScenarioConfig& c, const std::string& k, const std::string& v) {
                c.*ptr = parse_dbl(k, v);
              },
              [ptr](const ScenarioConfig& c) { return json(c.*ptr); }};
  };
  auto add_bool = [&](const char* key, bool ScenarioConfig::* ptr) {
    m[key] = {Field::Type::Bool,
              [ptr](ScenarioConfig& c, const std::string& k, const std::string& v) {
                c.*ptr = parse_bool(k, v);
              },
              [ptr](const ScenarioConfig& c) { return json(c.*ptr); }};
  };

  add_str("strategy", &ScenarioConfig::strategy);
  add_int("nodes", &ScenarioConfig::node_count);
  add_str("environment", &ScenarioConfig::environment);
  add_dbl("duration_s", &ScenarioConfig::duration_s);
  m["seed"] = {Field::Type::U64,
               [](ScenarioConfig& c, const std::string& k, const std::string& v) {
                 c.seed = static_cast<std::uint64_t>(parse_int(k, v));
               },
               [](const ScenarioConfig& c) { return json(c.seed); }};
  m["queue_capacity"] = {
      Field::Type::Str,
      [](ScenarioConfig& c, const std::string& k, const std::string& v) {
        if (v == "table") {
          c.queue_capacity = 0;
        } else {
          c.queue_capacity = static_cast<int>(parse_int(k, v));
        }
      },
      [](const ScenarioConfig& c) {
        return c.queue_capacity == 0 ? json("table") : json(c.queue_capacity);
      }};
  m["latency_ms"] = {Field::Type::Int,
                     [](ScenarioConfig& c, const std::string& k, const std::string& v) {
                       c.latency_ms = parse_int(k, v);
                     },
                     [](const ScenarioConfig& c) { return json(c.latency_ms); }};
  add_dbl("ttl_s", &ScenarioConfig::ttl_s);

  for (int i = 0; i < kTaskTypeCount; ++i) {
    std::string emit_key = std::string("emit_interval_") + kTypeSuffix[i] + "_s";
    std::string base_key = std::string("base_time_") + kTypeSuffix[i] + "_s";
    m[emit_key] = {Field::Type::Dbl,
                   [i](ScenarioConfig& c, const std::string& k, const std::string& v) {
                     c.emit_interval_s[i] = parse_dbl(k, v);
                   },
                   [i](const ScenarioConfig& c) { return json(c.emit_interval_s[i]); }};
    m[base_key] = {Field::Type::Dbl,
                   [i](ScenarioConfig& c, const std::string& k, const std::string& v) {
                     c.base_time_s[i] = parse_dbl(k, v);
                   },
                   [i](const ScenarioConfig& c) { return json(c.base_time_s[i]); }};
  }
  for (std::size_t i = 0; i < catalog().size(); ++i) {
    std::string key = "mix_" + catalog()[i].type_id;
    m[key] = {Field::Type::Dbl,
              [i](ScenarioConfig& c, const std::string& k, const std::string& v) {
                c.mix_weights[i] = parse_dbl(k, v);
              },
              [i](const ScenarioConfig& c) { return json(c.mix_weights[i]); }};
  }

  add_int("target_degree", &ScenarioConfig::target_degree);
  add_int("max_connections", &ScenarioConfig::max_connections);
  add_int("min_connections", &ScenarioConfig::min_connections);
  add_bool("sa_enabled", &ScenarioConfig::sa_enabled);
  add_dbl("sa_interval_s", &ScenarioConfig::sa_interval_s);
  add_dbl("sa_notice_grace_s", &ScenarioConfig::sa_notice_grace_s);
  add_dbl("sa_block_duration_s", &ScenarioConfig::sa_block_duration_s);
  add_dbl("evaporation_interval_s", &ScenarioConfig::evaporation_interval_s);
  add_dbl("aco_alpha", &ScenarioConfig::aco_alpha);
  add_dbl("aco_beta", &ScenarioConfig::aco_beta);
  add_dbl("aco_rho", &ScenarioConfig::aco_rho);
  add_dbl("aco_tau0", &ScenarioConfig::aco_tau0);
  add_dbl("aco_tau0_plus", &ScenarioConfig::aco_tau0_plus);
  add_dbl("gossip_discovery_fraction", &ScenarioConfig::gossip_discovery_fraction);
  add_dbl("metrics_sample_interval_s", &ScenarioConfig::metrics_sample_interval_s);
  add_dbl("fail_tick_s", &ScenarioConfig::fail_tick_s);
  add_dbl("recover_tick_s", &ScenarioConfig::recover_tick_s);
  add_bool("count_control_messages", &ScenarioConfig::count_control_messages);
  add_dbl("topology_snapshot_interval_s", &ScenarioConfig::topology_snapshot_interval_s);
  add_str("topology", &ScenarioConfig::topology);
  return m;
}

const std::map<std::string, Field>& schema() {
  static const std::map<std::string, Field> s = make_schema();
  return s;
}

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

void apply_key(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  auto it = schema().find(key);
  if (it == schema().end()) throw ConfigError("unknown config key '" + key + "'");
  it->second.set(cfg, key, value);
}

ScenarioConfig parse_json_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config JSON parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config JSON must be an object");
  ScenarioConfig cfg;
  for (auto it = j.begin(); it != j.end(); ++it) {
    std::string value;
    if (it.value().is_string()) {
      value = it.value().get<std::string>();
    } else if (it.value().is_boolean()) {
      value = it.value().get<bool>() ? "true" : "false";
    } else if (it.value().is_number_integer() || it.value().is_number_unsigned()) {
      value = std::to_string(it.value().get<long long>());
    } else if (it.value().is_number_float()) {
      std::ostringstream os;
      os.precision(17);
      os << it.value().get<double>();
      value = os.str();
    } else {
      throw ConfigError("config key '" + it.key() + "': unsupported value type");
    }
    apply_key(cfg, it.key(), value);
  }
  return cfg;
}

ScenarioConfig parse_kv_config(const std::string& text) {
  ScenarioConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    apply_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

}  // namespace

std::vector<std::string> ScenarioConfig::validate() const {
  std::vector<std::string> errors;
  auto bad = [&errors](const std::string& msg) { errors.push_back(msg); };

  if (strategy != "random" && strategy != "aco" && strategy != "gossips") {
    bad("strategy: must be one of random, aco, gossips (got '" + strategy + "')");
  }
  if (node_count < 2 || node_count > 1000) bad("nodes: must be in [2, 1000]");
  if (queue_capacity < 0) bad("queue_capacity: must be positive or 'table'");
  if (environment != "static" && environment != "dynamic") {
    bad("environment: must be static or dynamic (got '" + environment + "')");
  }
  if (duration_s <= 0.0) bad("duration_s: must be > 0");
  if (latency_ms <= 0) bad("latency_ms: must be > 0");
  if (ttl_s <= 0.0) bad("ttl_s: must be > 0");
  for (int i = 0; i < kTaskTypeCount; ++i) {
    if (emitters_enabled && emit_interval_s[i] <= 0.0) {
      bad(std::string("emit_interval_") + kTypeSuffix[i] + "_s: must be > 0");
    }
    if (base_time_s[i] <= 0.0) {
      bad(std::string("base_time_") + kTypeSuffix[i] + "_s: must be > 0");
    }
  }
  double mix_total = 0.0;
  for (std::size_t i = 0; i < mix_weights.size(); ++i) {
    if (mix_weights[i] < 0.0) bad("mix_" + catalog()[i].type_id + ": must be >= 0");
    mix_total += mix_weights[i];
  }
  if (mix_total <= 0.0) bad("mix weights: at least one must be > 0");
  if (target_degree < 1) bad("target_degree: must be >= 1");
  if (max_connections < 2) bad("max_connections: must be >= 2");
  if (min_connections < 1) bad("min_connections: must be >= 1");
  if (sa_interval_s <= 0.0) bad("sa_interval_s: must be > 0");
  if (sa_notice_grace_s < 0.0) bad("sa_notice_grace_s: must be >= 0");
  if (sa_block_duration_s < 0.0) bad("sa_block_duration_s: must be >= 0");
  if (evaporation_interval_s <= 0.0) bad("evaporation_interval_s: must be > 0");
  if (aco_alpha < 0.0) bad("aco_alpha: must be >= 0");
  if (aco_beta < 0.0) bad("aco_beta: must be >= 0");
  if (aco_rho <= 0.0 || aco_rho >= 1.0) bad("aco_rho: must be in (0, 1)");
  if (aco_tau0 <= 0.0) bad("aco_tau0: must be > 0");
  if (aco_tau0_plus <= aco_tau0) bad("aco_tau0_plus: must exceed aco_tau0");
  if (gossip_discovery_fraction <= 0.0 || gossip_discovery_fraction >= 1.0) {
    bad("gossip_discovery_fraction: must be in (0, 1)");
  }
  if (metrics_sample_interval_s <= 0.0) bad("metrics_sample_interval_s: must be > 0");
  if (fail_tick_s <= 0.0) bad("fail_tick_s: must be > 0");
  if (recover_tick_s <= 0.0) bad("recover_tick_s: must be > 0");
  if (topology_snapshot_interval_s < 0.0) bad("topology_snapshot_interval_s: must be >= 0");
  return errors;
}

std::string ScenarioConfig::to_manifest_json() const {
  json j;
  for (const auto& [key, field] : schema()) j[key] = field.get(*this);
  return j.dump(2);
}

ScenarioConfig parse_config_text(const std::string& text) {
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    return c == '{' ? parse_json_config(text) : parse_kv_config(text);
  }
  return ScenarioConfig{};  // empty file: all defaults
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace swarmsim
