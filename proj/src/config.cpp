#include "greenwalk/config.hpp"

#include <thread>

#include "greenwalk/errors.hpp"

namespace greenwalk {

namespace {

template <typename T>
T get_as(const nlohmann::json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + key + "' has the wrong type");
  }
}

} // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  RunConfig cfg;
  for (const auto& [key, value] : j.items()) {
    if (key == "command") cfg.command = get_as<std::string>(value, key);
    else if (key == "group") cfg.group = get_as<std::string>(value, key);
    else if (key == "measure") cfg.measure = get_as<std::string>(value, key);
    else if (key == "metric") cfg.metric = get_as<std::string>(value, key);
    else if (key == "n") cfg.n = get_as<long>(value, key);
    else if (key == "trajectories") cfg.trajectories = get_as<long>(value, key);
    else if (key == "depth") cfg.depth = get_as<int>(value, key);
    else if (key == "truncation") cfg.truncation = get_as<int>(value, key);
    else if (key == "radius") cfg.radius = get_as<int>(value, key);
    else if (key == "seed") cfg.seed = get_as<std::uint64_t>(value, key);
    else if (key == "threads") cfg.threads = get_as<int>(value, key);
    else if (key == "out") cfg.out = get_as<std::string>(value, key);
    else if (key == "format") cfg.format = get_as<std::string>(value, key);
    else if (key == "tol") cfg.tol = get_as<double>(value, key);
    else if (key == "alpha") cfg.alpha = get_as<double>(value, key);
    else if (key == "x") cfg.x = get_as<std::string>(value, key);
    else if (key == "y") cfg.y = get_as<std::string>(value, key);
    else if (key == "pair_radius") cfg.pair_radius = get_as<int>(value, key);
    else throw ConfigError("unknown config key '" + key + "'");
  }
  return cfg;
}

nlohmann::json RunConfig::to_json() const {
  return nlohmann::json{{"command", command},
                        {"group", group},
                        {"measure", measure},
                        {"metric", metric},
                        {"n", n},
                        {"trajectories", trajectories},
                        {"depth", depth},
                        {"truncation", truncation},
                        {"radius", radius},
                        {"seed", seed},
                        {"threads", threads},
                        {"out", out},
                        {"format", format},
                        {"tol", tol},
                        {"alpha", alpha},
                        {"x", x},
                        {"y", y},
                        {"pair_radius", pair_radius}};
}

void RunConfig::validate() const {
  if (n < 1) throw ConfigError("config key 'n' must be >= 1");
  if (trajectories < 1) throw ConfigError("config key 'trajectories' must be >= 1");
  if (depth < 1 || depth > 16) throw ConfigError("config key 'depth' must be in [1, 16]");
  if (truncation < 1 || truncation > 400)
    throw ConfigError("config key 'truncation' must be in [1, 400]");
  if (radius < 1 || radius > 14) throw ConfigError("config key 'radius' must be in [1, 14]");
  if (threads < 0) throw ConfigError("config key 'threads' must be >= 0");
  if (format != "json" && format != "csv" && format != "text")
    throw ConfigError("config key 'format' must be json, csv or text");
  if (tol < 0.0) throw ConfigError("config key 'tol' must be >= 0");
  if (!(alpha > 0.0)) throw ConfigError("config key 'alpha' must be > 0");
  if (pair_radius < 0) throw ConfigError("config key 'pair_radius' must be >= 0");
}

GroupSpec build_group(const RunConfig& cfg) { return GroupSpec::parse(cfg.group); }

StepDistribution build_measure(const GroupSpec& spec, const std::string& text) {
  if (text.empty() || text == "uniform") return uniform_generator_measure(spec);
  if (text == "biased") {
    if (!spec.is_free() || spec.rank != 2)
      throw ConfigError("the 'biased' measure is defined on free:2 only");
    return measure_from_pairs(spec, {{"a", 3.0 / 8.0},
                                     {"a-", 3.0 / 8.0},
                                     {"b", 1.0 / 8.0},
                                     {"b-", 1.0 / 8.0}});
  }
  // explicit "word:weight,word:weight,..." list
  std::vector<std::pair<std::string, double>> pairs;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    const std::string item = text.substr(pos, comma - pos);
    const std::size_t colon = item.rfind(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 >= item.size())
      throw ConfigError("measure item '" + item + "' is not word:weight");
    double w = 0.0;
    try {
      w = std::stod(item.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("measure weight in '" + item + "' is not a number");
    }
    pairs.push_back({item.substr(0, colon), w});
    pos = comma + 1;
  }
  if (pairs.empty()) throw ConfigError("measure list is empty");
  StepDistribution mu = measure_from_pairs(spec, pairs);
  // walks on an elementary (commutative) subgroup have no hyperbolic boundary
  // theory to test; reject them before any command divides by a Green kernel
  require_admissible(mu, false, true);
  return mu;
}

Metric build_metric(const GroupSpec& spec, const StepDistribution& mu,
                    const std::string& name) {
  if (name == "word") return word_metric(spec);
  if (name == "green") return green_word_metric(spec, mu);
  throw ConfigError("unknown metric '" + name + "' (use word or green)");
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

} // namespace greenwalk
