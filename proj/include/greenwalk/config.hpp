#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "greenwalk/group.hpp"
#include "greenwalk/measure.hpp"
#include "greenwalk/metric.hpp"

namespace greenwalk {

/**
 * One CLI invocation's knobs. The same keys are accepted from a JSON config
 * file (--config); explicit flags override file values. validate() throws
 * ConfigError with a message naming the offending key.
 */
struct RunConfig {
  std::string command;
  std::string group = "free:2";
  std::string measure = "uniform";
  std::string metric = "word";
  long n = 10000;
  long trajectories = 1000;
  int depth = 6;
  int truncation = 60;
  int radius = 6;
  std::uint64_t seed = 1;
  int threads = 0; // 0 = hardware default
  std::string out;
  std::string format = "json";
  double tol = 0.0;
  double alpha = 0.25;
  std::string x = "e";
  std::string y = "a";
  int pair_radius = 0;

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
};

GroupSpec build_group(const RunConfig& cfg);
/// "uniform", "biased" (the 3/8,3/8,1/8,1/8 nearest-neighbour measure on
/// free:2) or an explicit "word:weight,word:weight,..." list.
StepDistribution build_measure(const GroupSpec& spec, const std::string& text);
Metric build_metric(const GroupSpec& spec, const StepDistribution& mu,
                    const std::string& name);

int resolve_threads(int requested);

} // namespace greenwalk
