#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "asyncdgd/graph.hpp"
#include "asyncdgd/mixing.hpp"
#include "asyncdgd/operators.hpp"
#include "asyncdgd/schedule.hpp"

namespace asyncdgd {

// Flat [section] key=value experiment description. Unknown keys are rejected
// with the offending line; the struct round-trips through
// serialize_config/parse_config.
struct ExperimentConfig {
  // [problem]
  std::string loss = "quadratic";  // quadratic | logistic
  int n = 4;
  int d = 2;
  int samples_per_node = 8;
  std::uint64_t data_seed = 1;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  int quadratic_rank = 0;    // 0: full rank; else row count per node
  std::string data_csv;      // optional: directory with node_<i>.csv rows a...,b

  // [graph]
  std::string graph_kind = "ring";  // line | ring | star | complete | random
  int edges = 0;                    // random: total edge count (0 -> n-1 tree)
  std::uint64_t graph_seed = 1;

  // [algorithm]
  std::string algorithm = "prox_dgd";  // prox_dgd | dgd_atc
  std::string stepsize_rule = "fraction";  // explicit | fraction
  double stepsize_value = 0.5;  // alpha itself, or fraction of the max bound

  // [schedule]
  std::string regime = "partial";  // synchronous|partial|total|worst|best|runtime
  long long B = 0;
  long long D = 0;
  long long horizon = 1000;
  double growth = 1.0;
  std::uint64_t schedule_seed = 1;

  // [runtime] (regime = runtime)
  long long updates = 1000;
  int activation_threshold = 0;  // <=0: default max(|N_i|-1, 1)

  // [output]
  std::string out_dir = "out";
  long long snapshot_stride = 0;

  void validate() const;  // field-level messages on bad values
};

ExperimentConfig parse_config(std::istream& is);
ExperimentConfig parse_config_file(const std::string& path);
void serialize_config(std::ostream& os, const ExperimentConfig& cfg);

ConsensusProblem build_problem(const ExperimentConfig& cfg);
Graph build_graph(const ExperimentConfig& cfg);

struct StepsizeResolution {
  double alpha = 0.0;
  double max_bound = 0.0;
  bool within_bound = false;
  bool overridden = false;  // run allowed despite alpha >= bound
};

// Resolves the configured rule against the theorem bound. Out-of-range values
// throw unless allow_override is set; overridden runs are watermarked by the
// caller in every output file.
StepsizeResolution resolve_stepsize(const ExperimentConfig& cfg,
                                    const ConsensusProblem& p,
                                    const MixingMatrix& W, bool allow_override);

AlgorithmSpec build_spec(const ExperimentConfig& cfg, bool allow_override);

// regime != runtime only
Schedule build_schedule(const ExperimentConfig& cfg, const Graph& g);

}  // namespace asyncdgd
