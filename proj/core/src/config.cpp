#include "asyncdgd/config.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace asyncdgd {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void bad_field(const std::string& section, const std::string& key,
                            const std::string& why) {
  throw std::invalid_argument("config: [" + section + "] " + key + ": " + why);
}

long long to_ll(const std::string& section, const std::string& key,
                const std::string& v) {
  try {
    size_t pos = 0;
    long long r = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return r;
  } catch (...) {
    bad_field(section, key, "expected an integer, got '" + v + "'");
  }
}

double to_d(const std::string& section, const std::string& key,
            const std::string& v) {
  try {
    size_t pos = 0;
    double r = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return r;
  } catch (...) {
    bad_field(section, key, "expected a number, got '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& section, const std::string& key,
                     const std::string& v) {
  try {
    size_t pos = 0;
    std::uint64_t r = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return r;
  } catch (...) {
    bad_field(section, key, "expected an unsigned integer, got '" + v + "'");
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  auto check = [](bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(std::string("config: ") + msg);
  };
  check(loss == "quadratic" || loss == "logistic",
        "[problem] loss must be quadratic or logistic");
  check(n >= 2, "[problem] n must be >= 2");
  check(d >= 1, "[problem] d must be >= 1");
  check(samples_per_node >= 1, "[problem] samples_per_node must be >= 1");
  check(lambda1 >= 0, "[problem] lambda1 must be >= 0");
  check(lambda2 >= 0, "[problem] lambda2 must be >= 0");
  check(quadratic_rank >= 0, "[problem] quadratic_rank must be >= 0");
  check(graph_kind == "line" || graph_kind == "ring" || graph_kind == "star" ||
            graph_kind == "complete" || graph_kind == "random",
        "[graph] kind must be line|ring|star|complete|random");
  check(edges >= 0, "[graph] edges must be >= 0");
  check(algorithm == "prox_dgd" || algorithm == "dgd_atc",
        "[algorithm] kind must be prox_dgd or dgd_atc");
  check(stepsize_rule == "explicit" || stepsize_rule == "fraction",
        "[algorithm] stepsize_rule must be explicit or fraction");
  check(stepsize_value > 0, "[algorithm] stepsize_value must be > 0");
  check(regime == "synchronous" || regime == "partial" || regime == "total" ||
            regime == "worst" || regime == "best" || regime == "runtime",
        "[schedule] regime must be "
        "synchronous|partial|total|worst|best|runtime");
  check(horizon >= 1, "[schedule] horizon must be >= 1");
  check(B >= 0, "[schedule] B must be >= 0");
  check(D >= 0, "[schedule] D must be >= 0");
  check(growth > 0, "[schedule] growth must be > 0");
  check(updates >= 1, "[runtime] updates must be >= 1");
  check(snapshot_stride >= 0, "[output] snapshot_stride must be >= 0");
  check(!out_dir.empty(), "[output] dir must not be empty");
}

ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig cfg;
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": malformed section header '" + t + "'");
      }
      section = t.substr(1, t.size() - 2);
      if (section != "problem" && section != "graph" &&
          section != "algorithm" && section != "schedule" &&
          section != "runtime" && section != "output") {
        throw std::invalid_argument("config line " + std::to_string(lineno) +
                                    ": unknown section '" + section + "'");
      }
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key=value, got '" + t + "'");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    bool known = true;
    if (section == "problem") {
      if (key == "loss") cfg.loss = val;
      else if (key == "n") cfg.n = static_cast<int>(to_ll(section, key, val));
      else if (key == "d") cfg.d = static_cast<int>(to_ll(section, key, val));
      else if (key == "samples_per_node")
        cfg.samples_per_node = static_cast<int>(to_ll(section, key, val));
      else if (key == "data_seed") cfg.data_seed = to_u64(section, key, val);
      else if (key == "lambda1") cfg.lambda1 = to_d(section, key, val);
      else if (key == "lambda2") cfg.lambda2 = to_d(section, key, val);
      else if (key == "quadratic_rank")
        cfg.quadratic_rank = static_cast<int>(to_ll(section, key, val));
      else if (key == "data_csv") cfg.data_csv = val;
      else known = false;
    } else if (section == "graph") {
      if (key == "kind") cfg.graph_kind = val;
      else if (key == "edges")
        cfg.edges = static_cast<int>(to_ll(section, key, val));
      else if (key == "seed") cfg.graph_seed = to_u64(section, key, val);
      else known = false;
    } else if (section == "algorithm") {
      if (key == "kind") cfg.algorithm = val;
      else if (key == "stepsize_rule") cfg.stepsize_rule = val;
      else if (key == "stepsize_value")
        cfg.stepsize_value = to_d(section, key, val);
      else known = false;
    } else if (section == "schedule") {
      if (key == "regime") cfg.regime = val;
      else if (key == "B") cfg.B = to_ll(section, key, val);
      else if (key == "D") cfg.D = to_ll(section, key, val);
      else if (key == "horizon") cfg.horizon = to_ll(section, key, val);
      else if (key == "growth") cfg.growth = to_d(section, key, val);
      else if (key == "seed") cfg.schedule_seed = to_u64(section, key, val);
      else known = false;
    } else if (section == "runtime") {
      if (key == "updates") cfg.updates = to_ll(section, key, val);
      else if (key == "activation_threshold")
        cfg.activation_threshold = static_cast<int>(to_ll(section, key, val));
      else known = false;
    } else if (section == "output") {
      if (key == "dir") cfg.out_dir = val;
      else if (key == "snapshot_stride")
        cfg.snapshot_stride = to_ll(section, key, val);
      else known = false;
    } else {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": key=value before any [section]");
    }
    if (!known) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": unknown key '" + key + "' in [" + section +
                                  "]");
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("config: cannot open '" + path + "'");
  return parse_config(f);
}

void serialize_config(std::ostream& os, const ExperimentConfig& cfg) {
  os << "[problem]\n";
  os << "loss=" << cfg.loss << '\n';
  os << "n=" << cfg.n << '\n';
  os << "d=" << cfg.d << '\n';
  os << "samples_per_node=" << cfg.samples_per_node << '\n';
  os << "data_seed=" << cfg.data_seed << '\n';
  os << "lambda1=" << cfg.lambda1 << '\n';
  os << "lambda2=" << cfg.lambda2 << '\n';
  os << "quadratic_rank=" << cfg.quadratic_rank << '\n';
  if (!cfg.data_csv.empty()) os << "data_csv=" << cfg.data_csv << '\n';
  os << "[graph]\n";
  os << "kind=" << cfg.graph_kind << '\n';
  os << "edges=" << cfg.edges << '\n';
  os << "seed=" << cfg.graph_seed << '\n';
  os << "[algorithm]\n";
  os << "kind=" << cfg.algorithm << '\n';
  os << "stepsize_rule=" << cfg.stepsize_rule << '\n';
  os << "stepsize_value=" << cfg.stepsize_value << '\n';
  os << "[schedule]\n";
  os << "regime=" << cfg.regime << '\n';
  os << "B=" << cfg.B << '\n';
  os << "D=" << cfg.D << '\n';
  os << "horizon=" << cfg.horizon << '\n';
  os << "growth=" << cfg.growth << '\n';
  os << "seed=" << cfg.schedule_seed << '\n';
  os << "[runtime]\n";
  os << "updates=" << cfg.updates << '\n';
  os << "activation_threshold=" << cfg.activation_threshold << '\n';
  os << "[output]\n";
  os << "dir=" << cfg.out_dir << '\n';
  os << "snapshot_stride=" << cfg.snapshot_stride << '\n';
}

namespace {

ConsensusProblem problem_from_csv(const ExperimentConfig& cfg) {
  std::vector<SmoothOracle> smooth;
  std::vector<ProxOracle> prox;
  for (int i = 0; i < cfg.n; ++i) {
    const std::string path =
        cfg.data_csv + "/node_" + std::to_string(i) + ".csv";
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("config: cannot open '" + path + "'");
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(f, line)) {
      line = trim(line);
      if (line.empty()) continue;
      std::vector<double> row;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
      if (static_cast<int>(row.size()) != cfg.d + 1) {
        throw std::invalid_argument("config: '" + path + "': each row needs " +
                                    std::to_string(cfg.d) +
                                    " features and one label");
      }
      rows.push_back(std::move(row));
    }
    const int m = static_cast<int>(rows.size());
    if (m == 0) throw std::invalid_argument("config: '" + path + "' is empty");
    Eigen::MatrixXd A(m, cfg.d);
    Eigen::VectorXd b(m);
    for (int r = 0; r < m; ++r) {
      for (int c = 0; c < cfg.d; ++c) A(r, c) = rows[r][c];
      b(r) = rows[r][cfg.d];
    }
    smooth.push_back(cfg.loss == "logistic"
                         ? make_logistic_oracle(A, b, cfg.lambda2)
                         : make_quadratic_oracle(A, b));
    prox.push_back(cfg.lambda1 > 0 ? ProxOracle::L1(cfg.d, cfg.lambda1)
                                   : ProxOracle::Zero(cfg.d));
  }
  return make_problem(std::move(smooth), std::move(prox));
}

}  // namespace

ConsensusProblem build_problem(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!cfg.data_csv.empty()) return problem_from_csv(cfg);

  std::mt19937_64 rng(cfg.data_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<SmoothOracle> smooth;
  std::vector<ProxOracle> prox;

  // a shared ground truth keeps per-node optima loosely aligned
  Eigen::VectorXd truth(cfg.d);
  for (int c = 0; c < cfg.d; ++c) truth(c) = gauss(rng);

  for (int i = 0; i < cfg.n; ++i) {
    const int m = cfg.loss == "quadratic" && cfg.quadratic_rank > 0
                      ? cfg.quadratic_rank
                      : cfg.samples_per_node;
    Eigen::MatrixXd A(m, cfg.d);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < cfg.d; ++c) A(r, c) = gauss(rng);
    if (cfg.loss == "quadratic") {
      Eigen::VectorXd b = A * truth;
      for (int r = 0; r < m; ++r) b(r) += 0.1 * gauss(rng);
      smooth.push_back(make_quadratic_oracle(A, b));
    } else {
      Eigen::VectorXd labels(m);
      for (int r = 0; r < m; ++r) {
        const double margin = A.row(r).dot(truth) + 0.5 * gauss(rng);
        labels(r) = margin >= 0 ? 1.0 : -1.0;
      }
      smooth.push_back(make_logistic_oracle(A, labels, cfg.lambda2));
    }
    prox.push_back(cfg.lambda1 > 0 ? ProxOracle::L1(cfg.d, cfg.lambda1)
                                   : ProxOracle::Zero(cfg.d));
  }
  return make_problem(std::move(smooth), std::move(prox));
}

Graph build_graph(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.graph_kind == "line") return line_graph(cfg.n);
  if (cfg.graph_kind == "ring") return ring_graph(cfg.n);
  if (cfg.graph_kind == "star") return star_graph(cfg.n);
  if (cfg.graph_kind == "complete") return complete_graph(cfg.n);
  return random_connected_graph(
      cfg.n, cfg.edges > 0 ? cfg.edges : cfg.n - 1, cfg.graph_seed);
}

StepsizeResolution resolve_stepsize(const ExperimentConfig& cfg,
                                    const ConsensusProblem& p,
                                    const MixingMatrix& W,
                                    bool allow_override) {
  const AlgKind kind =
      cfg.algorithm == "dgd_atc" ? AlgKind::dgd_atc : AlgKind::prox_dgd;
  StepsizeResolution r;
  r.max_bound = max_stepsize(kind, p, W);
  r.alpha = cfg.stepsize_rule == "explicit" ? cfg.stepsize_value
                                            : cfg.stepsize_value * r.max_bound;
  r.within_bound = r.alpha < r.max_bound;
  if (!r.within_bound) {
    if (!allow_override) {
      throw std::invalid_argument(
          "config: resolved step-size " + std::to_string(r.alpha) +
          " is not below the bound " + std::to_string(r.max_bound) +
          "; pass --override-stepsize to run anyway");
    }
    r.overridden = true;
  }
  return r;
}

AlgorithmSpec build_spec(const ExperimentConfig& cfg, bool allow_override) {
  ConsensusProblem p = build_problem(cfg);
  Graph g = build_graph(cfg);
  const AlgKind kind =
      cfg.algorithm == "dgd_atc" ? AlgKind::dgd_atc : AlgKind::prox_dgd;
  MixingMatrix W = metropolis_weights(g);
  if (kind == AlgKind::dgd_atc && !W.positive_definite) W = lazy_transform(W);
  StepsizeResolution s = resolve_stepsize(cfg, p, W, allow_override);
  AlgorithmSpec spec;
  spec.kind = kind;
  spec.problem = std::move(p);
  spec.graph = std::move(g);
  spec.W = std::move(W);
  spec.alpha = s.alpha;
  spec.stepsize_override = s.overridden;
  spec.validate();
  return spec;
}

Schedule build_schedule(const ExperimentConfig& cfg, const Graph& g) {
  if (cfg.regime == "synchronous") return gen_synchronous(g, cfg.horizon);
  if (cfg.regime == "partial")
    return gen_partial_async(g, cfg.B, cfg.D, cfg.horizon, cfg.schedule_seed);
  if (cfg.regime == "total")
    return gen_total_async(g, cfg.growth, cfg.horizon, cfg.schedule_seed);
  if (cfg.regime == "worst") return gen_worst_case(g, cfg.B, cfg.D, cfg.horizon);
  if (cfg.regime == "best") return gen_best_case(g, cfg.B, cfg.D, cfg.horizon);
  throw std::invalid_argument("config: regime 'runtime' has no schedule");
}

}  // namespace asyncdgd
