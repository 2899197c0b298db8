#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "asyncdgd/analysis.hpp"
#include "asyncdgd/config.hpp"
#include "asyncdgd/engine.hpp"

namespace fs = std::filesystem;
using namespace asyncdgd;

namespace {

std::ofstream open_out(const fs::path& path, bool watermark) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  if (watermark) f << "# stepsize_override=1\n";
  return f;
}

// min over x of sum_i f_i(x_i) + h_i(x_i): the blocks separate, so solve each
// node with prox-gradient
std::optional<double> lower_bound_min_F(const ConsensusProblem& p) {
  double total = 0.0;
  for (int i = 0; i < p.n; ++i) {
    const auto& f = p.smooth[i];
    if (f.L <= 0) return std::nullopt;
    if (f.mu <= 0 && !f.quadratic) return std::nullopt;  // minimum may not exist
    const double t = 1.0 / f.L;
    Eigen::VectorXd z = Eigen::VectorXd::Zero(p.d);
    for (long long it = 0; it < 1000000; ++it) {
      Eigen::VectorXd z_new = p.prox[i].prox(z - t * f.gradient(z), t);
      const double step = (z - z_new).norm();
      z = std::move(z_new);
      if (step <= 1e-13 * std::max(1.0, z.norm())) break;
    }
    total += f.value(z) + p.prox[i].value(z);
  }
  return total;
}

RunTrace execute(const ExperimentConfig& cfg, const AlgorithmSpec& spec,
                 const TraceOptions& opts, const BlockVector& x0) {
  if (cfg.regime == "runtime") {
    return run_concurrent(spec, cfg.updates, cfg.activation_threshold, x0,
                          opts);
  }
  Schedule sched = build_schedule(cfg, spec.graph);
  return simulate(spec, sched, x0, opts);
}

int cmd_run(const std::string& config_path, bool override_stepsize,
            const std::string& out_override, std::optional<std::uint64_t> seed,
            bool start_at_fixed_point) {
  ExperimentConfig cfg = parse_config_file(config_path);
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (seed) cfg.schedule_seed = *seed;
  AlgorithmSpec spec = build_spec(cfg, override_stepsize);
  const bool wm = spec.stepsize_override;

  fs::create_directories(cfg.out_dir);
  {
    auto f = open_out(fs::path(cfg.out_dir) / "config.ini", wm);
    serialize_config(f, cfg);
  }

  FixedPointResult fp = fixed_point(spec, 1e-12, 2000000);
  BlockVector x0 = start_at_fixed_point
                       ? fp.x_star
                       : BlockVector(spec.problem.n, spec.problem.d);

  TraceOptions opts;
  opts.x_star = fp.x_star;
  opts.snapshot_stride = cfg.snapshot_stride;
  opts.record_F = true;
  opts.record_consensus = true;
  opts.record_mean_F = true;
  RunTrace trace = execute(cfg, spec, opts, x0);
  if (trace.failed) {
    std::cerr << "run failed: " << trace.failure << "\n";
    return 1;
  }

  {
    auto f = open_out(fs::path(cfg.out_dir) / "trace.csv", wm);
    write_trace_csv(f, trace);
  }
  {
    auto f = open_out(fs::path(cfg.out_dir) / "schedule.txt", wm);
    write_schedule(f, trace.schedule);
  }
  {
    auto f = open_out(fs::path(cfg.out_dir) / "gap_report.txt", wm);
    f << "fixed_point_residual=" << fp.residual << '\n';
    f << "fixed_point_converged=" << (fp.converged ? 1 : 0) << '\n';
    try {
      CentralSolveResult cs = central_solve(spec.problem, 1e-10);
      f << "F_opt=" << cs.F_opt << '\n';
      const GapCase which = spec.kind == AlgKind::dgd_atc
                                ? GapCase::lemma3
                                : GapCase::lemma2_identical_h;
      if (spec.problem.identical_h || spec.problem.all_prox_zero()) {
        write_gap_report(f, gap_report(spec.problem, spec.W, spec.alpha,
                                       fp.x_star, cs.F_opt, std::nullopt,
                                       which));
      }
      if (auto minF = lower_bound_min_F(spec.problem)) {
        f << "min_F=" << *minF << '\n';
        write_gap_report(f, gap_report(spec.problem, spec.W, spec.alpha,
                                       fp.x_star, cs.F_opt, minF,
                                       GapCase::lemma1));
      } else {
        f << "note=min F lower bound not computable for this loss\n";
      }
    } catch (const std::exception& ex) {
      f << "note=gap analysis skipped: " << ex.what() << '\n';
    }
  }
  {
    auto f = open_out(fs::path(cfg.out_dir) / "envelope_report.txt", wm);
    const ContractionReport cr = contraction_factor(spec);
    if (!cr.valid) {
      f << "note=contraction factor undefined (weakly convex instance)\n";
    } else if (wm) {
      f << "note=step-size override active; envelope not applicable\n";
    } else {
      f << "rho=" << cr.factor << '\n';
      try {
        DelayMetrics dm = delay_metrics(trace.schedule);
        write_envelope_report(
            f, envelope_check(trace, fp.x_star, cr.factor, dm));
      } catch (const std::exception& ex) {
        f << "note=envelope skipped: " << ex.what() << '\n';
      }
    }
  }
  std::cout << "wrote " << cfg.out_dir << "\n";
  return 0;
}

int cmd_compare(const std::vector<std::string>& config_paths,
                bool override_stepsize, const std::string& out_override,
                std::optional<std::uint64_t> seed) {
  if (config_paths.empty()) {
    std::cerr << "compare: at least one --config required\n";
    return 1;
  }
  std::vector<ExperimentConfig> cfgs;
  for (const auto& path : config_paths) {
    cfgs.push_back(parse_config_file(path));
    if (seed) cfgs.back().schedule_seed = *seed;
  }
  const auto& ref = cfgs.front();
  for (const auto& c : cfgs) {
    const bool same = c.loss == ref.loss && c.n == ref.n && c.d == ref.d &&
                      c.samples_per_node == ref.samples_per_node &&
                      c.data_seed == ref.data_seed &&
                      c.lambda1 == ref.lambda1 && c.lambda2 == ref.lambda2 &&
                      c.quadratic_rank == ref.quadratic_rank &&
                      c.data_csv == ref.data_csv;
    if (!same) {
      std::cerr << "compare: configs describe different problems\n";
      return 1;
    }
    const bool rt = c.regime == "runtime";
    if (rt != (ref.regime == "runtime")) {
      std::cerr << "compare: cannot mix simulator and runtime configs\n";
      return 1;
    }
  }
  const bool by_time = ref.regime == "runtime";
  const std::string out_dir = out_override.empty() ? ref.out_dir : out_override;
  fs::create_directories(out_dir);

  double F_opt = 0.0;
  {
    ConsensusProblem p = build_problem(ref);
    F_opt = central_solve(p, 1e-10).F_opt;
  }

  bool wm = false;
  std::vector<RunTrace> traces;
  std::vector<std::string> names;
  for (size_t c = 0; c < cfgs.size(); ++c) {
    AlgorithmSpec spec = build_spec(cfgs[c], override_stepsize);
    wm = wm || spec.stepsize_override;
    TraceOptions opts;
    opts.record_mean_F = true;
    traces.push_back(execute(cfgs[c], spec, opts,
                             BlockVector(spec.problem.n, spec.problem.d)));
    if (traces.back().failed) {
      std::cerr << "run failed: " << traces.back().failure << "\n";
      return 1;
    }
    names.push_back(fs::path(config_paths[c]).stem().string());
  }

  auto f = open_out(fs::path(out_dir) / "compare.csv", wm);
  if (!by_time) {
    f << "k";
    for (const auto& nm : names) f << ',' << nm;
    f << '\n';
    size_t rows = 0;
    for (const auto& t : traces) rows = std::max(rows, t.mean_F.size());
    for (size_t k = 0; k < rows; ++k) {
      f << k;
      for (const auto& t : traces) {
        f << ',';
        if (k < t.mean_F.size()) f << (t.mean_F[k] - F_opt);
      }
      f << '\n';
    }
  } else {
    // 10 ms bins; each cell carries the last value committed by bin end
    long long horizon_ns = 0;
    for (const auto& t : traces) {
      if (!t.timestamps_ns.empty())
        horizon_ns = std::max(horizon_ns, t.timestamps_ns.back());
    }
    const long long bin_ns = 10'000'000;
    f << "time_ms";
    for (const auto& nm : names) f << ',' << nm;
    f << '\n';
    for (long long edge = 0; edge <= horizon_ns + bin_ns; edge += bin_ns) {
      f << edge / 1'000'000;
      for (const auto& t : traces) {
        f << ',';
        // timestamps_ns[j] is the commit time of update j -> mean_F[j+1]
        auto it = std::upper_bound(t.timestamps_ns.begin(),
                                   t.timestamps_ns.end(), edge);
        const size_t idx = static_cast<size_t>(it - t.timestamps_ns.begin());
        if (idx < t.mean_F.size()) f << (t.mean_F[idx] - F_opt);
      }
      f << '\n';
    }
  }
  std::cout << "wrote " << (fs::path(out_dir) / "compare.csv").string() << "\n";
  return 0;
}

int cmd_delays(const std::string& config_path, const std::string& out_override,
               std::optional<std::uint64_t> seed, long long bucket_width,
               bool override_stepsize) {
  ExperimentConfig cfg = parse_config_file(config_path);
  if (!out_override.empty()) cfg.out_dir = out_override;
  if (seed) cfg.schedule_seed = *seed;
  fs::create_directories(cfg.out_dir);

  Schedule sched;
  bool wm = false;
  if (cfg.regime == "runtime") {
    AlgorithmSpec spec = build_spec(cfg, override_stepsize);
    wm = spec.stepsize_override;
    RunTrace t = run_concurrent(spec, cfg.updates, cfg.activation_threshold,
                                BlockVector(spec.problem.n, spec.problem.d),
                                TraceOptions{});
    if (t.failed) {
      std::cerr << "run failed: " << t.failure << "\n";
      return 1;
    }
    sched = t.schedule;
  } else {
    sched = build_schedule(cfg, build_graph(cfg));
  }

  const DelayMetrics dm = delay_metrics(sched);
  const PartialAsyncReport pa = verify_partial_async(sched);

  {
    auto f = open_out(fs::path(cfg.out_dir) / "delay_histogram.csv", wm);
    f << "bucket_lo,bucket_hi,count\n";
    if (!dm.delay_histogram.empty()) {
      const long long max_age = dm.delay_histogram.rbegin()->first;
      for (long long lo = 0; lo <= max_age; lo += bucket_width) {
        long long count = 0;
        for (auto it = dm.delay_histogram.lower_bound(lo);
             it != dm.delay_histogram.end() && it->first < lo + bucket_width;
             ++it) {
          count += it->second;
        }
        f << lo << ',' << (lo + bucket_width - 1) << ',' << count << '\n';
      }
    }
  }
  {
    // delay quantiles over all reads
    long long max_age = 0, cum = 0, p95 = 0;
    double mean = 0.0;
    bool p95_set = false;
    for (const auto& [age, count] : dm.delay_histogram) {
      max_age = std::max(max_age, age);
      mean += static_cast<double>(age) * count;
    }
    if (dm.total_reads > 0) mean /= dm.total_reads;
    for (const auto& [age, count] : dm.delay_histogram) {
      cum += count;
      if (!p95_set && cum >= (dm.total_reads * 95 + 99) / 100) {
        p95 = age;
        p95_set = true;
      }
    }
    auto f = open_out(fs::path(cfg.out_dir) / "delay_summary.txt", wm);
    f << "total_reads=" << dm.total_reads << '\n';
    f << "max_delay=" << max_age << '\n';
    f << "p95_delay=" << p95 << '\n';
    f << "mean_delay=" << mean << '\n';
    f << "holds=" << (pa.holds ? 1 : 0) << '\n';
    f << "B_min=" << pa.B_min << '\n';
    f << "D_min=" << pa.D_min << '\n';
    f << "observed_B=" << dm.observed_B << '\n';
    f << "observed_D=" << dm.observed_D << '\n';
  }
  {
    auto f = open_out(fs::path(cfg.out_dir) / "epochs.csv", wm);
    f << "m,k_m\n";
    for (size_t m = 0; m < dm.km.size(); ++m) f << m << ',' << dm.km[m] << '\n';
  }
  {
    auto f = open_out(fs::path(cfg.out_dir) / "adaptivity.csv", wm);
    f << "k,m_k,floor_bound,best_bound\n";
    const long long P = pa.B_min + pa.D_min + 1;
    const int n = sched.n;
    for (size_t k = 0; k < dm.mk.size(); ++k) {
      const double floor_bound =
          static_cast<double>(static_cast<long long>(k) / P);
      const double best_bound =
          std::max(0.0, static_cast<double>(static_cast<long long>(k) - P) / n);
      f << k << ',' << dm.mk[k] << ',' << floor_bound << ',' << best_bound
        << '\n';
    }
  }
  std::cout << "wrote " << cfg.out_dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"asynchronous decentralized gradient descent experiments"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::vector<std::string> config_paths;
  bool override_stepsize = false;
  bool start_at_fixed_point = false;
  std::optional<std::uint64_t> seed;
  long long bucket_width = 10;

  auto* run = app.add_subcommand("run", "execute one experiment");
  run->add_option("--config", config_path, "experiment config")->required();
  run->add_flag("--override-stepsize", override_stepsize,
                "allow step-sizes beyond the theorem bound (watermarked)");
  run->add_option("--out", out_dir, "output directory override");
  run->add_option("--seed", seed, "schedule seed override");
  run->add_flag("--start-at-fixed-point", start_at_fixed_point,
                "initialize at the computed fixed point");

  auto* compare = app.add_subcommand("compare", "merged objective curves");
  compare->add_option("--config", config_paths, "experiment configs")
      ->required();
  compare->add_flag("--override-stepsize", override_stepsize);
  compare->add_option("--out", out_dir, "output directory override");
  compare->add_option("--seed", seed, "schedule seed override");

  auto* delays = app.add_subcommand("delays", "delay histogram and adaptivity");
  delays->add_option("--config", config_path, "experiment config")->required();
  delays->add_option("--out", out_dir, "output directory override");
  delays->add_option("--seed", seed, "schedule seed override");
  delays->add_option("--bucket-width", bucket_width, "histogram bucket width");
  delays->add_flag("--override-stepsize", override_stepsize);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(config_path, override_stepsize, out_dir, seed,
                     start_at_fixed_point);
    }
    if (compare->parsed()) {
      return cmd_compare(config_paths, override_stepsize, out_dir, seed);
    }
    return cmd_delays(config_path, out_dir, seed, bucket_width,
                      override_stepsize);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
}
