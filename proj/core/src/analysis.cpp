#include "asyncdgd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace asyncdgd {

namespace {

FixedPointResult finalize(const AlgorithmSpec& spec, BlockVector x_star,
                          FixedPointMethod method, bool converged,
                          long long iterations) {
  FixedPointResult r;
  r.method = method;
  r.converged = converged;
  r.iterations = iterations;
  r.residual = block_max_norm(apply_T_full(spec, x_star), x_star);
  const int n = x_star.nodes();
  r.mean = Eigen::VectorXd::Zero(x_star.dim());
  for (int i = 0; i < n; ++i) r.mean += x_star.block(i);
  r.mean /= n;
  r.x_bar = BlockVector(n, x_star.dim());
  for (int i = 0; i < n; ++i) r.x_bar.block(i) = r.mean;
  r.x_star = std::move(x_star);
  return r;
}

}  // namespace

FixedPointResult fixed_point(const AlgorithmSpec& spec, double tol,
                             long long max_iters,
                             const std::optional<BlockVector>& x0) {
  spec.validate();
  BlockVector x = x0 ? *x0 : BlockVector(spec.problem.n, spec.problem.d);
  bool converged = false;
  long long k = 0;
  for (; k < max_iters; ++k) {
    BlockVector next = apply_T_full(spec, x);
    const double step = block_max_norm(next, x);
    x = std::move(next);
    if (step <= tol) {
      converged = true;
      ++k;
      break;
    }
  }
  return finalize(spec, std::move(x), FixedPointMethod::iterate, converged, k);
}

FixedPointResult fixed_point_quadratic_direct(const AlgorithmSpec& spec) {
  spec.validate();
  if (spec.kind != AlgKind::prox_dgd) {
    throw std::invalid_argument(
        "fixed_point_quadratic_direct: requires prox_dgd");
  }
  if (!spec.problem.all_prox_zero()) {
    throw std::invalid_argument(
        "fixed_point_quadratic_direct: requires all h_i = 0");
  }
  const int n = spec.problem.n;
  const int d = spec.problem.d;
  for (const auto& f : spec.problem.smooth) {
    if (!f.quadratic) {
      throw std::invalid_argument(
          "fixed_point_quadratic_direct: requires quadratic f_i");
    }
  }
  // (2 A^T A + (I - W (x) I_d)/alpha) x = 2 A^T b  for f_i = ||A_i x - b_i||^2
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n * d, n * d);
  Eigen::VectorXd rhs(n * d);
  for (int i = 0; i < n; ++i) {
    const auto& q = *spec.problem.smooth[i].quadratic;
    M.block(i * d, i * d, d, d) = 2.0 * q.A.transpose() * q.A;
    rhs.segment(i * d, d) = 2.0 * q.A.transpose() * q.b;
  }
  const Eigen::MatrixXd& W = spec.W.W;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double c = ((i == j) ? 1.0 : 0.0) - W(i, j);
      if (c != 0.0) {
        M.block(i * d, j * d, d, d) +=
            (c / spec.alpha) * Eigen::MatrixXd::Identity(d, d);
      }
    }
  }
  // minimum-norm solve; M is symmetric PSD but may be singular
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double cutoff = 1e-12 * std::max(ev.cwiseAbs().maxCoeff(), 1.0);
  Eigen::VectorXd coeff = es.eigenvectors().transpose() * rhs;
  for (int t = 0; t < coeff.size(); ++t) {
    coeff(t) = std::abs(ev(t)) > cutoff ? coeff(t) / ev(t) : 0.0;
  }
  Eigen::VectorXd sol = es.eigenvectors() * coeff;
  BlockVector x(n, d);
  for (int i = 0; i < n; ++i) x.block(i) = sol.segment(i * d, d);
  return finalize(spec, std::move(x), FixedPointMethod::quadratic_direct, true,
                  0);
}

GapReport gap_report(const ConsensusProblem& p, const MixingMatrix& W,
                     double alpha, const BlockVector& x_star, double F_opt,
                     std::optional<double> lower_bound_minF, GapCase which) {
  p.validate();
  if (x_star.nodes() != p.n || x_star.dim() != p.d) {
    throw std::invalid_argument("gap_report: shape mismatch");
  }
  GapReport r;
  r.which = which;
  r.F_opt = F_opt;

  Eigen::VectorXd mean = Eigen::VectorXd::Zero(p.d);
  for (int i = 0; i < p.n; ++i) mean += x_star.block(i);
  mean /= p.n;
  double stacked_sq = 0.0;
  for (int i = 0; i < p.n; ++i) {
    const double e = (x_star.block(i) - mean).norm();
    r.consensus_error = std::max(r.consensus_error, e);
    stacked_sq += e * e;
  }
  r.stacked_error = std::sqrt(stacked_sq);

  r.F_star = eval_F(p, x_star);
  BlockVector x_bar(p.n, p.d);
  for (int i = 0; i < p.n; ++i) x_bar.block(i) = mean;
  r.F_bar = eval_F(p, x_bar);
  r.F_star_le_opt = r.F_star <= F_opt + 1e-9;

  const double beta = W.beta;
  switch (which) {
    case GapCase::lemma1: {
      if (!lower_bound_minF) {
        throw std::invalid_argument("gap_report: lemma1 needs min F");
      }
      const double gap = std::max(F_opt - *lower_bound_minF, 0.0);
      r.bound = std::sqrt(2.0 * alpha * gap / (1.0 - beta));
      break;
    }
    case GapCase::lemma2_case_i: {
      // G = Lipschitz constant of the stacked F; blockwise constants combine
      // in quadrature
      double sumsq = 0.0;
      for (int i = 0; i < p.n; ++i) {
        if (!p.smooth[i].lipschitz_G) {
          throw std::invalid_argument(
              "gap_report: lemma2 case i needs a Lipschitz constant for "
              "every f_i");
        }
        double gi = *p.smooth[i].lipschitz_G;
        switch (p.prox[i].kind()) {
          case ProxKind::zero:
            break;
          case ProxKind::l1:
            gi += p.prox[i].lambda1() * std::sqrt(static_cast<double>(p.d));
            break;
          default:
            throw std::invalid_argument(
                "gap_report: lemma2 case i supports zero or l1 regularizers");
        }
        sumsq += gi * gi;
      }
      r.bound = alpha * std::sqrt(sumsq) / (1.0 - beta);
      break;
    }
    case GapCase::lemma2_identical_h:
    case GapCase::lemma3: {
      if (!p.identical_h) {
        throw std::invalid_argument("gap_report: case requires identical h_i");
      }
      double grad_sq = 0.0;
      for (int i = 0; i < p.n; ++i) {
        grad_sq += p.smooth[i].gradient(x_star.block(i)).squaredNorm();
      }
      r.bound = alpha * std::sqrt(grad_sq) / (1.0 - beta);
      const double L = p.max_L();
      r.F_bar_bound =
          F_opt + (alpha / (1.0 - beta) +
                   L * alpha * alpha / (2.0 * (1.0 - beta) * (1.0 - beta))) *
                      grad_sq;
      r.F_bar_satisfied = r.F_bar <= *r.F_bar_bound + 1e-9;
      break;
    }
  }
  if (r.bound) r.bound_satisfied = r.stacked_error <= *r.bound + 1e-9;
  return r;
}

EnvelopeReport envelope_check(const RunTrace& trace, const BlockVector& x_star,
                              double rho, const DelayMetrics& metrics) {
  const long long K = trace.schedule.horizon();
  if (trace.dist_to_star.size() != static_cast<size_t>(K + 1)) {
    throw std::invalid_argument(
        "envelope_check: trace lacks a full distance-to-fixed-point series");
  }
  if (metrics.mk.size() != static_cast<size_t>(K)) {
    throw std::invalid_argument("envelope_check: metrics horizon mismatch");
  }
  (void)x_star;

  EnvelopeReport r;
  const PartialAsyncReport pa = verify_partial_async(trace.schedule);
  if (!pa.holds) {
    throw std::invalid_argument(
        "envelope_check: schedule does not satisfy partial asynchrony");
  }
  r.B = pa.B_min;
  r.D = pa.D_min;
  const long long P = pa.B_min + pa.D_min + 1;
  const double d0 = trace.dist_to_star[0];

  r.floor_ok = r.adaptive_ok = true;
  for (long long k = 0; k <= K; ++k) {
    const double dist = trace.dist_to_star[k];
    const double env_floor = std::pow(rho, static_cast<double>(k / P)) * d0;
    const long long m =
        k == 0 ? 0 : metrics.mk[std::min<long long>(k, K - 1)];
    const double env_adapt = std::pow(rho, static_cast<double>(m)) * d0;
    const double fm = dist - (env_floor + 1e-9);
    const double am = dist - (env_adapt + 1e-9);
    r.worst_floor_margin = std::max(r.worst_floor_margin, fm);
    r.worst_adaptive_margin = std::max(r.worst_adaptive_margin, am);
    if (fm > 0 && r.floor_ok) {
      r.floor_ok = false;
      r.first_floor_violation = k;
    }
    if (am > 0 && r.adaptive_ok) {
      r.adaptive_ok = false;
      r.first_adaptive_violation = k;
    }
  }
  return r;
}

CentralSolveResult central_solve(const ConsensusProblem& p, double tol,
                                 long long max_iters) {
  p.validate();
  const bool zero = p.all_prox_zero();
  if (!zero && !p.identical_h) {
    throw std::invalid_argument(
        "central_solve: requires identical h_i (their sum needs a closed-form "
        "prox)");
  }
  const int d = p.d;
  auto grad = [&](const Eigen::VectorXd& z) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < p.n; ++i) g += p.smooth[i].gradient(z);
    return g;
  };
  auto fval = [&](const Eigen::VectorXd& z) {
    double v = 0.0;
    for (int i = 0; i < p.n; ++i) v += p.smooth[i].value(z);
    return v;
  };
  auto hval = [&](const Eigen::VectorXd& z) {
    double v = 0.0;
    for (int i = 0; i < p.n; ++i) v += p.prox[i].value(z);
    return v;
  };
  // prox of sum_i h_i: n-fold l1 scales the threshold; indicators are
  // idempotent under summation
  auto prox_sum = [&](const Eigen::VectorXd& v, double t) -> Eigen::VectorXd {
    if (zero) return v;
    const ProxOracle& h = p.prox[0];
    if (h.kind() == ProxKind::l1) {
      return prox_l1(v, t * p.n * h.lambda1());
    }
    return h.prox(v, t);  // box/ball projections ignore the scale
  };

  double Lsum = 0.0;
  for (const auto& f : p.smooth) Lsum += f.L;
  double t = Lsum > 0 ? 1.0 / Lsum : 1.0;

  Eigen::VectorXd z = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd y = z;
  double theta = 1.0;
  CentralSolveResult r;
  long long k = 0;
  for (; k < max_iters; ++k) {
    const Eigen::VectorXd g = grad(y);
    const double fy = fval(y);
    Eigen::VectorXd z_new;
    // backtracking on the smooth upper model at y
    for (int bt = 0;; ++bt) {
      z_new = prox_sum(y - t * g, t);
      const Eigen::VectorXd dz = z_new - y;
      if (fval(z_new) <=
              fy + g.dot(dz) + dz.squaredNorm() / (2.0 * t) + 1e-15 ||
          bt >= 60) {
        break;
      }
      t *= 0.5;
    }
    if ((y - z_new).norm() / t <= tol) {
      z = z_new;
      r.converged = true;
      ++k;
      break;
    }
    const double theta_new =
        (1.0 + std::sqrt(1.0 + 4.0 * theta * theta)) / 2.0;
    Eigen::VectorXd z_prev = std::move(z);
    z = z_new;
    y = z + ((theta - 1.0) / theta_new) * (z - z_prev);
    // restart the momentum when it points uphill
    if ((y - z).dot(z - z_prev) < 0 && fval(z) > fval(z_prev)) {
      y = z;
      theta = 1.0;
    } else {
      theta = theta_new;
    }
  }
  r.iterations = k;
  r.x_opt = z;
  r.F_opt = fval(z) + hval(z);
  return r;
}

void write_gap_report(std::ostream& os, const GapReport& r) {
  const char* name = "lemma1";
  switch (r.which) {
    case GapCase::lemma1: name = "lemma1"; break;
    case GapCase::lemma2_case_i: name = "lemma2_case_i"; break;
    case GapCase::lemma2_identical_h: name = "lemma2_identical_h"; break;
    case GapCase::lemma3: name = "lemma3"; break;
  }
  os << "case=" << name << '\n';
  os << "consensus_error=" << r.consensus_error << '\n';
  os << "stacked_error=" << r.stacked_error << '\n';
  os << "F_star=" << r.F_star << '\n';
  os << "F_opt=" << r.F_opt << '\n';
  os << "F_bar=" << r.F_bar << '\n';
  os << "F_star_le_opt=" << (r.F_star_le_opt ? 1 : 0) << '\n';
  if (r.bound) {
    os << "bound=" << *r.bound << '\n';
    os << "bound_satisfied=" << (r.bound_satisfied ? 1 : 0) << '\n';
  }
  if (r.F_bar_bound) {
    os << "F_bar_bound=" << *r.F_bar_bound << '\n';
    os << "F_bar_satisfied=" << (r.F_bar_satisfied ? 1 : 0) << '\n';
  }
}

void write_envelope_report(std::ostream& os, const EnvelopeReport& r) {
  os << "B_min=" << r.B << '\n';
  os << "D_min=" << r.D << '\n';
  os << "floor_ok=" << (r.floor_ok ? 1 : 0) << '\n';
  os << "adaptive_ok=" << (r.adaptive_ok ? 1 : 0) << '\n';
  os << "first_floor_violation=" << r.first_floor_violation << '\n';
  os << "first_adaptive_violation=" << r.first_adaptive_violation << '\n';
  os << "worst_floor_margin=" << r.worst_floor_margin << '\n';
  os << "worst_adaptive_margin=" << r.worst_adaptive_margin << '\n';
}

}  // namespace asyncdgd
