#include "asyncdgd/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace asyncdgd {

ProxOracle ProxOracle::Zero(int dim) {
  ProxOracle p;
  p.kind_ = ProxKind::zero;
  p.dim_ = dim;
  return p;
}

ProxOracle ProxOracle::L1(int dim, double lambda1) {
  if (lambda1 < 0) throw std::invalid_argument("l1: lambda1 must be >= 0");
  ProxOracle p;
  p.kind_ = ProxKind::l1;
  p.dim_ = dim;
  p.lambda1_ = lambda1;
  return p;
}

ProxOracle ProxOracle::Box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
  if (lo.size() != hi.size() || (hi - lo).minCoeff() < 0) {
    throw std::invalid_argument("box: need lo <= hi with equal sizes");
  }
  ProxOracle p;
  p.kind_ = ProxKind::box;
  p.dim_ = static_cast<int>(lo.size());
  p.lo_ = std::move(lo);
  p.hi_ = std::move(hi);
  return p;
}

ProxOracle ProxOracle::Ball(Eigen::VectorXd center, double radius) {
  if (radius < 0) throw std::invalid_argument("ball: radius must be >= 0");
  ProxOracle p;
  p.kind_ = ProxKind::ball;
  p.dim_ = static_cast<int>(center.size());
  p.center_ = std::move(center);
  p.radius_ = radius;
  return p;
}

Eigen::VectorXd prox_l1(const Eigen::VectorXd& v, double scale) {
  if (scale <= 0) throw std::invalid_argument("prox_l1: scale must be > 0");
  Eigen::VectorXd out(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const double a = std::abs(v[j]) - scale;
    out[j] = a > 0 ? (v[j] > 0 ? a : -a) : 0.0;
  }
  return out;
}

Eigen::VectorXd ProxOracle::prox(const Eigen::VectorXd& v, double scale) const {
  if (scale <= 0) throw std::invalid_argument("prox: scale must be > 0");
  switch (kind_) {
    case ProxKind::zero:
      return v;
    case ProxKind::l1:
      if (lambda1_ == 0.0) return v;
      return prox_l1(v, scale * lambda1_);
    case ProxKind::box:
      return v.cwiseMax(lo_).cwiseMin(hi_);
    case ProxKind::ball: {
      const Eigen::VectorXd delta = v - center_;
      const double nrm = delta.norm();
      if (nrm <= radius_) return v;
      return center_ + delta * (radius_ / nrm);
    }
  }
  throw std::logic_error("unreachable");
}

double ProxOracle::value(const Eigen::VectorXd& v) const {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  switch (kind_) {
    case ProxKind::zero:
      return 0.0;
    case ProxKind::l1:
      return lambda1_ * v.lpNorm<1>();
    case ProxKind::box:
      for (Eigen::Index j = 0; j < v.size(); ++j) {
        if (v[j] < lo_[j] - 1e-12 || v[j] > hi_[j] + 1e-12) return kInf;
      }
      return 0.0;
    case ProxKind::ball:
      return (v - center_).norm() <= radius_ + 1e-12 ? 0.0 : kInf;
  }
  throw std::logic_error("unreachable");
}

bool ProxOracle::same_as(const ProxOracle& other) const {
  if (kind_ != other.kind_ || dim_ != other.dim_) return false;
  switch (kind_) {
    case ProxKind::zero:
      return true;
    case ProxKind::l1:
      return lambda1_ == other.lambda1_;
    case ProxKind::box:
      return lo_ == other.lo_ && hi_ == other.hi_;
    case ProxKind::ball:
      return center_ == other.center_ && radius_ == other.radius_;
  }
  return false;
}

void ConsensusProblem::validate() const {
  if (n <= 0 || d <= 0) throw std::invalid_argument("problem: n, d must be > 0");
  if (static_cast<int>(smooth.size()) != n || static_cast<int>(prox.size()) != n) {
    throw std::invalid_argument("problem: need n smooth and n prox oracles");
  }
  for (const auto& s : smooth) {
    if (s.dim != d) throw std::invalid_argument("problem: oracle dim mismatch");
    // L == 0 is the pure-consensus case (f identically zero)
    if (s.L < 0) throw std::invalid_argument("problem: L must be >= 0");
    if (s.mu < 0 || s.mu > s.L + 1e-12) {
      throw std::invalid_argument("problem: need 0 <= mu <= L");
    }
  }
  for (const auto& h : prox) {
    if (h.dim() != d) throw std::invalid_argument("problem: prox dim mismatch");
  }
}

bool ConsensusProblem::all_prox_zero() const {
  for (const auto& h : prox) {
    if (h.kind() != ProxKind::zero && !(h.kind() == ProxKind::l1 && h.lambda1() == 0.0)) {
      return false;
    }
  }
  return true;
}

double ConsensusProblem::max_L() const {
  double m = 0.0;
  for (const auto& s : smooth) m = std::max(m, s.L);
  return m;
}

double ConsensusProblem::min_mu() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : smooth) m = std::min(m, s.mu);
  return m;
}

ConsensusProblem make_problem(std::vector<SmoothOracle> smooth,
                              std::vector<ProxOracle> prox) {
  ConsensusProblem p;
  p.n = static_cast<int>(smooth.size());
  p.d = smooth.empty() ? 0 : smooth.front().dim;
  p.smooth = std::move(smooth);
  p.prox = std::move(prox);
  p.identical_h = true;
  for (const auto& h : p.prox) {
    if (!h.same_as(p.prox.front())) {
      p.identical_h = false;
      break;
    }
  }
  p.validate();
  return p;
}

double eval_F(const ConsensusProblem& p, const BlockVector& x) {
  if (x.nodes() != p.n || x.dim() != p.d) {
    throw std::invalid_argument("eval_F: shape mismatch");
  }
  double total = 0.0;
  for (int i = 0; i < p.n; ++i) {
    const Eigen::VectorXd xi = x.block(i);
    const double hv = p.prox[i].value(xi);
    if (std::isinf(hv)) return hv;
    total += p.smooth[i].value(xi) + hv;
  }
  return total;
}

SmoothOracle make_logistic_oracle(const Eigen::MatrixXd& features,
                                  const Eigen::VectorXd& labels,
                                  double lambda2) {
  const Eigen::Index m = features.rows();
  if (m == 0) throw std::invalid_argument("logistic: empty sample set");
  if (labels.size() != m) throw std::invalid_argument("logistic: label count mismatch");
  if (lambda2 < 0) throw std::invalid_argument("logistic: lambda2 must be >= 0");
  for (Eigen::Index j = 0; j < m; ++j) {
    if (labels[j] != 1.0 && labels[j] != -1.0) {
      throw std::invalid_argument("logistic: labels must be +-1");
    }
  }
  const int d = static_cast<int>(features.cols());
  SmoothOracle f;
  f.dim = d;
  Eigen::MatrixXd A = features;
  Eigen::VectorXd b = labels;
  const double inv_m = 1.0 / static_cast<double>(m);
  f.value = [A, b, lambda2, inv_m](const Eigen::VectorXd& x) {
    const Eigen::VectorXd z = -(b.array() * (A * x).array()).matrix();
    double s = 0.0;
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      // log(1 + e^z), stable for large z
      s += z[j] > 0 ? z[j] + std::log1p(std::exp(-z[j])) : std::log1p(std::exp(z[j]));
    }
    return inv_m * (s + 0.5 * lambda2 * b.size() * x.squaredNorm());
  };
  f.gradient = [A, b, lambda2, inv_m](const Eigen::VectorXd& x) {
    const Eigen::VectorXd z = -(b.array() * (A * x).array()).matrix();
    Eigen::VectorXd sig(z.size());
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      sig[j] = 1.0 / (1.0 + std::exp(-z[j]));  // e^z/(1+e^z)
    }
    Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      g.noalias() += (-b[j] * sig[j]) * A.row(j).transpose();
    }
    g *= inv_m;
    g.noalias() += lambda2 * x;
    return g;
  };
  // 1/4 bound on the logistic Hessian: L = lambda2 + lambda_max((1/m) A^T A)/4
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.transpose() * A * inv_m);
  f.L = lambda2 + es.eigenvalues().maxCoeff() / 4.0;
  f.mu = lambda2;
  return f;
}

SmoothOracle make_quadratic_oracle(const Eigen::MatrixXd& A,
                                   const Eigen::VectorXd& b) {
  if (A.rows() != b.size()) throw std::invalid_argument("quadratic: shape mismatch");
  SmoothOracle f;
  f.dim = static_cast<int>(A.cols());
  Eigen::MatrixXd Am = A;
  Eigen::VectorXd bv = b;
  f.value = [Am, bv](const Eigen::VectorXd& x) {
    return (Am * x - bv).squaredNorm();
  };
  f.gradient = [Am, bv](const Eigen::VectorXd& x) {
    return Eigen::VectorXd(2.0 * Am.transpose() * (Am * x - bv));
  };
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A.transpose() * A);
  f.L = 2.0 * es.eigenvalues().maxCoeff();
  const double lmin = es.eigenvalues().minCoeff();
  f.mu = lmin > 1e-12 * es.eigenvalues().maxCoeff() ? 2.0 * lmin : 0.0;
  f.quadratic = QuadraticData{Am, bv};
  return f;
}

}  // namespace asyncdgd
