#include "tsroa/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tsroa/errors.hpp"
#include "tsroa/random.hpp"

namespace tsroa {

namespace {

/// Flattened vector field for the integrator's inner loop.
class CompiledField {
 public:
  explicit CompiledField(std::span<const Polynomial> rhs) : n_(rhs.size()) {
    for (std::size_t k = 0; k < n_; ++k) {
      if (rhs[k].n_vars() != n_) {
        throw DimensionMismatch("vector field rows must use " + std::to_string(n_) + " variables");
      }
      for (const auto& [e, c] : rhs[k].terms()) {
        terms_.push_back({k, c, static_cast<std::size_t>(exponents_.size())});
        exponents_.insert(exponents_.end(), e.begin(), e.end());
      }
    }
  }

  std::size_t dimension() const { return n_; }

  void operator()(const Eigen::VectorXd& x, Eigen::VectorXd& out) const {
    out.setZero(static_cast<Eigen::Index>(n_));
    for (const auto& t : terms_) {
      double v = t.coeff;
      for (std::size_t i = 0; i < n_; ++i) {
        for (int a = exponents_[t.offset + i]; a > 0; --a) v *= x[static_cast<Eigen::Index>(i)];
      }
      out[static_cast<Eigen::Index>(t.row)] += v;
    }
  }

 private:
  struct Term {
    std::size_t row;
    double coeff;
    std::size_t offset;
  };
  std::size_t n_;
  std::vector<Term> terms_;
  std::vector<int> exponents_;
};

StopReason classify(const Eigen::VectorXd& x) {
  if (!x.allFinite()) return StopReason::kDiverged;
  const double norm = x.lpNorm<Eigen::Infinity>();
  if (norm >= kDivergedNorm) return StopReason::kDiverged;
  if (norm <= kConvergedNorm) return StopReason::kConverged;
  return StopReason::kTimeLimit;
}

StopReason run_rk4(const CompiledField& f, const Eigen::VectorXd& x0, double h, double t_max,
                   const std::function<void(double, const Eigen::VectorXd&)>& observer) {
  if (!(h > 0.0)) throw Error("integration step must be positive");
  if (!(t_max >= h)) throw Error("t_max must be at least one step");
  if (static_cast<std::size_t>(x0.size()) != f.dimension()) {
    throw DimensionMismatch("initial state has the wrong length");
  }
  const auto steps = static_cast<long>(std::floor(t_max / h + 1e-9));
  const auto n = x0.size();
  Eigen::VectorXd x = x0;
  Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), tmp(n);

  if (observer) observer(0.0, x);
  if (StopReason r = classify(x); r != StopReason::kTimeLimit) return r;
  for (long i = 1; i <= steps; ++i) {
    f(x, k1);
    tmp = x + 0.5 * h * k1;
    f(tmp, k2);
    tmp = x + 0.5 * h * k2;
    f(tmp, k3);
    tmp = x + h * k3;
    f(tmp, k4);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (observer) observer(static_cast<double>(i) * h, x);
    if (StopReason r = classify(x); r != StopReason::kTimeLimit) return r;
  }
  return StopReason::kTimeLimit;
}

}  // namespace

const char* to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kConverged:
      return "converged";
    case StopReason::kDiverged:
      return "diverged";
    case StopReason::kTimeLimit:
      return "time_limit";
  }
  return "unknown";
}

Trajectory integrate_rk4(std::span<const Polynomial> rhs, const Eigen::VectorXd& x0,
                         double h, double t_max) {
  Trajectory traj;
  traj.reason = integrate_rk4(rhs, x0, h, t_max, [&](double t, const Eigen::VectorXd& x) {
    traj.t.push_back(t);
    traj.x.push_back(x);
  });
  return traj;
}

StopReason integrate_rk4(std::span<const Polynomial> rhs, const Eigen::VectorXd& x0,
                         double h, double t_max,
                         const std::function<void(double, const Eigen::VectorXd&)>& observer) {
  return run_rk4(CompiledField(rhs), x0, h, t_max, observer);
}

Polynomial lyapunov_derivative(const SymMatrix& Q, std::span<const Polynomial> rhs) {
  const std::size_t n = rhs.size();
  if (Q.dimension() != n) throw DimensionMismatch("Q and vector field dimensions differ");
  // 2 x^T Q f = 2 sum_i (Q x)_i f_i
  Polynomial out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Polynomial qx(n);
    for (std::size_t j = 0; j < n; ++j) {
      qx += Polynomial::variable(n, j, Q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    out += 2.0 * (qx * rhs[i]);
  }
  return out;
}

Eigen::VectorXd sample_in_ellipsoid(const Ellipsoid& ellipsoid, std::uint64_t seed,
                                    std::uint64_t index) {
  const Eigen::MatrixXd map = std::sqrt(ellipsoid.k) * inverse_sqrt(ellipsoid.Q);
  const auto n = static_cast<Eigen::Index>(ellipsoid.dimension());
  const CounterRng rng(seed);
  const auto base = index * static_cast<std::uint64_t>(n + 1);
  Eigen::VectorXd u(n);
  for (Eigen::Index d = 0; d < n; ++d) u[d] = rng.normal(base + static_cast<std::uint64_t>(d));
  if (u.norm() == 0.0) u[0] = 1.0;
  const double radius =
      std::pow(rng.uniform(2 * (base + static_cast<std::uint64_t>(n))), 1.0 / static_cast<double>(n));
  return map * (radius * u / u.norm());
}

PieceReport check_piece(const Ellipsoid& ellipsoid, std::span<const Polynomial> rhs,
                        const VerifyOptions& options) {
  if (options.samples < 100) throw Error("check_piece needs at least 100 samples");
  if (ellipsoid.dimension() != rhs.size()) {
    throw DimensionMismatch("ellipsoid and vector field dimensions differ");
  }
  const CompiledField field(rhs);
  const Polynomial vdot = lyapunov_derivative(ellipsoid.Q, rhs);
  const Eigen::MatrixXd& Q = ellipsoid.Q.matrix();

  PieceReport report;
  report.samples = options.samples;
  report.max_vdot = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < options.samples; ++s) {
    const Eigen::VectorXd x0 = sample_in_ellipsoid(ellipsoid, options.seed, s);

    if (x0.norm() >= options.origin_exclusion) {
      const double vd = vdot.evaluate(x0);
      report.max_vdot = std::max(report.max_vdot, vd);
      if (!(vd < 0.0)) report.violations.push_back({s, x0, "vdot_nonnegative", vd});
    }

    double v_prev = x0.dot(Q * x0);
    double worst_increase = 0.0;
    const StopReason reason =
        run_rk4(field, x0, options.step, options.t_max, [&](double, const Eigen::VectorXd& x) {
          const double v = x.dot(Q * x);
          worst_increase = std::max(worst_increase, v - v_prev);
          v_prev = v;
        });
    if (reason == StopReason::kDiverged) {
      report.violations.push_back({s, x0, "diverged", 0.0});
    } else if (reason == StopReason::kTimeLimit) {
      report.violations.push_back({s, x0, "not_converged", 0.0});
    }
    if (worst_increase > options.monotone_tolerance) {
      report.violations.push_back({s, x0, "v_increase", worst_increase});
    }
  }
  return report;
}

}  // namespace tsroa
