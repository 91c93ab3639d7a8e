#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tsroa/geometry.hpp"
#include "tsroa/polynomial.hpp"

namespace tsroa {

enum class StopReason { kConverged, kDiverged, kTimeLimit };

const char* to_string(StopReason reason);

inline constexpr double kConvergedNorm = 1e-8;
inline constexpr double kDivergedNorm = 1e3;

struct Trajectory {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x;
  StopReason reason = StopReason::kTimeLimit;
};

/// Classical fourth-order Runge-Kutta with fixed step h. Stops early when
/// ||x||_inf <= 1e-8 (converged) or ||x||_inf >= 1e3 or a non-finite state
/// appears (diverged).
Trajectory integrate_rk4(std::span<const Polynomial> rhs, const Eigen::VectorXd& x0,
                         double h, double t_max);

/// Same integration without storing the path; `observer(t, x)` sees every
/// state including x0.
StopReason integrate_rk4(std::span<const Polynomial> rhs, const Eigen::VectorXd& x0,
                         double h, double t_max,
                         const std::function<void(double, const Eigen::VectorXd&)>& observer);

/// dV/dt = 2 x^T Q f(x) as a polynomial.
Polynomial lyapunov_derivative(const SymMatrix& Q, std::span<const Polynomial> rhs);

struct VerifyOptions {
  std::size_t samples = 500;
  std::uint64_t seed = 1;
  double step = 1e-3;
  double t_max = 50.0;
  /// Allowed per-step increase of V along a trajectory.
  double monotone_tolerance = 1e-9;
  /// Points this close to the origin skip the strict V-dot test.
  double origin_exclusion = 1e-6;
};

struct Violation {
  std::size_t sample_index = 0;
  Eigen::VectorXd point;
  std::string kind;  ///< "vdot_nonnegative", "diverged", "not_converged", "v_increase"
  double value = 0.0;
};

struct PieceReport {
  std::size_t samples = 0;
  double max_vdot = 0.0;  ///< largest V-dot seen among tested samples
  std::vector<Violation> violations;

  bool clean() const { return violations.empty(); }
};

/// Uniform sample in the ellipsoid (deterministic in seed and index).
Eigen::VectorXd sample_in_ellipsoid(const Ellipsoid& ellipsoid, std::uint64_t seed,
                                    std::uint64_t index);

/// Samples points uniformly inside the ellipsoid and checks V-dot < 0,
/// trajectory convergence and monotone decrease of V along each trajectory.
/// Violations are sorted by sample index.
PieceReport check_piece(const Ellipsoid& ellipsoid, std::span<const Polynomial> rhs,
                        const VerifyOptions& options = {});

}  // namespace tsroa
