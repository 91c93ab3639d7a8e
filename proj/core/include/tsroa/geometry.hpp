#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "tsroa/box.hpp"
#include "tsroa/eigen_sym.hpp"
#include "tsroa/lmi.hpp"

namespace tsroa {

/// Origin-centered ellipsoid {x : x^T Q x <= k}.
struct Ellipsoid {
  SymMatrix Q;
  double k = 0.0;

  std::size_t dimension() const { return Q.dimension(); }
  double form(const Eigen::VectorXd& x) const { return x.dot(Q.matrix() * x); }
  bool contains(const Eigen::VectorXd& x, double rel_tol = 1e-9) const {
    return form(x) <= k * (1.0 + rel_tol);
  }
  /// Half-width of the axis-aligned bounding box along each coordinate.
  Eigen::VectorXd support_half_widths() const;
  /// Closed-form n-dimensional volume.
  double volume() const;
};

/// One certified piece of a region-of-attraction estimate. `ellipsoid` is in
/// original coordinates; `transform` is the T (xbar = T x) it was found under.
struct RoaPiece {
  Ellipsoid ellipsoid;
  Eigen::MatrixXd transform;
  Box analysis_box;
  std::optional<LyapunovCertificate> certificate;
};

struct RoaEstimate {
  std::vector<RoaPiece> pieces;

  std::size_t dimension() const {
    return pieces.empty() ? 0 : pieces.front().ellipsoid.dimension();
  }
};

/// Largest k with {x^T P x <= k} inside the box:
///   k = min_i b_i^2 / (P^-1)_ii,  b_i = min(-lower_i, upper_i).
/// Throws NotPositiveDefinite if P is not positive definite.
double max_level_in_box(const SymMatrix& P, const Box& box);

/// Maps {xbar^T Pbar xbar <= k} with xbar = T x back to x-coordinates:
/// Q = T^T Pbar T, same k.
Ellipsoid pull_back(const Ellipsoid& ellipsoid, const Eigen::MatrixXd& T);

/// True iff x lies in at least one piece (boundary included up to 1e-9).
bool contains(const RoaEstimate& estimate, const Eigen::VectorXd& x);

/// m points on the boundary x^T Q x = k. Two-dimensional ellipsoids use
/// equally spaced angles; higher dimensions use Halton directions.
std::vector<Eigen::VectorXd> boundary_points(const Ellipsoid& ellipsoid,
                                             std::size_t m);

struct AreaEstimate {
  double area = 0.0;
  double std_error = 0.0;
  double box_volume = 0.0;
  std::size_t hits = 0;
  std::size_t samples = 0;
};

/// Monte Carlo area (volume for n != 2) of the union, sampled uniformly over
/// the union's bounding box. Draw i depends only on (seed, i), so the result
/// is independent of `workers`.
AreaEstimate union_area(const RoaEstimate& estimate, std::size_t samples,
                        std::uint64_t seed, unsigned workers = 1);

}  // namespace tsroa
