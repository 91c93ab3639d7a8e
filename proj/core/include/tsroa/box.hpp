#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace tsroa {

/// Axis-aligned box that strictly contains the origin.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dimension() const { return lower.size(); }

  /// Throws InvalidBox unless lower[i] < 0 < upper[i] for every coordinate.
  void validate() const;

  /// Symmetric box [-h_i, h_i].
  static Box symmetric(const std::vector<double>& half_widths);

  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const;

  bool operator==(const Box&) const = default;
};

}  // namespace tsroa
