#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "tsroa/box.hpp"
#include "tsroa/polynomial.hpp"

namespace tsroa {

/// Numeric overrides that may appear as `option name = value;` lines.
struct SpecOptions {
  std::optional<double> eps;
  std::optional<double> step;
  std::optional<double> tmax;
  std::optional<double> mc;
  std::optional<double> seed;
  std::optional<double> boundary_points;
  std::optional<double> samples;

  bool operator==(const SpecOptions&) const = default;
};

/// A transform line from the system file. `analysis_box` is set when the line
/// carries its own `domain` clause (bounds in transformed coordinates).
struct TransformSpec {
  Eigen::MatrixXd T;
  std::optional<Box> analysis_box;

  bool operator==(const TransformSpec& other) const {
    return T == other.T && analysis_box == other.analysis_box;
  }
};

struct SystemSpec {
  std::vector<std::string> state_names;
  std::vector<Polynomial> rhs;
  Box domain;
  std::vector<TransformSpec> transforms;
  SpecOptions options;

  std::size_t dimension() const { return state_names.size(); }
  bool operator==(const SystemSpec&) const = default;
};

/// Parses a complete system file:
///
///   states x1 x2;
///   dx1 = -x1^2 - 2*x2 - 2*x1;
///   dx2 = x2^3 - x2;
///   domain x1 in [-1, 1], x2 in [-0.5, 0.5];
///   transform [1, 2; 0, 1] domain x1 in [-0.55, 0.55], x2 in [-0.55, 0.55];
///   option eps = 1e-6;
///
/// Throws ParseError (with line and column) for syntax problems, unknown
/// identifiers, a nonzero constant term, an invalid box or a singular
/// transform.
SystemSpec parse_system(std::string_view text);

/// Parses one polynomial expression over the given variable names.
Polynomial parse_polynomial(std::string_view text,
                            const std::vector<std::string>& vars);

/// Renders a SystemSpec back into the file format accepted by parse_system.
std::string to_string(const SystemSpec& spec);

}  // namespace tsroa
