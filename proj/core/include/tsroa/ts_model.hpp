#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tsroa/box.hpp"
#include "tsroa/polynomial.hpp"

namespace tsroa {

/// Upper limit on the number of scheduling variables kept in a model
/// (2^p vertex matrices).
inline constexpr std::size_t kMaxSchedulingVariables = 20;

/// Bounds below this width collapse a scheduling variable into a constant.
inline constexpr double kDegenerateWidth = 1e-12;

struct SchedulingVariable {
  Exponents monomial;
  double z_min = 0.0;
  double z_max = 0.0;
};

/// n x n matrix whose entries are affine in p scheduling values:
///   A(z)_{kj} = c0_{kj} + sum_s c_{kj,s} z_s
class AffineMatrix {
 public:
  AffineMatrix() = default;
  AffineMatrix(std::size_t n, std::size_t p);

  std::size_t dimension() const { return n_; }
  std::size_t num_parameters() const { return p_; }

  /// Coefficient slot: s == 0 is the constant part, s >= 1 multiplies z_{s-1}.
  double& coeff(std::size_t row, std::size_t col, std::size_t s);
  double coeff(std::size_t row, std::size_t col, std::size_t s) const;

  Eigen::MatrixXd evaluate(std::span<const double> z) const;

  /// Replaces parameter `s` by the constant `value` and removes it.
  AffineMatrix fix_parameter(std::size_t s, double value) const;

 private:
  std::size_t index(std::size_t row, std::size_t col, std::size_t s) const {
    return (row * n_ + col) * (p_ + 1) + s;
  }

  std::size_t n_ = 0;
  std::size_t p_ = 0;
  std::vector<double> data_;
};

struct Factorization {
  AffineMatrix A;
  /// Scheduling monomials in graded order, one per AffineMatrix parameter.
  std::vector<Exponents> scheduling;
};

/// Writes f(x) = A(z(x)) x. Each monomial c*x^a of row k is split by
/// factoring out x_j for the largest j with a_j >= 1; the residual monomial
/// x^(a - e_j) is either a constant (degree 0) or becomes a scheduling
/// variable on entry (k, j).
/// Throws ModelError if any row has a nonzero constant term.
Factorization factorize(std::span<const Polynomial> rhs);

/// Exact range of x^m over the box.
std::pair<double, double> bound_monomial(const Exponents& m, const Box& box);

/// Takagi-Sugeno model obtained by sector-nonlinearity decomposition of a
/// polynomial vector field over a box. Immutable once built.
///
/// Vertex i places scheduling variable j at its upper bound iff bit (p-1-j)
/// of i is set, so z_1 is the most significant bit.
class TSModel {
 public:
  static TSModel build(std::span<const Polynomial> rhs, const Box& box);

  std::size_t dimension() const { return n_; }
  const std::vector<SchedulingVariable>& scheduling() const { return sched_; }
  const AffineMatrix& affine() const { return affine_; }
  const std::vector<Eigen::MatrixXd>& vertices() const { return vertices_; }
  const Box& domain() const { return domain_; }

  /// z(x) for the retained scheduling variables.
  std::vector<double> scheduling_values(const Eigen::VectorXd& x) const;

  /// Membership weights w_i(x), length 2^p. Throws OutsideDomain if x is not
  /// in the modeling box.
  std::vector<double> memberships(const Eigen::VectorXd& x) const;

  /// sum_i w_i(x) A_i x
  Eigen::VectorXd blended_field(const Eigen::VectorXd& x) const;

 private:
  std::size_t n_ = 0;
  std::vector<SchedulingVariable> sched_;
  AffineMatrix affine_;
  std::vector<Eigen::MatrixXd> vertices_;
  Box domain_;
};

}  // namespace tsroa
