#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace tsroa {

/// Exponent vector of a monomial, one entry per state variable.
using Exponents = std::vector<int>;

/// Hard cap on total degree for any polynomial the library builds.
inline constexpr int kMaxDegree = 16;

int total_degree(const Exponents& e);

/// Graded order: lower total degree first; within a degree, larger leading
/// exponents first, so x1 < x2 < x1^2 < x1*x2 < x2^2 < ...
struct GradedOrder {
  bool operator()(const Exponents& a, const Exponents& b) const;
};

/// Sparse multivariate polynomial with real coefficients over a fixed number
/// of variables. Stored coefficients are never exactly zero.
class Polynomial {
 public:
  using TermMap = std::map<Exponents, double, GradedOrder>;

  explicit Polynomial(std::size_t n_vars = 0) : n_vars_(n_vars) {}

  static Polynomial constant(std::size_t n_vars, double c);
  /// c * x_index
  static Polynomial variable(std::size_t n_vars, std::size_t index,
                             double c = 1.0);
  static Polynomial monomial(Exponents e, double c);

  std::size_t n_vars() const { return n_vars_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  /// Total degree; -1 for the zero polynomial.
  int degree() const;
  double coefficient(const Exponents& e) const;
  double constant_term() const;

  /// Adds c * x^e into the polynomial, pruning the term if it cancels exactly.
  void add_term(const Exponents& e, double c);

  double evaluate(std::span<const double> x) const;
  double evaluate(const Eigen::VectorXd& x) const {
    return evaluate(std::span<const double>(x.data(), x.size()));
  }

  /// Copy with every |coefficient| <= tol removed.
  Polynomial pruned(double tol) const;

  Polynomial& operator+=(const Polynomial& q);
  Polynomial& operator-=(const Polynomial& q);
  Polynomial& operator*=(double c);

  friend Polynomial operator+(Polynomial p, const Polynomial& q) { return p += q; }
  friend Polynomial operator-(Polynomial p, const Polynomial& q) { return p -= q; }
  friend Polynomial operator-(Polynomial p) { return p *= -1.0; }
  friend Polynomial operator*(Polynomial p, double c) { return p *= c; }
  friend Polynomial operator*(double c, Polynomial p) { return p *= c; }
  friend Polynomial operator*(const Polynomial& p, const Polynomial& q);

  bool operator==(const Polynomial&) const = default;

 private:
  std::size_t n_vars_;
  TermMap terms_;
};

Polynomial add(const Polynomial& p, const Polynomial& q);
Polynomial mul(const Polynomial& p, const Polynomial& q);
Polynomial pow(const Polynomial& p, int exponent);
double evaluate(const Polynomial& p, std::span<const double> x);

/// Largest coefficient difference over the union of supports.
double max_coefficient_distance(const Polynomial& p, const Polynomial& q);

/// q(y) = p(M y).
Polynomial substitute_linear(const Polynomial& p, const Eigen::MatrixXd& M);

/// Inverse via LU with partial pivoting; throws SingularMatrix if |det| <= 1e-12.
Eigen::MatrixXd invert_transform(const Eigen::MatrixXd& T);

/// Coefficient threshold used to clear floating-point dust after a transform.
inline constexpr double kTransformDustTolerance = 1e-12;

/// Vector field in new coordinates xbar = T x:  fbar(xbar) = T f(T^-1 xbar).
std::vector<Polynomial> transform_system(std::span<const Polynomial> rhs,
                                         const Eigen::MatrixXd& T);

/// Human-readable form that parse_polynomial accepts back. Coefficients are
/// printed with 17 significant digits.
std::string to_string(const Polynomial& p, std::span<const std::string> names);

/// Linear part as a dense matrix: row k holds the degree-1 coefficients of rhs[k].
Eigen::MatrixXd linear_part(std::span<const Polynomial> rhs);

}  // namespace tsroa
