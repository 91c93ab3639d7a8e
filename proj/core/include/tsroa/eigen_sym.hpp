#pragma once

#include <cstddef>

#include <Eigen/Dense>

namespace tsroa {

/// Symmetric matrix. The constructor replaces its argument by (M + M^T) / 2,
/// so entries(i, j) == entries(j, i) holds exactly.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(const Eigen::MatrixXd& m);

  static SymMatrix identity(std::size_t n);

  std::size_t dimension() const { return static_cast<std::size_t>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const { return m_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

  bool operator==(const SymMatrix& other) const { return m_ == other.m_; }

 private:
  Eigen::MatrixXd m_;
};

struct SymEigen {
  Eigen::VectorXd values;   ///< ascending
  Eigen::MatrixXd vectors;  ///< column i pairs with values[i]
  int sweeps = 0;
};

/// Cyclic Jacobi eigensolver. Iterates until the off-diagonal Frobenius norm
/// is at most 1e-12 * ||M||_F; throws NoConvergence after 100 sweeps.
SymEigen eigen_sym(const SymMatrix& m);

double min_eigenvalue(const SymMatrix& m);
double max_eigenvalue(const SymMatrix& m);

/// M^(-1/2) for a positive definite M; throws NotPositiveDefinite otherwise.
Eigen::MatrixXd inverse_sqrt(const SymMatrix& m);

/// P A + A^T P
SymMatrix lyapunov_operator(const SymMatrix& P, const Eigen::MatrixXd& A);

}  // namespace tsroa
