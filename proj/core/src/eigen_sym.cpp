#include "tsroa/eigen_sym.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "tsroa/errors.hpp"

namespace tsroa {

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kRelativeOffTolerance = 1e-12;

double off_diagonal_norm(const Eigen::MatrixXd& a) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (i != j) sum += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(sum);
}

}  // namespace

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw DimensionMismatch("symmetric matrix must be square");
  m_ = 0.5 * (m + m.transpose());
}

SymMatrix SymMatrix::identity(std::size_t n) {
  const auto k = static_cast<Eigen::Index>(n);
  return SymMatrix(Eigen::MatrixXd::Identity(k, k));
}

SymEigen eigen_sym(const SymMatrix& m) {
  const Eigen::Index n = m.matrix().rows();
  Eigen::MatrixXd a = m.matrix();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double threshold = kRelativeOffTolerance * m.matrix().norm();

  int sweep = 0;
  while (off_diagonal_norm(a) > threshold) {
    if (sweep == kMaxSweeps) {
      throw NoConvergence("Jacobi eigensolver did not converge in 100 sweeps");
    }
    ++sweep;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle that annihilates a(p, q) (Golub & Van Loan, sym.schur2).
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(1.0 + theta * theta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
  SymEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.values[k] = a(src, src);
    out.vectors.col(k) = v.col(src);
  }
  out.sweeps = sweep;
  return out;
}

double min_eigenvalue(const SymMatrix& m) { return eigen_sym(m).values[0]; }

double max_eigenvalue(const SymMatrix& m) {
  const auto e = eigen_sym(m);
  return e.values[e.values.size() - 1];
}

Eigen::MatrixXd inverse_sqrt(const SymMatrix& m) {
  const SymEigen e = eigen_sym(m);
  if (!(e.values.size() > 0 && e.values[0] > 0.0)) {
    throw NotPositiveDefinite("matrix is not positive definite");
  }
  const Eigen::VectorXd scale = e.values.array().rsqrt();
  return e.vectors * scale.asDiagonal() * e.vectors.transpose();
}

SymMatrix lyapunov_operator(const SymMatrix& P, const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols() || static_cast<std::size_t>(A.rows()) != P.dimension()) {
    throw DimensionMismatch("Lyapunov operator dimensions differ");
  }
  const Eigen::MatrixXd PA = P.matrix() * A;
  return SymMatrix(PA + PA.transpose());
}

}  // namespace tsroa
