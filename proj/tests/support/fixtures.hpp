#pragma once

// Shared data for the tests. Everything here is built through the Polynomial
// API directly so parser bugs cannot leak into the other suites.

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tsroa/box.hpp"
#include "tsroa/polynomial.hpp"

namespace tsroa::testing {

inline Polynomial mono(int a, int b, double c) { return Polynomial::monomial({a, b}, c); }

/// dx1 = -x1^2 - 2 x2 - 2 x1,  dx2 = x2^3 - x2
inline std::vector<Polynomial> worked_rhs() {
  return {mono(2, 0, -1.0) + mono(0, 1, -2.0) + mono(1, 0, -2.0),
          mono(0, 3, 1.0) + mono(0, 1, -1.0)};
}

inline Box worked_box() { return Box{{-1.0, -0.5}, {1.0, 0.5}}; }

/// The coordinate change xbar = T x used for enlargement.
inline Eigen::MatrixXd worked_T() {
  Eigen::MatrixXd T(2, 2);
  T << 1, 2, 0, 1;
  return T;
}

inline Box worked_transformed_box() { return Box::symmetric({0.55, 0.55}); }

/// Reference certificate for the worked system, four decimals.
inline Eigen::MatrixXd reference_P() {
  Eigen::MatrixXd P(2, 2);
  P << 0.2017, -0.1326, -0.1326, 0.7656;
  return P;
}

/// dxbar1 = -xbar1^2 + 4 xbar1 xbar2 - 2 xbar1 + 2 xbar2^3 - 4 xbar2^2
/// dxbar2 = xbar2^3 - xbar2
inline std::vector<Polynomial> worked_transformed_rhs() {
  return {mono(2, 0, -1.0) + mono(1, 1, 4.0) + mono(1, 0, -2.0) + mono(0, 3, 2.0) +
              mono(0, 2, -4.0),
          mono(0, 3, 1.0) + mono(0, 1, -1.0)};
}

/// The four vertex matrices of the worked system, z1 = x1 in [-1, 1] most
/// significant, z2 = x2^2 in [0, 0.25].
inline std::vector<Eigen::MatrixXd> worked_vertices() {
  std::vector<Eigen::MatrixXd> out;
  for (double a11 : {-1.0, -3.0}) {
    for (double a22 : {-1.0, -0.75}) {
      Eigen::MatrixXd A(2, 2);
      A << a11, -2.0, 0.0, a22;
      out.push_back(A);
    }
  }
  return out;
}

/// Random polynomial vector field with no constant term.
inline std::vector<Polynomial> random_system(std::mt19937_64& rng, std::size_t n, int max_degree,
                                             int terms_per_row) {
  std::uniform_int_distribution<int> deg(1, max_degree);
  std::uniform_int_distribution<std::size_t> var(0, n - 1);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::vector<Polynomial> rhs;
  for (std::size_t k = 0; k < n; ++k) {
    Polynomial p(n);
    for (int t = 0; t < terms_per_row; ++t) {
      Exponents e(n, 0);
      const int d = deg(rng);
      for (int s = 0; s < d; ++s) ++e[var(rng)];
      p.add_term(e, coef(rng));
    }
    rhs.push_back(p);
  }
  return rhs;
}

inline Eigen::VectorXd random_point(std::mt19937_64& rng, const Box& box) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(box.dimension()));
  for (std::size_t i = 0; i < box.dimension(); ++i) {
    x[static_cast<Eigen::Index>(i)] =
        std::uniform_real_distribution<double>(box.lower[i], box.upper[i])(rng);
  }
  return x;
}

/// Random SPD matrix with eigenvalues in [lo, hi].
inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, Eigen::Index n, double lo, double hi) {
  std::normal_distribution<double> g;
  Eigen::MatrixXd R(n, n);
  for (Eigen::Index i = 0; i < R.size(); ++i) R.data()[i] = g(rng);
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(R);
  const Eigen::MatrixXd Q = qr.householderQ();
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) d[i] = std::uniform_real_distribution<double>(lo, hi)(rng);
  Eigen::MatrixXd S = Q * d.asDiagonal() * Q.transpose();
  return 0.5 * (S + S.transpose());
}

/// Vertex set certified by P0 by construction: A_i = P0^-1 (S_i - Q_i / 2),
/// S_i skew, Q_i SPD, so P0 A_i + A_i^T P0 = -Q_i.
struct ConstructedInstance {
  Eigen::MatrixXd P0;
  std::vector<Eigen::MatrixXd> vertices;
};

inline ConstructedInstance constructed_feasible(std::mt19937_64& rng, Eigen::Index n,
                                                std::size_t r) {
  std::normal_distribution<double> g;
  ConstructedInstance out;
  out.P0 = random_spd(rng, n, 0.2, 2.0);
  const Eigen::MatrixXd P0_inv = out.P0.inverse();
  for (std::size_t i = 0; i < r; ++i) {
    Eigen::MatrixXd W(n, n);
    for (Eigen::Index k = 0; k < W.size(); ++k) W.data()[k] = g(rng);
    const Eigen::MatrixXd S = W - W.transpose();
    const Eigen::MatrixXd Q = random_spd(rng, n, 0.1, 2.0);
    out.vertices.push_back(P0_inv * (S - 0.5 * Q));
  }
  return out;
}

/// Does {x^T P x <= k} fit in the box? Checked on boundary samples only,
/// mapped through a Cholesky factor.
inline bool fits_by_sampling(const Eigen::MatrixXd& P, const Box& box, double k,
                             const std::vector<Eigen::VectorXd>& directions) {
  const Eigen::MatrixXd L = P.llt().matrixL();
  for (const auto& u : directions) {
    // x = sqrt(k) L^-T u gives x^T P x = k for unit u.
    const Eigen::VectorXd x = std::sqrt(k) * L.transpose().triangularView<Eigen::Upper>().solve(u);
    if (!box.contains(x)) return false;
  }
  return true;
}

/// Brute-force level: bisection on k, each candidate checked on 10^5
/// boundary samples. Knows nothing about the closed form.
inline double bisection_level_oracle(const Eigen::MatrixXd& P, const Box& box,
                                     std::mt19937_64& rng) {
  const auto n = P.rows();
  std::vector<Eigen::VectorXd> dirs;
  std::normal_distribution<double> g;
  // In 2D use a dense angle grid; otherwise random directions.
  for (int s = 0; s < 100000; ++s) {
    Eigen::VectorXd u(n);
    if (n == 2) {
      const double t = 2.0 * std::numbers::pi * s / 100000.0;
      u << std::cos(t), std::sin(t);
    } else {
      for (auto& v : u) v = g(rng);
      u.normalize();
    }
    dirs.push_back(u);
  }
  double lo = 0.0, hi = 1.0;
  while (fits_by_sampling(P, box, hi, dirs)) hi *= 2.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (fits_by_sampling(P, box, mid, dirs) ? lo : hi) = mid;
  }
  return lo;
}

inline std::string data_path(const std::string& name) {
  return std::string(TSROA_DATA_DIR) + "/" + name;
}

}  // namespace tsroa::testing
