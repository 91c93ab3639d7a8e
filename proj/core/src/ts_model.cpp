#include "tsroa/ts_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tsroa/errors.hpp"

namespace tsroa {

namespace {

double int_power(double base, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

std::pair<double, double> power_range(double lo, double hi, int a) {
  if (a == 0) return {1.0, 1.0};
  const double pl = int_power(lo, a);
  const double ph = int_power(hi, a);
  if (a % 2 == 1) return {pl, ph};
  const double top = std::max(pl, ph);
  if (lo <= 0.0 && 0.0 <= hi) return {0.0, top};
  return {std::min(pl, ph), top};
}

}  // namespace

AffineMatrix::AffineMatrix(std::size_t n, std::size_t p)
    : n_(n), p_(p), data_(n * n * (p + 1), 0.0) {}

double& AffineMatrix::coeff(std::size_t row, std::size_t col, std::size_t s) {
  return data_[index(row, col, s)];
}

double AffineMatrix::coeff(std::size_t row, std::size_t col, std::size_t s) const {
  return data_[index(row, col, s)];
}

Eigen::MatrixXd AffineMatrix::evaluate(std::span<const double> z) const {
  if (z.size() != p_) {
    throw DimensionMismatch("expected " + std::to_string(p_) +
                            " scheduling values, got " + std::to_string(z.size()));
  }
  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::MatrixXd A(n, n);
  for (std::size_t r = 0; r < n_; ++r) {
    for (std::size_t c = 0; c < n_; ++c) {
      double v = coeff(r, c, 0);
      for (std::size_t s = 0; s < p_; ++s) v += coeff(r, c, s + 1) * z[s];
      A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }
  return A;
}

AffineMatrix AffineMatrix::fix_parameter(std::size_t s, double value) const {
  if (s >= p_) throw DimensionMismatch("parameter index out of range");
  AffineMatrix out(n_, p_ - 1);
  for (std::size_t r = 0; r < n_; ++r) {
    for (std::size_t c = 0; c < n_; ++c) {
      out.coeff(r, c, 0) = coeff(r, c, 0) + coeff(r, c, s + 1) * value;
      std::size_t dst = 1;
      for (std::size_t k = 0; k < p_; ++k) {
        if (k == s) continue;
        out.coeff(r, c, dst++) = coeff(r, c, k + 1);
      }
    }
  }
  return out;
}

Factorization factorize(std::span<const Polynomial> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (rhs[k].n_vars() != n) {
      throw DimensionMismatch("right-hand side " + std::to_string(k) +
                              " has the wrong number of variables");
    }
    if (rhs[k].constant_term() != 0.0) {
      throw ModelError("row " + std::to_string(k) +
                       " has a nonzero constant term; the origin is not an equilibrium");
    }
  }

  struct Piece {
    std::size_t row, col;
    Exponents residual;
    double c;
  };
  std::vector<Piece> pieces;
  std::map<Exponents, std::size_t, GradedOrder> sched_index;
  for (std::size_t k = 0; k < n; ++k) {
    for (const auto& [e, c] : rhs[k].terms()) {
      std::size_t j = n;
      while (j-- > 0 && e[j] == 0) {
      }
      Exponents residual = e;
      --residual[j];
      if (total_degree(residual) > 0) sched_index.emplace(residual, 0);
      pieces.push_back({k, j, std::move(residual), c});
    }
  }

  Factorization out;
  for (auto& [mono, idx] : sched_index) {
    idx = out.scheduling.size();
    out.scheduling.push_back(mono);
  }
  out.A = AffineMatrix(n, out.scheduling.size());
  for (const auto& piece : pieces) {
    const std::size_t slot =
        total_degree(piece.residual) == 0 ? 0 : sched_index.at(piece.residual) + 1;
    out.A.coeff(piece.row, piece.col, slot) += piece.c;
  }
  return out;
}

std::pair<double, double> bound_monomial(const Exponents& m, const Box& box) {
  box.validate();
  if (m.size() != box.dimension()) {
    throw DimensionMismatch("monomial and box dimensions differ");
  }
  double lo = 1.0;
  double hi = 1.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] == 0) continue;
    const auto [a, b] = power_range(box.lower[i], box.upper[i], m[i]);
    const double products[] = {lo * a, lo * b, hi * a, hi * b};
    lo = *std::min_element(std::begin(products), std::end(products));
    hi = *std::max_element(std::begin(products), std::end(products));
  }
  return {lo, hi};
}

TSModel TSModel::build(std::span<const Polynomial> rhs, const Box& box) {
  box.validate();
  if (box.dimension() != rhs.size()) {
    throw DimensionMismatch("box dimension does not match the system");
  }
  Factorization fac = factorize(rhs);

  TSModel model;
  model.n_ = rhs.size();
  model.domain_ = box;
  model.affine_ = std::move(fac.A);

  // Fold degenerate variables from the back so earlier indices stay valid.
  std::vector<SchedulingVariable> sched;
  for (const auto& m : fac.scheduling) {
    const auto [lo, hi] = bound_monomial(m, box);
    sched.push_back({m, lo, hi});
  }
  for (std::size_t s = sched.size(); s-- > 0;) {
    if (sched[s].z_max - sched[s].z_min <= kDegenerateWidth) {
      model.affine_ = model.affine_.fix_parameter(s, 0.5 * (sched[s].z_min + sched[s].z_max));
      sched.erase(sched.begin() + static_cast<std::ptrdiff_t>(s));
    }
  }
  if (sched.size() > kMaxSchedulingVariables) {
    throw ModelError("model needs " + std::to_string(sched.size()) +
                     " scheduling variables; the limit is " +
                     std::to_string(kMaxSchedulingVariables));
  }
  model.sched_ = std::move(sched);

  const std::size_t p = model.sched_.size();
  const std::size_t count = std::size_t{1} << p;
  model.vertices_.reserve(count);
  std::vector<double> z(p);
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      const bool upper = (i >> (p - 1 - j)) & 1U;
      z[j] = upper ? model.sched_[j].z_max : model.sched_[j].z_min;
    }
    model.vertices_.push_back(model.affine_.evaluate(z));
  }
  return model;
}

std::vector<double> TSModel::scheduling_values(const Eigen::VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != n_) {
    throw DimensionMismatch("state vector has the wrong length");
  }
  std::vector<double> z;
  z.reserve(sched_.size());
  for (const auto& s : sched_) {
    z.push_back(Polynomial::monomial(s.monomial, 1.0).evaluate(x));
  }
  return z;
}

std::vector<double> TSModel::memberships(const Eigen::VectorXd& x) const {
  if (!domain_.contains(x, 1e-12)) {
    throw OutsideDomain("state lies outside the modeling box; memberships are undefined");
  }
  const std::vector<double> z = scheduling_values(x);
  const std::size_t p = sched_.size();
  std::vector<double> lower_weight(p);
  for (std::size_t j = 0; j < p; ++j) {
    const auto& s = sched_[j];
    lower_weight[j] = (s.z_max - z[j]) / (s.z_max - s.z_min);
  }
  std::vector<double> w(std::size_t{1} << p, 1.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      const bool upper = (i >> (p - 1 - j)) & 1U;
      w[i] *= upper ? 1.0 - lower_weight[j] : lower_weight[j];
    }
  }
  return w;
}

Eigen::VectorXd TSModel::blended_field(const Eigen::VectorXd& x) const {
  const std::vector<double> w = memberships(x);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  for (std::size_t i = 0; i < w.size(); ++i) out += w[i] * (vertices_[i] * x);
  return out;
}

}  // namespace tsroa
