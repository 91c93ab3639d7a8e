#include "tsroa/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "tsroa/errors.hpp"

namespace tsroa {

namespace {

void require_same_vars(const Polynomial& p, const Polynomial& q) {
  if (p.n_vars() != q.n_vars()) {
    throw DimensionMismatch("polynomials have " + std::to_string(p.n_vars()) +
                            " and " + std::to_string(q.n_vars()) +
                            " variables");
  }
}

double int_power(double base, int e) {
  double result = 1.0;
  while (e > 0) {
    if (e & 1) result *= base;
    base *= base;
    e >>= 1;
  }
  return result;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

int total_degree(const Exponents& e) {
  return std::accumulate(e.begin(), e.end(), 0);
}

bool GradedOrder::operator()(const Exponents& a, const Exponents& b) const {
  const int da = total_degree(a);
  const int db = total_degree(b);
  if (da != db) return da < db;
  return b < a;
}

Polynomial Polynomial::constant(std::size_t n_vars, double c) {
  Polynomial p(n_vars);
  p.add_term(Exponents(n_vars, 0), c);
  return p;
}

Polynomial Polynomial::variable(std::size_t n_vars, std::size_t index,
                                double c) {
  if (index >= n_vars) throw DimensionMismatch("variable index out of range");
  Exponents e(n_vars, 0);
  e[index] = 1;
  Polynomial p(n_vars);
  p.add_term(e, c);
  return p;
}

Polynomial Polynomial::monomial(Exponents e, double c) {
  Polynomial p(e.size());
  p.add_term(e, c);
  return p;
}

int Polynomial::degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
  return d;
}

double Polynomial::coefficient(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::constant_term() const {
  return coefficient(Exponents(n_vars_, 0));
}

void Polynomial::add_term(const Exponents& e, double c) {
  if (e.size() != n_vars_) {
    throw DimensionMismatch("exponent vector length " +
                            std::to_string(e.size()) + " != " +
                            std::to_string(n_vars_));
  }
  if (std::any_of(e.begin(), e.end(), [](int a) { return a < 0; })) {
    throw Error("negative exponent in monomial");
  }
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

double Polynomial::evaluate(std::span<const double> x) const {
  if (x.size() != n_vars_) {
    throw DimensionMismatch("evaluation point has " + std::to_string(x.size()) +
                            " entries, polynomial has " +
                            std::to_string(n_vars_) + " variables");
  }
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double term = c;
    for (std::size_t i = 0; i < n_vars_; ++i) {
      if (e[i] != 0) term *= int_power(x[i], e[i]);
    }
    sum += term;
  }
  return sum;
}

Polynomial Polynomial::pruned(double tol) const {
  Polynomial out(n_vars_);
  for (const auto& [e, c] : terms_) {
    if (std::abs(c) > tol) out.terms_.emplace_hint(out.terms_.end(), e, c);
  }
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& q) {
  require_same_vars(*this, q);
  for (const auto& [e, c] : q.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& q) {
  require_same_vars(*this, q);
  for (const auto& [e, c] : q.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double c) {
  if (c == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= c;
    if (it->second == 0.0) {  // underflow
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
  return *this;
}

Polynomial operator*(const Polynomial& p, const Polynomial& q) {
  require_same_vars(p, q);
  Polynomial out(p.n_vars());
  if (p.is_zero() || q.is_zero()) return out;
  if (p.degree() + q.degree() > kMaxDegree) {
    throw DegreeOverflow("product degree " +
                         std::to_string(p.degree() + q.degree()) +
                         " exceeds the cap of " + std::to_string(kMaxDegree));
  }
  Exponents e(p.n_vars());
  for (const auto& [ea, ca] : p.terms()) {
    for (const auto& [eb, cb] : q.terms()) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

Polynomial add(const Polynomial& p, const Polynomial& q) { return p + q; }

Polynomial mul(const Polynomial& p, const Polynomial& q) { return p * q; }

Polynomial pow(const Polynomial& p, int exponent) {
  if (exponent < 0) throw Error("negative polynomial power");
  if (!p.is_zero() && p.degree() * exponent > kMaxDegree) {
    throw DegreeOverflow("power degree " +
                         std::to_string(p.degree() * exponent) +
                         " exceeds the cap of " + std::to_string(kMaxDegree));
  }
  Polynomial result = Polynomial::constant(p.n_vars(), 1.0);
  Polynomial base = p;
  while (exponent > 0) {
    if (exponent & 1) result = result * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

double evaluate(const Polynomial& p, std::span<const double> x) {
  return p.evaluate(x);
}

double max_coefficient_distance(const Polynomial& p, const Polynomial& q) {
  require_same_vars(p, q);
  double worst = 0.0;
  for (const auto& [e, c] : p.terms()) {
    worst = std::max(worst, std::abs(c - q.coefficient(e)));
  }
  for (const auto& [e, c] : q.terms()) {
    if (p.terms().count(e) == 0) worst = std::max(worst, std::abs(c));
  }
  return worst;
}

Polynomial substitute_linear(const Polynomial& p, const Eigen::MatrixXd& M) {
  const std::size_t n = p.n_vars();
  if (static_cast<std::size_t>(M.rows()) != n ||
      static_cast<std::size_t>(M.cols()) != n) {
    throw DimensionMismatch("substitution matrix must be " + std::to_string(n) +
                            "x" + std::to_string(n));
  }
  if (p.degree() > kMaxDegree) throw DegreeOverflow("degree cap exceeded");

  // powers[i][a] = (sum_j M_ij y_j)^a, built on demand.
  std::vector<std::vector<Polynomial>> powers(n);
  auto linear_power = [&](std::size_t i, int a) -> const Polynomial& {
    auto& cache = powers[i];
    if (cache.empty()) {
      cache.push_back(Polynomial::constant(n, 1.0));
      Polynomial form(n);
      for (std::size_t j = 0; j < n; ++j) {
        Exponents e(n, 0);
        e[j] = 1;
        form.add_term(e, M(static_cast<Eigen::Index>(i),
                           static_cast<Eigen::Index>(j)));
      }
      cache.push_back(std::move(form));
    }
    while (static_cast<int>(cache.size()) <= a) {
      cache.push_back(cache.back() * cache[1]);
    }
    return cache[static_cast<std::size_t>(a)];
  };

  Polynomial out(n);
  for (const auto& [e, c] : p.terms()) {
    Polynomial term = Polynomial::constant(n, c);
    for (std::size_t i = 0; i < n; ++i) {
      if (e[i] > 0) term = term * linear_power(i, e[i]);
    }
    out += term;
  }
  return out;
}

Eigen::MatrixXd invert_transform(const Eigen::MatrixXd& T) {
  if (T.rows() != T.cols() || T.rows() == 0) {
    throw DimensionMismatch("transform must be a non-empty square matrix");
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(T);
  if (!(std::abs(lu.determinant()) > 1e-12)) {
    throw SingularMatrix("transform matrix is singular (|det| <= 1e-12)");
  }
  return lu.inverse();
}

std::vector<Polynomial> transform_system(std::span<const Polynomial> rhs,
                                         const Eigen::MatrixXd& T) {
  const std::size_t n = rhs.size();
  if (static_cast<std::size_t>(T.rows()) != n) {
    throw DimensionMismatch("transform dimension does not match the system");
  }
  const Eigen::MatrixXd T_inv = invert_transform(T);

  std::vector<Polynomial> substituted;
  substituted.reserve(n);
  for (const auto& f : rhs) substituted.push_back(substitute_linear(f, T_inv));

  std::vector<Polynomial> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Polynomial row(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double t = T(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j));
      if (t != 0.0) row += t * substituted[j];
    }
    out.push_back(row.pruned(kTransformDustTolerance));
  }
  return out;
}

std::string to_string(const Polynomial& p, std::span<const std::string> names) {
  if (names.size() != p.n_vars()) {
    throw DimensionMismatch("name list does not match polynomial variables");
  }
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [e, c] = *it;
    const bool constant = total_degree(e) == 0;
    if (first) {
      if (c < 0) os << "-";
    } else {
      os << (c < 0 ? " - " : " + ");
    }
    first = false;
    const double mag = std::abs(c);
    bool need_star = false;
    if (constant || mag != 1.0) {
      os << format_number(mag);
      need_star = true;
    }
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (need_star) os << "*";
      os << names[i];
      if (e[i] > 1) os << "^" << e[i];
      need_star = true;
    }
  }
  return os.str();
}

Eigen::MatrixXd linear_part(std::span<const Polynomial> rhs) {
  const auto n = static_cast<Eigen::Index>(rhs.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) {
      Exponents e(rhs.size(), 0);
      e[static_cast<std::size_t>(j)] = 1;
      A(k, j) = rhs[static_cast<std::size_t>(k)].coefficient(e);
    }
  }
  return A;
}

}  // namespace tsroa
