#include "tsroa/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "tsroa/errors.hpp"
#include "tsroa/polynomial.hpp"
#include "tsroa/random.hpp"

namespace tsroa {

namespace {

constexpr std::size_t kMinAreaSamples = 10000;

Eigen::MatrixXd checked_inverse(const SymMatrix& P) {
  if (!(P.dimension() > 0 && min_eigenvalue(P) > 0.0)) {
    throw NotPositiveDefinite("level-set matrix is not positive definite");
  }
  return P.matrix().inverse();
}

// Radical inverse of i in the given base (van der Corput).
double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

constexpr unsigned kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                                41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

Eigen::VectorXd halton_direction(std::uint64_t index, Eigen::Index n) {
  if (static_cast<std::size_t>(n) + 1 > std::size(kPrimes)) {
    throw DimensionMismatch("boundary sampling supports at most 23 dimensions");
  }
  Eigen::VectorXd g(n);
  for (Eigen::Index d = 0; d < n; d += 2) {
    const auto pair = static_cast<std::size_t>(d);
    // Shift keeps u1 away from 0 so log(u1) stays finite.
    const double u1 = (radical_inverse(index, kPrimes[pair]) + 0.5 / 1024.0) / (1.0 + 1.0 / 1024.0);
    const double u2 = radical_inverse(index, kPrimes[pair + 1]);
    const double r = std::sqrt(-2.0 * std::log(u1));
    g[d] = r * std::cos(2.0 * std::numbers::pi * u2);
    if (d + 1 < n) g[d + 1] = r * std::sin(2.0 * std::numbers::pi * u2);
  }
  const double norm = g.norm();
  if (norm == 0.0) {
    g.setZero();
    g[0] = 1.0;
    return g;
  }
  return g / norm;
}

}  // namespace

Eigen::VectorXd Ellipsoid::support_half_widths() const {
  const Eigen::MatrixXd inv = checked_inverse(Q);
  return (k * inv.diagonal().array()).sqrt();
}

double Ellipsoid::volume() const {
  const double n = static_cast<double>(dimension());
  const double unit_ball = std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
  return unit_ball * std::pow(k, n / 2.0) / std::sqrt(Q.matrix().determinant());
}

double max_level_in_box(const SymMatrix& P, const Box& box) {
  box.validate();
  if (box.dimension() != P.dimension()) {
    throw DimensionMismatch("box and matrix dimensions differ");
  }
  const Eigen::MatrixXd inv = checked_inverse(P);
  double k = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < box.dimension(); ++i) {
    const double b = std::min(-box.lower[i], box.upper[i]);
    const auto ii = static_cast<Eigen::Index>(i);
    k = std::min(k, b * b / inv(ii, ii));
  }
  return k;
}

Ellipsoid pull_back(const Ellipsoid& ellipsoid, const Eigen::MatrixXd& T) {
  if (static_cast<std::size_t>(T.rows()) != ellipsoid.dimension()) {
    throw DimensionMismatch("transform and ellipsoid dimensions differ");
  }
  invert_transform(T);  // singularity check
  return Ellipsoid{SymMatrix(T.transpose() * ellipsoid.Q.matrix() * T), ellipsoid.k};
}

bool contains(const RoaEstimate& estimate, const Eigen::VectorXd& x) {
  return std::any_of(estimate.pieces.begin(), estimate.pieces.end(),
                     [&](const RoaPiece& p) { return p.ellipsoid.contains(x); });
}

std::vector<Eigen::VectorXd> boundary_points(const Ellipsoid& ellipsoid,
                                             std::size_t m) {
  if (m < 3) throw Error("boundary sampling needs at least 3 points");
  if (!(ellipsoid.k > 0.0)) throw Error("ellipsoid level must be positive");
  const Eigen::MatrixXd map = std::sqrt(ellipsoid.k) * inverse_sqrt(ellipsoid.Q);
  const auto n = static_cast<Eigen::Index>(ellipsoid.dimension());

  std::vector<Eigen::VectorXd> points;
  points.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    Eigen::VectorXd u(n);
    if (n == 1) {
      u[0] = (i % 2 == 0) ? 1.0 : -1.0;
    } else if (n == 2) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m);
      u << std::cos(angle), std::sin(angle);
    } else {
      u = halton_direction(i + 1, n);
    }
    points.push_back(map * u);
  }
  return points;
}

AreaEstimate union_area(const RoaEstimate& estimate, std::size_t samples,
                        std::uint64_t seed, unsigned workers) {
  if (estimate.pieces.empty()) throw Error("cannot measure an empty estimate");
  if (samples < kMinAreaSamples) {
    throw Error("union_area needs at least 10000 samples");
  }
  const auto n = static_cast<Eigen::Index>(estimate.dimension());
  Eigen::VectorXd half = Eigen::VectorXd::Zero(n);
  for (const auto& piece : estimate.pieces) {
    half = half.cwiseMax(piece.ellipsoid.support_half_widths());
  }

  const CounterRng rng(seed);
  auto count_hits = [&](std::size_t begin, std::size_t end) {
    std::size_t hits = 0;
    Eigen::VectorXd x(n);
    for (std::size_t i = begin; i < end; ++i) {
      for (Eigen::Index d = 0; d < n; ++d) {
        const auto counter = static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(n) +
                             static_cast<std::uint64_t>(d);
        x[d] = (2.0 * rng.uniform(counter) - 1.0) * half[d];
      }
      if (contains(estimate, x)) ++hits;
    }
    return hits;
  };

  workers = std::max(1U, workers);
  std::vector<std::size_t> partial(workers, 0);
  if (workers == 1) {
    partial[0] = count_hits(0, samples);
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (samples + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t begin = std::min(samples, w * chunk);
      const std::size_t end = std::min(samples, begin + chunk);
      threads.emplace_back([&, w, begin, end] { partial[w] = count_hits(begin, end); });
    }
    for (auto& t : threads) t.join();
  }

  AreaEstimate out;
  out.samples = samples;
  for (std::size_t h : partial) out.hits += h;
  out.box_volume = (2.0 * half).prod();
  const double p = static_cast<double>(out.hits) / static_cast<double>(samples);
  out.area = out.box_volume * p;
  out.std_error = out.box_volume * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  return out;
}

}  // namespace tsroa
