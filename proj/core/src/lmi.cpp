#include "tsroa/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tsroa/errors.hpp"
#include "tsroa/random.hpp"

namespace tsroa {

namespace {

constexpr double kActiveTolerance = 1e-9;
constexpr double kSingularTolerance = 1e-10;

/// Homogeneous LMI system over a decision vector x in R^d:
///   F_c(x) = sum_k x_k F_{c,k},  maximize min_c lambda_min(F_c(x))
///   subject to normal^T x = target.
struct MarginProblem {
  std::vector<std::vector<Eigen::MatrixXd>> blocks;  // blocks[c][k]
  Eigen::VectorXd normal;
  double target = 1.0;

  Eigen::Index dim() const { return normal.size(); }

  Eigen::MatrixXd assemble(std::size_t c, const Eigen::VectorXd& x) const {
    const auto& basis = blocks[c];
    Eigen::MatrixXd F = Eigen::MatrixXd::Zero(basis[0].rows(), basis[0].cols());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
      if (x[k] != 0.0) F += x[k] * basis[static_cast<std::size_t>(k)];
    }
    return F;
  }
};

struct MarginEval {
  double phi = 0.0;
  Eigen::VectorXd subgradient;
};

MarginEval evaluate_margin(const MarginProblem& prob, const Eigen::VectorXd& x) {
  const std::size_t nc = prob.blocks.size();
  std::vector<SymEigen> eigs;
  eigs.reserve(nc);
  double phi = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < nc; ++c) {
    eigs.push_back(eigen_sym(SymMatrix(prob.assemble(c, x))));
    phi = std::min(phi, eigs.back().values[0]);
  }
  MarginEval out{phi, Eigen::VectorXd::Zero(prob.dim())};
  int active = 0;
  for (std::size_t c = 0; c < nc; ++c) {
    if (eigs[c].values[0] > phi + kActiveTolerance) continue;
    const Eigen::VectorXd v = eigs[c].vectors.col(0);
    for (Eigen::Index k = 0; k < prob.dim(); ++k) {
      out.subgradient[k] += v.dot(prob.blocks[c][static_cast<std::size_t>(k)] * v);
    }
    ++active;
  }
  out.subgradient /= active;
  return out;
}

struct AscentResult {
  Eigen::VectorXd x;
  double phi = -std::numeric_limits<double>::infinity();
  int iterations = 0;
};

AscentResult ascend(const MarginProblem& prob, Eigen::VectorXd x,
                    const SolverOptions& opts) {
  const double a2 = prob.normal.squaredNorm();
  auto renormalize = [&](Eigen::VectorXd& v) {
    const double s = prob.normal.dot(v);
    if (s > 0.0) v *= prob.target / s;
  };
  renormalize(x);
  const double step0 = 0.25 * x.norm();

  AscentResult best{x, -std::numeric_limits<double>::infinity(), 0};
  int since_improvement = 0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    MarginEval ev = evaluate_margin(prob, x);
    best.iterations = it + 1;
    if (ev.phi > best.phi) {
      if (ev.phi > best.phi + 1e-12 * std::max(1.0, std::abs(best.phi))) {
        since_improvement = 0;
      }
      best.phi = ev.phi;
      best.x = x;
    }
    if (++since_improvement > opts.stall_iterations) break;
    if (!opts.maximize_margin && best.phi >= opts.eps) break;

    Eigen::VectorXd g = ev.subgradient - (prob.normal.dot(ev.subgradient) / a2) * prob.normal;
    const double gnorm = g.norm();
    if (!(gnorm > 0.0)) break;  // stationary: phi is maximal on the slice
    x += (step0 / std::sqrt(static_cast<double>(it) + 1.0) / gnorm) * g;
    renormalize(x);
  }
  return best;
}

/// Orthonormal basis of the symmetric n x n matrices (Frobenius inner product).
std::vector<Eigen::MatrixXd> symmetric_basis(Eigen::Index n) {
  std::vector<Eigen::MatrixXd> basis;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n);
      if (i == j) {
        E(i, i) = 1.0;
      } else {
        E(i, j) = E(j, i) = 1.0 / std::sqrt(2.0);
      }
      basis.push_back(std::move(E));
    }
  }
  return basis;
}

Eigen::VectorXd to_coordinates(const Eigen::MatrixXd& S,
                               const std::vector<Eigen::MatrixXd>& basis) {
  Eigen::VectorXd x(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    x[static_cast<Eigen::Index>(k)] = (S.array() * basis[k].array()).sum();
  }
  return x;
}

Eigen::MatrixXd from_coordinates(const Eigen::VectorXd& x,
                                 const std::vector<Eigen::MatrixXd>& basis,
                                 Eigen::Index offset = 0) {
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(basis[0].rows(), basis[0].cols());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    S += x[offset + static_cast<Eigen::Index>(k)] * basis[k];
  }
  return S;
}

Eigen::MatrixXd random_spd(Eigen::Index n, std::uint64_t seed) {
  const CounterRng rng(seed);
  Eigen::MatrixXd R(n, n);
  std::uint64_t counter = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) R(i, j) = 2.0 * rng.uniform(counter++) - 1.0;
  }
  Eigen::MatrixXd S = R * R.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
  return S * (static_cast<double>(n) / S.trace());
}

}  // namespace

CertificateCheck check_certificate(const SymMatrix& P,
                                   std::span<const Eigen::MatrixXd> vertices) {
  CertificateCheck out;
  out.min_eig_P = min_eigenvalue(P);
  out.max_lyapunov_eig = -std::numeric_limits<double>::infinity();
  for (const auto& A : vertices) {
    out.max_lyapunov_eig = std::max(out.max_lyapunov_eig, max_eigenvalue(lyapunov_operator(P, A)));
  }
  return out;
}

FeasibilityResult find_common_p(std::span<const Eigen::MatrixXd> vertices,
                                const SolverOptions& options) {
  if (!(options.eps > 0.0)) throw Error("eps must be positive");
  if (vertices.empty()) throw DimensionMismatch("no vertex matrices given");
  const Eigen::Index n = vertices[0].rows();
  for (const auto& A : vertices) {
    if (A.rows() != n || A.cols() != n) {
      throw DimensionMismatch("vertex matrices must all be square of the same size");
    }
  }

  const std::vector<Eigen::MatrixXd> basis = symmetric_basis(n);
  MarginProblem prob;
  prob.blocks.emplace_back(basis);  // P itself
  for (const auto& A : vertices) {
    std::vector<Eigen::MatrixXd> images;
    images.reserve(basis.size());
    for (const auto& E : basis) {
      const Eigen::MatrixXd EA = E * A;
      images.push_back(-(EA + EA.transpose()));
    }
    prob.blocks.push_back(std::move(images));
  }
  prob.normal = to_coordinates(Eigen::MatrixXd::Identity(n, n), basis);
  prob.target = static_cast<double>(n);

  std::vector<Eigen::MatrixXd> starts{Eigen::MatrixXd::Identity(n, n)};
  for (std::uint64_t seed : options.seeds) starts.push_back(random_spd(n, seed));

  FeasibilityResult result;
  result.best_margin = -std::numeric_limits<double>::infinity();
  for (const auto& start : starts) {
    const AscentResult run = ascend(prob, to_coordinates(start, basis), options);
    result.iterations += run.iterations;
    result.best_margin = std::max(result.best_margin, run.phi);
    if (run.phi < options.eps) continue;

    SymMatrix P(from_coordinates(run.x, basis));
    const CertificateCheck check = check_certificate(P, vertices);
    if (check.margin() >= options.eps) {
      result.certificate = LyapunovCertificate{
          std::move(P), check.margin(), {vertices.begin(), vertices.end()}};
      return result;
    }
  }
  return result;
}

GainSynthesisResult synthesize_stabilizing_gain(const Eigen::MatrixXd& A,
                                                const Eigen::MatrixXd& B,
                                                const SolverOptions& options) {
  if (!(options.eps > 0.0)) throw Error("eps must be positive");
  const Eigen::Index n = A.rows();
  const Eigen::Index m = B.cols();
  if (A.cols() != n || B.rows() != n || n == 0) {
    throw DimensionMismatch("synthesis needs A (n x n) and B (n x m)");
  }

  const std::vector<Eigen::MatrixXd> sym = symmetric_basis(n);
  const auto ns = static_cast<Eigen::Index>(sym.size());
  const Eigen::Index d = ns + m * n;

  MarginProblem prob;
  std::vector<Eigen::MatrixXd> x_block;
  std::vector<Eigen::MatrixXd> lyap_block;
  for (const auto& E : sym) {
    x_block.push_back(E);
    const Eigen::MatrixXd AE = A * E;
    lyap_block.push_back(-(AE + AE.transpose()));
  }
  for (Eigen::Index j = 0; j < n; ++j) {  // column-major vec(M)
    for (Eigen::Index i = 0; i < m; ++i) {
      Eigen::MatrixXd E = Eigen::MatrixXd::Zero(m, n);
      E(i, j) = 1.0;
      const Eigen::MatrixXd BE = B * E;
      x_block.push_back(Eigen::MatrixXd::Zero(n, n));
      lyap_block.push_back(-(BE + BE.transpose()));
    }
  }
  prob.blocks = {std::move(x_block), std::move(lyap_block)};
  prob.normal = Eigen::VectorXd::Zero(d);
  prob.normal.head(ns) = to_coordinates(Eigen::MatrixXd::Identity(n, n), sym);
  prob.target = static_cast<double>(n);

  auto pack = [&](const Eigen::MatrixXd& X, const Eigen::MatrixXd& M) {
    Eigen::VectorXd x(d);
    x.head(ns) = to_coordinates(X, sym);
    x.tail(m * n) = Eigen::Map<const Eigen::VectorXd>(M.data(), m * n);
    return x;
  };
  std::vector<Eigen::VectorXd> starts{
      pack(Eigen::MatrixXd::Identity(n, n), Eigen::MatrixXd::Zero(m, n))};
  for (std::uint64_t seed : options.seeds) {
    const CounterRng rng(seed ^ 0x5bd1e995ULL);
    Eigen::MatrixXd M(m, n);
    for (Eigen::Index k = 0; k < m * n; ++k) {
      M.data()[k] = 2.0 * rng.uniform(static_cast<std::uint64_t>(k)) - 1.0;
    }
    starts.push_back(pack(random_spd(n, seed), M));
  }

  GainSynthesisResult result;
  result.best_margin = -std::numeric_limits<double>::infinity();
  for (const auto& start : starts) {
    const AscentResult run = ascend(prob, start, options);
    result.best_margin = std::max(result.best_margin, run.phi);
    if (run.phi < options.eps) continue;

    const SymMatrix X(from_coordinates(run.x, sym));
    if (!(min_eigenvalue(X) > kSingularTolerance)) continue;
    const Eigen::MatrixXd M =
        Eigen::Map<const Eigen::MatrixXd>(run.x.tail(m * n).data(), m, n);
    const Eigen::MatrixXd X_inv = X.matrix().inverse();
    SymMatrix P(X_inv);
    Eigen::MatrixXd K = M * X_inv;
    const Eigen::MatrixXd closed = A + B * K;
    if (min_eigenvalue(P) > 0.0 && max_eigenvalue(lyapunov_operator(P, closed)) < 0.0) {
      result.K = std::move(K);
      result.P = std::move(P);
      return result;
    }
  }
  return result;
}

}  // namespace tsroa
