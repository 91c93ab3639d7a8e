#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tsroa/eigen_sym.hpp"

namespace tsroa {

/// Common quadratic Lyapunov certificate for a set of vertex matrices.
///   lambda_min(P) >= margin,  lambda_max(P A_i + A_i^T P) <= -margin.
/// P is normalized to trace(P) = n.
struct LyapunovCertificate {
  SymMatrix P;
  double margin = 0.0;
  std::vector<Eigen::MatrixXd> vertices;
};

struct SolverOptions {
  double eps = 1e-6;
  int max_iterations = 20000;
  /// A seed stops early once its best margin has not improved for this many
  /// iterations.
  int stall_iterations = 2000;
  std::vector<std::uint64_t> seeds{1, 2, 3, 4};
  /// By default a start stops at the first iterate with phi >= eps. When set,
  /// ascent continues toward the maximal margin instead.
  bool maximize_margin = false;
};

struct FeasibilityResult {
  std::optional<LyapunovCertificate> certificate;
  /// Best margin seen over all restarts (negative or below eps if infeasible).
  double best_margin = 0.0;
  int iterations = 0;

  bool feasible() const { return certificate.has_value(); }
};

/// Independent check of a candidate P, using only eigen_sym.
struct CertificateCheck {
  double min_eig_P = 0.0;
  /// max over i of lambda_max(P A_i + A_i^T P)
  double max_lyapunov_eig = 0.0;

  double margin() const { return std::min(min_eig_P, -max_lyapunov_eig); }
  bool valid(double required_margin = 0.0) const {
    return min_eig_P > required_margin && max_lyapunov_eig < -required_margin;
  }
};

CertificateCheck check_certificate(const SymMatrix& P,
                                   std::span<const Eigen::MatrixXd> vertices);

/// Searches for P = P^T > 0 with P A_i + A_i^T P < 0 for every vertex by
/// maximizing the concave margin
///   phi(P) = min(lambda_min(P), min_i lambda_min(-(P A_i + A_i^T P)))
/// over trace(P) = n with projected subgradient ascent. Starts from the
/// identity and falls back to random SPD starts. A certificate is returned
/// only when phi >= eps and independent re-validation passes.
FeasibilityResult find_common_p(std::span<const Eigen::MatrixXd> vertices,
                                const SolverOptions& options = {});

struct GainSynthesisResult {
  std::optional<Eigen::MatrixXd> K;  ///< m x n, u = K x
  std::optional<SymMatrix> P;        ///< X^-1
  double best_margin = 0.0;

  bool feasible() const { return K.has_value(); }
};

/// Stabilizing state feedback through the change of variables X = P^-1,
/// M = K X, which turns the bilinear closed-loop Lyapunov condition into
///   X > 0,  -(A X + B M + (A X + B M)^T) > 0.
/// The result is re-validated on the closed loop A + B K.
GainSynthesisResult synthesize_stabilizing_gain(const Eigen::MatrixXd& A,
                                                const Eigen::MatrixXd& B,
                                                const SolverOptions& options = {});

}  // namespace tsroa
