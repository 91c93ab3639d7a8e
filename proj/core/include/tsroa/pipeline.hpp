#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tsroa/box.hpp"
#include "tsroa/errors.hpp"
#include "tsroa/geometry.hpp"
#include "tsroa/lmi.hpp"
#include "tsroa/parser.hpp"
#include "tsroa/ts_model.hpp"

namespace tsroa {

enum class CaseStatus { kCertified, kLmiInfeasible, kDegenerate };

const char* to_string(CaseStatus status);

/// Compact description of the TS model built for one case.
struct TSModelSummary {
  std::vector<SchedulingVariable> scheduling;
  std::vector<Eigen::MatrixXd> vertices;
};

/// One coordinate change and its analysis outcome.
struct TransformCase {
  Eigen::MatrixXd T;
  Box analysis_box;  ///< in transformed coordinates
  CaseStatus status = CaseStatus::kDegenerate;
  std::vector<Polynomial> transformed_rhs;
  std::optional<TSModelSummary> model;
  std::optional<LyapunovCertificate> certificate;
  /// Level in transformed coordinates (also the level of the pulled-back set).
  double k = 0.0;
  /// Certified ellipsoid in original coordinates.
  std::optional<Ellipsoid> ellipsoid;
  double best_margin = 0.0;
  std::string message;
};

/// A transform paired with the box used for analysis in its coordinates.
struct CaseRequest {
  Eigen::MatrixXd T;
  Box analysis_box;
};

/// transform_system -> TSModel::build -> find_common_p -> max_level_in_box
/// -> pull_back. Failures are recorded in the returned status; this never
/// throws for a model or solver failure.
TransformCase analyze_single(const SystemSpec& spec, const Eigen::MatrixXd& T,
                             const Box& analysis_box,
                             const SolverOptions& options = {});

class NoCertificate : public Error {
 public:
  using Error::Error;
};

struct SweepResult {
  std::vector<TransformCase> cases;
  RoaEstimate estimate;
};

/// Runs every case independently (in parallel when `parallel` is set),
/// prepending an identity case on the spec's domain when none is present.
/// Never throws for model or solver failures.
std::vector<TransformCase> run_cases(const SystemSpec& spec, std::vector<CaseRequest> cases,
                                     const SolverOptions& options = {}, bool parallel = true);

/// Certified cases as pieces of one estimate, in case order.
RoaEstimate unite(std::span<const TransformCase> cases);

/// Runs every case independently (in parallel when `parallel` is set) and
/// unites the certified pieces. An identity case on the spec's domain is
/// prepended when no identity transform is present. Throws NoCertificate if
/// no case is certified.
SweepResult sweep(const SystemSpec& spec, std::vector<CaseRequest> cases,
                  const SolverOptions& options = {}, bool parallel = true);

/// Cases from the spec file: identity on the domain, then each transform with
/// its own box or, by default, a box with the domain's half-widths.
std::vector<CaseRequest> cases_from_spec(const SystemSpec& spec);

/// Default analysis box for a transform: same half-widths as the domain.
Box default_analysis_box(const SystemSpec& spec);

/// Deterministic family of unit-determinant transforms: shears I + c E_ij
/// for c in {0.5, -0.5, 1, -1, 2, -2}, then planar rotations by pi/8, pi/4,
/// 3pi/8 on every coordinate pair. Requests beyond the family are products of
/// two family members chosen from `seed`.
std::vector<Eigen::MatrixXd> default_transforms(std::size_t n, std::size_t count,
                                                std::uint64_t seed);

}  // namespace tsroa
