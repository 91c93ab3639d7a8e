#include "tsroa/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>

#include "tsroa/random.hpp"

namespace tsroa {

const char* to_string(CaseStatus status) {
  switch (status) {
    case CaseStatus::kCertified:
      return "certified";
    case CaseStatus::kLmiInfeasible:
      return "lmi_infeasible";
    case CaseStatus::kDegenerate:
      return "degenerate";
  }
  return "unknown";
}

TransformCase analyze_single(const SystemSpec& spec, const Eigen::MatrixXd& T,
                             const Box& analysis_box, const SolverOptions& options) {
  TransformCase out;
  out.T = T;
  out.analysis_box = analysis_box;
  try {
    analysis_box.validate();
    if (analysis_box.dimension() != spec.dimension()) {
      throw DimensionMismatch("analysis box dimension does not match the system");
    }
    out.transformed_rhs = transform_system(spec.rhs, T);
    const TSModel model = TSModel::build(out.transformed_rhs, analysis_box);
    out.model = TSModelSummary{model.scheduling(), model.vertices()};

    const FeasibilityResult lmi = find_common_p(model.vertices(), options);
    out.best_margin = lmi.best_margin;
    if (!lmi.feasible()) {
      out.status = CaseStatus::kLmiInfeasible;
      out.message = "no common quadratic Lyapunov matrix; best margin " +
                    std::to_string(lmi.best_margin);
      return out;
    }
    out.certificate = *lmi.certificate;
    out.k = max_level_in_box(lmi.certificate->P, analysis_box);
    out.ellipsoid = pull_back(Ellipsoid{lmi.certificate->P, out.k}, T);
    out.status = CaseStatus::kCertified;
  } catch (const Error& e) {
    out.status = CaseStatus::kDegenerate;
    out.message = e.what();
  }
  return out;
}

Box default_analysis_box(const SystemSpec& spec) { return spec.domain; }

std::vector<CaseRequest> cases_from_spec(const SystemSpec& spec) {
  const auto n = static_cast<Eigen::Index>(spec.dimension());
  std::vector<CaseRequest> cases{{Eigen::MatrixXd::Identity(n, n), spec.domain}};
  for (const auto& t : spec.transforms) {
    cases.push_back({t.T, t.analysis_box.value_or(default_analysis_box(spec))});
  }
  return cases;
}

std::vector<TransformCase> run_cases(const SystemSpec& spec, std::vector<CaseRequest> cases,
                                     const SolverOptions& options, bool parallel) {
  const auto n = static_cast<Eigen::Index>(spec.dimension());
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
  const bool has_identity = std::any_of(cases.begin(), cases.end(),
                                        [&](const CaseRequest& c) { return c.T == identity; });
  if (!has_identity) cases.insert(cases.begin(), CaseRequest{identity, spec.domain});

  std::vector<TransformCase> out(cases.size());
  if (parallel && cases.size() > 1) {
    std::vector<std::future<TransformCase>> futures;
    futures.reserve(cases.size());
    for (const auto& c : cases) {
      futures.push_back(std::async(std::launch::async, [&spec, &options, c] {
        return analyze_single(spec, c.T, c.analysis_box, options);
      }));
    }
    for (std::size_t i = 0; i < futures.size(); ++i) out[i] = futures[i].get();
  } else {
    for (std::size_t i = 0; i < cases.size(); ++i) {
      out[i] = analyze_single(spec, cases[i].T, cases[i].analysis_box, options);
    }
  }
  return out;
}

RoaEstimate unite(std::span<const TransformCase> cases) {
  RoaEstimate estimate;
  for (const auto& c : cases) {
    if (c.status != CaseStatus::kCertified) continue;
    estimate.pieces.push_back(RoaPiece{*c.ellipsoid, c.T, c.analysis_box, c.certificate});
  }
  return estimate;
}

SweepResult sweep(const SystemSpec& spec, std::vector<CaseRequest> cases,
                  const SolverOptions& options, bool parallel) {
  SweepResult result;
  result.cases = run_cases(spec, std::move(cases), options, parallel);
  result.estimate = unite(result.cases);
  if (result.estimate.pieces.empty()) {
    throw NoCertificate("no certificate found for any of the " +
                        std::to_string(result.cases.size()) + " cases");
  }
  return result;
}

std::vector<Eigen::MatrixXd> default_transforms(std::size_t n, std::size_t count,
                                                std::uint64_t seed) {
  const auto dim = static_cast<Eigen::Index>(n);
  std::vector<Eigen::MatrixXd> family;
  for (double c : {0.5, -0.5, 1.0, -1.0, 2.0, -2.0}) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (Eigen::Index j = 0; j < dim; ++j) {
        if (i == j) continue;
        Eigen::MatrixXd S = Eigen::MatrixXd::Identity(dim, dim);
        S(i, j) = c;
        family.push_back(std::move(S));
      }
    }
  }
  for (double angle : {std::numbers::pi / 8.0, std::numbers::pi / 4.0, 3.0 * std::numbers::pi / 8.0}) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      for (Eigen::Index j = i + 1; j < dim; ++j) {
        Eigen::MatrixXd R = Eigen::MatrixXd::Identity(dim, dim);
        R(i, i) = R(j, j) = std::cos(angle);
        R(i, j) = -std::sin(angle);
        R(j, i) = std::sin(angle);
        family.push_back(std::move(R));
      }
    }
  }

  if (family.empty()) {  // n == 1: the reflection is the only non-identity option
    family.push_back(-Eigen::MatrixXd::Identity(dim, dim));
  }

  std::vector<Eigen::MatrixXd> out;
  for (std::size_t i = 0; i < count && i < family.size(); ++i) out.push_back(family[i]);
  const CounterRng rng(seed);
  const auto pick = [&](std::uint64_t counter) {
    return static_cast<std::size_t>(rng.bits(counter) % family.size());
  };
  for (std::uint64_t draw = 0; out.size() < count; draw += 2) {
    out.push_back(family[pick(draw)] * family[pick(draw + 1)]);
  }
  return out;
}

}  // namespace tsroa
