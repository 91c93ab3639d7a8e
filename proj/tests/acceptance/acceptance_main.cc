// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails. Each criterion also has a wall-clock budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cli.hpp"
#include "fixtures.hpp"
#include "tsroa/eigen_sym.hpp"
#include "tsroa/geometry.hpp"
#include "tsroa/lmi.hpp"
#include "tsroa/pipeline.hpp"
#include "tsroa/polynomial.hpp"
#include "tsroa/ts_model.hpp"

namespace {

using namespace tsroa;
namespace fs = std::filesystem;

struct Outcome {
  bool ok = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SystemSpec worked_spec() {
  SystemSpec spec;
  spec.state_names = {"x1", "x2"};
  spec.rhs = testing::worked_rhs();
  spec.domain = testing::worked_box();
  return spec;
}

Outcome reference_certificate() {
  const TSModel model = TSModel::build(testing::worked_rhs(), testing::worked_box());
  if (model.vertices().size() != 4) return {false, "expected 4 vertices"};
  const CertificateCheck c = check_certificate(SymMatrix(testing::reference_P()), model.vertices());
  return {c.valid(1e-4), fmt("lambda_min(P)=%.6f max lambda_max(PA+A'P)=%.6f margin=%.6f",
                             c.min_eig_P, c.max_lyapunov_eig, c.margin())};
}

Outcome level_regression() {
  const double k = max_level_in_box(SymMatrix(testing::reference_P()), testing::worked_box());
  return {k >= 0.168 && k <= 0.171, fmt("k=%.6f, want [0.168, 0.171]", k)};
}

Outcome transformed_exactness() {
  const auto got = transform_system(testing::worked_rhs(), testing::worked_T());
  const auto want = testing::worked_transformed_rhs();
  double dist = 0.0;
  bool same_support = got.size() == want.size();
  for (std::size_t k = 0; k < want.size() && same_support; ++k) {
    dist = std::max(dist, max_coefficient_distance(got[k], want[k]));
    same_support = got[k].size() == want[k].size();
  }
  return {same_support && dist <= 1e-12,
          fmt("max coefficient distance=%.3g, supports %s", dist, same_support ? "match" : "differ")};
}

Outcome enlargement() {
  SystemSpec spec = worked_spec();
  spec.transforms.push_back({testing::worked_T(), testing::worked_transformed_box()});
  const SweepResult r = sweep(spec, cases_from_spec(spec));
  if (r.estimate.pieces.size() != 2) {
    return {false, fmt("%zu certified pieces, expected 2", r.estimate.pieces.size())};
  }
  const Ellipsoid& id = r.estimate.pieces[0].ellipsoid;
  const Ellipsoid& sh = r.estimate.pieces[1].ellipsoid;
  double worst = 0.0;
  for (const auto& p : boundary_points(sh, 1024)) worst = std::max(worst, id.form(p) / id.k);

  const AreaEstimate a0 = union_area(RoaEstimate{{r.estimate.pieces[0]}}, 1000000, 1, 4);
  const AreaEstimate a1 = union_area(r.estimate, 1000000, 1, 4);
  const double se = std::hypot(a0.std_error, a1.std_error);
  const bool outside = worst >= 1.01;
  const bool larger = a1.area - a0.area > 3.0 * se;
  return {outside && larger,
          fmt("max V_id/k_id on shear boundary=%.4f; area identity=%.5f union=%.5f "
              "(diff %.5f, 3SE %.5f)",
              worst, a0.area, a1.area, a1.area - a0.area, 3.0 * se)};
}

Outcome ts_exactness() {
  std::mt19937_64 rng(2025);
  double worst_rel = 0.0;
  double worst_sum = 0.0;
  double worst_w = 0.0;
  for (int sys = 0; sys < 10; ++sys) {
    const std::size_t n = 2 + static_cast<std::size_t>(sys % 2);
    const auto rhs = testing::random_system(rng, n, 4, 4);
    std::vector<double> half(n);
    for (auto& h : half) h = std::uniform_real_distribution<double>(0.3, 1.5)(rng);
    const Box box = Box::symmetric(half);
    const TSModel model = TSModel::build(rhs, box);
    for (int s = 0; s < 200; ++s) {
      const Eigen::VectorXd x = testing::random_point(rng, box);
      Eigen::VectorXd f(static_cast<Eigen::Index>(n));
      for (std::size_t k = 0; k < n; ++k) f[static_cast<Eigen::Index>(k)] = rhs[k].evaluate(x);
      const auto w = model.memberships(x);
      Eigen::VectorXd blended = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
      double sum = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) {
        blended += w[i] * (model.vertices()[i] * x);
        sum += w[i];
        worst_w = std::max({worst_w, -w[i], w[i] - 1.0});
      }
      worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
      worst_rel = std::max(worst_rel, (blended - f).lpNorm<Eigen::Infinity>() /
                                          (1.0 + f.lpNorm<Eigen::Infinity>()));
    }
  }
  return {worst_rel <= 1e-9 && worst_sum <= 1e-12 && worst_w <= 1e-12,
          fmt("max reconstruction error/(1+|f|)=%.3g, max |sum w - 1|=%.3g, "
              "max weight excursion=%.3g",
              worst_rel, worst_sum, worst_w)};
}

Outcome solver_soundness() {
  std::mt19937_64 rng(2024);
  int successes = 0;
  int bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::Index n = 2 + trial % 3;
    const auto inst = testing::constructed_feasible(rng, n, 1 + static_cast<std::size_t>(trial % 4));
    const FeasibilityResult r = find_common_p(inst.vertices);
    if (!r.feasible()) continue;
    ++successes;
    if (!check_certificate(r.certificate->P, inst.vertices).valid()) ++bad;
  }
  const Eigen::MatrixXd A = -Eigen::MatrixXd::Identity(2, 2);
  const std::vector<Eigen::MatrixXd> opposed{A, -A};
  const bool infeasible = !find_common_p(opposed).feasible();
  return {successes >= 95 && bad == 0 && infeasible,
          fmt("%d/100 feasible, %d failed re-validation, {A,-A} %s", successes, bad,
              infeasible ? "infeasible" : "FEASIBLE")};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome empirical_soundness() {
  const fs::path dir = fs::temp_directory_path() / "tsroa_acceptance";
  fs::remove_all(dir);
  cli::RunConfig cfg;
  cfg.input_path = testing::data_path("cubic_2d.sys");
  cfg.output_dir = dir;
  if (const int rc = cli::cmd_analyze(cfg); rc != cli::kExitOk) {
    return {false, fmt("analyze exited %d", rc)};
  }
  cfg.input_path = dir / "result.json";
  const int clean_rc = cli::cmd_verify(cfg);
  const auto clean = nlohmann::json::parse(slurp(dir / "verify.json"));
  const int clean_violations = clean["total_violations"];
  const int samples = clean["pieces"][0]["samples"];

  auto edited = nlohmann::json::parse(slurp(dir / "result.json"));
  edited["pieces"][0]["k"] = edited["pieces"][0]["k"].get<double>() * 100.0;
  std::ofstream(dir / "inflated.json") << edited.dump(2);
  cfg.input_path = dir / "inflated.json";
  const int inflated_rc = cli::cmd_verify(cfg);
  const int inflated_violations = nlohmann::json::parse(slurp(dir / "verify.json"))["total_violations"];
  fs::remove_all(dir);

  return {clean_rc == cli::kExitOk && clean_violations == 0 && samples == 500 &&
              inflated_rc == cli::kExitViolations && inflated_violations >= 1,
          fmt("certified piece: exit %d, %d violations in %d samples; k*100: exit %d, %d violations",
              clean_rc, clean_violations, samples, inflated_rc, inflated_violations)};
}

Outcome geometry_oracles() {
  std::mt19937_64 rng(31);
  double worst_rel = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index n = 2 + trial % 2;
    const Eigen::MatrixXd P = testing::random_spd(rng, n, 0.2, 3.0);
    Box box;
    for (Eigen::Index i = 0; i < n; ++i) {
      box.lower.push_back(-std::uniform_real_distribution<double>(0.2, 2.0)(rng));
      box.upper.push_back(std::uniform_real_distribution<double>(0.2, 2.0)(rng));
    }
    const double k = max_level_in_box(SymMatrix(P), box);
    const double oracle = testing::bisection_level_oracle(P, box, rng);
    worst_rel = std::max(worst_rel, std::abs(k - oracle) / oracle);
  }

  const Eigen::MatrixXd Q = testing::random_spd(rng, 2, 0.3, 3.0);
  const double k = 0.8;
  const double closed = std::numbers::pi * k / std::sqrt(Q.determinant());
  const RoaEstimate est{{RoaPiece{Ellipsoid{SymMatrix(Q), k}, Eigen::Matrix2d::Identity(), Box{}, std::nullopt}}};
  const AreaEstimate a = union_area(est, 1000000, 17, 4);
  const double z = std::abs(a.area - closed) / a.std_error;
  return {worst_rel <= 1e-3 && z <= 3.0,
          fmt("max level rel. error vs bisection=%.3g over 20 instances; area %.5f vs %.5f "
              "(%.2f SE)",
              worst_rel, a.area, closed, z)};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "reference certificate is valid", 1.0, reference_certificate},
      {2, "level set of reference certificate", 1.0, level_regression},
      {3, "transformed system is exact", 1.0, transformed_exactness},
      {4, "transform enlarges the estimate", 30.0, enlargement},
      {5, "TS decomposition is exact", 10.0, ts_exactness},
      {6, "LMI solver soundness", 60.0, solver_soundness},
      {7, "empirical ROA soundness", 60.0, empirical_soundness},
      {8, "geometry oracles", 30.0, geometry_oracles},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = secs < c.budget_s;
    const bool pass = out.ok && in_budget;
    failures += !pass;
    std::printf("criterion %d: %s  %s: %s (%.2fs, budget %.0fs%s)\n", c.id, pass ? "PASS" : "FAIL",
                c.name, out.detail.c_str(), secs, c.budget_s, in_budget ? "" : ", OVER BUDGET");
    std::fflush(stdout);
  }
  std::printf("%d/8 criteria passed\n", 8 - failures);
  return failures == 0 ? 0 : 1;
}
