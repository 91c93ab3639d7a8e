#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "tsroa/geometry.hpp"
#include "tsroa/parser.hpp"
#include "tsroa/pipeline.hpp"
#include "tsroa/verify.hpp"

namespace tsroa::cli {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

namespace {

constexpr int kFormatVersion = 1;
constexpr std::size_t kMinMonteCarloSamples = 10000;
constexpr std::size_t kMinVerifySamples = 100;

/// Input problems that map to exit code 1.
class InputError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << bytes;
  if (!out) throw InputError("write failed for " + path.string());
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// ---- number formatting -----------------------------------------------------

std::string shortest(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

// ---- JSON <-> numeric types ------------------------------------------------

Json to_json(const Eigen::MatrixXd& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_json(const Box& box) { return Json{{"lower", box.lower}, {"upper", box.upper}}; }

Eigen::MatrixXd matrix_from_json(const Json& j, std::size_t n, const char* what) {
  if (!j.is_array() || j.size() != n) {
    throw InputError(std::string(what) + " must be a " + std::to_string(n) + "x" +
                     std::to_string(n) + " array");
  }
  const auto dim = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd M(dim, dim);
  for (std::size_t i = 0; i < n; ++i) {
    if (!j[i].is_array() || j[i].size() != n) {
      throw InputError(std::string(what) + " row " + std::to_string(i) + " has the wrong length");
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (!j[i][k].is_number()) throw InputError(std::string(what) + " entries must be numbers");
      M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = j[i][k].get<double>();
    }
  }
  return M;
}

Json options_json(const ResolvedOptions& o) {
  return Json{{"eps", o.eps},
              {"step", o.step},
              {"tmax", o.t_max},
              {"mc", o.mc_samples},
              {"seed", o.seed},
              {"boundary_points", o.boundary_points},
              {"samples", o.verify_samples}};
}

Json system_json(const SystemSpec& spec) {
  Json rhs = Json::array();
  for (const auto& p : spec.rhs) rhs.push_back(to_string(p, spec.state_names));
  return Json{{"states", spec.state_names}, {"rhs", rhs}, {"domain", to_json(spec.domain)}};
}

Json scheduling_json(const std::vector<SchedulingVariable>& vars) {
  Json out = Json::array();
  for (const auto& v : vars) {
    out.push_back(Json{{"monomial", v.monomial}, {"z_min", v.z_min}, {"z_max", v.z_max}});
  }
  return out;
}

Json vertices_json(const std::vector<Eigen::MatrixXd>& vertices) {
  Json out = Json::array();
  for (const auto& A : vertices) out.push_back(to_json(A));
  return out;
}

Json piece_json(const TransformCase& c) {
  Json j;
  j["transform"] = to_json(c.T);
  j["analysis_box"] = to_json(c.analysis_box);
  j["P"] = to_json(c.certificate->P.matrix());
  j["margin"] = c.certificate->margin;
  j["Q"] = to_json(c.ellipsoid->Q.matrix());
  j["k"] = c.k;
  return j;
}

Json header(const char* command, const std::string& hash, const ResolvedOptions& opts) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["command"] = command;
  j["spec_hash"] = hash;
  j["options"] = options_json(opts);
  return j;
}

// ---- option resolution -----------------------------------------------------

std::size_t count_option(double v, const char* name) {
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15) {
    throw InputError(std::string("option ") + name + " must be a nonnegative integer");
  }
  return static_cast<std::size_t>(v);
}

ResolvedOptions resolve(const SpecOptions& file, const RunConfig& cli) {
  ResolvedOptions o;
  if (file.eps) o.eps = *file.eps;
  if (file.step) o.step = *file.step;
  if (file.tmax) o.t_max = *file.tmax;
  if (file.mc) o.mc_samples = count_option(*file.mc, "mc");
  if (file.seed) o.seed = count_option(*file.seed, "seed");
  if (file.boundary_points) o.boundary_points = count_option(*file.boundary_points, "boundary_points");
  if (file.samples) o.verify_samples = count_option(*file.samples, "samples");

  if (cli.eps) o.eps = *cli.eps;
  if (cli.step) o.step = *cli.step;
  if (cli.t_max) o.t_max = *cli.t_max;
  if (cli.mc_samples) o.mc_samples = *cli.mc_samples;
  if (cli.seed) o.seed = *cli.seed;
  if (cli.boundary_points) o.boundary_points = *cli.boundary_points;
  if (cli.verify_samples) o.verify_samples = *cli.verify_samples;

  if (!(o.eps > 0.0)) throw InputError("eps must be positive");
  if (!(o.step > 0.0)) throw InputError("step must be positive");
  if (!(o.t_max >= o.step)) throw InputError("tmax must be at least one step");
  if (o.mc_samples < kMinMonteCarloSamples) {
    throw InputError("mc must be at least " + std::to_string(kMinMonteCarloSamples));
  }
  if (o.boundary_points < 3) throw InputError("boundary-points must be at least 3");
  if (o.verify_samples < kMinVerifySamples) {
    throw InputError("samples must be at least " + std::to_string(kMinVerifySamples));
  }
  return o;
}

SpecOptions options_from_json(const Json& j) {
  SpecOptions o;
  if (!j.is_object()) return o;
  auto get = [&](const char* key, std::optional<double>& dst) {
    if (j.contains(key) && j[key].is_number()) dst = j[key].get<double>();
  };
  get("eps", o.eps);
  get("step", o.step);
  get("tmax", o.tmax);
  get("mc", o.mc);
  get("seed", o.seed);
  get("boundary_points", o.boundary_points);
  get("samples", o.samples);
  return o;
}

SolverOptions solver_options(const ResolvedOptions& o) {
  SolverOptions s;
  s.eps = o.eps;
  return s;
}

struct LoadedSpec {
  SystemSpec spec;
  std::string hash;
};

LoadedSpec load_spec(const fs::path& path) {
  const std::string text = read_file(path);
  return {parse_system(text), content_hash(text)};
}

// ---- CSV -------------------------------------------------------------------

std::string csv_header(const std::vector<std::string>& names) {
  std::string out = "piece_index";
  for (const auto& n : names) out += "," + n;
  return out + "\n";
}

void append_csv_row(std::string& out, std::size_t piece, const Eigen::VectorXd& x) {
  out += std::to_string(piece);
  for (Eigen::Index d = 0; d < x.size(); ++d) out += "," + shortest(x[d]);
  out += "\n";
}

/// Boundary samples of every piece. With `union_only`, points strictly inside
/// another piece are dropped so what remains traces the union's outline.
std::string boundary_csv(const std::vector<std::string>& names, const std::vector<Ellipsoid>& pieces,
                         std::size_t points, bool union_only) {
  std::string out = csv_header(names);
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    for (const auto& x : boundary_points(pieces[i], points)) {
      if (union_only) {
        bool covered = false;
        for (std::size_t j = 0; j < pieces.size() && !covered; ++j) {
          covered = j != i && pieces[j].form(x) < pieces[j].k * (1.0 - 1e-9);
        }
        if (covered) continue;
      }
      append_csv_row(out, i, x);
    }
  }
  return out;
}

// ---- reading prior results -------------------------------------------------

struct LoadedResult {
  std::vector<std::string> names;
  std::vector<Polynomial> rhs;
  std::vector<Ellipsoid> pieces;
  std::string spec_hash;
  SpecOptions options;
};

LoadedResult load_result(const fs::path& path) {
  const std::string text = read_file(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(path.string() + ": not valid JSON: " + e.what());
  }
  if (!j.is_object() || !j.contains("system") || !j.contains("pieces")) {
    throw InputError(path.string() + ": missing \"system\" or \"pieces\"");
  }
  LoadedResult out;
  try {
    const Json& sys = j.at("system");
    out.names = sys.at("states").get<std::vector<std::string>>();
    for (const auto& row : sys.at("rhs")) {
      out.rhs.push_back(parse_polynomial(row.get<std::string>(), out.names));
    }
    if (out.rhs.size() != out.names.size() || out.names.empty()) {
      throw InputError(path.string() + ": system needs one right-hand side per state");
    }
    const std::size_t n = out.names.size();
    for (const auto& piece : j.at("pieces")) {
      SymMatrix Q(matrix_from_json(piece.at("Q"), n, "Q"));
      const double k = piece.at("k").get<double>();
      if (!(k > 0.0) || !std::isfinite(k)) throw InputError("piece level k must be positive");
      if (!(min_eigenvalue(Q) > 0.0)) throw InputError("piece Q must be positive definite");
      out.pieces.push_back(Ellipsoid{std::move(Q), k});
    }
    if (j.contains("spec_hash") && j["spec_hash"].is_string()) {
      out.spec_hash = j["spec_hash"].get<std::string>();
    }
    if (j.contains("options")) out.options = options_from_json(j["options"]);
  } catch (const Json::exception& e) {
    throw InputError(path.string() + ": malformed result: " + e.what());
  }
  if (out.pieces.empty()) throw InputError(path.string() + ": no pieces to process");
  return out;
}

unsigned worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

int cmd_analyze(const RunConfig& config) {
  const LoadedSpec loaded = load_spec(config.input_path);
  const SystemSpec& spec = loaded.spec;
  const ResolvedOptions opts = resolve(spec.options, config);
  const auto n = static_cast<Eigen::Index>(spec.dimension());

  const TransformCase c =
      analyze_single(spec, Eigen::MatrixXd::Identity(n, n), spec.domain, solver_options(opts));

  Json j = header("analyze", loaded.hash, opts);
  j["system"] = system_json(spec);
  j["status"] = to_string(c.status);
  j["message"] = c.message;
  j["best_margin"] = c.best_margin;
  if (c.model) {
    j["scheduling"] = scheduling_json(c.model->scheduling);
    j["vertices"] = vertices_json(c.model->vertices);
  }
  j["pieces"] = Json::array();
  if (c.status == CaseStatus::kCertified) {
    j["P"] = to_json(c.certificate->P.matrix());
    j["margin"] = c.certificate->margin;
    j["k"] = c.k;
    j["pieces"].push_back(piece_json(c));
  }
  write_file(config.output_dir / "result.json", dump(j));

  if (c.status != CaseStatus::kCertified) {
    std::cerr << "tsroa: no certificate: " << c.message << "\n";
    return kExitInfeasible;
  }
  write_file(config.output_dir / "boundary.csv",
             boundary_csv(spec.state_names, {*c.ellipsoid}, opts.boundary_points, false));
  return kExitOk;
}

int cmd_sweep(const RunConfig& config) {
  const LoadedSpec loaded = load_spec(config.input_path);
  const SystemSpec& spec = loaded.spec;
  const ResolvedOptions opts = resolve(spec.options, config);

  std::vector<CaseRequest> requests;
  if (config.auto_count) {
    const Box box = default_analysis_box(spec);
    for (auto& T : default_transforms(spec.dimension(), *config.auto_count, opts.seed)) {
      requests.push_back({std::move(T), box});
    }
  } else {
    requests = cases_from_spec(spec);
  }
  const std::vector<TransformCase> cases = run_cases(spec, requests, solver_options(opts));
  const RoaEstimate estimate = unite(cases);

  Json j = header("sweep", loaded.hash, opts);
  j["system"] = system_json(spec);
  j["transform_source"] = config.auto_count ? "auto" : "spec";
  // Choices made by this tool rather than by the input; kept for auditing.
  j["tool_defaults"] = Json{
      {"analysis_box", "transforms without their own domain use the original half-widths"},
      {"transform_family", config.auto_count ? "shears I + c E_ij, c in {0.5,-0.5,1,-1,2,-2}; "
                                               "rotations by pi/8, pi/4, 3pi/8; then seeded products"
                                             : "as listed in the input"}};
  Json records = Json::array();
  Json pieces = Json::array();
  std::vector<Ellipsoid> ellipsoids;
  for (const auto& c : cases) {
    Json r;
    r["transform"] = to_json(c.T);
    r["analysis_box"] = to_json(c.analysis_box);
    r["status"] = to_string(c.status);
    r["message"] = c.message;
    r["best_margin"] = c.best_margin;
    if (c.model) r["scheduling"] = scheduling_json(c.model->scheduling);
    if (c.status == CaseStatus::kCertified) {
      r["P"] = to_json(c.certificate->P.matrix());
      r["margin"] = c.certificate->margin;
      r["k"] = c.k;
      r["Q"] = to_json(c.ellipsoid->Q.matrix());
      r["area"] = c.ellipsoid->volume();
      pieces.push_back(piece_json(c));
      ellipsoids.push_back(*c.ellipsoid);
    }
    records.push_back(std::move(r));
  }
  j["cases"] = std::move(records);
  j["pieces"] = std::move(pieces);

  if (estimate.pieces.empty()) {
    j["areas"] = nullptr;
    write_file(config.output_dir / "sweep.json", dump(j));
    std::cerr << "tsroa: no certificate for any of the " << cases.size() << " cases\n";
    return kExitInfeasible;
  }

  auto area_json = [&](const RoaEstimate& est) {
    const AreaEstimate a = union_area(est, opts.mc_samples, opts.seed, worker_count());
    return Json{{"area", a.area}, {"std_error", a.std_error}, {"hits", a.hits},
                {"samples", a.samples}, {"box_volume", a.box_volume}};
  };
  Json areas;
  // The identity case is always first.
  if (cases.front().status == CaseStatus::kCertified) {
    RoaEstimate identity_only;
    identity_only.pieces.push_back(estimate.pieces.front());
    areas["identity"] = area_json(identity_only);
  } else {
    areas["identity"] = nullptr;
  }
  areas["union"] = area_json(estimate);
  j["areas"] = std::move(areas);

  write_file(config.output_dir / "sweep.json", dump(j));
  write_file(config.output_dir / "union_boundary.csv",
             boundary_csv(spec.state_names, ellipsoids, opts.boundary_points, true));
  return kExitOk;
}

int cmd_verify(const RunConfig& config) {
  const LoadedResult res = load_result(config.input_path);
  const ResolvedOptions opts = resolve(res.options, config);
  const std::string input_hash = content_hash(read_file(config.input_path));

  VerifyOptions vo;
  vo.samples = opts.verify_samples;
  vo.seed = opts.seed;
  vo.step = opts.step;
  vo.t_max = opts.t_max;

  Json j = header("verify", res.spec_hash, opts);
  j["input_hash"] = input_hash;
  Json reports = Json::array();
  std::size_t total = 0;
  for (std::size_t i = 0; i < res.pieces.size(); ++i) {
    const PieceReport rep = check_piece(res.pieces[i], res.rhs, vo);
    total += rep.violations.size();
    Json violations = Json::array();
    for (const auto& v : rep.violations) {
      violations.push_back(Json{{"sample", v.sample_index},
                                {"point", std::vector<double>(v.point.begin(), v.point.end())},
                                {"kind", v.kind},
                                {"value", v.value}});
    }
    reports.push_back(Json{{"piece_index", i},
                           {"samples", rep.samples},
                           {"max_vdot", rep.max_vdot},
                           {"violation_count", rep.violations.size()},
                           {"violations", std::move(violations)}});
  }
  j["pieces"] = std::move(reports);
  j["total_violations"] = total;
  write_file(config.output_dir / "verify.json", dump(j));
  if (total > 0) {
    std::cerr << "tsroa: " << total << " violations found\n";
    return kExitViolations;
  }
  return kExitOk;
}

int cmd_export(const RunConfig& config) {
  const LoadedResult res = load_result(config.input_path);
  const ResolvedOptions opts = resolve(res.options, config);
  write_file(config.output_dir / "boundary.csv",
             boundary_csv(res.names, res.pieces, opts.boundary_points, false));
  return kExitOk;
}

int run(const RunConfig& config) {
  try {
    switch (config.command) {
      case Command::kAnalyze:
        return cmd_analyze(config);
      case Command::kSweep:
        return cmd_sweep(config);
      case Command::kVerify:
        return cmd_verify(config);
      case Command::kExport:
        return cmd_export(config);
    }
  } catch (const ParseError& e) {
    std::cerr << "tsroa: " << config.input_path.string() << ":" << e.what() << "\n";
    return kExitInputError;
  } catch (const Error& e) {
    std::cerr << "tsroa: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "tsroa: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

int main_with_args(int argc, const char* const* argv) {
  CLI::App app{"Region-of-attraction certificates for polynomial systems"};
  app.require_subcommand(1);
  RunConfig config;

  auto add_common = [&](CLI::App* sub, const char* input_help) {
    sub->add_option("input", config.input_path, input_help)->required();
    sub->add_option("--out", config.output_dir, "Output directory");
    sub->add_option("--eps", config.eps, "LMI margin");
    sub->add_option("--step", config.step, "RK4 step");
    sub->add_option("--tmax", config.t_max, "Integration horizon");
    sub->add_option("--mc", config.mc_samples, "Monte Carlo samples for areas");
    sub->add_option("--seed", config.seed, "Random seed");
    sub->add_option("--boundary-points", config.boundary_points, "Boundary points per piece");
    sub->add_option("--samples", config.verify_samples, "Verification samples per piece");
  };
  auto* analyze = app.add_subcommand("analyze", "Certify the system in its own coordinates");
  add_common(analyze, "System file");
  auto* sweep_cmd = app.add_subcommand("sweep", "Analyze under several coordinate changes");
  add_common(sweep_cmd, "System file");
  sweep_cmd->add_option("--auto", config.auto_count,
                        "Use N generated transforms instead of those in the file");
  auto* verify = app.add_subcommand("verify", "Simulate trajectories from certified pieces");
  add_common(verify, "result.json or sweep.json");
  auto* exp = app.add_subcommand("export", "Write boundary points of certified pieces");
  add_common(exp, "result.json or sweep.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  if (analyze->parsed()) config.command = Command::kAnalyze;
  if (sweep_cmd->parsed()) config.command = Command::kSweep;
  if (verify->parsed()) config.command = Command::kVerify;
  if (exp->parsed()) config.command = Command::kExport;
  return run(config);
}

}  // namespace tsroa::cli
