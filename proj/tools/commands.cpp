#include "commands.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vsp/corpus.hpp"
#include "vsp/diagnostics.hpp"
#include "vsp/distributions.hpp"
#include "vsp/error.hpp"
#include "vsp/eval.hpp"
#include "vsp/matrix_io.hpp"
#include "vsp/model_spec.hpp"
#include "vsp/models.hpp"
#include "vsp/parallel.hpp"

namespace vsp::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr const char* kVersion = "0.1.0";

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory " + dir.string() + ": " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed: " + path.string());
}

// JSON numbers keep 17 significant digits; NaN and infinities become null.
json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

json versions() {
  return {{"vsp", kVersion},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"cli11", CLI11_VERSION},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
          {"compiler", __VERSION__}};
}

void write_manifest(const fs::path& dir, const std::string& subcommand, const std::vector<std::string>& argv,
                    json inputs, json config, std::uint64_t seed, Clock::time_point start) {
  const double wall = std::chrono::duration<double>(Clock::now() - start).count();
  json m;
  m["subcommand"] = subcommand;
  m["argv"] = argv;
  m["inputs"] = std::move(inputs);
  m["seed"] = seed;
  m["config"] = std::move(config);
  m["threads"] = default_thread_count();
  m["versions"] = versions();
  m["wall_time_seconds"] = wall;
  write_text(dir / "run.json", m.dump(2) + "\n");
}

std::string absolute_string(const std::string& p) { return fs::absolute(fs::path(p)).lexically_normal().string(); }

void write_row(const fs::path& path, const RowVector& v) { write_csv(path, Matrix(v)); }

// ---- decompose -------------------------------------------------------------

json config_to_json(const DecomposeArgs& a) {
  const VspConfig& c = a.config;
  return {{"k", c.k},
          {"center", c.center},
          {"scale", c.scale},
          {"recenter", c.recenter},
          {"rescale", c.rescale},
          {"center_mode", a.center_mode},
          {"seed", c.seed},
          {"oversample", c.svd.oversample},
          {"power_iters", c.svd.power_iters},
          {"varimax_tol", c.varimax_tol},
          {"varimax_max_sweeps", c.varimax_max_sweeps},
          {"varimax_restarts", c.varimax_restarts},
          {"kaiser_normalize", c.kaiser_normalize},
          {"pairs_sample", a.pairs_sample},
          {"clip_simplex", a.clip_simplex}};
}

template <class T>
T field(const json& obj, const char* key, const std::string& source) {
  if (!obj.contains(key)) throw DataError(source + ": manifest config lacks \"" + key + "\"");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DataError(source + ": manifest field \"" + key + "\": " + e.what());
  }
}

void load_manifest(DecomposeArgs& a) {
  const std::string source = a.from_manifest;
  json m;
  try {
    m = json::parse(read_text_file(source));
  } catch (const json::exception& e) {
    throw DataError(source + ": " + e.what());
  }
  if (!m.contains("subcommand") || m["subcommand"] != "decompose")
    throw DataError(source + ": not a decompose manifest");
  if (!m.contains("config") || !m["config"].is_object()) throw DataError(source + ": missing config");
  const json& c = m["config"];
  VspConfig& cfg = a.config;
  cfg.k = field<int>(c, "k", source);
  cfg.center = field<bool>(c, "center", source);
  cfg.scale = field<bool>(c, "scale", source);
  cfg.recenter = field<bool>(c, "recenter", source);
  cfg.rescale = field<bool>(c, "rescale", source);
  a.center_mode = field<std::string>(c, "center_mode", source);
  cfg.seed = field<std::uint64_t>(c, "seed", source);
  cfg.svd.oversample = field<int>(c, "oversample", source);
  cfg.svd.power_iters = field<int>(c, "power_iters", source);
  cfg.varimax_tol = field<double>(c, "varimax_tol", source);
  cfg.varimax_max_sweeps = field<int>(c, "varimax_max_sweeps", source);
  cfg.varimax_restarts = field<int>(c, "varimax_restarts", source);
  cfg.kaiser_normalize = field<bool>(c, "kaiser_normalize", source);
  a.pairs_sample = field<long long>(c, "pairs_sample", source);
  a.clip_simplex = field<bool>(c, "clip_simplex", source);
  if (a.input.empty()) {
    if (!m.contains("inputs") || !m["inputs"].contains("input")) throw DataError(source + ": missing inputs.input");
    a.input = m["inputs"]["input"].get<std::string>();
  }
}

void write_diagnostics(const fs::path& dir, const DiagnosticsBundle& b) {
  std::string text = "factor,kurtosis\n";
  for (std::size_t j = 0; j < b.kurtosis.size(); ++j)
    text += std::to_string(j + 1) + "," + (b.kurtosis[j].defined ? format_double(b.kurtosis[j].kurtosis) : "nan") + "\n";
  write_text(dir / "kurtosis.csv", text);

  if (b.scree) {
    text = "index,singular_value\n";
    for (Eigen::Index i = 0; i < b.scree->size(); ++i)
      text += std::to_string(i + 1) + "," + format_double((*b.scree)(i)) + "\n";
    write_text(dir / "scree.csv", text);
  }

  text.clear();
  const Eigen::Index k = b.pair_sample.cols();
  for (Eigen::Index j = 0; j < k; ++j) text += "f" + std::to_string(j + 1) + ",";
  text += "row_id\n";
  for (std::size_t r = 0; r < b.pair_rows.size(); ++r) {
    for (Eigen::Index j = 0; j < k; ++j) text += format_double(b.pair_sample(static_cast<Eigen::Index>(r), j)) + ",";
    text += std::to_string(b.pair_rows[r]) + "\n";
  }
  write_text(dir / "pairs.csv", text);

  text = "component,participation_ratio\n";
  for (Eigen::Index j = 0; j < b.participation.size(); ++j)
    text += std::to_string(j + 1) + "," + format_double(b.participation(j)) + "\n";
  write_text(dir / "participation.csv", text);
}

void print_kurtosis_table(const DiagnosticsBundle& b) {
  std::printf("factor  kurtosis\n");
  for (std::size_t j = 0; j < b.kurtosis.size(); ++j) {
    if (b.kurtosis[j].defined)
      std::printf("%-6zu  %.4f\n", j + 1, b.kurtosis[j].kurtosis);
    else
      std::printf("%-6zu  undefined\n", j + 1);
  }
  if (b.near_gaussian()) std::printf("near-Gaussian: rotation not identifiable\n");
}

// ---- simulate --------------------------------------------------------------

json kurtosis_entries(const std::vector<double>& kurt) {
  json cols = json::array();
  for (std::size_t j = 0; j < kurt.size(); ++j)
    cols.push_back({{"column", j + 1}, {"kurtosis", number(kurt[j])}, {"identifiable", kurt[j] > 3.0}});
  return cols;
}

std::vector<double> kurtosis_of(const std::vector<DistributionSpec>& dists) {
  std::vector<double> out;
  for (const auto& c : identifiability(dists)) out.push_back(c.kurtosis);
  return out;
}

// Column j of a DC-SBM factor is theta * 1{z = j} / sqrt(pi_j E theta^2).
std::vector<double> dcsbm_kurtosis(const DcSbmSpec& spec) {
  const RawMoments& t = spec.theta_dist.raw_moments();
  std::vector<double> out;
  for (int j = 0; j < spec.k; ++j) {
    const double p = spec.pi(j);
    const double c = 1.0 / std::sqrt(p * t[1]);
    RawMoments raw{p * t[0] * c, p * t[1] * c * c, p * t[2] * c * c * c, p * t[3] * c * c * c * c};
    out.push_back(kurtosis_from_raw(raw));
  }
  return out;
}

json density_json(const Density& d) {
  return {{"rho", number(d.rho)}, {"rho_bar", number(d.rho_bar)}, {"delta", number(d.delta)}};
}

bool all_identifiable(const std::vector<double>& kurt) {
  return std::all_of(kurt.begin(), kurt.end(), [](double x) { return x > 3.0; });
}

void write_membership(const fs::path& path, const std::vector<int>& membership) {
  std::string text;
  for (int m : membership) text += std::to_string(m) + "\n";
  write_text(path, text);
}

RowVector analytic_means(const std::vector<DistributionSpec>& dists) {
  RowVector mu(static_cast<Eigen::Index>(dists.size()));
  for (std::size_t j = 0; j < dists.size(); ++j) mu(static_cast<Eigen::Index>(j)) = dists[j].mean();
  return mu;
}

}  // namespace

void run_decompose(DecomposeArgs args, const std::vector<std::string>& argv) {
  const auto start = Clock::now();
  if (!args.from_manifest.empty()) load_manifest(args);
  if (args.input.empty()) throw UsageError("decompose: --input is required");
  if (args.config.k < 1) throw UsageError("decompose: --k must be a positive integer");
  if (args.center_mode != "full" && args.center_mode != "column")
    throw UsageError("decompose: --center-mode must be full or column");
  args.config.center_mode = args.center_mode == "column" ? CenterMode::column_only : CenterMode::full;
  if (args.center_mode == "column" && !args.config.center)
    throw UsageError("--center-mode column requires --center");
  if (args.clip_simplex && args.center_mode != "column")
    throw UsageError("--clip-simplex requires --center-mode column");
  if (args.pairs_sample < 0) throw UsageError("decompose: --pairs-sample must be nonnegative");
  args.config.validate();

  const SparseMatrix a = load_sparse_matrix(args.input);
  if (args.config.k > std::min(a.rows(), a.cols()))
    throw UsageError("decompose: --k " + std::to_string(args.config.k) + " exceeds min(rows, cols) of " + args.input);
  const VspResult r = run_vsp(a, args.config);

  const fs::path out(args.out);
  ensure_dir(out);
  write_csv(out / "Z.csv", r.z_hat);
  write_csv(out / "Y.csv", r.y_hat);
  write_csv(out / "B.csv", r.b_hat);
  write_csv_column(out / "singular_values.csv", r.singular_values);
  if (r.mu_z) write_row(out / "mu_Z.csv", *r.mu_z);
  if (r.mu_y) write_row(out / "mu_Y.csv", *r.mu_y);
  if (r.z_rescaled) write_csv(out / "Z_rescaled.csv", *r.z_rescaled);
  if (r.y_rescaled) write_csv(out / "Y_rescaled.csv", *r.y_rescaled);

  if (args.config.center_mode == CenterMode::column_only) {
    const ProcessedInput processed = prepare_input(a, args.config);
    const Matrix beta = estimate_topics(r.z_hat, processed.op);
    write_csv(out / "beta.csv", beta);
    if (args.clip_simplex) write_csv(out / "beta_clipped.csv", clip_simplex(beta));
  }

  DiagnosticsOptions opts;
  opts.pair_sample_size = args.pairs_sample;
  opts.seed = args.config.seed;
  const DiagnosticsBundle diag = diagnostics(r.z_hat, r.singular_values, r.z_hat, opts);
  write_diagnostics(out, diag);
  print_kurtosis_table(diag);

  json inputs = {{"input", absolute_string(args.input)}, {"rows", a.rows()}, {"cols", a.cols()}, {"nnz", a.nnz()}};
  json config = config_to_json(args);
  write_manifest(out, "decompose", argv, std::move(inputs), std::move(config), args.config.seed, start);
}

void run_simulate(const SimulateArgs& args, const std::vector<std::string>& argv) {
  const auto start = Clock::now();
  const KeyValueSpec kv = KeyValueSpec::load(args.spec);
  const fs::path out(args.out);
  json truth;
  truth["model"] = args.model;
  truth["seed"] = static_cast<std::uint64_t>(args.seed);
  json config = {{"model", args.model}, {"spec", kv.entries()}};

  if (args.model == "factor") {
    const FactorModelSpec spec = factor_spec_from(kv);
    kv.reject_unused();
    const GeneratedFactorModel g = generate_factor_model(spec, args.seed);
    ensure_dir(out);
    write_matrix_market(out / "A.mtx", g.a);
    write_csv(out / "Z.csv", g.z);
    write_csv(out / "Y.csv", g.y);
    const RowVector mu_z = analytic_means(spec.z_dist);
    const RowVector mu_y = analytic_means(spec.y_dist);
    write_csv(out / "Z_centered.csv", g.z.rowwise() - mu_z);
    write_csv(out / "Y_centered.csv", g.y.rowwise() - mu_y);
    write_row(out / "mu_Z.csv", mu_z);
    write_row(out / "mu_Y.csv", mu_y);
    const auto kz = kurtosis_of(spec.z_dist);
    const auto ky = kurtosis_of(spec.y_dist);
    truth.update({{"n", spec.n}, {"d", spec.d}, {"k", spec.k}});
    truth.update(density_json(g.expectation));
    truth["factors"] = kurtosis_entries(kz);
    truth["y_factors"] = kurtosis_entries(ky);
    truth["identifiable"] = all_identifiable(kz) && all_identifiable(ky);
  } else if (args.model == "sbm" || args.model == "dcsbm") {
    const DcSbmSpec spec = dcsbm_spec_from(kv, args.model == "dcsbm");
    kv.reject_unused();
    const GeneratedGraph g = generate_dcsbm(spec, args.seed);
    ensure_dir(out);
    write_matrix_market(out / "A.mtx", g.a);
    write_csv(out / "Z.csv", g.z);
    write_membership(out / "membership.csv", g.membership);
    const auto kz = dcsbm_kurtosis(spec);
    truth.update({{"n", spec.n}, {"d", spec.n}, {"k", spec.k}});
    truth.update(density_json(g.expectation));
    truth["factors"] = kurtosis_entries(kz);
    truth["identifiable"] = all_identifiable(kz);
    truth["hard_clustering"] = true;
  } else if (args.model == "overlap") {
    const OverlappingSbmSpec spec = overlapping_spec_from(kv);
    kv.reject_unused();
    const GeneratedGraph g = generate_overlapping(spec, args.seed);
    ensure_dir(out);
    write_matrix_market(out / "A.mtx", g.a);
    write_csv(out / "Z.csv", g.z);
    std::vector<DistributionSpec> dists;
    for (int j = 0; j < spec.k; ++j) dists.push_back(DistributionSpec::bernoulli(spec.p(j)));
    const auto kz = kurtosis_of(dists);
    truth.update({{"n", spec.n}, {"d", spec.n}, {"k", spec.k}});
    truth.update(density_json(g.expectation));
    truth["factors"] = kurtosis_entries(kz);
    truth["identifiable"] = all_identifiable(kz);
  } else if (args.model == "mixed") {
    const MixedMembershipSpec spec = mixed_spec_from(kv);
    kv.reject_unused();
    const GeneratedGraph g = generate_mixed_membership(spec, args.seed);
    ensure_dir(out);
    write_matrix_market(out / "A.mtx", g.a);
    write_csv(out / "Z.csv", g.z);
    const std::vector<double> alpha(spec.alpha.data(), spec.alpha.data() + spec.alpha.size());
    std::vector<DistributionSpec> dists;
    for (int j = 0; j < spec.k; ++j) dists.push_back(DistributionSpec::dirichlet(alpha, j));
    const auto kz = kurtosis_of(dists);
    truth.update({{"n", spec.n}, {"d", spec.n}, {"k", spec.k}});
    truth.update(density_json(g.expectation));
    truth["factors"] = kurtosis_entries(kz);
    truth["identifiable"] = all_identifiable(kz);
  } else if (args.model == "lda") {
    const LdaSpec spec = lda_spec_from(kv, fs::path(args.spec).parent_path());
    kv.reject_unused();
    const GeneratedLda g = generate_lda(spec, args.seed);
    ensure_dir(out);
    write_matrix_market(out / "A.mtx", g.a);
    const RowVector mu = lda_z_star_mean(spec);
    write_csv(out / "Z.csv", g.z_star.rowwise() - mu);
    write_csv(out / "Z_star.csv", g.z_star);
    write_row(out / "mu_Z.csv", mu);
    write_csv(out / "theta.csv", g.z);
    write_csv_column(out / "xi.csv", g.xi);
    write_csv(out / "beta.csv", spec.beta);
    std::vector<DistributionSpec> dists;
    for (int j = 0; j < spec.k; ++j) dists.push_back(DistributionSpec::gamma(spec.alpha(j), spec.s));
    const auto kz = kurtosis_of(dists);
    truth.update({{"n", spec.n}, {"d", spec.d}, {"k", spec.k}});
    truth.update(density_json(g.expectation));
    truth["factors"] = kurtosis_entries(kz);
    truth["identifiable"] = all_identifiable(kz);
  } else {
    throw UsageError("simulate: unknown model " + args.model);
  }

  write_text(out / "truth.json", truth.dump(2) + "\n");
  json inputs = {{"spec", absolute_string(args.spec)}};
  write_manifest(out, "simulate", argv, std::move(inputs), std::move(config), args.seed, start);
}

void run_evaluate(const EvaluateArgs& args, const std::vector<std::string>& argv) {
  const auto start = Clock::now();
  const fs::path est_dir(args.est);
  const fs::path truth_dir(args.truth);
  Matrix est = read_csv(est_dir / args.est_file);
  const Matrix truth = read_csv(truth_dir / args.truth_file);
  if (args.recentered) {
    const Matrix mu = read_csv(est_dir / "mu_Z.csv");
    if (mu.rows() != 1 || mu.cols() != est.cols())
      throw DataError("evaluate: mu_Z.csv must be one row of " + std::to_string(est.cols()) + " values");
    est = est.rowwise() + RowVector(mu.row(0));
  }
  if (est.rows() != truth.rows() || est.cols() != truth.cols())
    throw DataError("evaluate: shape mismatch, estimate is " + std::to_string(est.rows()) + "x" +
                    std::to_string(est.cols()) + " and truth is " + std::to_string(truth.rows()) + "x" +
                    std::to_string(truth.cols()));
  const AlignMode mode = args.mode == "greedy" ? AlignMode::greedy : AlignMode::exact;
  if (mode == AlignMode::exact && est.cols() > 8)
    throw UsageError("evaluate: --mode exact enumerates all signed permutations and supports k <= 8; use --mode greedy for k=" +
                     std::to_string(est.cols()));
  const AlignmentResult al = align_factors(est, truth, mode);

  json report;
  report["mode"] = args.mode;
  report["n"] = est.rows();
  report["k"] = est.cols();
  report["err_two_inf"] = number(al.err_two_inf);
  report["err_frob"] = number(al.err_frob);
  std::vector<int> perm(al.best_p.perm.begin(), al.best_p.perm.end());
  std::vector<int> signs(al.best_p.signs.begin(), al.best_p.signs.end());
  report["permutation"] = perm;
  report["signs"] = signs;

  if (args.topics) {
    const Matrix beta_hat = read_csv(est_dir / "beta.csv");
    const Matrix beta = read_csv(truth_dir / "beta.csv");
    if (beta_hat.rows() != beta.rows() || beta_hat.cols() != beta.cols())
      throw DataError("evaluate: topic shape mismatch, estimate is " + std::to_string(beta_hat.rows()) + "x" +
                      std::to_string(beta_hat.cols()) + " and truth is " + std::to_string(beta.rows()) + "x" +
                      std::to_string(beta.cols()));
    const TopicError te = topic_l1_error(beta_hat, beta);
    report["topic_l1_error"] = number(te.error);
    report["topic_permutation"] = std::vector<int>(te.best_p.perm.begin(), te.best_p.perm.end());
  }

  const fs::path out = args.out.empty() ? est_dir / "evaluation" : fs::path(args.out);
  ensure_dir(out);
  const std::string text = report.dump(2) + "\n";
  write_text(out / "report.json", text);
  std::cout << text;
  json inputs = {{"est", absolute_string(args.est)}, {"truth", absolute_string(args.truth)}};
  json config = {{"mode", args.mode},       {"topics", args.topics},         {"recentered", args.recentered},
                 {"est_file", args.est_file}, {"truth_file", args.truth_file}};
  write_manifest(out, "evaluate", argv, std::move(inputs), std::move(config), 0, start);
}

void run_diagnose(const DiagnoseArgs& args, const std::vector<std::string>& argv) {
  const auto start = Clock::now();
  if (args.pairs_sample < 0) throw UsageError("diagnose: --pairs-sample must be nonnegative");
  const Matrix z = read_csv(args.factors);
  std::optional<Vector> svals;
  if (!args.svals.empty()) {
    const Matrix s = read_csv(args.svals);
    if (s.cols() != 1 && s.rows() != 1) throw DataError(args.svals + ": singular values must be a single row or column");
    svals = s.cols() == 1 ? Vector(s.col(0)) : Vector(s.row(0).transpose());
  }
  DiagnosticsOptions opts;
  opts.pair_sample_size = args.pairs_sample;
  opts.seed = args.seed;
  const DiagnosticsBundle diag = diagnostics(z, svals, z, opts);
  const fs::path out(args.out);
  ensure_dir(out);
  write_diagnostics(out, diag);
  print_kurtosis_table(diag);
  json inputs = {{"factors", absolute_string(args.factors)}};
  if (!args.svals.empty()) inputs["svals"] = absolute_string(args.svals);
  json config = {{"pairs_sample", args.pairs_sample}};
  write_manifest(out, "diagnose", argv, std::move(inputs), std::move(config), args.seed, start);
}

void run_ingest(const IngestArgs& args, const std::vector<std::string>& argv) {
  const auto start = Clock::now();
  if (args.min_count < 1) throw UsageError("ingest: --min-count must be >= 1");
  const DocumentTermMatrix dtm = ingest_corpus(args.corpus, args.min_count, args.binary);
  const fs::path out(args.out);
  const fs::path dir = out.has_parent_path() ? out.parent_path() : fs::path(".");
  ensure_dir(dir);
  write_matrix_market(out, dtm.counts);
  std::string vocab;
  for (const auto& w : dtm.vocab) vocab += w + "\n";
  write_text(dir / "vocab.txt", vocab);
  std::string docs;
  for (const auto& d : dtm.docs) docs += d + "\n";
  write_text(dir / "docs.txt", docs);
  json inputs = {{"corpus", absolute_string(args.corpus)}, {"documents", dtm.docs.size()}};
  json config = {{"min_count", args.min_count}, {"binary", args.binary}, {"vocabulary", dtm.vocab.size()}};
  write_manifest(dir, "ingest", argv, std::move(inputs), std::move(config), 0, start);
}

}  // namespace vsp::cli
