#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.hpp"
#include "vsp/error.hpp"

namespace {

using namespace vsp::cli;

int run(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  CLI::App app{"vsp: Varimax-rotated sparse PCA toolkit"};
  app.require_subcommand(1);

  DecomposeArgs dec;
  auto* decompose = app.add_subcommand("decompose", "Center/scale, truncated SVD, and Varimax-rotate a sparse matrix");
  decompose->add_option("--input", dec.input, "MatrixMarket (.mtx) or '#rows cols' triplet file");
  decompose->add_option("--k", dec.config.k, "Number of factors");
  decompose->add_flag("--center", dec.config.center, "Double-center the input implicitly");
  decompose->add_flag("--scale", dec.config.scale, "Use the regularized degree-normalized matrix");
  decompose->add_flag("--recenter", dec.config.recenter, "Estimate factor means (requires --center)");
  decompose->add_flag("--rescale", dec.config.rescale, "Undo degree scaling on the outputs (requires --scale)");
  decompose->add_option("--center-mode", dec.center_mode, "full or column")->check(CLI::IsMember({"full", "column"}));
  decompose->add_option("--seed", dec.config.seed, "PRNG seed");
  decompose->add_option("--out", dec.out, "Output directory");
  decompose->add_option("--oversample", dec.config.svd.oversample, "Extra subspace columns");
  decompose->add_option("--power-iters", dec.config.svd.power_iters, "Subspace iterations");
  decompose->add_option("--varimax-tol", dec.config.varimax_tol, "Relative objective tolerance per sweep");
  decompose->add_option("--varimax-max-sweeps", dec.config.varimax_max_sweeps, "Sweep limit");
  decompose->add_option("--varimax-restarts", dec.config.varimax_restarts, "Random restarts (1 = identity start only)");
  decompose->add_flag("--kaiser-normalize", dec.config.kaiser_normalize, "Row-normalize before solving Varimax");
  decompose->add_option("--pairs-sample", dec.pairs_sample, "Rows in pairs.csv");
  decompose->add_flag("--clip-simplex", dec.clip_simplex, "Also write beta_clipped.csv (column mode)");
  decompose->add_option("--from-manifest", dec.from_manifest, "Re-run the configuration recorded in a run.json");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Sample a matrix from a model family");
  simulate->add_option("--model", sim.model, "factor|sbm|dcsbm|overlap|mixed|lda")
      ->required()
      ->check(CLI::IsMember({"factor", "sbm", "dcsbm", "overlap", "mixed", "lda"}));
  simulate->add_option("--spec", sim.spec, "key = value spec file")->required();
  simulate->add_option("--seed", sim.seed, "PRNG seed");
  simulate->add_option("--out", sim.out, "Output directory");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand("evaluate", "Align estimated factors with the truth over signed permutations");
  evaluate->add_option("--est", ev.est, "Directory with estimated factors")->required();
  evaluate->add_option("--truth", ev.truth, "Directory with true factors")->required();
  evaluate->add_option("--out", ev.out, "Report directory (default: <est>/evaluation)");
  evaluate->add_option("--mode", ev.mode, "exact or greedy")->check(CLI::IsMember({"exact", "greedy"}));
  evaluate->add_option("--est-file", ev.est_file, "Factor file inside --est");
  evaluate->add_option("--truth-file", ev.truth_file, "Factor file inside --truth");
  evaluate->add_flag("--topics", ev.topics, "Also compare beta.csv files");
  evaluate->add_flag("--recentered", ev.recentered, "Add mu_Z.csv to the estimate before aligning");

  DiagnoseArgs dg;
  auto* diagnose = app.add_subcommand("diagnose", "Kurtosis, scree, pair-plot sample, participation ratios");
  diagnose->add_option("--factors", dg.factors, "Factor CSV")->required();
  diagnose->add_option("--svals", dg.svals, "Singular value CSV");
  diagnose->add_option("--pairs-sample", dg.pairs_sample, "Rows in pairs.csv");
  diagnose->add_option("--seed", dg.seed, "PRNG seed");
  diagnose->add_option("--out", dg.out, "Output directory")->required();

  IngestArgs ing;
  auto* ingest = app.add_subcommand("ingest", "Build a document-term matrix from a directory of text files");
  ingest->add_option("--corpus", ing.corpus, "Directory with one document per file")->required();
  ingest->add_option("--min-count", ing.min_count, "Minimum document frequency")->required();
  ingest->add_option("--out", ing.out, "Output MatrixMarket path")->required();
  ingest->add_flag("--binary", ing.binary, "Record presence (0/1) instead of counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (decompose->parsed()) run_decompose(dec, args);
    if (simulate->parsed()) run_simulate(sim, args);
    if (evaluate->parsed()) run_evaluate(ev, args);
    if (diagnose->parsed()) run_diagnose(dg, args);
    if (ingest->parsed()) run_ingest(ing, args);
  } catch (const vsp::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const vsp::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const vsp::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericalError;
  }
  return kSuccess;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
