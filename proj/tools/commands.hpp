#pragma once

#include <string>
#include <vector>

#include "vsp/pipeline.hpp"

namespace vsp::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kDataError = 2, kNumericalError = 3 };

struct DecomposeArgs {
  std::string input;
  std::string out = "vsp_out";
  std::string center_mode = "full";
  std::string from_manifest;
  VspConfig config;
  long long pairs_sample = 5000;
  bool clip_simplex = false;
};

struct SimulateArgs {
  std::string model;
  std::string spec;
  std::string out = "sim_out";
  unsigned long long seed = 0;
};

struct EvaluateArgs {
  std::string est;
  std::string truth;
  std::string out;
  std::string mode = "exact";
  std::string est_file = "Z.csv";
  std::string truth_file = "Z.csv";
  bool topics = false;
  bool recentered = false;
};

struct DiagnoseArgs {
  std::string factors;
  std::string svals;
  std::string out = "diagnostics";
  long long pairs_sample = 5000;
  unsigned long long seed = 0;
};

struct IngestArgs {
  std::string corpus;
  std::string out;
  int min_count = 1;
  bool binary = false;
};

// Each command throws vsp::Error subclasses; main maps them to exit codes.
void run_decompose(DecomposeArgs args, const std::vector<std::string>& argv);
void run_simulate(const SimulateArgs& args, const std::vector<std::string>& argv);
void run_evaluate(const EvaluateArgs& args, const std::vector<std::string>& argv);
void run_diagnose(const DiagnoseArgs& args, const std::vector<std::string>& argv);
void run_ingest(const IngestArgs& args, const std::vector<std::string>& argv);

}  // namespace vsp::cli
