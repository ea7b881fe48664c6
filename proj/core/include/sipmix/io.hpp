#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sipmix/mixture.hpp"
#include "sipmix/sampler.hpp"
#include "sipmix/trace.hpp"

namespace sipmix {

/// Raised for malformed input files and failed writes. The message names the
/// path and, for CSV input, the offending row and column (header = row 1).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Dataset read_dataset(const std::filesystem::path& path);
/// Columns are named y1..yD unless names are given.
void write_dataset(const std::filesystem::path& path, const Dataset& data,
                   const std::vector<std::string>& names = {});

/// One JSON object per line; labels are written one-based.
void write_trace(const std::filesystem::path& path, const PosteriorTrace& trace);
PosteriorTrace read_trace(const std::filesystem::path& path);

/// Comma-separated rows, no header.
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

/// Everything `fit` needs besides the data.
struct RunConfig {
  Hyperparams hyperparams;
  std::uint64_t seed = 1;
  int chains = 1;
  bool record_weights = false;

  void validate() const;
};

/// Flat JSON mirroring the Hyperparams field names.
std::string config_to_json(const RunConfig& c);
/// Keys present in `text` override `base`. Accepts either the flat object or
/// a manifest carrying it under "config". Unknown keys are rejected.
RunConfig config_from_json(const std::string& text, const RunConfig& base = {});
RunConfig read_config(const std::filesystem::path& path, const RunConfig& base = {});

/// Chain i runs with seed ^ i.
std::uint64_t chain_seed(std::uint64_t seed, int chain);

void write_manifest(const std::filesystem::path& path, const RunConfig& c,
                    const std::string& command);

struct RunSummary {
  StepDiagnostics diagnostics;
  std::vector<double> ma_histogram;
  double ma_mean = 0.0;
  double ma_variance = 0.0;
  int n_samples = 0;
};

/// Writes the six acceptance rates (means, weights, gamma, zeta, birth, death)
/// with the M_a histogram.
void write_summary(const std::filesystem::path& path, const RunSummary& s);

std::string read_text(const std::filesystem::path& path);

}  // namespace sipmix
