#pragma once

#include <optional>
#include <vector>

namespace sipmix {

/// One retained MCMC draw.
struct TraceSample {
  int m = 0;
  int m_a = 0;
  std::vector<int> alloc;  ///< zero-based labels in [0, m)
  double gamma = 0.0;
  double zeta = 0.0;
  std::optional<std::vector<double>> weights;

  friend bool operator==(const TraceSample&, const TraceSample&) = default;
};

struct PosteriorTrace {
  std::vector<TraceSample> samples;

  /// Throws std::invalid_argument if any sample breaks its invariants
  /// (labels within [0, m), m_a equal to the number of distinct labels,
  /// equal allocation lengths across samples).
  void validate() const;
  int n_obs() const { return samples.empty() ? 0 : static_cast<int>(samples.front().alloc.size()); }

  friend bool operator==(const PosteriorTrace&, const PosteriorTrace&) = default;
};

}  // namespace sipmix
