#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "sipmix/mixture.hpp"
#include "sipmix/trace.hpp"

namespace sipmix {

class Rng;

/// Number of distinct labels.
int count_allocated(std::span<const int> alloc);

/// s_ij = share of samples in which i and j share a label.
Eigen::MatrixXd posterior_similarity(const PosteriorTrace& trace);

/// Σ_{i<j} (1{c_i = c_j} - s_ij)².
double binder_loss(std::span<const int> alloc, const Eigen::MatrixXd& psm);

struct BinderResult {
  std::vector<int> labels;  ///< relabelled 0.. in order of first appearance
  double loss = 0.0;
  int sample_index = 0;  ///< earliest sample carrying the winning partition
};

/// Minimises Binder loss over the sampled partitions.
BinderResult binder_estimate(const PosteriorTrace& trace, const Eigen::MatrixXd& psm);

/// Labels relabelled in order of first appearance.
std::vector<int> canonical_partition(std::span<const int> alloc);

/// Normalised frequencies of M_a; entry k is P(M_a = k), entry 0 always 0.
/// Length is min(m, n) + 1.
std::vector<double> prior_ma_simulation(double alpha0, double gamma, int m, int n, int reps,
                                        Rng& rng);

/// Empirical M_a frequencies of a trace, indexed by M_a.
std::vector<double> ma_histogram(const PosteriorTrace& trace);

struct MaSummary {
  double mean = 0.0;
  double variance = 0.0;
};
MaSummary ma_summary(const PosteriorTrace& trace);

/// Mean absolute pairwise gap between centres along each column.
std::vector<double> center_gap_statistic(const Eigen::MatrixXd& centers);

struct ElicitationResult {
  double zeta = 0.0;
  double data_statistic = 0.0;           ///< averaged over dimensions
  std::vector<double> per_dimension;     ///< the data statistic for each dimension
  std::vector<double> grid_statistics;   ///< simulated GE statistic for each grid ζ
};

/// Picks the grid ζ whose GE(k, ζ) gap statistic is closest to that of the
/// k-means centres. Throws if k > N, k < 2 or the grid is empty.
ElicitationResult elicit_zeta(const Dataset& data, int k, std::span<const double> zeta_grid,
                              int reps, Rng& rng);

}  // namespace sipmix
