#include "sipmix/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include "sipmix/ensemble.hpp"
#include "sipmix/kmeans.hpp"
#include "sipmix/rng.hpp"
#include "sipmix/selberg.hpp"

namespace sipmix {

void PosteriorTrace::validate() const {
  const int n = n_obs();
  for (std::size_t t = 0; t < samples.size(); ++t) {
    const auto& s = samples[t];
    const std::string where = "trace sample " + std::to_string(t) + ": ";
    if (static_cast<int>(s.alloc.size()) != n) {
      throw std::invalid_argument(where + "allocation length differs from the first sample");
    }
    if (s.m < 1) throw std::invalid_argument(where + "m must be positive");
    for (int a : s.alloc) {
      if (a < 0 || a >= s.m) throw std::invalid_argument(where + "label outside [0, m)");
    }
    if (!s.alloc.empty() && count_allocated(s.alloc) != s.m_a) {
      throw std::invalid_argument(where + "m_a does not match the distinct labels");
    }
    if (s.weights && static_cast<int>(s.weights->size()) != s.m) {
      throw std::invalid_argument(where + "weights length differs from m");
    }
  }
}

int count_allocated(std::span<const int> alloc) {
  std::vector<int> v(alloc.begin(), alloc.end());
  std::sort(v.begin(), v.end());
  return static_cast<int>(std::unique(v.begin(), v.end()) - v.begin());
}

Eigen::MatrixXd posterior_similarity(const PosteriorTrace& trace) {
  if (trace.samples.empty()) throw std::invalid_argument("posterior_similarity: empty trace");
  const int n = trace.n_obs();
  Eigen::MatrixXi together = Eigen::MatrixXi::Zero(n, n);
  for (const auto& s : trace.samples) {
    for (int j = 0; j < n; ++j) {
      const int cj = s.alloc[j];
      for (int i = 0; i < j; ++i) together(i, j) += s.alloc[i] == cj;
    }
  }
  const double t = static_cast<double>(trace.samples.size());
  Eigen::MatrixXd psm = Eigen::MatrixXd::Identity(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) psm(i, j) = psm(j, i) = together(i, j) / t;
  }
  return psm;
}

double binder_loss(std::span<const int> alloc, const Eigen::MatrixXd& psm) {
  const int n = static_cast<int>(alloc.size());
  if (psm.rows() != n || psm.cols() != n) {
    throw std::invalid_argument("binder_loss: similarity matrix size differs from partition");
  }
  double loss = 0.0;
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      const double r = (alloc[i] == alloc[j] ? 1.0 : 0.0) - psm(i, j);
      loss += r * r;
    }
  }
  return loss;
}

std::vector<int> canonical_partition(std::span<const int> alloc) {
  std::map<int, int> relabel;
  std::vector<int> out(alloc.size());
  for (std::size_t i = 0; i < alloc.size(); ++i) {
    auto it = relabel.try_emplace(alloc[i], static_cast<int>(relabel.size())).first;
    out[i] = it->second;
  }
  return out;
}

BinderResult binder_estimate(const PosteriorTrace& trace, const Eigen::MatrixXd& psm) {
  if (trace.samples.empty()) throw std::invalid_argument("binder_estimate: empty trace");
  std::map<std::vector<int>, int> seen;
  BinderResult best;
  best.loss = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trace.samples.size(); ++t) {
    auto part = canonical_partition(trace.samples[t].alloc);
    if (!seen.try_emplace(part, static_cast<int>(t)).second) continue;
    const double loss = binder_loss(part, psm);
    if (loss < best.loss) {
      best.loss = loss;
      best.labels = std::move(part);
      best.sample_index = static_cast<int>(t);
    }
  }
  return best;
}

std::vector<double> prior_ma_simulation(double alpha0, double gamma, int m, int n, int reps,
                                        Rng& rng) {
  if (n < 1 || reps < 1) throw std::invalid_argument("prior_ma_simulation: n and reps must be positive");
  const SdirParams p{alpha0, gamma, m};
  p.validate();
  const auto draws = sample_sdir(p, reps, rng);
  std::vector<double> hist(std::min(m, n) + 1, 0.0);
  std::vector<double> cdf(m);
  std::vector<char> hit(m);
  for (const auto& w : draws) {
    double acc = 0.0;
    for (int k = 0; k < m; ++k) cdf[k] = acc += w[k];
    std::fill(hit.begin(), hit.end(), 0);
    int distinct = 0;
    for (int i = 0; i < n; ++i) {
      const double u = rng.uniform() * acc;
      const int k = std::min<int>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin(), m - 1);
      if (!hit[k]) {
        hit[k] = 1;
        ++distinct;
      }
    }
    hist[distinct] += 1.0;
  }
  for (double& h : hist) h /= reps;
  return hist;
}

std::vector<double> ma_histogram(const PosteriorTrace& trace) {
  int top = 0;
  for (const auto& s : trace.samples) top = std::max(top, s.m_a);
  std::vector<double> hist(top + 1, 0.0);
  for (const auto& s : trace.samples) hist[s.m_a] += 1.0;
  if (!trace.samples.empty()) {
    for (double& h : hist) h /= static_cast<double>(trace.samples.size());
  }
  return hist;
}

MaSummary ma_summary(const PosteriorTrace& trace) {
  MaSummary r;
  if (trace.samples.empty()) return r;
  const double t = static_cast<double>(trace.samples.size());
  for (const auto& s : trace.samples) r.mean += s.m_a;
  r.mean /= t;
  for (const auto& s : trace.samples) r.variance += (s.m_a - r.mean) * (s.m_a - r.mean);
  r.variance /= t;
  return r;
}

std::vector<double> center_gap_statistic(const Eigen::MatrixXd& centers) {
  const int k = static_cast<int>(centers.rows());
  std::vector<double> stat(centers.cols(), 0.0);
  if (k < 2) return stat;
  const double pairs = 0.5 * k * (k - 1);
  for (int d = 0; d < centers.cols(); ++d) {
    double acc = 0.0;
    for (int j = 0; j < k; ++j) {
      for (int i = 0; i < j; ++i) acc += std::abs(centers(i, d) - centers(j, d));
    }
    stat[d] = acc / pairs;
  }
  return stat;
}

ElicitationResult elicit_zeta(const Dataset& data, int k, std::span<const double> zeta_grid,
                              int reps, Rng& rng) {
  if (k < 2) throw std::invalid_argument("elicit_zeta: k must be at least 2");
  if (k > data.n()) {
    throw std::invalid_argument("elicit_zeta: k = " + std::to_string(k) + " exceeds N = " +
                                std::to_string(data.n()));
  }
  if (zeta_grid.empty()) throw std::invalid_argument("elicit_zeta: empty grid");
  if (reps < 1) throw std::invalid_argument("elicit_zeta: reps must be positive");

  ElicitationResult r;
  const KMeansResult km = kmeans(data.y, k, rng);
  r.per_dimension = center_gap_statistic(km.centers);
  for (double v : r.per_dimension) r.data_statistic += v;
  r.data_statistic /= static_cast<double>(r.per_dimension.size());

  double best = std::numeric_limits<double>::infinity();
  for (double zeta : zeta_grid) {
    const auto draws = sample_ge(GeParams{zeta, k}, reps, rng);
    double acc = 0.0;
    for (const auto& x : draws) {
      Eigen::Map<const Eigen::VectorXd> col(x.data(), k);
      acc += center_gap_statistic(col)[0];
    }
    const double stat = acc / reps;
    r.grid_statistics.push_back(stat);
    const double gap = std::abs(stat - r.data_statistic);
    if (gap < best) {
      best = gap;
      r.zeta = zeta;
    }
  }
  return r;
}

}  // namespace sipmix
