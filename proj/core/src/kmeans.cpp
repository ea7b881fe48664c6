#include "sipmix/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

#include "sipmix/rng.hpp"

namespace sipmix {
namespace {

double nearest(const Eigen::MatrixXd& centers, int k, const Eigen::RowVectorXd& x, int& label) {
  double best = std::numeric_limits<double>::infinity();
  label = 0;
  for (int c = 0; c < k; ++c) {
    const double d2 = (centers.row(c) - x).squaredNorm();
    if (d2 < best) {
      best = d2;
      label = c;
    }
  }
  return best;
}

Eigen::MatrixXd seed_plus_plus(const Eigen::MatrixXd& pts, int k, Rng& rng) {
  const int n = static_cast<int>(pts.rows());
  Eigen::MatrixXd centers(k, pts.cols());
  centers.row(0) = pts.row(rng.uniform_int(n));
  std::vector<double> d2(n);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      int lab;
      d2[i] = nearest(centers, c, pts.row(i), lab);
      total += d2[i];
    }
    int pick = rng.uniform_int(n);
    if (total > 0.0) {
      double u = rng.uniform() * total;
      for (int i = 0; i < n; ++i) {
        u -= d2[i];
        if (u <= 0.0) {
          pick = i;
          break;
        }
      }
    }
    centers.row(c) = pts.row(pick);
  }
  return centers;
}

KMeansResult lloyd(const Eigen::MatrixXd& pts, Eigen::MatrixXd centers, const KMeansOptions& opt) {
  const int n = static_cast<int>(pts.rows());
  const int k = static_cast<int>(centers.rows());
  KMeansResult r;
  r.labels.assign(n, 0);
  double prev = std::numeric_limits<double>::infinity();
  for (r.iterations = 1; r.iterations <= opt.max_iter; ++r.iterations) {
    r.inertia = 0.0;
    for (int i = 0; i < n; ++i) r.inertia += nearest(centers, k, pts.row(i), r.labels[i]);
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, pts.cols());
    std::vector<int> sizes(k, 0);
    for (int i = 0; i < n; ++i) {
      sums.row(r.labels[i]) += pts.row(i);
      ++sizes[r.labels[i]];
    }
    for (int c = 0; c < k; ++c) {
      // An emptied cluster keeps its previous centre.
      if (sizes[c] > 0) centers.row(c) = sums.row(c) / sizes[c];
    }
    if (prev - r.inertia <= opt.tol * std::max(1.0, r.inertia)) break;
    prev = r.inertia;
  }
  r.inertia = 0.0;
  for (int i = 0; i < n; ++i) r.inertia += nearest(centers, k, pts.row(i), r.labels[i]);
  r.centers = std::move(centers);
  return r;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, Rng& rng, const KMeansOptions& options) {
  const int n = static_cast<int>(points.rows());
  if (k < 1 || k > n) {
    throw std::invalid_argument("kmeans: k = " + std::to_string(k) + " with " +
                                std::to_string(n) + " points");
  }
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, options.restarts); ++r) {
    KMeansResult cur = lloyd(points, seed_plus_plus(points, k, rng), options);
    if (cur.inertia < best.inertia) best = std::move(cur);
  }
  return best;
}

}  // namespace sipmix
