#pragma once

#include <Eigen/Dense>
#include <vector>

namespace sipmix {

class Rng;

struct KMeansOptions {
  int restarts = 10;
  double tol = 1e-8;
  int max_iter = 500;
};

struct KMeansResult {
  Eigen::MatrixXd centers;  ///< k × D
  std::vector<int> labels;
  double inertia = 0.0;
  int iterations = 0;
};

/// Lloyd iterations from k-means++ seeds; the restart with the lowest
/// within-cluster sum of squares wins. Throws if k > N or k < 1.
KMeansResult kmeans(const Eigen::MatrixXd& points, int k, Rng& rng,
                    const KMeansOptions& options = {});

}  // namespace sipmix
