//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CONFKIT_CLUSTERING_HPP_
#define CONFKIT_CLUSTERING_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "confkit/molecule.hpp"
#include "confkit/parallel.hpp"

namespace confkit {

/// One row per conformer: selected-atom coordinates after centering and
/// Kabsch alignment to the reference conformer, flattened as x1,y1,z1,x2,...
struct FeatureMatrix {
  Eigen::MatrixXd rows;
  std::size_t reference_index = 0;
  bool heavy_only = true;
};

/// Alignment reference: the lowest-energy conformer when any conformer
/// carries an energy (ties to the lowest index), otherwise index 0.
std::size_t alignment_reference(const Ensemble &ensemble);

/// Throws Error(kEmptyEnsemble) for an empty ensemble; alignment errors
/// propagate from geom3d.
FeatureMatrix featurize(const Ensemble &ensemble, const Molecule &molecule,
                        bool heavy_only = true);

struct KmeansOptions {
  int max_iters = 300;
  ExecPolicy exec = ExecPolicy::kParallel;
};

struct ClusterModel {
  int k = 0;
  std::vector<int> assignments;
  Eigen::MatrixXd centroids;  // k x dim
  double inertia = 0;
  std::vector<std::size_t> medoid_indices;
  std::vector<double> inertia_history;  // after each Lloyd update
  int iterations = 0;
};

/// k-means++ seeding followed by Lloyd iterations until the assignments stop
/// changing or max_iters is reached. Assignment ties go to the lower cluster
/// index; a cluster that empties is re-seeded with the point farthest from
/// its own centroid. Deterministic for a given seed.
///
/// Errors: kInvalidArgument when k < 1 or k > rows.
ClusterModel kmeans(const FeatureMatrix &features, int k, std::uint64_t seed,
                    const KmeansOptions &options = { });

enum class RepresentativeMode {
  kMedoid,
  kCentroid,
};

/// One conformer per cluster, ordered by cluster index. Medoid mode returns
/// the untouched input conformers nearest to each centroid. Centroid mode
/// rebuilds conformers from the centroid vectors; it needs all-atom
/// features and yields geometry that may not be physical.
///
/// Errors: kEnsembleMismatch when the model was not built from this ensemble.
Ensemble select_representatives(const Ensemble &ensemble, const ClusterModel &model,
                                RepresentativeMode mode = RepresentativeMode::kMedoid);

namespace kernels {
  /// Nearest-centroid assignment; writes per-row squared distances. Both
  /// output vectors are resized to the row count.
  /// Returns the number of rows whose assignment changed.
  std::size_t assign_nearest(const Eigen::MatrixXd &rows, const Eigen::MatrixXd &centroids,
                             std::vector<int> &assignments, std::vector<double> &dist2,
                             ExecPolicy exec);
}  // namespace kernels

}  // namespace confkit

#endif  // CONFKIT_CLUSTERING_HPP_
