//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#include "confkit/clustering.hpp"

#include <algorithm>
#include <limits>

#include "confkit/error.hpp"
#include "confkit/geom3d.hpp"
#include "confkit/random.hpp"

namespace confkit {
namespace {
  double row_dist2(const Eigen::MatrixXd &a, Eigen::Index i, const Eigen::MatrixXd &b,
                   Eigen::Index j) {
    return (a.row(i) - b.row(j)).squaredNorm();
  }

  Eigen::MatrixXd kmeanspp_init(const Eigen::MatrixXd &rows, int k, Rng &rng) {
    const Eigen::Index n = rows.rows();
    Eigen::MatrixXd centers(k, rows.cols());
    std::vector<bool> chosen(n, false);
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());

    Eigen::Index pick = static_cast<Eigen::Index>(rng.below(n));
    for (int c = 0; c < k; ++c) {
      if (c > 0) {
        double total = 0;
        for (Eigen::Index i = 0; i < n; ++i)
          total += d2[i];
        if (total > 0) {
          const double target = rng.uniform() * total;
          double acc = 0;
          pick = -1;
          for (Eigen::Index i = 0; i < n; ++i) {
            if (d2[i] <= 0)
              continue;
            acc += d2[i];
            pick = i;
            if (acc > target)
              break;
          }
        } else {
          // Every remaining point duplicates a center; take any unchosen one.
          std::vector<Eigen::Index> free;
          for (Eigen::Index i = 0; i < n; ++i) {
            if (!chosen[i])
              free.push_back(i);
          }
          pick = free[rng.below(free.size())];
        }
      }
      chosen[pick] = true;
      centers.row(c) = rows.row(pick);
      for (Eigen::Index i = 0; i < n; ++i)
        d2[i] = std::min(d2[i], row_dist2(rows, i, centers, c));
    }
    return centers;
  }

  void update_centroids(const Eigen::MatrixXd &rows, const std::vector<int> &assign,
                        Eigen::MatrixXd &centroids, std::vector<int> &sizes) {
    centroids.setZero();
    std::fill(sizes.begin(), sizes.end(), 0);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      centroids.row(assign[i]) += rows.row(i);
      ++sizes[assign[i]];
    }
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      if (sizes[c] > 0)
        centroids.row(c) /= static_cast<double>(sizes[c]);
    }
  }

  // Moves far-away points into empty clusters. Only clusters with more than
  // one member donate, so no new empty cluster appears.
  bool repair_empty(const Eigen::MatrixXd &rows, std::vector<int> &assign,
                    Eigen::MatrixXd &centroids, std::vector<int> &sizes) {
    bool changed = false;
    for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
      if (sizes[c] > 0)
        continue;
      Eigen::Index far = -1;
      double best = -1;
      for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        if (sizes[assign[i]] < 2)
          continue;
        const double d = row_dist2(rows, i, centroids, assign[i]);
        if (d > best) {
          best = d;
          far = i;
        }
      }
      if (far < 0)
        break;
      --sizes[assign[far]];
      assign[far] = static_cast<int>(c);
      sizes[c] = 1;
      update_centroids(rows, assign, centroids, sizes);
      changed = true;
    }
    return changed;
  }

  double inertia_of(const Eigen::MatrixXd &rows, const std::vector<int> &assign,
                    const Eigen::MatrixXd &centroids) {
    double sum = 0;
    for (Eigen::Index i = 0; i < rows.rows(); ++i)
      sum += row_dist2(rows, i, centroids, assign[i]);
    return sum;
  }
}  // namespace

std::size_t alignment_reference(const Ensemble &ensemble) {
  std::size_t best = 0;
  bool found = false;
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const auto &e = ensemble.conformers[i].energy;
    if (e && (!found || *e < *ensemble.conformers[best].energy)) {
      best = i;
      found = true;
    }
  }
  return best;
}

FeatureMatrix featurize(const Ensemble &ensemble, const Molecule &molecule,
                        bool heavy_only) {
  if (ensemble.empty())
    throw Error(ErrorCode::kEmptyEnsemble, "cannot featurize an empty ensemble");
  validate_ensemble(molecule, ensemble);

  const std::vector<std::size_t> selection =
      heavy_only ? molecule.heavy_indices() : molecule.all_indices();
  FeatureMatrix fm;
  fm.heavy_only = heavy_only;
  fm.reference_index = alignment_reference(ensemble);
  const Conformer ref =
      centroid_center(ensemble.conformers[fm.reference_index], selection);
  const auto ref_pts = gather(ref, selection);

  const auto dim = static_cast<Eigen::Index>(3 * selection.size());
  fm.rows.resize(static_cast<Eigen::Index>(ensemble.size()), dim);
  for (std::size_t r = 0; r < ensemble.size(); ++r) {
    const auto pts = gather(centroid_center(ensemble.conformers[r], selection), selection);
    const AlignmentTransform t = kabsch_transform(pts, ref_pts);
    for (std::size_t a = 0; a < pts.size(); ++a)
      fm.rows.row(static_cast<Eigen::Index>(r)).segment<3>(3 * a) = t.apply(pts[a]);
  }
  return fm;
}

std::size_t kernels::assign_nearest(const Eigen::MatrixXd &rows,
                                    const Eigen::MatrixXd &centroids,
                                    std::vector<int> &assignments,
                                    std::vector<double> &dist2, ExecPolicy exec) {
  const auto n = static_cast<std::size_t>(rows.rows());
  assignments.resize(n, -1);
  dist2.resize(n);
  std::vector<char> changed(n, 0);
  for_each_index(exec, n, [&](std::size_t i) {
    const auto row = static_cast<Eigen::Index>(i);
    int best = 0;
    double best_d = row_dist2(rows, row, centroids, 0);
    for (Eigen::Index c = 1; c < centroids.rows(); ++c) {
      const double d = row_dist2(rows, row, centroids, c);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    changed[i] = assignments[i] != best;
    assignments[i] = best;
    dist2[i] = best_d;
  });
  return static_cast<std::size_t>(std::count(changed.begin(), changed.end(), 1));
}

ClusterModel kmeans(const FeatureMatrix &features, int k, std::uint64_t seed,
                    const KmeansOptions &options) {
  const Eigen::MatrixXd &rows = features.rows;
  const Eigen::Index n = rows.rows();
  if (k < 1 || k > n)
    throw Error(ErrorCode::kInvalidArgument,
                "k must lie in [1, " + std::to_string(n) + "], got " + std::to_string(k));

  Rng rng(derive_seed(seed, { }, Stream::kKmeans, 0));
  ClusterModel model;
  model.k = k;
  model.centroids = kmeanspp_init(rows, k, rng);
  model.assignments.assign(n, -1);

  std::vector<double> dist2(n);
  std::vector<int> sizes(k);
  for (int iter = 0; iter < std::max(1, options.max_iters); ++iter) {
    const std::size_t moved = kernels::assign_nearest(rows, model.centroids,
                                                      model.assignments, dist2, options.exec);
    if (iter > 0 && moved == 0)
      break;
    update_centroids(rows, model.assignments, model.centroids, sizes);
    repair_empty(rows, model.assignments, model.centroids, sizes);
    model.inertia_history.push_back(inertia_of(rows, model.assignments, model.centroids));
    model.iterations = iter + 1;
  }

  model.inertia = inertia_of(rows, model.assignments, model.centroids);

  model.medoid_indices.assign(k, 0);
  std::vector<double> best(k, std::numeric_limits<double>::infinity());
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = model.assignments[i];
    const double d = row_dist2(rows, i, model.centroids, c);
    if (d < best[c]) {
      best[c] = d;
      model.medoid_indices[c] = static_cast<std::size_t>(i);
    }
  }
  return model;
}

Ensemble select_representatives(const Ensemble &ensemble, const ClusterModel &model,
                                RepresentativeMode mode) {
  if (model.assignments.size() != ensemble.size())
    throw Error(ErrorCode::kEnsembleMismatch,
                "cluster model covers " + std::to_string(model.assignments.size())
                    + " conformers, ensemble has " + std::to_string(ensemble.size()));

  Ensemble out { ensemble.molecule_id, { } };
  out.conformers.reserve(model.k);
  if (mode == RepresentativeMode::kMedoid) {
    for (int c = 0; c < model.k; ++c)
      out.conformers.push_back(ensemble.conformers.at(model.medoid_indices[c]));
    return out;
  }

  const std::size_t natoms = ensemble.conformers.front().size();
  if (static_cast<std::size_t>(model.centroids.cols()) != 3 * natoms)
    throw Error(ErrorCode::kInvalidArgument,
                "centroid mode needs all-atom features (featurize heavy_only=false)");
  for (int c = 0; c < model.k; ++c) {
    Conformer conf;
    conf.molecule_id = ensemble.molecule_id;
    conf.provenance = Provenance::kExternal;
    conf.coords.resize(natoms);
    for (std::size_t a = 0; a < natoms; ++a)
      conf.coords[a] = model.centroids.row(c).segment<3>(3 * a).transpose();
    out.conformers.push_back(std::move(conf));
  }
  return out;
}

}  // namespace confkit
