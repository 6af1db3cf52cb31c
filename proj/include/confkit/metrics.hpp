//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CONFKIT_METRICS_HPP_
#define CONFKIT_METRICS_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "confkit/geom3d.hpp"
#include "confkit/molecule.hpp"
#include "confkit/parallel.hpp"

namespace confkit {

inline constexpr double kThresholdQm9 = 0.5;     // A
inline constexpr double kThresholdDrugs = 1.25;  // A

struct MetricsConfig {
  double threshold = kThresholdQm9;
  ExecPolicy exec = ExecPolicy::kParallel;
};

struct MoleculeMetrics {
  std::string molecule_id;
  double cov = 0;  // fraction in [0, 1]
  double mat = 0;  // A
  std::size_t n_ref = 0;
  std::size_t n_gen = 0;
};

struct MetricsReport {
  std::vector<MoleculeMetrics> molecules;
  double cov_mean = 0;
  double cov_median = 0;
  double mat_mean = 0;
  double mat_median = 0;
  double threshold = 0;
};

/// Heavy-atom RMSD between every reference (row) and generated (column)
/// conformer. Throws Error(kEnsembleMismatch) when either ensemble does not
/// match the molecule.
Eigen::MatrixXd rmsd_matrix(const Ensemble &generated, const Ensemble &reference,
                            const Molecule &molecule, ExecPolicy exec = ExecPolicy::kParallel);

/// Fraction of reference conformers with some generated conformer strictly
/// closer than the threshold.
/// Errors: kEmptyEnsemble for an empty reference, kEnsembleMismatch.
double coverage(const Ensemble &generated, const Ensemble &reference,
                const Molecule &molecule, const MetricsConfig &config);

/// Mean over reference conformers of the smallest RMSD to any generated one.
/// Errors: kEmptyEnsemble if either side is empty, kEnsembleMismatch.
double matching(const Ensemble &generated, const Ensemble &reference,
                const Molecule &molecule, ExecPolicy exec = ExecPolicy::kParallel);

/// COV and MAT from one RMSD matrix (rows = references).
double coverage_from_matrix(const Eigen::MatrixXd &rmsd, double threshold);
double matching_from_matrix(const Eigen::MatrixXd &rmsd);

/// Both metrics sharing a single RMSD matrix.
MoleculeMetrics evaluate_molecule(const Ensemble &generated, const Ensemble &reference,
                                  const Molecule &molecule, const MetricsConfig &config);

double mean_of(const std::vector<double> &values);

/// Middle element, or the mean of the two middle elements for even counts.
double median_of(std::vector<double> values);

/// Mean and median of COV and MAT. Throws Error(kInvalidArgument) when the
/// list is empty.
MetricsReport summarize(const std::vector<MoleculeMetrics> &per_molecule,
                        double threshold = kThresholdQm9);

namespace kernels {
  /// RMSD for every (row, column) pair of pre-gathered point sets.
  Eigen::MatrixXd rmsd_matrix(const std::vector<std::vector<Vec3>> &rows,
                              const std::vector<std::vector<Vec3>> &cols,
                              ExecPolicy exec);
}  // namespace kernels

}  // namespace confkit

#endif  // CONFKIT_METRICS_HPP_
