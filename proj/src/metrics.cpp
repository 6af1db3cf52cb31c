//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#include "confkit/metrics.hpp"

#include <algorithm>

#include "confkit/error.hpp"

namespace confkit {
namespace {
  std::vector<std::vector<Vec3>> gather_all(const Ensemble &ensemble,
                                            const Molecule &molecule) {
    std::vector<std::vector<Vec3>> out;
    out.reserve(ensemble.size());
    for (const auto &c: ensemble.conformers) {
      validate_conformer(molecule, c);
      out.push_back(gather(c, molecule.heavy_indices()));
    }
    return out;
  }
}  // namespace

Eigen::MatrixXd kernels::rmsd_matrix(const std::vector<std::vector<Vec3>> &rows,
                                     const std::vector<std::vector<Vec3>> &cols,
                                     ExecPolicy exec) {
  const auto nr = static_cast<Eigen::Index>(rows.size());
  const auto nc = static_cast<Eigen::Index>(cols.size());
  Eigen::MatrixXd out(nr, nc);
  for_each_index(exec, rows.size() * cols.size(), [&](std::size_t idx) {
    const auto r = static_cast<Eigen::Index>(idx / cols.size());
    const auto c = static_cast<Eigen::Index>(idx % cols.size());
    out(r, c) = kabsch_rmsd(cols[c], rows[r]);
  });
  return out;
}

Eigen::MatrixXd rmsd_matrix(const Ensemble &generated, const Ensemble &reference,
                            const Molecule &molecule, ExecPolicy exec) {
  if (molecule.heavy_atom_count() == 0)
    throw Error(ErrorCode::kEmptyMask, "molecule has no heavy atoms");
  return kernels::rmsd_matrix(gather_all(reference, molecule),
                              gather_all(generated, molecule), exec);
}

double coverage_from_matrix(const Eigen::MatrixXd &rmsd, double threshold) {
  if (rmsd.rows() == 0)
    throw Error(ErrorCode::kEmptyEnsemble, "reference ensemble is empty");
  if (!(threshold > 0))
    throw Error(ErrorCode::kInvalidArgument, "threshold must be positive");
  Eigen::Index covered = 0;
  for (Eigen::Index r = 0; r < rmsd.rows(); ++r) {
    if (rmsd.cols() > 0 && rmsd.row(r).minCoeff() < threshold)
      ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(rmsd.rows());
}

double matching_from_matrix(const Eigen::MatrixXd &rmsd) {
  if (rmsd.rows() == 0)
    throw Error(ErrorCode::kEmptyEnsemble, "reference ensemble is empty");
  if (rmsd.cols() == 0)
    throw Error(ErrorCode::kEmptyEnsemble, "generated ensemble is empty");
  double sum = 0;
  for (Eigen::Index r = 0; r < rmsd.rows(); ++r)
    sum += rmsd.row(r).minCoeff();
  return sum / static_cast<double>(rmsd.rows());
}

double coverage(const Ensemble &generated, const Ensemble &reference,
                const Molecule &molecule, const MetricsConfig &config) {
  if (reference.empty())
    throw Error(ErrorCode::kEmptyEnsemble, "reference ensemble is empty");
  return coverage_from_matrix(rmsd_matrix(generated, reference, molecule, config.exec),
                              config.threshold);
}

double matching(const Ensemble &generated, const Ensemble &reference,
                const Molecule &molecule, ExecPolicy exec) {
  if (reference.empty() || generated.empty())
    throw Error(ErrorCode::kEmptyEnsemble, "matching needs two non-empty ensembles");
  return matching_from_matrix(rmsd_matrix(generated, reference, molecule, exec));
}

MoleculeMetrics evaluate_molecule(const Ensemble &generated, const Ensemble &reference,
                                  const Molecule &molecule, const MetricsConfig &config) {
  if (reference.empty() || generated.empty())
    throw Error(ErrorCode::kEmptyEnsemble, "metrics need two non-empty ensembles");
  const Eigen::MatrixXd m = rmsd_matrix(generated, reference, molecule, config.exec);
  return { molecule.id(), coverage_from_matrix(m, config.threshold),
           matching_from_matrix(m), reference.size(), generated.size() };
}

double mean_of(const std::vector<double> &values) {
  if (values.empty())
    throw Error(ErrorCode::kInvalidArgument, "mean of an empty list");
  double sum = 0;
  for (double v: values)
    sum += v;
  return sum / static_cast<double>(values.size());
}

double median_of(std::vector<double> values) {
  if (values.empty())
    throw Error(ErrorCode::kInvalidArgument, "median of an empty list");
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  if (values.size() % 2 == 1)
    return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

MetricsReport summarize(const std::vector<MoleculeMetrics> &per_molecule,
                        double threshold) {
  if (per_molecule.empty())
    throw Error(ErrorCode::kInvalidArgument, "no molecules to summarize");
  MetricsReport report;
  report.molecules = per_molecule;
  report.threshold = threshold;
  std::vector<double> cov, mat;
  for (const auto &m: per_molecule) {
    cov.push_back(m.cov);
    mat.push_back(m.mat);
  }
  report.cov_mean = mean_of(cov);
  report.cov_median = median_of(cov);
  report.mat_mean = mean_of(mat);
  report.mat_median = median_of(mat);
  return report;
}

}  // namespace confkit
