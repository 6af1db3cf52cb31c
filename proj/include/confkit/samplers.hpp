//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CONFKIT_SAMPLERS_HPP_
#define CONFKIT_SAMPLERS_HPP_

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "confkit/elements.hpp"
#include "confkit/geom3d.hpp"
#include "confkit/molecule.hpp"
#include "confkit/parallel.hpp"

namespace confkit {

struct SamplerConfig {
  std::uint64_t seed = 0;
  double clash_factor = 0.7;
  int dg_refine_iters = 200;
  int max_clash_attempts = 50;
  int max_embed_attempts = 10;
  bool clash_filter = true;
  ExecPolicy exec = ExecPolicy::kParallel;
};

// Ideal geometry shared by the bounds matrix and the force field.

/// Rest length of a bond: sum of covalent radii scaled by bond order
/// (double 0.876, triple 0.784, aromatic 0.908 relative to single).
double ideal_bond_length(const Molecule &molecule, const Bond &bond,
                         const RadiusTable &radii = RadiusTable::builtin());

/// Ideal bond angle (radians) at `center`: 180 deg with a triple bond or two
/// double bonds, 120 deg with one double or aromatic bond, else 109.47 deg.
double ideal_angle(const Molecule &molecule, int center);

/// Heavy-atom pairs at least three bonds apart closer than
/// clash_factor * (sum of vdW radii).
bool has_steric_clash(const Molecule &molecule, const Conformer &conformer,
                      double clash_factor,
                      const RadiusTable &radii = RadiusTable::builtin());

/// Rotatable bonds: single, acyclic, and both ends carrying another heavy
/// neighbor. Reference atoms are the lowest-index other heavy neighbors.
/// Sorted by (b, c).
std::vector<DihedralSpec> detect_rotatable_bonds(const Molecule &molecule);

/// Independent uniform torsions in [-180, 180) on every rotatable bond of
/// `templ`. Clashing draws are retried up to max_clash_attempts times, then
/// accepted with kFlagClash. Molecules without rotatable bonds yield copies
/// of the template flagged kFlagNoTorsions.
Ensemble sample_uniform(const Molecule &molecule, const Conformer &templ,
                        std::size_t count, const SamplerConfig &config);

struct BoundsMatrix {
  Eigen::MatrixXd lower;
  Eigen::MatrixXd upper;

  Eigen::Index size() const { return lower.rows(); }
};

/// Distance bounds from topology: 1-2 (bond length +- 0.01 A), 1-3 (law of
/// cosines +- 5%), other pairs (clash_factor * vdW sum, path length), then
/// triangle smoothing. Throws Error(kUnknownElement) for untabulated atoms.
BoundsMatrix build_bounds(const Molecule &molecule, double clash_factor = 0.7,
                          const RadiusTable &radii = RadiusTable::builtin());

/// Distance-geometry embedding: random distances within bounds, metric
/// matrix eigendecomposition, top three eigenpairs, then gradient refinement
/// of the bounds-violation penalty.
Ensemble sample_geometric(const Molecule &molecule, std::size_t count,
                          const SamplerConfig &config);

/// Bounds-violation penalty and its gradient for flat xyz coordinates.
double bounds_penalty(const BoundsMatrix &bounds, const Eigen::VectorXd &x,
                      Eigen::VectorXd *grad);

namespace internal {
  Conformer uniform_sample_one(const Molecule &molecule, const Conformer &templ,
                               const std::vector<DihedralSpec> &rotors,
                               const SamplerConfig &config, std::uint64_t seed);

  Conformer geometric_sample_one(const Molecule &molecule, const BoundsMatrix &bounds,
                                 const SamplerConfig &config, std::uint64_t seed);
}  // namespace internal

}  // namespace confkit

#endif  // CONFKIT_SAMPLERS_HPP_
