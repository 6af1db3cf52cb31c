//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CONFKIT_FORCEFIELD_HPP_
#define CONFKIT_FORCEFIELD_HPP_

#include <cstddef>
#include <vector>

#include "confkit/elements.hpp"
#include "confkit/molecule.hpp"
#include "confkit/samplers.hpp"

namespace confkit {

// A small molecular-mechanics model (not MMFF): harmonic bonds and angles,
// threefold torsions on rotatable bonds and Lennard-Jones between atoms at
// least three bonds apart. Units are kcal/mol and Angstrom.

inline constexpr double kBondForceConstant = 300.0;   // kcal/mol/A^2
inline constexpr double kAngleForceConstant = 60.0;   // kcal/mol/rad^2
inline constexpr double kTorsionBarrier = 1.0;        // kcal/mol
inline constexpr int kTorsionPeriodicity = 3;
inline constexpr double kLjEpsilon = 0.1;             // kcal/mol

struct BondTerm {
  int i, j;
  double r0, k;  // E = k (r - r0)^2
};

struct AngleTerm {
  int i, j, k;  // j is the vertex
  double theta0, ka;  // E = ka (theta - theta0)^2
};

struct TorsionTerm {
  int a, b, c, d;
  int periodicity;
  double barrier;  // E = V/2 (1 + cos(m phi))
};

struct NonbondedTerm {
  int i, j;
  double epsilon, sigma;  // E = 4 eps ((s/d)^12 - (s/d)^6)
};

struct EnergyModel {
  std::size_t atom_count = 0;
  std::vector<BondTerm> bonds;
  std::vector<AngleTerm> angles;
  std::vector<TorsionTerm> torsions;
  std::vector<NonbondedTerm> nonbonded;
};

/// Throws Error(kUnknownElement) for untabulated elements.
EnergyModel build_model(const Molecule &molecule,
                        const RadiusTable &radii = RadiusTable::builtin());

struct EnergyTerms {
  double bond = 0;
  double angle = 0;
  double torsion = 0;
  double nonbonded = 0;

  double total() const { return bond + angle + torsion + nonbonded; }
};

struct EnergyEval {
  EnergyTerms terms;
  std::vector<Vec3> gradient;  // dE/dx per atom

  double energy() const { return terms.total(); }
};

/// Energy and analytic gradient. Throws Error(kCoincidentAtoms) when a
/// nonbonded pair sits at zero separation.
EnergyEval evaluate(const EnergyModel &model, const Conformer &conformer);

struct MinimizeOptions {
  int max_iters = 500;
  double tol = 1e-3;
  bool quasi_newton = true;  // L-BFGS directions; false = steepest descent
};

struct MinimizeResult {
  Conformer conformer;
  double energy = 0;
  int iterations = 0;
  bool converged = false;
  double max_gradient_norm = 0;
  std::vector<double> energy_trace;  // accepted energies, first = start
};

/// Backtracking line search (Armijo c = 1e-4, first trial moves the
/// fastest atom 0.1 A, up to 30 halvings). Stops when the largest per-atom
/// gradient norm drops below tol or after max_iters steps. Accepted steps
/// never raise the energy.
MinimizeResult minimize(const EnergyModel &model, const Conformer &start,
                        const MinimizeOptions &options = { });

/// A starting geometry made without any input coordinates: one embedding
/// from the geometric sampler, minimized.
Conformer make_template(const Molecule &molecule, const EnergyModel &model,
                        const SamplerConfig &config);

/// Minimized samples. Even indices start from a uniform-torsion draw on
/// `templ`, odd indices from a distance-geometry embedding. When `templ` is
/// null, make_template() supplies one. Non-converged minimizations are kept
/// and flagged kFlagNotConverged.
Ensemble sample_energy(const Molecule &molecule, const EnergyModel &model,
                       std::size_t count, const SamplerConfig &config,
                       const Conformer *templ = nullptr,
                       const MinimizeOptions &options = { });

}  // namespace confkit

#endif  // CONFKIT_FORCEFIELD_HPP_
