//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CONFKIT_MOLECULE_HPP_
#define CONFKIT_MOLECULE_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace confkit {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class BondOrder : std::uint8_t {
  kSingle = 1,
  kDouble = 2,
  kTriple = 3,
  kAromatic = 4,
};

struct Atom {
  std::string symbol;
  int atomic_number = 0;

  bool is_heavy() const { return atomic_number > 1; }
};

struct Bond {
  int i = 0;
  int j = 0;
  BondOrder order = BondOrder::kSingle;
};

/// Element-labeled molecular graph. Immutable once built; construction
/// validates bond indices and computes ring membership, adjacency and
/// connectivity.
class Molecule {
public:
  Molecule() = default;

  /// Throws Error(kIndexOutOfRange) for bonds referencing missing or
  /// identical atoms and Error(kInvalidArgument) for duplicate bonds.
  Molecule(std::string id, std::vector<Atom> atoms, std::vector<Bond> bonds);

  const std::string &id() const { return id_; }
  const std::vector<Atom> &atoms() const { return atoms_; }
  const std::vector<Bond> &bonds() const { return bonds_; }
  const std::vector<bool> &ring_membership() const { return ring_; }

  std::size_t size() const { return atoms_.size(); }
  int heavy_atom_count() const { return heavy_count_; }
  bool is_connected() const { return connected_; }

  /// Neighbor atom indices, ascending.
  const std::vector<int> &neighbors(int atom) const { return adj_[atom]; }

  /// Bond index for (i, j) in either order, or -1.
  int find_bond(int i, int j) const;

  bool is_ring_bond(int bond_index) const { return ring_[bond_index]; }

  /// Ascending indices of atoms with atomic number > 1.
  const std::vector<std::size_t> &heavy_indices() const { return heavy_; }

  /// 0, 1, ..., size()-1.
  std::vector<std::size_t> all_indices() const;

  /// Topological (bond-count) distance matrix; -1 for unreachable pairs.
  std::vector<std::vector<int>> topological_distances() const;

private:
  friend Molecule perceive_rings(const Molecule &molecule);

  std::string id_;
  std::vector<Atom> atoms_;
  std::vector<Bond> bonds_;
  std::vector<bool> ring_;
  std::vector<std::vector<int>> adj_;
  std::vector<std::size_t> heavy_;
  int heavy_count_ = 0;
  bool connected_ = true;
};

enum class Provenance : std::uint8_t {
  kUniform,
  kGeometric,
  kEnergy,
  kExternal,
  kReference,
};

std::string_view provenance_name(Provenance p);

/// Bit flags attached to generated conformers.
enum ConformerFlag : std::uint32_t {
  kFlagNone = 0,
  kFlagClash = 1U << 0,            // accepted after the resample cap
  kFlagNoTorsions = 1U << 1,       // copy of the template, nothing to sample
  kFlagNotConverged = 1U << 2,     // minimizer stopped before tolerance
  kFlagBoundsViolation = 1U << 3,  // embedding left a clash after refinement
};

struct Conformer {
  std::string molecule_id;
  std::vector<Vec3> coords;
  std::optional<double> energy;
  Provenance provenance = Provenance::kExternal;
  std::uint32_t flags = kFlagNone;

  std::size_t size() const { return coords.size(); }
  bool has_flag(ConformerFlag f) const { return (flags & f) != 0; }
};

/// Throws Error(kEnsembleMismatch) on size mismatch and
/// Error(kInvalidArgument) on non-finite coordinates.
void validate_conformer(const Molecule &molecule, const Conformer &conformer);

struct Ensemble {
  std::string molecule_id;
  std::vector<Conformer> conformers;

  std::size_t size() const { return conformers.size(); }
  bool empty() const { return conformers.empty(); }
};

/// Checks that every member matches the molecule; empty ensembles pass.
void validate_ensemble(const Molecule &molecule, const Ensemble &ensemble);

}  // namespace confkit

#endif  // CONFKIT_MOLECULE_HPP_
