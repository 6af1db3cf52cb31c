//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CONFKIT_GEOM3D_HPP_
#define CONFKIT_GEOM3D_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "confkit/molecule.hpp"

namespace confkit {

/// Atom indices that take part in centering, alignment and RMSD.
using AtomSelection = std::span<const std::size_t>;

/// Proper rigid motion x -> rotation * x + translation.
struct AlignmentTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3 &p) const { return rotation * p + translation; }
};

Conformer apply_transform(const Conformer &conformer, const AlignmentTransform &t);

/// Mean position of the selected atoms. Throws Error(kEmptyMask).
Vec3 centroid(std::span<const Vec3> coords, AtomSelection selection);

/// Translates every atom so that the selected atoms' centroid is the origin.
Conformer centroid_center(const Conformer &conformer, AtomSelection selection);

struct Alignment {
  AlignmentTransform transform;
  Conformer aligned;
};

/// Optimal proper superposition of `mobile` onto `reference` over the
/// selected atoms (Kabsch). Reflections are excluded by flipping the least
/// significant singular direction when det < 0. With a single selected atom
/// the rotation is the identity. Collinear selections still get an optimal
/// rotation, which is then not unique.
///
/// Errors: kEnsembleMismatch on atom-count mismatch, kEmptyMask.
Alignment kabsch_align(const Conformer &mobile, const Conformer &reference,
                       AtomSelection selection);

/// Kabsch rotation for two already-gathered point sets of equal length.
/// The returned transform maps `mobile` points onto `reference` points.
AlignmentTransform kabsch_transform(std::span<const Vec3> mobile,
                                    std::span<const Vec3> reference);

/// RMSD after optimal superposition of two gathered point sets.
double kabsch_rmsd(std::span<const Vec3> mobile, std::span<const Vec3> reference);

/// RMSD over the selected atoms after optimal rigid superposition.
double rmsd(const Conformer &generated, const Conformer &reference,
            AtomSelection selection);

/// RMSD over the molecule's heavy atoms.
double rmsd(const Conformer &generated, const Conformer &reference,
            const Molecule &molecule);

/// Selected coordinates, in selection order.
std::vector<Vec3> gather(const Conformer &conformer, AtomSelection selection);

/// A b-c torsion with its reference atoms and the atoms that move with d.
struct DihedralSpec {
  int a = -1, b = -1, c = -1, d = -1;
  std::vector<int> rotating_side;  // ascending; the component holding c and d
};

/// Validates the path a-b-c-d and computes the rotating side: the connected
/// component containing d after deleting bond b-c. Throws
/// Error(kInvalidDihedral) if the path is not bonded, atoms repeat, or b-c
/// lies on a ring (the rotating side would contain a or b).
DihedralSpec make_dihedral_spec(const Molecule &molecule, int a, int b, int c, int d);

/// Signed torsion a-b-c-d in degrees, in [-180, 180).
/// Throws Error(kDegenerateGeometry) when a-b-c or b-c-d is collinear.
double measure_dihedral(const Conformer &conformer, const DihedralSpec &spec);

/// Same measurement on four raw points.
double dihedral_degrees(const Vec3 &pa, const Vec3 &pb, const Vec3 &pc, const Vec3 &pd);

/// Rotates the spec's rotating side about the b-c axis so the torsion
/// becomes `degrees`. Nothing else moves.
Conformer set_dihedral(const Conformer &conformer, const DihedralSpec &spec,
                       double degrees);

/// Wraps an angle in degrees into [-180, 180).
double wrap_degrees(double degrees);

}  // namespace confkit

#endif  // CONFKIT_GEOM3D_HPP_
