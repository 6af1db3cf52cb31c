//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CONFKIT_MOLIO_HPP_
#define CONFKIT_MOLIO_HPP_

#include <filesystem>
#include <string>
#include <string_view>

#include "confkit/molecule.hpp"

namespace confkit {

/// A parsed file: the bonded graph plus one conformer per record/frame.
struct MolFile {
  Molecule molecule;
  Ensemble ensemble;
};

/// Parses MDL SDF (V2000 connection tables). Every record must repeat the
/// first record's atoms and bonds; each contributes one conformer with
/// provenance kExternal. A `confkit.energy` data item, when present, is read
/// back as the conformer energy. `fallback_id` names the molecule when the
/// first record's title line is blank.
///
/// Errors: kMalformedCounts, kIndexOutOfRange, kInconsistentConnectivity,
/// kUnsupportedV3000, kNonNumeric, kUnknownElement, kEmptyEnsemble.
MolFile parse_sdf(std::string_view text, std::string_view fallback_id = { });

/// Serializes every conformer as one V2000 record. Coordinates use the
/// 10.4 fixed-width fields; values that do not fit raise kFieldOverflow.
std::string write_sdf(const Molecule &molecule, const Ensemble &ensemble);

/// Parses multi-frame XYZ. The returned molecule has no bonds (it is meant
/// for metrics only) and is flagged as disconnected when it has more than
/// one atom. The first frame's comment line becomes the id unless blank.
///
/// Errors: kFrameAtomMismatch, kNonNumeric, kMalformedRecord,
/// kUnknownElement, kEmptyEnsemble.
MolFile parse_xyz(std::string_view text, std::string_view fallback_id = { });

std::string write_xyz(const Molecule &molecule, const Ensemble &ensemble);

/// Recomputes ring membership: a bond is a ring bond iff removing it leaves
/// its endpoints connected.
Molecule perceive_rings(const Molecule &molecule);

/// Reads a .sdf/.mol/.sd or .xyz file, dispatching on the extension. The file
/// stem is the fallback molecule id.
MolFile read_molecule_file(const std::filesystem::path &path);

void write_molecule_file(const std::filesystem::path &path,
                         const Molecule &molecule, const Ensemble &ensemble);

}  // namespace confkit

#endif  // CONFKIT_MOLIO_HPP_
