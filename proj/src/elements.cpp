//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#include "confkit/elements.hpp"

#include <cctype>
#include <sstream>
#include <string>

#include "confkit/error.hpp"

namespace confkit {
namespace {
  constexpr std::array<std::string_view, kMaxAtomicNumber + 1> kSymbols = {
    "",   "H",  "He", "Li", "Be", "B",  "C",  "N",  "O",  "F",  "Ne", "Na",
    "Mg", "Al", "Si", "P",  "S",  "Cl", "Ar", "K",  "Ca", "Sc", "Ti", "V",
    "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br",
    "Kr", "Rb", "Sr", "Y",  "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag",
    "Cd", "In", "Sn", "Sb", "Te", "I",  "Xe", "Cs", "Ba", "La", "Ce", "Pr",
    "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu",
    "Hf", "Ta", "W",  "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi",
    "Po", "At", "Rn",
  };

  constexpr char kBuiltinRadii[] =
#include "radii_data.inc"
      ;
}  // namespace

std::optional<int> atomic_number(std::string_view symbol) {
  if (symbol.empty() || symbol.size() > 2)
    return std::nullopt;

  std::string canon(symbol);
  canon[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(canon[0])));
  if (canon.size() == 2)
    canon[1] = static_cast<char>(std::tolower(static_cast<unsigned char>(canon[1])));

  for (int z = 1; z <= kMaxAtomicNumber; ++z) {
    if (kSymbols[z] == canon)
      return z;
  }
  return std::nullopt;
}

std::string_view element_symbol(int z) {
  if (z < 1 || z > kMaxAtomicNumber)
    throw Error(ErrorCode::kUnknownElement,
                "atomic number out of range: " + std::to_string(z));
  return kSymbols[z];
}

const RadiusTable &RadiusTable::builtin() {
  static const RadiusTable table = [] {
    std::istringstream is(kBuiltinRadii);
    return parse(is);
  }();
  return table;
}

RadiusTable RadiusTable::parse(std::istream &is) {
  RadiusTable table;
  bool have_version = false;
  std::string line;
  int lineno = 0;

  while (std::getline(is, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#')
      continue;

    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (!have_version) {
      if (key != "version" || !(ls >> table.version_))
        throw Error(ErrorCode::kMalformedRecord,
                    "radius table: expected version line at line "
                        + std::to_string(lineno));
      have_version = true;
      continue;
    }

    auto z = atomic_number(key);
    if (!z)
      throw Error(ErrorCode::kUnknownElement,
                  "radius table: unknown element '" + key + "'");

    ElementRadii r;
    if (!(ls >> r.covalent >> r.vdw) || r.covalent <= 0 || r.vdw <= 0)
      throw Error(ErrorCode::kMalformedRecord,
                  "radius table: bad radii at line " + std::to_string(lineno));
    table.radii_[*z] = r;
  }

  if (!have_version)
    throw Error(ErrorCode::kMalformedRecord, "radius table: missing version");
  return table;
}

bool RadiusTable::has(int z) const {
  return z >= 0 && z <= kMaxAtomicNumber && radii_[z].has_value();
}

const ElementRadii &RadiusTable::at(int z) const {
  if (!has(z))
    throw Error(ErrorCode::kUnknownElement,
                "no tabulated radii for atomic number " + std::to_string(z));
  return *radii_[z];
}

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
  case ErrorCode::kMalformedCounts:
    return "malformed counts line";
  case ErrorCode::kIndexOutOfRange:
    return "index out of range";
  case ErrorCode::kInconsistentConnectivity:
    return "inconsistent connectivity";
  case ErrorCode::kUnsupportedV3000:
    return "unsupported V3000";
  case ErrorCode::kFieldOverflow:
    return "field overflow";
  case ErrorCode::kEnsembleMismatch:
    return "ensemble mismatch";
  case ErrorCode::kEmptyEnsemble:
    return "empty ensemble";
  case ErrorCode::kFrameAtomMismatch:
    return "frame atom-count mismatch";
  case ErrorCode::kNonNumeric:
    return "non-numeric value";
  case ErrorCode::kMalformedRecord:
    return "malformed record";
  case ErrorCode::kUnknownElement:
    return "unknown element";
  case ErrorCode::kEmptyMask:
    return "empty mask";
  case ErrorCode::kDegenerateGeometry:
    return "degenerate geometry";
  case ErrorCode::kInvalidDihedral:
    return "invalid dihedral";
  case ErrorCode::kEmbeddingFailed:
    return "embedding failed";
  case ErrorCode::kCoincidentAtoms:
    return "coincident atoms";
  case ErrorCode::kInvalidArgument:
    return "invalid argument";
  case ErrorCode::kDisconnected:
    return "disconnected molecule";
  case ErrorCode::kIo:
    return "i/o error";
  }
  return "unknown";
}

}  // namespace confkit
