//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CONFKIT_ELEMENTS_HPP_
#define CONFKIT_ELEMENTS_HPP_

#include <array>
#include <istream>
#include <optional>
#include <string>
#include <string_view>

namespace confkit {

inline constexpr int kMaxAtomicNumber = 86;

/// Atomic number for an element symbol ("C", "Cl", case-sensitive as written
/// in SDF/XYZ files; an all-uppercase two-letter form such as "CL" is also
/// accepted). Returns nullopt for unknown symbols.
std::optional<int> atomic_number(std::string_view symbol);

/// Canonical symbol for an atomic number in [1, kMaxAtomicNumber].
std::string_view element_symbol(int atomic_number);

struct ElementRadii {
  double covalent = 0;
  double vdw = 0;
};

/// Per-element covalent and van der Waals radii, indexed by atomic number.
class RadiusTable {
public:
  /// The table compiled in from data/radii.txt.
  static const RadiusTable &builtin();

  /// Parses the documented key-value format (see data/radii.txt).
  /// Throws Error on malformed lines, unknown symbols or a missing version.
  static RadiusTable parse(std::istream &is);

  int version() const { return version_; }

  bool has(int atomic_number) const;

  /// Throws Error(kUnknownElement) when the element is not tabulated.
  const ElementRadii &at(int atomic_number) const;

private:
  int version_ = 0;
  std::array<std::optional<ElementRadii>, kMaxAtomicNumber + 1> radii_ { };
};

}  // namespace confkit

#endif  // CONFKIT_ELEMENTS_HPP_
