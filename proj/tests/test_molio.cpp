//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <filesystem>
#include <functional>
#include <set>

#include "confkit/error.hpp"
#include "confkit/molio.hpp"
#include "helpers.hpp"

using namespace confkit;
using testing::fixture;
using testing::slurp;

namespace {

ErrorCode code_of(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("expected confkit::Error");
  return ErrorCode::kIo;
}

std::string message_of(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.what();
  }
  return { };
}

double max_coord_diff(const Ensemble &a, const Ensemble &b) {
  double worst = 0;
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t i = 0; i < a.conformers[k].size(); ++i)
      worst = std::max(worst, (a.conformers[k].coords[i] - b.conformers[k].coords[i])
                                  .cwiseAbs()
                                  .maxCoeff());
  return worst;
}

// Bridges by removing each bond and checking connectivity, the
// dumbest possible ring oracle.
std::vector<bool> ring_bonds_by_deletion(const Molecule &m) {
  std::vector<bool> out(m.bonds().size());
  for (std::size_t skip = 0; skip < m.bonds().size(); ++skip) {
    std::vector<std::vector<int>> adj(m.size());
    for (std::size_t b = 0; b < m.bonds().size(); ++b) {
      if (b == skip)
        continue;
      adj[m.bonds()[b].i].push_back(m.bonds()[b].j);
      adj[m.bonds()[b].j].push_back(m.bonds()[b].i);
    }
    std::vector<bool> seen(m.size());
    std::vector<int> stack { m.bonds()[skip].i };
    seen[m.bonds()[skip].i] = true;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v: adj[u])
        if (!seen[v]) {
          seen[v] = true;
          stack.push_back(v);
        }
    }
    out[skip] = seen[m.bonds()[skip].j];
  }
  return out;
}

}  // namespace

TEST_SUITE("molio") {

TEST_CASE("methane SDF") {
  auto f = testing::load_fixture("methane.sdf");
  CHECK(f.molecule.id() == "methane");
  CHECK(f.molecule.size() == 5);
  CHECK(f.molecule.heavy_atom_count() == 1);
  CHECK(f.ensemble.size() == 1);
  CHECK(f.ensemble.conformers[0].provenance == Provenance::kExternal);
}

TEST_CASE("multi-record SDF becomes one ensemble") {
  auto f = testing::load_fixture("butane_3rec.sdf");
  CHECK(f.molecule.heavy_atom_count() == 4);
  CHECK(f.ensemble.size() == 3);
  for (const auto &c: f.ensemble.conformers)
    CHECK(c.size() == 14);
}

TEST_CASE("round trip SDF and XYZ within 1e-4") {
  for (const char *name: { "methane.sdf", "ethane_2conf.sdf", "butane_3rec.sdf",
                           "hexane.sdf", "benzene.sdf", "water_2frame.xyz" }) {
    CAPTURE(name);
    auto f = testing::load_fixture(name);
    auto sdf = parse_sdf(write_sdf(f.molecule, f.ensemble));
    CHECK(sdf.ensemble.size() == f.ensemble.size());
    CHECK(max_coord_diff(f.ensemble, sdf.ensemble) <= 1e-4);
    CHECK(sdf.molecule.bonds().size() == f.molecule.bonds().size());
    auto xyz = parse_xyz(write_xyz(f.molecule, f.ensemble));
    CHECK(max_coord_diff(f.ensemble, xyz.ensemble) <= 1e-4);
  }
}

TEST_CASE("energy data item survives a round trip") {
  auto f = testing::load_fixture("ethane_2conf.sdf");
  f.ensemble.conformers[0].energy = -1.234567890123;
  auto back = parse_sdf(write_sdf(f.molecule, f.ensemble));
  REQUIRE(back.ensemble.conformers[0].energy.has_value());
  CHECK(*back.ensemble.conformers[0].energy == -1.234567890123);
  CHECK_FALSE(back.ensemble.conformers[1].energy.has_value());
}

TEST_CASE("malformed SDF fixtures raise typed errors") {
  auto load = [](const char *name) {
    return [name] { read_molecule_file(fixture(std::string("malformed/") + name)); };
  };
  CHECK(code_of(load("counts_claims_5_atoms.sdf")) == ErrorCode::kMalformedCounts);
  CHECK(message_of(load("counts_claims_5_atoms.sdf")).find("malformed counts line")
        != std::string::npos);
  CHECK(code_of(load("bond_index_out_of_range.sdf")) == ErrorCode::kIndexOutOfRange);
  CHECK(code_of(load("nonnumeric_coordinate.sdf")) == ErrorCode::kNonNumeric);
  CHECK(code_of(load("v3000.sdf")) == ErrorCode::kUnsupportedV3000);
  CHECK(code_of(load("garbage_counts.sdf")) == ErrorCode::kMalformedCounts);
  CHECK(code_of(load("inconsistent_connectivity.sdf"))
        == ErrorCode::kInconsistentConnectivity);
  CHECK(code_of(load("empty.sdf")) == ErrorCode::kEmptyEnsemble);
}

TEST_CASE("malformed XYZ fixtures raise typed errors") {
  auto load = [](const char *name) {
    return [name] { read_molecule_file(fixture(std::string("malformed/") + name)); };
  };
  CHECK(code_of(load("frame_atom_mismatch.xyz")) == ErrorCode::kFrameAtomMismatch);
  CHECK(code_of(load("nonnumeric_coordinate.xyz")) == ErrorCode::kNonNumeric);
  CHECK(code_of(load("truncated_frame.xyz")) == ErrorCode::kMalformedRecord);
}

TEST_CASE("coordinate field width") {
  auto m = testing::make_molecule("c", { "C" }, { });
  auto c = testing::conformer(m, { Vec3(12345.6789, 0, 0) });
  Ensemble e { "c", { c } };
  auto back = parse_sdf(write_sdf(m, e));
  CHECK(back.ensemble.conformers[0].coords[0].x() == doctest::Approx(12345.6789));
  e.conformers[0].coords[0].x() = -12345.6789;
  CHECK(code_of([&] { write_sdf(m, e); }) == ErrorCode::kFieldOverflow);
}

TEST_CASE("water XYZ with two frames and trailing blanks") {
  auto f = testing::load_fixture("water_2frame.xyz");
  CHECK(f.molecule.size() == 3);
  CHECK(f.molecule.bonds().empty());
  CHECK(f.ensemble.size() == 2);
  auto g = testing::load_fixture("water_trailing_blank.xyz");
  CHECK(g.ensemble.size() == 2);
  CHECK(max_coord_diff(f.ensemble, g.ensemble) == 0.0);
}

TEST_CASE("file stem is the fallback id for XYZ") {
  auto f = testing::load_fixture("water_2frame.xyz");
  CHECK(f.molecule.id() == "water");
}

TEST_CASE("write and read a file on disk") {
  auto f = testing::load_fixture("butane_3rec.sdf");
  auto dir = std::filesystem::temp_directory_path() / "confkit_molio_test";
  std::filesystem::create_directories(dir);
  write_molecule_file(dir / "b.sdf", f.molecule, f.ensemble);
  auto back = read_molecule_file(dir / "b.sdf");
  CHECK(back.ensemble.size() == 3);
  CHECK(code_of([&] { read_molecule_file(dir / "missing.sdf"); }) == ErrorCode::kIo);
  std::filesystem::remove_all(dir);
}

TEST_CASE("ring perception") {
  auto count_ring_atoms = [](const Molecule &m) {
    std::set<int> atoms;
    for (std::size_t b = 0; b < m.bonds().size(); ++b)
      if (m.is_ring_bond(static_cast<int>(b))) {
        atoms.insert(m.bonds()[b].i);
        atoms.insert(m.bonds()[b].j);
      }
    return atoms.size();
  };
  auto ring_bond_count = [](const Molecule &m) {
    std::size_t n = 0;
    for (std::size_t b = 0; b < m.bonds().size(); ++b)
      n += m.is_ring_bond(static_cast<int>(b));
    return n;
  };

  auto cyclohexane = testing::load_toy("cyclohexane").molecule;
  CHECK(ring_bond_count(cyclohexane) == 6);
  CHECK(count_ring_atoms(cyclohexane) == 6);

  auto butane = testing::load_toy("butane").molecule;
  CHECK(ring_bond_count(butane) == 0);

  auto mcp = testing::load_toy("methylcyclopentane").molecule;
  CHECK(ring_bond_count(mcp) == 5);
  CHECK(count_ring_atoms(mcp) == 5);
  // The methyl carbon is the sixth heavy atom, outside the ring.
  CHECK(mcp.heavy_atom_count() == 6);

  for (const char *name: { "cyclohexane", "butane", "methylcyclopentane", "pentane",
                           "propanol", "diethyl_ether" }) {
    CAPTURE(name);
    auto m = testing::load_toy(name).molecule;
    CHECK(m.ring_membership() == ring_bonds_by_deletion(m));
  }
  auto benzene = testing::load_fixture("benzene.sdf").molecule;
  CHECK(benzene.ring_membership() == ring_bonds_by_deletion(benzene));
}

TEST_CASE("perceive_rings recomputes from bonds") {
  auto m = testing::load_toy("cyclohexane").molecule;
  auto again = perceive_rings(m);
  CHECK(again.ring_membership() == m.ring_membership());
}

TEST_CASE("molecule validation") {
  CHECK(code_of([] {
          testing::make_molecule("bad", { "C", "C" }, { { 0, 2 } });
        }) == ErrorCode::kIndexOutOfRange);
  auto m = testing::make_molecule("two", { "C", "C" }, { { 0, 1 } });
  CHECK(code_of([&] { validate_conformer(m, testing::conformer(m, { Vec3::Zero() })); })
        == ErrorCode::kEnsembleMismatch);
  auto split = testing::make_molecule("split", { "C", "C" }, { });
  CHECK_FALSE(split.is_connected());
  CHECK(m.is_connected());
}

TEST_CASE("radius table") {
  const auto &t = RadiusTable::builtin();
  CHECK(t.version() == 1);
  CHECK(t.at(6).covalent == doctest::Approx(0.765));
  CHECK(t.at(1).vdw == doctest::Approx(1.20));
  CHECK(code_of([&] { t.at(92); }) == ErrorCode::kUnknownElement);
  std::istringstream in("# comment\nversion 3\nC 0.7 1.7\n");
  auto custom = RadiusTable::parse(in);
  CHECK(custom.version() == 3);
  CHECK(custom.has(6));
  CHECK_FALSE(custom.has(1));
}

}  // TEST_SUITE
