//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CONFKIT_TESTS_HELPERS_HPP_
#define CONFKIT_TESTS_HELPERS_HPP_

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "confkit/elements.hpp"
#include "confkit/geom3d.hpp"
#include "confkit/molecule.hpp"
#include "confkit/molio.hpp"
#include "confkit/random.hpp"

namespace testing {

using confkit::Vec3;

inline std::filesystem::path fixture(const std::string &name) {
  return std::filesystem::path(CONFKIT_FIXTURE_DIR) / name;
}

inline std::filesystem::path toy(const std::string &name) {
  return std::filesystem::path(CONFKIT_DATA_DIR) / "toy" / name;
}

inline std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline confkit::MolFile load_fixture(const std::string &name) {
  return confkit::read_molecule_file(fixture(name));
}

inline confkit::MolFile load_toy(const std::string &name) {
  return confkit::read_molecule_file(toy(name + ".sdf"));
}

inline confkit::Atom atom(const std::string &symbol) {
  return { symbol, *confkit::atomic_number(symbol) };
}

inline confkit::Molecule make_molecule(const std::string &id,
                                       const std::vector<std::string> &symbols,
                                       const std::vector<std::pair<int, int>> &bonds) {
  std::vector<confkit::Atom> atoms;
  for (const auto &s: symbols)
    atoms.push_back(atom(s));
  std::vector<confkit::Bond> bs;
  for (auto [i, j]: bonds)
    bs.push_back({ i, j, confkit::BondOrder::kSingle });
  return confkit::Molecule(id, atoms, bs);
}

// Water with bonds (the xyz fixture has none).
inline confkit::Molecule water() {
  return make_molecule("water", { "O", "H", "H" }, { { 0, 1 }, { 0, 2 } });
}

inline confkit::Conformer conformer(const confkit::Molecule &m, std::vector<Vec3> xyz) {
  confkit::Conformer c;
  c.molecule_id = m.id();
  c.coords = std::move(xyz);
  return c;
}

inline std::vector<Vec3> random_points(confkit::Rng &rng, std::size_t n, double scale = 3.0) {
  std::vector<Vec3> out(n);
  for (auto &p: out)
    p = Vec3(rng.uniform(-scale, scale), rng.uniform(-scale, scale), rng.uniform(-scale, scale));
  return out;
}

inline confkit::Mat3 random_rotation(confkit::Rng &rng) {
  Eigen::Quaterniond q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
  q.normalize();
  return q.toRotationMatrix();
}

inline std::vector<Vec3> rigid(const std::vector<Vec3> &pts, const confkit::Mat3 &r,
                               const Vec3 &t) {
  std::vector<Vec3> out;
  for (const auto &p: pts)
    out.push_back(r * p + t);
  return out;
}

// Plain mean-square deviation without any fitting.
inline double raw_rmsd(const std::vector<Vec3> &a, const std::vector<Vec3> &b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += (a[i] - b[i]).squaredNorm();
  return std::sqrt(s / static_cast<double>(a.size()));
}

// Brute-force RMSD oracle: centre both sets and search rotations from a
// dense quaternion sample, keeping the best.
inline double rotation_search_rmsd(const std::vector<Vec3> &mobile,
                                   const std::vector<Vec3> &ref, confkit::Rng &rng,
                                   int samples) {
  auto centred = [](std::vector<Vec3> p) {
    Vec3 c = Vec3::Zero();
    for (const auto &x: p)
      c += x;
    c /= static_cast<double>(p.size());
    for (auto &x: p)
      x -= c;
    return p;
  };
  const auto m = centred(mobile);
  const auto r = centred(ref);
  double best = raw_rmsd(m, r);
  for (int s = 0; s < samples; ++s) {
    const auto rot = random_rotation(rng);
    best = std::min(best, raw_rmsd(rigid(m, rot, Vec3::Zero()), r));
  }
  return best;
}

}  // namespace testing

#endif  // CONFKIT_TESTS_HELPERS_HPP_
