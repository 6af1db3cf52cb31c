//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#include "confkit/geom3d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>

#include <Eigen/Geometry>
#include <Eigen/SVD>

#include "confkit/error.hpp"

namespace confkit {
namespace {
  constexpr double kRadToDeg = 180.0 / std::numbers::pi;
  constexpr double kDegToRad = std::numbers::pi / 180.0;
  constexpr double kCollinearSinSq = 1e-16;

  void check_pair(const Conformer &a, const Conformer &b) {
    if (a.size() != b.size())
      throw Error(ErrorCode::kEnsembleMismatch,
                  "conformers have different atom counts ("
                      + std::to_string(a.size()) + " vs "
                      + std::to_string(b.size()) + ")");
  }

  void check_selection(std::size_t natoms, AtomSelection selection) {
    if (selection.empty())
      throw Error(ErrorCode::kEmptyMask, "atom selection is empty");
    for (auto i: selection) {
      if (i >= natoms)
        throw Error(ErrorCode::kIndexOutOfRange, "atom selection out of range");
    }
  }
}  // namespace

Conformer apply_transform(const Conformer &conformer, const AlignmentTransform &t) {
  Conformer out = conformer;
  for (auto &p: out.coords)
    p = t.apply(p);
  return out;
}

Vec3 centroid(std::span<const Vec3> coords, AtomSelection selection) {
  check_selection(coords.size(), selection);
  Vec3 sum = Vec3::Zero();
  for (auto i: selection)
    sum += coords[i];
  return sum / static_cast<double>(selection.size());
}

Conformer centroid_center(const Conformer &conformer, AtomSelection selection) {
  const Vec3 shift = centroid(conformer.coords, selection);
  Conformer out = conformer;
  for (auto &p: out.coords)
    p -= shift;
  return out;
}

std::vector<Vec3> gather(const Conformer &conformer, AtomSelection selection) {
  check_selection(conformer.size(), selection);
  std::vector<Vec3> out;
  out.reserve(selection.size());
  for (auto i: selection)
    out.push_back(conformer.coords[i]);
  return out;
}

AlignmentTransform kabsch_transform(std::span<const Vec3> mobile,
                                    std::span<const Vec3> reference) {
  if (mobile.size() != reference.size())
    throw Error(ErrorCode::kEnsembleMismatch, "point sets differ in length");
  if (mobile.empty())
    throw Error(ErrorCode::kEmptyMask, "atom selection is empty");

  const double inv_n = 1.0 / static_cast<double>(mobile.size());
  Vec3 cm = Vec3::Zero(), cr = Vec3::Zero();
  for (std::size_t i = 0; i < mobile.size(); ++i) {
    cm += mobile[i];
    cr += reference[i];
  }
  cm *= inv_n;
  cr *= inv_n;

  AlignmentTransform t;
  if (mobile.size() > 1) {
    Mat3 cov = Mat3::Zero();
    for (std::size_t i = 0; i < mobile.size(); ++i)
      cov.noalias() += (mobile[i] - cm) * (reference[i] - cr).transpose();

    Eigen::JacobiSVD<Mat3> svd(cov, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Mat3 &u = svd.matrixU();
    const Mat3 &v = svd.matrixV();
    Vec3 diag = Vec3::Ones();
    if ((v * u.transpose()).determinant() < 0)
      diag.z() = -1;  // singular values are sorted, z is the smallest
    t.rotation = v * diag.asDiagonal() * u.transpose();
  }
  t.translation = cr - t.rotation * cm;
  return t;
}

double kabsch_rmsd(std::span<const Vec3> mobile, std::span<const Vec3> reference) {
  const AlignmentTransform t = kabsch_transform(mobile, reference);
  double sum = 0;
  for (std::size_t i = 0; i < mobile.size(); ++i)
    sum += (t.apply(mobile[i]) - reference[i]).squaredNorm();
  return std::sqrt(sum / static_cast<double>(mobile.size()));
}

Alignment kabsch_align(const Conformer &mobile, const Conformer &reference,
                       AtomSelection selection) {
  check_pair(mobile, reference);
  auto pm = gather(mobile, selection);
  auto pr = gather(reference, selection);
  Alignment out;
  out.transform = kabsch_transform(pm, pr);
  out.aligned = apply_transform(mobile, out.transform);
  return out;
}

double rmsd(const Conformer &generated, const Conformer &reference,
            AtomSelection selection) {
  check_pair(generated, reference);
  return kabsch_rmsd(gather(generated, selection), gather(reference, selection));
}

double rmsd(const Conformer &generated, const Conformer &reference,
            const Molecule &molecule) {
  return rmsd(generated, reference, molecule.heavy_indices());
}

DihedralSpec make_dihedral_spec(const Molecule &molecule, int a, int b, int c, int d) {
  const int n = static_cast<int>(molecule.size());
  auto valid = [n](int i) { return i >= 0 && i < n; };
  if (!valid(a) || !valid(b) || !valid(c) || !valid(d))
    throw Error(ErrorCode::kInvalidDihedral, "dihedral atom index out of range");
  if (a == b || a == c || a == d || b == c || b == d || c == d)
    throw Error(ErrorCode::kInvalidDihedral, "dihedral atoms must be distinct");
  if (molecule.find_bond(a, b) < 0 || molecule.find_bond(b, c) < 0
      || molecule.find_bond(c, d) < 0)
    throw Error(ErrorCode::kInvalidDihedral, "dihedral atoms are not a bonded path");

  std::vector<bool> seen(molecule.size(), false);
  std::queue<int> q;
  seen[c] = true;
  q.push(c);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v: molecule.neighbors(u)) {
      if (seen[v] || (u == c && v == b))
        continue;
      seen[v] = true;
      q.push(v);
    }
  }
  if (seen[b] || seen[a])
    throw Error(ErrorCode::kInvalidDihedral,
                "bond b-c lies on a ring; its torsion cannot be set independently");

  DihedralSpec spec { a, b, c, d, { } };
  for (int i = 0; i < n; ++i) {
    if (seen[i])
      spec.rotating_side.push_back(i);
  }
  return spec;
}

double wrap_degrees(double degrees) {
  double w = std::fmod(degrees + 180.0, 360.0);
  if (w < 0)
    w += 360.0;
  w -= 180.0;
  return w >= 180.0 ? w - 360.0 : w;
}

double dihedral_degrees(const Vec3 &pa, const Vec3 &pb, const Vec3 &pc,
                        const Vec3 &pd) {
  const Vec3 b1 = pb - pa, b2 = pc - pb, b3 = pd - pc;
  const Vec3 n1 = b1.cross(b2), n2 = b2.cross(b3);
  const double b2n = b2.norm();
  if (n1.squaredNorm() <= kCollinearSinSq * b1.squaredNorm() * b2.squaredNorm()
      || n2.squaredNorm() <= kCollinearSinSq * b2.squaredNorm() * b3.squaredNorm()
      || b2n == 0)
    throw Error(ErrorCode::kDegenerateGeometry,
                "collinear atoms: torsion is undefined");
  const double y = b2n * b1.dot(n2);
  const double x = n1.dot(n2);
  return wrap_degrees(std::atan2(y, x) * kRadToDeg);
}

double measure_dihedral(const Conformer &conformer, const DihedralSpec &spec) {
  const auto &p = conformer.coords;
  return dihedral_degrees(p[spec.a], p[spec.b], p[spec.c], p[spec.d]);
}

Conformer set_dihedral(const Conformer &conformer, const DihedralSpec &spec,
                       double degrees) {
  if (!std::isfinite(degrees))
    throw Error(ErrorCode::kInvalidArgument, "dihedral angle must be finite");

  const double current = measure_dihedral(conformer, spec);
  const double delta = wrap_degrees(degrees - current);
  if (delta == 0)
    return conformer;

  const Vec3 origin = conformer.coords[spec.c];
  const Vec3 axis = (conformer.coords[spec.c] - conformer.coords[spec.b]).normalized();
  const Mat3 rot = Eigen::AngleAxisd(delta * kDegToRad, axis).toRotationMatrix();

  Conformer out = conformer;
  for (int i: spec.rotating_side)
    out.coords[i] = origin + rot * (conformer.coords[i] - origin);
  return out;
}

}  // namespace confkit
