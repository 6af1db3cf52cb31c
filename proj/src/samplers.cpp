//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#include "confkit/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "confkit/error.hpp"
#include "confkit/random.hpp"
#include "optim.hpp"

namespace confkit {
namespace {
  constexpr double kBondTolerance = 0.01;
  constexpr double kAngleTolerance = 0.05;
  constexpr double kTetrahedral = 109.47 * std::numbers::pi / 180.0;
  constexpr double kTrigonal = 2.0 * std::numbers::pi / 3.0;
  constexpr double kLinear = std::numbers::pi;

  double order_factor(BondOrder order) {
    switch (order) {
    case BondOrder::kSingle:
      return 1.0;
    case BondOrder::kDouble:
      return 0.876;
    case BondOrder::kTriple:
      return 0.784;
    case BondOrder::kAromatic:
      return 0.908;
    }
    return 1.0;
  }

  void require_sampleable(const Molecule &molecule) {
    if (!molecule.is_connected())
      throw Error(ErrorCode::kDisconnected,
                  "molecule '" + molecule.id()
                      + "' has several fragments and cannot be sampled");
  }
}  // namespace

double ideal_bond_length(const Molecule &molecule, const Bond &bond,
                         const RadiusTable &radii) {
  const auto &atoms = molecule.atoms();
  return (radii.at(atoms[bond.i].atomic_number).covalent
          + radii.at(atoms[bond.j].atomic_number).covalent)
         * order_factor(bond.order);
}

double ideal_angle(const Molecule &molecule, int center) {
  int doubles = 0;
  bool triple = false, trigonal = false;
  for (int nb: molecule.neighbors(center)) {
    const auto order = molecule.bonds()[molecule.find_bond(center, nb)].order;
    if (order == BondOrder::kTriple)
      triple = true;
    else if (order == BondOrder::kDouble)
      ++doubles;
    else if (order == BondOrder::kAromatic)
      trigonal = true;
  }
  if (triple || doubles >= 2)
    return kLinear;
  if (doubles == 1 || trigonal)
    return kTrigonal;
  return kTetrahedral;
}

bool has_steric_clash(const Molecule &molecule, const Conformer &conformer,
                      double clash_factor, const RadiusTable &radii) {
  const auto topo = molecule.topological_distances();
  const auto &heavy = molecule.heavy_indices();
  for (std::size_t p = 0; p < heavy.size(); ++p) {
    for (std::size_t q = p + 1; q < heavy.size(); ++q) {
      const auto i = heavy[p], j = heavy[q];
      if (topo[i][j] >= 0 && topo[i][j] < 3)
        continue;
      const double limit = clash_factor
                           * (radii.at(molecule.atoms()[i].atomic_number).vdw
                              + radii.at(molecule.atoms()[j].atomic_number).vdw);
      if ((conformer.coords[i] - conformer.coords[j]).norm() < limit)
        return true;
    }
  }
  return false;
}

std::vector<DihedralSpec> detect_rotatable_bonds(const Molecule &molecule) {
  std::vector<DihedralSpec> out;
  const auto &atoms = molecule.atoms();
  auto other_heavy = [&](int atom, int exclude) {
    for (int nb: molecule.neighbors(atom)) {
      if (nb != exclude && atoms[nb].is_heavy())
        return nb;
    }
    return -1;
  };

  for (std::size_t k = 0; k < molecule.bonds().size(); ++k) {
    const Bond &bond = molecule.bonds()[k];
    if (bond.order != BondOrder::kSingle || molecule.is_ring_bond(static_cast<int>(k)))
      continue;
    const int a = other_heavy(bond.i, bond.j);
    const int d = other_heavy(bond.j, bond.i);
    if (a < 0 || d < 0)
      continue;
    out.push_back(make_dihedral_spec(molecule, a, bond.i, bond.j, d));
  }
  std::sort(out.begin(), out.end(), [](const auto &l, const auto &r) {
    return std::tie(l.b, l.c) < std::tie(r.b, r.c);
  });
  return out;
}

Conformer internal::uniform_sample_one(const Molecule &molecule, const Conformer &templ,
                                       const std::vector<DihedralSpec> &rotors,
                                       const SamplerConfig &config, std::uint64_t seed) {
  Rng rng(seed);
  Conformer out = templ;
  out.molecule_id = molecule.id();
  out.energy.reset();
  out.provenance = Provenance::kUniform;
  out.flags = kFlagNone;
  if (rotors.empty()) {
    out.flags |= kFlagNoTorsions;
    return out;
  }

  const int attempts = config.clash_filter ? std::max(1, config.max_clash_attempts) : 1;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    Conformer trial = out;
    for (const auto &rotor: rotors)
      trial = set_dihedral(trial, rotor, rng.uniform(-180.0, 180.0));
    if (!config.clash_filter || !has_steric_clash(molecule, trial, config.clash_factor))
      return trial;
    if (attempt + 1 == attempts) {
      trial.flags |= kFlagClash;
      return trial;
    }
  }
  return out;
}

Ensemble sample_uniform(const Molecule &molecule, const Conformer &templ,
                        std::size_t count, const SamplerConfig &config) {
  require_sampleable(molecule);
  validate_conformer(molecule, templ);

  Ensemble ens { molecule.id(), std::vector<Conformer>(count) };
  if (count == 0)
    return ens;

  const auto rotors = detect_rotatable_bonds(molecule);
  for_each_index(config.exec, count, [&](std::size_t i) {
    ens.conformers[i] = internal::uniform_sample_one(
        molecule, templ, rotors, config,
        derive_seed(config.seed, molecule.id(), Stream::kUniform, i));
  });
  return ens;
}

BoundsMatrix build_bounds(const Molecule &molecule, double clash_factor,
                          const RadiusTable &radii) {
  require_sampleable(molecule);
  const auto n = static_cast<Eigen::Index>(molecule.size());
  const auto &atoms = molecule.atoms();
  for (const auto &atom: atoms)
    radii.at(atom.atomic_number);

  const auto topo = molecule.topological_distances();
  const double inf = std::numeric_limits<double>::infinity();
  BoundsMatrix bm { Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Constant(n, n, inf) };
  bm.upper.diagonal().setZero();

  std::vector<double> bond_len(molecule.bonds().size());
  for (std::size_t k = 0; k < molecule.bonds().size(); ++k) {
    const Bond &bond = molecule.bonds()[k];
    bond_len[k] = ideal_bond_length(molecule, bond, radii);
    bm.lower(bond.i, bond.j) = bm.lower(bond.j, bond.i) = bond_len[k] - kBondTolerance;
    bm.upper(bond.i, bond.j) = bm.upper(bond.j, bond.i) = bond_len[k] + kBondTolerance;
  }

  // 1-3 pairs; with several paths (4-rings) the widest range is kept.
  std::vector<std::vector<bool>> set13(n, std::vector<bool>(n, false));
  for (Eigen::Index center = 0; center < n; ++center) {
    const auto &nbrs = molecule.neighbors(static_cast<int>(center));
    const double theta = ideal_angle(molecule, static_cast<int>(center));
    for (std::size_t p = 0; p < nbrs.size(); ++p) {
      for (std::size_t q = p + 1; q < nbrs.size(); ++q) {
        const int i = nbrs[p], k = nbrs[q];
        if (topo[i][k] != 2)
          continue;
        const double r1 = bond_len[molecule.find_bond(i, static_cast<int>(center))];
        const double r2 = bond_len[molecule.find_bond(k, static_cast<int>(center))];
        const double d = std::sqrt(r1 * r1 + r2 * r2 - 2 * r1 * r2 * std::cos(theta));
        double lo = d * (1 - kAngleTolerance), hi = d * (1 + kAngleTolerance);
        if (set13[i][k]) {
          lo = std::min(lo, bm.lower(i, k));
          hi = std::max(hi, bm.upper(i, k));
        }
        set13[i][k] = set13[k][i] = true;
        bm.lower(i, k) = bm.lower(k, i) = lo;
        bm.upper(i, k) = bm.upper(k, i) = hi;
      }
    }
  }

  // Remaining pairs: steric lower bound; the upper bound comes from the
  // smoothing pass below, which turns infinities into shortest-path sums.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (topo[i][j] >= 0 && topo[i][j] < 3)
        continue;
      bm.lower(i, j) = bm.lower(j, i)
          = clash_factor * (radii.at(atoms[i].atomic_number).vdw
                            + radii.at(atoms[j].atomic_number).vdw);
    }
  }

  // Triangle smoothing (Floyd-Warshall on upper bounds, lower tightening).
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == k)
        continue;
      for (Eigen::Index j = i + 1; j < n; ++j) {
        if (j == k)
          continue;
        const double via = bm.upper(i, k) + bm.upper(k, j);
        if (via < bm.upper(i, j))
          bm.upper(i, j) = bm.upper(j, i) = via;
        const double lo = std::max(bm.lower(i, k) - bm.upper(k, j),
                                   bm.lower(j, k) - bm.upper(k, i));
        if (lo > bm.lower(i, j))
          bm.lower(i, j) = bm.lower(j, i) = lo;
      }
    }
  }

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (bm.lower(i, j) > bm.upper(i, j))
        bm.lower(i, j) = bm.lower(j, i) = bm.upper(i, j);
    }
  }
  return bm;
}

double bounds_penalty(const BoundsMatrix &bounds, const Eigen::VectorXd &x,
                      Eigen::VectorXd *grad) {
  const Eigen::Index n = bounds.size();
  if (grad)
    grad->setZero(x.size());
  double f = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const Vec3 diff = x.segment<3>(3 * i) - x.segment<3>(3 * j);
      const double d = diff.norm();
      double excess = 0;
      if (d > bounds.upper(i, j))
        excess = d - bounds.upper(i, j);
      else if (d < bounds.lower(i, j))
        excess = d - bounds.lower(i, j);
      if (excess == 0)
        continue;
      f += excess * excess;
      if (grad && d > 0) {
        const Vec3 g = (2 * excess / d) * diff;
        grad->segment<3>(3 * i) += g;
        grad->segment<3>(3 * j) -= g;
      }
    }
  }
  return f;
}

Conformer internal::geometric_sample_one(const Molecule &molecule,
                                         const BoundsMatrix &bounds,
                                         const SamplerConfig &config,
                                         std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::Index n = bounds.size();
  Eigen::MatrixXd d2(n, n);

  for (int attempt = 0; attempt < std::max(1, config.max_embed_attempts); ++attempt) {
    d2.setZero();
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double d = rng.uniform(bounds.lower(i, j), bounds.upper(i, j));
        d2(i, j) = d2(j, i) = d * d;
      }
    }

    // Metric matrix from distances to the centroid.
    const double inv_n = 1.0 / static_cast<double>(n);
    const double total = 0.5 * d2.sum() * inv_n * inv_n;
    Eigen::VectorXd d0 = d2.rowwise().sum() * inv_n - Eigen::VectorXd::Constant(n, total);
    Eigen::MatrixXd gram(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j)
        gram(i, j) = 0.5 * (d0(i) + d0(j) - d2(i, j));
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    if (eig.info() != Eigen::Success || !eig.eigenvalues().allFinite()
        || eig.eigenvalues()(n - 1) <= 0)
      continue;

    Eigen::VectorXd x(3 * n);
    x.setZero();
    for (int axis = 0; axis < 3 && axis < n; ++axis) {
      const Eigen::Index col = n - 1 - axis;
      const double lambda = std::max(0.0, eig.eigenvalues()(col));
      const double scale = std::sqrt(lambda);
      for (Eigen::Index i = 0; i < n; ++i)
        x(3 * i + axis) = scale * eig.eigenvectors()(i, col);
    }

    internal::DescentOptions opts;
    opts.max_iters = config.dg_refine_iters;
    opts.grad_tol = 1e-6;
    opts.direction = internal::Direction::kLbfgs;
    internal::armijo_descent(
        [&](const Eigen::VectorXd &p, Eigen::VectorXd &g) {
          return bounds_penalty(bounds, p, &g);
        },
        x, opts);

    Conformer out;
    out.molecule_id = molecule.id();
    out.coords = internal::unflatten(x);
    out.provenance = Provenance::kGeometric;
    if (!out.coords.empty() && std::all_of(out.coords.begin(), out.coords.end(),
                                           [](const Vec3 &p) { return p.allFinite(); })) {
      if (has_steric_clash(molecule, out, config.clash_factor))
        out.flags |= kFlagBoundsViolation;
      return out;
    }
  }
  throw Error(ErrorCode::kEmbeddingFailed,
              "distance-geometry embedding failed for '" + molecule.id() + "'");
}

Ensemble sample_geometric(const Molecule &molecule, std::size_t count,
                          const SamplerConfig &config) {
  Ensemble ens { molecule.id(), std::vector<Conformer>(count) };
  if (count == 0)
    return ens;

  const BoundsMatrix bounds = build_bounds(molecule, config.clash_factor);
  for_each_index(config.exec, count, [&](std::size_t i) {
    ens.conformers[i] = internal::geometric_sample_one(
        molecule, bounds, config,
        derive_seed(config.seed, molecule.id(), Stream::kGeometric, i));
  });
  return ens;
}

}  // namespace confkit
