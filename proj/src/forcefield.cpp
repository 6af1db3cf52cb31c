//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#include "confkit/forcefield.hpp"

#include <cmath>

#include "confkit/error.hpp"
#include "confkit/random.hpp"
#include "optim.hpp"

namespace confkit {
namespace {
  const double kSigmaScale = std::pow(2.0, -1.0 / 6.0);

  // Returns the energy at flat coordinates x; fills grad (same layout) when
  // non-null.
  EnergyTerms energy_flat(const EnergyModel &model, const Eigen::VectorXd &x,
                          Eigen::VectorXd *grad) {
    EnergyTerms e;
    if (grad)
      grad->setZero(x.size());
    auto pos = [&x](int i) -> Vec3 { return x.segment<3>(3 * i); };
    auto add = [grad](int i, const Vec3 &g) {
      if (grad)
        grad->segment<3>(3 * i) += g;
    };

    for (const auto &t: model.bonds) {
      const Vec3 diff = pos(t.i) - pos(t.j);
      const double r = diff.norm();
      const double dr = r - t.r0;
      e.bond += t.k * dr * dr;
      if (grad && r > 0) {
        const Vec3 g = (2 * t.k * dr / r) * diff;
        add(t.i, g);
        add(t.j, -g);
      }
    }

    for (const auto &t: model.angles) {
      const Vec3 u = pos(t.i) - pos(t.j), v = pos(t.k) - pos(t.j);
      const double lu = u.norm(), lv = v.norm();
      const Vec3 cross = u.cross(v);
      const double sin_t = cross.norm();
      const double cos_t = u.dot(v);
      const double theta = std::atan2(sin_t, cos_t);
      const double dt = theta - t.theta0;
      e.angle += t.ka * dt * dt;
      if (!grad || lu == 0 || lv == 0)
        continue;
      const double s = sin_t / (lu * lv);
      if (s < 1e-10)
        continue;  // linear: direction of the derivative is undefined
      const double c = cos_t / (lu * lv);
      const Vec3 uh = u / lu, vh = v / lv;
      const double de = 2 * t.ka * dt;
      const Vec3 gi = de * (c * uh - vh) / (lu * s);
      const Vec3 gk = de * (c * vh - uh) / (lv * s);
      add(t.i, gi);
      add(t.k, gk);
      add(t.j, -(gi + gk));
    }

    for (const auto &t: model.torsions) {
      const Vec3 r_ij = pos(t.a) - pos(t.b);
      const Vec3 r_kj = pos(t.c) - pos(t.b);
      const Vec3 r_kl = pos(t.c) - pos(t.d);
      const Vec3 m = r_ij.cross(r_kj), n = r_kj.cross(r_kl);
      const double m2 = m.squaredNorm(), n2 = n.squaredNorm();
      const double nrkj2 = r_kj.squaredNorm();
      const double nrkj = std::sqrt(nrkj2);
      const double phi = std::atan2(nrkj * r_ij.dot(n), m.dot(n));
      e.torsion += 0.5 * t.barrier * (1 + std::cos(t.periodicity * phi));
      if (!grad || m2 < 1e-20 || n2 < 1e-20 || nrkj2 == 0)
        continue;
      const double dv = -0.5 * t.barrier * t.periodicity * std::sin(t.periodicity * phi);
      // Force decomposition as in Bekker's dihedral derivation.
      const Vec3 f_i = (-dv * nrkj / m2) * m;
      const Vec3 f_l = (dv * nrkj / n2) * n;
      const double p = r_ij.dot(r_kj) / nrkj2;
      const double q = r_kl.dot(r_kj) / nrkj2;
      const Vec3 svec = p * f_i - q * f_l;
      const Vec3 f_j = f_i - svec;
      const Vec3 f_k = f_l + svec;
      add(t.a, -f_i);
      add(t.b, f_j);
      add(t.c, f_k);
      add(t.d, -f_l);
    }

    for (const auto &t: model.nonbonded) {
      const Vec3 diff = pos(t.i) - pos(t.j);
      const double r2 = diff.squaredNorm();
      if (r2 == 0)
        throw Error(ErrorCode::kCoincidentAtoms,
                    "atoms " + std::to_string(t.i + 1) + " and "
                        + std::to_string(t.j + 1) + " coincide");
      const double sr2 = t.sigma * t.sigma / r2;
      const double sr6 = sr2 * sr2 * sr2;
      const double sr12 = sr6 * sr6;
      e.nonbonded += 4 * t.epsilon * (sr12 - sr6);
      if (grad) {
        // dE/dr * (1/r), multiplied by diff below.
        const double coef = 4 * t.epsilon * (-12 * sr12 + 6 * sr6) / r2;
        const Vec3 g = coef * diff;
        add(t.i, g);
        add(t.j, -g);
      }
    }
    return e;
  }

  void check_model(const EnergyModel &model, const Conformer &conformer) {
    if (conformer.size() != model.atom_count)
      throw Error(ErrorCode::kEnsembleMismatch,
                  "conformer has " + std::to_string(conformer.size())
                      + " atoms, model expects " + std::to_string(model.atom_count));
    for (const auto &p: conformer.coords) {
      if (!p.allFinite())
        throw Error(ErrorCode::kInvalidArgument, "non-finite coordinate");
    }
  }
}  // namespace

EnergyModel build_model(const Molecule &molecule, const RadiusTable &radii) {
  EnergyModel model;
  model.atom_count = molecule.size();
  const auto &atoms = molecule.atoms();
  for (const auto &atom: atoms)
    radii.at(atom.atomic_number);

  for (const auto &bond: molecule.bonds()) {
    model.bonds.push_back(
        { bond.i, bond.j, ideal_bond_length(molecule, bond, radii), kBondForceConstant });
  }

  for (std::size_t center = 0; center < molecule.size(); ++center) {
    const auto &nbrs = molecule.neighbors(static_cast<int>(center));
    const double theta0 = ideal_angle(molecule, static_cast<int>(center));
    for (std::size_t p = 0; p < nbrs.size(); ++p) {
      for (std::size_t q = p + 1; q < nbrs.size(); ++q) {
        model.angles.push_back(
            { nbrs[p], static_cast<int>(center), nbrs[q], theta0, kAngleForceConstant });
      }
    }
  }

  for (const auto &rotor: detect_rotatable_bonds(molecule)) {
    model.torsions.push_back(
        { rotor.a, rotor.b, rotor.c, rotor.d, kTorsionPeriodicity, kTorsionBarrier });
  }

  const auto topo = molecule.topological_distances();
  for (std::size_t i = 0; i < molecule.size(); ++i) {
    for (std::size_t j = i + 1; j < molecule.size(); ++j) {
      if (topo[i][j] >= 0 && topo[i][j] < 3)
        continue;
      const double sigma = (radii.at(atoms[i].atomic_number).vdw
                            + radii.at(atoms[j].atomic_number).vdw)
                           * kSigmaScale;
      model.nonbonded.push_back(
          { static_cast<int>(i), static_cast<int>(j), kLjEpsilon, sigma });
    }
  }
  return model;
}

EnergyEval evaluate(const EnergyModel &model, const Conformer &conformer) {
  check_model(model, conformer);
  const Eigen::VectorXd x = internal::flatten(conformer.coords);
  Eigen::VectorXd g;
  EnergyEval out;
  out.terms = energy_flat(model, x, &g);
  out.gradient = internal::unflatten(g);
  return out;
}

MinimizeResult minimize(const EnergyModel &model, const Conformer &start,
                        const MinimizeOptions &options) {
  check_model(model, start);
  if (options.max_iters < 1)
    throw Error(ErrorCode::kInvalidArgument, "max_iters must be at least 1");

  internal::DescentOptions opts;
  opts.max_iters = options.max_iters;
  opts.grad_tol = options.tol;
  opts.direction = options.quasi_newton ? internal::Direction::kLbfgs
                                        : internal::Direction::kSteepest;
  opts.record_trace = true;

  Eigen::VectorXd x = internal::flatten(start.coords);
  auto res = internal::armijo_descent(
      [&model](const Eigen::VectorXd &p, Eigen::VectorXd &g) {
        return energy_flat(model, p, &g).total();
      },
      x, opts);

  MinimizeResult out;
  out.conformer = start;
  out.conformer.coords = internal::unflatten(x);
  out.energy = res.value;
  out.conformer.energy = res.value;
  out.iterations = res.iterations;
  out.converged = res.converged;
  out.max_gradient_norm = res.max_grad_norm;
  out.energy_trace = std::move(res.trace);
  if (!out.converged)
    out.conformer.flags |= kFlagNotConverged;
  return out;
}

Conformer make_template(const Molecule &molecule, const EnergyModel &model,
                        const SamplerConfig &config) {
  const BoundsMatrix bounds = build_bounds(molecule, config.clash_factor);
  Conformer start = internal::geometric_sample_one(
      molecule, bounds, config, derive_seed(config.seed, molecule.id(), Stream::kTemplate, 0));
  Conformer templ = minimize(model, start).conformer;
  templ.flags = kFlagNone;
  templ.energy.reset();
  return templ;
}

Ensemble sample_energy(const Molecule &molecule, const EnergyModel &model,
                       std::size_t count, const SamplerConfig &config,
                       const Conformer *templ, const MinimizeOptions &options) {
  Ensemble ens { molecule.id(), std::vector<Conformer>(count) };
  if (count == 0)
    return ens;

  const BoundsMatrix bounds = build_bounds(molecule, config.clash_factor);
  Conformer own_template;
  if (!templ) {
    own_template = make_template(molecule, model, config);
    templ = &own_template;
  }
  validate_conformer(molecule, *templ);
  const auto rotors = detect_rotatable_bonds(molecule);

  for_each_index(config.exec, count, [&](std::size_t i) {
    const auto seed = derive_seed(config.seed, molecule.id(), Stream::kEnergy, i);
    Conformer start = i % 2 == 0
                          ? internal::uniform_sample_one(molecule, *templ, rotors, config, seed)
                          : internal::geometric_sample_one(molecule, bounds, config, seed);
    MinimizeResult res = minimize(model, start, options);
    Conformer out = std::move(res.conformer);
    out.provenance = Provenance::kEnergy;
    out.flags = res.converged ? kFlagNone : kFlagNotConverged;
    out.energy = res.energy;
    ens.conformers[i] = std::move(out);
  });
  return ens;
}

}  // namespace confkit
