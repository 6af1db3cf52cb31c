//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.
//

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <string>

#include "confkit/clustering.hpp"
#include "confkit/error.hpp"
#include "confkit/forcefield.hpp"
#include "confkit/metrics.hpp"
#include "confkit/molio.hpp"
#include "confkit/pipeline.hpp"
#include "confkit/samplers.hpp"
#include "helpers.hpp"

using namespace confkit;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string &why) {
    if (!ok && pass) {
      pass = false;
      detail = why;
    }
  }
};

int failures = 0;

void report(const char *name, const std::function<Outcome()> &fn) {
  Outcome out;
  const auto t0 = Clock::now();
  try {
    out = fn();
  } catch (const std::exception &e) {
    out.pass = false;
    out.detail = std::string("exception: ") + e.what();
  }
  std::printf("%s  %-28s %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", name,
              out.detail.c_str(), seconds_since(t0));
  std::fflush(stdout);
  failures += !out.pass;
}

std::string fmt(const char *f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

const char *kToyNames[] = { "butane",  "cyclohexane",       "diethyl_ether",
                            "methylcyclopentane", "pentane", "propanol" };

// Kabsch ---------------------------------------------------------------

Outcome kabsch_optimality() {
  Outcome out;
  Rng rng(2024);
  const auto t0 = Clock::now();
  double worst_gap = -std::numeric_limits<double>::infinity();
  for (int pair = 0; pair < 200; ++pair) {
    const std::size_t n = 5 + rng.below(26);
    auto a = testing::random_points(rng, n);
    auto b = testing::random_points(rng, n);
    const double k = kabsch_rmsd(a, b);
    const double best = testing::rotation_search_rmsd(a, b, rng, 10000);
    worst_gap = std::max(worst_gap, k - best);
    out.require(k <= best + 1e-12, fmt("pair %g: kabsch %.6g > search %.6g", pair, k, best));
  }
  const double t = seconds_since(t0);
  out.require(t < 30.0, fmt("took %.1f s", t));
  if (out.pass)
    out.detail = fmt("200 pairs, max(kabsch - best of 1e4 rotations) = %.3g", worst_gap);
  return out;
}

Outcome rmsd_pseudo_metric() {
  Outcome out;
  Rng rng(7);
  double id = 0, inv = 0, sym = 0, tri = -1e9;
  for (int c = 0; c < 1000; ++c) {
    const std::size_t n = 3 + rng.below(28);
    auto a = testing::random_points(rng, n);
    auto b = testing::random_points(rng, n);
    auto x = testing::random_points(rng, n);
    id = std::max(id, kabsch_rmsd(a, a));
    auto moved = testing::rigid(a, testing::random_rotation(rng),
                                Vec3(rng.uniform(-10, 10), rng.uniform(-10, 10),
                                     rng.uniform(-10, 10)));
    inv = std::max(inv, std::abs(kabsch_rmsd(moved, b) - kabsch_rmsd(a, b)));
    sym = std::max(sym, std::abs(kabsch_rmsd(a, b) - kabsch_rmsd(b, a)));
    tri = std::max(tri, kabsch_rmsd(a, x) - kabsch_rmsd(a, b) - kabsch_rmsd(b, x));
  }
  out.require(id <= 1e-12, fmt("identity %.3g", id));
  out.require(inv <= 1e-9, fmt("rigid invariance %.3g", inv));
  out.require(sym <= 1e-9, fmt("symmetry %.3g", sym));
  out.require(tri <= 1e-6, fmt("triangle excess %.3g", tri));
  if (out.pass)
    out.detail = fmt("1000 cases, identity %.2g, invariance %.2g, symmetry %.2g", id, inv, sym);
  return out;
}

// Metrics --------------------------------------------------------------

Outcome cov_mat_oracle() {
  Outcome out;
  Rng rng(99);
  auto f = testing::load_toy("pentane");
  const auto &m = f.molecule;
  auto draw = [&](std::size_t n) {
    SamplerConfig sc;
    sc.seed = rng.next();
    sc.exec = ExecPolicy::kSerial;
    sc.clash_filter = false;
    return sample_uniform(m, f.ensemble.conformers[0], n, sc);
  };
  double worst = 0;
  for (int inst = 0; inst < 100; ++inst) {
    auto ref = draw(1 + rng.below(5));
    auto gen = draw(1 + rng.below(10));
    const double delta = rng.uniform(0.05, 1.5);
    auto got = evaluate_molecule(gen, ref, m, { delta, ExecPolicy::kParallel });

    int covered = 0;
    double mat = 0;
    for (const auto &r: ref.conformers) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto &g: gen.conformers)
        best = std::min(best, rmsd(g, r, m));
      covered += best < delta;
      mat += best;
    }
    const double cov = covered / static_cast<double>(ref.size());
    mat /= static_cast<double>(ref.size());
    worst = std::max({ worst, std::abs(cov - got.cov), std::abs(mat - got.mat) });

    // Monotone in delta.
    const double c_small = coverage(gen, ref, m, { delta * 0.5 });
    const double c_large = coverage(gen, ref, m, { delta * 2.0 });
    out.require(c_small <= got.cov && got.cov <= c_large, "COV not monotone in delta");

    // Adding one generated conformer.
    Ensemble more = gen;
    more.conformers.push_back(draw(1).conformers[0]);
    auto after = evaluate_molecule(more, ref, m, { delta, ExecPolicy::kSerial });
    out.require(after.cov >= got.cov, "COV decreased after adding a conformer");
    out.require(after.mat <= got.mat, "MAT increased after adding a conformer");
  }
  out.require(worst <= 1e-12, fmt("max deviation from double loop %.3g", worst));
  if (out.pass)
    out.detail = fmt("100 instances, max deviation %.2g, monotonicity held", worst);
  return out;
}

// Budget ---------------------------------------------------------------

Outcome budget() {
  Outcome out;
  const int n_ref[] = { 1, 50, 100, 150, 500 };
  const int n_e[] = { 20, 1000, 2000, 2000, 2000 };
  std::string seen;
  for (int i = 0; i < 5; ++i) {
    const auto b = compute_budget(n_ref[i]);
    const int quarter = (n_e[i] + 3) / 4;
    out.require(b.n_e == n_e[i] && b.n_u == quarter && b.n_g == quarter,
                fmt("n_ref %g gave n_e %g n_u %g", n_ref[i], b.n_e, b.n_u));
    seen += (seen.empty() ? "" : " ") + std::to_string(b.n_e);
  }
  if (out.pass)
    out.detail = "n_e = " + seen + ", n_u = n_g = ceil(n_e/4)";
  return out;
}

// Force field ----------------------------------------------------------

std::vector<MolFile> bundled_molecules() {
  std::vector<MolFile> out;
  for (const char *name: kToyNames)
    out.push_back(testing::load_toy(name));
  for (const char *name: { "methane.sdf", "ethane_2conf.sdf", "hexane.sdf", "benzene.sdf" })
    out.push_back(testing::load_fixture(name));
  return out;
}

Outcome forcefield_gradient() {
  Outcome out;
  Rng rng(5);
  const double h = 1e-5;
  double worst_rel = 0, worst_sum = 0, worst_rigid = 0;
  int geometries = 0;
  for (const auto &mf: bundled_molecules()) {
    const auto model = build_model(mf.molecule);
    for (int g = 0; g < 20; ++g, ++geometries) {
      Conformer c = mf.ensemble.conformers[0];
      for (auto &p: c.coords)
        p += Vec3(rng.uniform(-0.25, 0.25), rng.uniform(-0.25, 0.25),
                  rng.uniform(-0.25, 0.25));
      const auto eval = evaluate(model, c);

      double scale = 0, err = 0;
      for (std::size_t i = 0; i < c.size(); ++i)
        for (int axis = 0; axis < 3; ++axis) {
          Conformer p = c, q = c;
          p.coords[i][axis] += h;
          q.coords[i][axis] -= h;
          const double fd = (evaluate(model, p).energy() - evaluate(model, q).energy()) / (2 * h);
          scale = std::max(scale, std::abs(fd));
          err = std::max(err, std::abs(fd - eval.gradient[i][axis]));
        }
      worst_rel = std::max(worst_rel, err / std::max(scale, 1.0));

      Vec3 sum = Vec3::Zero();
      for (const auto &v: eval.gradient)
        sum += v;
      worst_sum = std::max(worst_sum, sum.norm());

      const Mat3 r = testing::random_rotation(rng);
      const Vec3 t(rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5));
      Conformer moved = c;
      for (auto &p: moved.coords)
        p = r * p + t;
      const auto em = evaluate(model, moved);
      double d = std::abs(em.energy() - eval.energy());
      for (std::size_t i = 0; i < c.size(); ++i)
        d = std::max(d, (em.gradient[i] - r * eval.gradient[i]).cwiseAbs().maxCoeff());
      worst_rigid = std::max(worst_rigid, d);
    }
  }
  out.require(worst_rel < 1e-4, fmt("max relative gradient error %.3g", worst_rel));
  out.require(worst_sum <= 1e-9, fmt("gradient sum %.3g", worst_sum));
  out.require(worst_rigid <= 1e-9, fmt("rigid-motion change %.3g", worst_rigid));
  if (out.pass)
    out.detail = fmt("%g geometries, rel err %.2g, |sum| %.2g", geometries, worst_rel, worst_sum);
  return out;
}

Outcome minimizer() {
  Outcome out;
  Rng rng(3);
  int runs = 0;
  for (const auto &mf: bundled_molecules()) {
    const auto model = build_model(mf.molecule);
    for (bool qn: { false, true }) {
      Conformer start = mf.ensemble.conformers[0];
      for (auto &p: start.coords)
        p += Vec3(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2));
      MinimizeOptions opts;
      opts.quasi_newton = qn;
      const auto res = minimize(model, start, opts);
      for (std::size_t k = 1; k < res.energy_trace.size(); ++k)
        out.require(res.energy_trace[k] <= res.energy_trace[k - 1],
                    "energy increased in " + mf.molecule.id());
      ++runs;
    }
  }

  auto ethane = testing::load_fixture("ethane_2conf.sdf");
  const auto model = build_model(ethane.molecule);
  Conformer stretched = ethane.ensemble.conformers[0];
  const Vec3 axis = (stretched.coords[1] - stretched.coords[0]).normalized();
  for (std::size_t i = 1; i < stretched.size(); ++i)
    if (i == 1 || ethane.molecule.find_bond(1, static_cast<int>(i)) >= 0)
      stretched.coords[i] += 0.4 * axis;
  const double r0 = model.bonds[ethane.molecule.find_bond(0, 1)].r0;
  const auto relaxed = minimize(model, ethane.ensemble.conformers[0], { 5000, 1e-8, true });
  const double r_min = (relaxed.conformer.coords[0] - relaxed.conformer.coords[1]).norm();
  double worst = 0, drift = 0;
  for (bool qn: { false, true }) {
    const auto res = minimize(model, stretched, { 5000, 1e-6, qn });
    const double r = (res.conformer.coords[0] - res.conformer.coords[1]).norm();
    worst = std::max(worst, std::abs(r - r0));
    drift = std::max(drift, std::abs(r - r_min));
  }
  out.require(worst < 1e-3, fmt("ethane C-C off by %.3g", worst));
  out.require(drift < 1e-4, fmt("ethane C-C %.3g from the relaxed length", drift));
  if (out.pass)
    out.detail = fmt("%g monotone runs, stretched ethane |r - r0| = %.2g", runs, worst);
  return out;
}

// K-means --------------------------------------------------------------

Outcome kmeans_checks() {
  Outcome out;
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd rows(60, 9);
    for (Eigen::Index i = 0; i < rows.size(); ++i)
      rows(i) = rng.normal();
    FeatureMatrix fm { rows, 0, true };
    const auto model = kmeans(fm, 1 + static_cast<int>(rng.below(10)), rng.next());
    for (std::size_t s = 1; s < model.inertia_history.size(); ++s)
      out.require(model.inertia_history[s] <= model.inertia_history[s - 1] + 1e-12,
                  "inertia increased");
  }

  const Eigen::Vector2d centres[3] = { { 0, 0 }, { 8, 0 }, { 0, 8 } };
  Eigen::MatrixXd blobs(12, 2);
  for (int i = 0; i < 12; ++i)
    blobs.row(i) = (centres[i % 3] + Eigen::Vector2d(rng.uniform(-1, 1), rng.uniform(-1, 1)))
                       .transpose();
  double oracle = std::numeric_limits<double>::infinity();
  std::vector<int> label(12);
  for (long code = 0; code < 531441; ++code) {
    long c = code;
    int sizes[3] = { 0, 0, 0 };
    for (int i = 0; i < 12; ++i) {
      label[i] = static_cast<int>(c % 3);
      c /= 3;
      ++sizes[label[i]];
    }
    if (!sizes[0] || !sizes[1] || !sizes[2])
      continue;
    Eigen::MatrixXd means = Eigen::MatrixXd::Zero(3, 2);
    for (int i = 0; i < 12; ++i)
      means.row(label[i]) += blobs.row(i);
    for (int j = 0; j < 3; ++j)
      means.row(j) /= sizes[j];
    double inertia = 0;
    for (int i = 0; i < 12; ++i)
      inertia += (blobs.row(i) - means.row(label[i])).squaredNorm();
    oracle = std::min(oracle, inertia);
  }
  FeatureMatrix fm { blobs, 0, true };
  const auto model = kmeans(fm, 3, 1);
  out.require(std::abs(model.inertia - oracle) <= 1e-9 * oracle,
              fmt("3-blob inertia %.6g vs exhaustive %.6g", model.inertia, oracle));

  const auto again = kmeans(fm, 3, 1);
  KmeansOptions serial;
  serial.exec = ExecPolicy::kSerial;
  const auto ser = kmeans(fm, 3, 1, serial);
  out.require(again.assignments == model.assignments && ser.assignments == model.assignments,
              "repeated runs disagree");
  if (out.pass)
    out.detail = fmt("inertia monotone over 50 runs, 3-blob %.6g = exhaustive %.6g",
                     model.inertia, oracle);
  return out;
}

// End to end -----------------------------------------------------------

std::vector<MoleculeInput> toy_inputs(int n_ref, std::uint64_t seed) {
  std::vector<MoleculeInput> inputs;
  for (const char *name: kToyNames) {
    auto mf = testing::load_toy(name);
    auto refs = make_synthetic_references(mf.molecule, n_ref, seed);
    inputs.push_back({ mf.molecule, refs, { } });
  }
  return inputs;
}

Outcome end_to_end() {
  Outcome out;
  const auto t0 = Clock::now();
  const int n_ref = 5;
  const auto inputs = toy_inputs(n_ref, 1234);
  PipelineConfig cfg;
  cfg.seed = 42;

  const auto a = run_benchmark(inputs, cfg);
  out.require(a.report.has_value() && a.manifest.failures.empty(), "molecules failed");
  if (!out.pass)
    return out;
  for (const auto &run: a.manifest.runs)
    out.require(run.selected.size() == static_cast<std::size_t>(2 * n_ref),
                run.metrics.molecule_id + " returned "
                    + std::to_string(run.selected.size()) + " conformers");

  const auto b = run_benchmark(inputs, cfg);
  const std::string ja = report_to_json(*a.report, cfg, a.manifest.runs).dump(2);
  const std::string jb = report_to_json(*b.report, cfg, b.manifest.runs).dump(2);
  out.require(ja == jb, "JSON reports differ between identical runs");
  const double t = seconds_since(t0);

  PipelineConfig echo = cfg;
  echo.echo_reference = true;
  const auto e = run_benchmark(inputs, echo);
  out.require(e.report && e.report->cov_mean == 1.0, "echo COV below 100%");
  out.require(e.report && e.report->mat_mean <= 1e-9, fmt("echo MAT %.3g", e.report->mat_mean));
  out.require(t < 60.0, fmt("two runs took %.1f s", t));
  if (out.pass)
    out.detail = fmt("6 molecules, COV %.1f%% MAT %.3f A, identical JSON, %.1f s/run",
                     100 * a.report->cov_mean, a.report->mat_mean, t / 2);
  return out;
}

// Five references leave too few minima for the budget to matter on these
// small molecules; ten keeps the comparison above the noise.
Outcome ablation() {
  Outcome out;
  const int n_ref = 10;
  const std::uint64_t seeds[] = { 1, 2, 3, 4, 5 };
  double mat_mult[3] = { 0, 0, 0 };  // 20, 10, 2
  const int mults[3] = { 20, 10, 2 };
  double mat_all = 0, mat_no_energy = 0;
  for (auto seed: seeds) {
    const auto inputs = toy_inputs(n_ref, 1000 + seed);
    for (int m = 0; m < 3; ++m) {
      PipelineConfig cfg;
      cfg.seed = seed;
      cfg.multiplier = mults[m];
      const auto r = run_benchmark(inputs, cfg);
      mat_mult[m] += r.report->mat_mean / 5.0;
      if (mults[m] == 20)
        mat_all += r.report->mat_mean / 5.0;
    }
    PipelineConfig cfg;
    cfg.seed = seed;
    cfg.enabled[static_cast<std::size_t>(SamplerKind::kEnergy)] = false;
    mat_no_energy += run_benchmark(inputs, cfg).report->mat_mean / 5.0;
  }
  out.require(mat_mult[0] <= mat_mult[1] && mat_mult[1] <= mat_mult[2],
              fmt("MAT x20 %.4f, x10 %.4f, x2 %.4f not ordered", mat_mult[0], mat_mult[1],
                  mat_mult[2]));
  out.require(mat_no_energy > mat_all,
              fmt("w/o energy MAT %.4f not above %.4f", mat_no_energy, mat_all));
  if (out.pass)
    out.detail = fmt("MAT x20 %.4f <= x10 %.4f <= x2 %.4f", mat_mult[0], mat_mult[1],
                     mat_mult[2])
                 + fmt("; w/o energy %.4f > %.4f", mat_no_energy, mat_all);
  return out;
}

// Parsers --------------------------------------------------------------

Outcome parser_round_trip() {
  Outcome out;
  int files = 0, malformed = 0;
  std::vector<fs::path> paths;
  for (const auto &dir: { fs::path(CONFKIT_FIXTURE_DIR), fs::path(CONFKIT_DATA_DIR) / "toy" })
    for (const auto &entry: fs::directory_iterator(dir))
      if (entry.is_regular_file())
        paths.push_back(entry.path());
  std::sort(paths.begin(), paths.end());
  for (const auto &p: paths) {
    const auto mf = read_molecule_file(p);
    for (bool sdf: { true, false }) {
      const auto back = sdf ? parse_sdf(write_sdf(mf.molecule, mf.ensemble))
                            : parse_xyz(write_xyz(mf.molecule, mf.ensemble));
      out.require(back.ensemble.size() == mf.ensemble.size(), p.filename().string());
      for (std::size_t k = 0; k < mf.ensemble.size() && out.pass; ++k)
        for (std::size_t i = 0; i < mf.molecule.size(); ++i)
          out.require((back.ensemble.conformers[k].coords[i] - mf.ensemble.conformers[k].coords[i])
                              .cwiseAbs()
                              .maxCoeff()
                          <= 1e-4,
                      p.filename().string() + " drifted");
    }
    ++files;
  }

  const std::pair<const char *, ErrorCode> bad[] = {
    { "counts_claims_5_atoms.sdf", ErrorCode::kMalformedCounts },
    { "bond_index_out_of_range.sdf", ErrorCode::kIndexOutOfRange },
    { "nonnumeric_coordinate.sdf", ErrorCode::kNonNumeric },
    { "v3000.sdf", ErrorCode::kUnsupportedV3000 },
    { "garbage_counts.sdf", ErrorCode::kMalformedCounts },
    { "inconsistent_connectivity.sdf", ErrorCode::kInconsistentConnectivity },
    { "empty.sdf", ErrorCode::kEmptyEnsemble },
    { "frame_atom_mismatch.xyz", ErrorCode::kFrameAtomMismatch },
    { "nonnumeric_coordinate.xyz", ErrorCode::kNonNumeric },
    { "truncated_frame.xyz", ErrorCode::kMalformedRecord },
  };
  for (const auto &[name, code]: bad) {
    try {
      read_molecule_file(fs::path(CONFKIT_FIXTURE_DIR) / "malformed" / name);
      out.require(false, std::string(name) + " parsed without error");
    } catch (const Error &e) {
      out.require(e.code() == code, std::string(name) + " raised "
                                        + std::string(error_code_name(e.code())));
    }
    ++malformed;
  }
  if (out.pass)
    out.detail = fmt("%g files within 1e-4, %g malformed files rejected with typed errors",
                     files, malformed);
  return out;
}

}  // namespace

int main() {
  report("kabsch-optimality", kabsch_optimality);
  report("rmsd-pseudo-metric", rmsd_pseudo_metric);
  report("cov-mat-oracle", cov_mat_oracle);
  report("sampling-budget", budget);
  report("forcefield-gradient", forcefield_gradient);
  report("minimizer", minimizer);
  report("kmeans", kmeans_checks);
  report("end-to-end-toy-set", end_to_end);
  report("ablation-trend", ablation);
  report("parser-round-trip", parser_round_trip);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
