//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "confkit/clustering.hpp"
#include "confkit/error.hpp"
#include "confkit/forcefield.hpp"
#include "confkit/metrics.hpp"
#include "confkit/molio.hpp"
#include "confkit/pipeline.hpp"
#include "confkit/samplers.hpp"

namespace fs = std::filesystem;
using namespace confkit;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitInvalid = 2;

void write_text(const fs::path &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
}

ExecPolicy policy(int threads) {
  return threads == 1 ? ExecPolicy::kSerial : ExecPolicy::kParallel;
}

// sample ---------------------------------------------------------------

struct SampleArgs {
  std::string in, out, sampler = "all";
  std::size_t count = 0;
  std::uint64_t seed = 0;
  bool no_clash_filter = false;
};

int run_sample(const SampleArgs &a, ExecPolicy exec) {
  MolFile mf = read_molecule_file(a.in);
  const Molecule &mol = mf.molecule;
  SamplerConfig sc;
  sc.seed = a.seed;
  sc.exec = exec;
  sc.clash_filter = !a.no_clash_filter;
  const Conformer &templ = mf.ensemble.conformers.front();

  std::array<std::size_t, 3> counts { 0, 0, 0 };
  if (a.sampler == "all") {
    counts[0] = counts[1] = a.count / 6;
    counts[2] = a.count - 2 * (a.count / 6);
  } else if (auto k = parse_sampler(a.sampler)) {
    counts[static_cast<std::size_t>(*k)] = a.count;
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unknown sampler '" + a.sampler + "'");
  }

  Ensemble out { mol.id(), { } };
  auto append = [&out](Ensemble e) {
    for (auto &c: e.conformers)
      out.conformers.push_back(std::move(c));
  };
  if (counts[0] > 0)
    append(sample_uniform(mol, templ, counts[0], sc));
  if (counts[1] > 0)
    append(sample_geometric(mol, counts[1], sc));
  if (counts[2] > 0)
    append(sample_energy(mol, build_model(mol), counts[2], sc, &templ));
  if (out.empty())
    throw Error(ErrorCode::kInvalidArgument, "count must be positive");
  write_molecule_file(a.out, mol, out);
  std::fprintf(stderr, "wrote %zu conformers to %s\n", out.size(), a.out.c_str());
  return kExitOk;
}

// cluster --------------------------------------------------------------

struct ClusterArgs {
  std::string in, out;
  int k = 0;
  std::uint64_t seed = 0;
  bool centroid = false;
  bool all_atoms = false;
};

int run_cluster(const ClusterArgs &a, ExecPolicy exec) {
  MolFile mf = read_molecule_file(a.in);
  const bool heavy = !(a.centroid || a.all_atoms);
  const FeatureMatrix fm = featurize(mf.ensemble, mf.molecule, heavy);
  KmeansOptions ko;
  ko.exec = exec;
  const ClusterModel cm = kmeans(fm, a.k, a.seed, ko);
  const Ensemble reps = select_representatives(
      mf.ensemble, cm, a.centroid ? RepresentativeMode::kCentroid : RepresentativeMode::kMedoid);
  write_molecule_file(a.out, mf.molecule, reps);
  std::fprintf(stderr, "k=%d inertia=%.6g iterations=%d\n", cm.k, cm.inertia, cm.iterations);
  return kExitOk;
}

// eval -----------------------------------------------------------------

struct EvalArgs {
  std::string gen, ref;
  double delta = kThresholdQm9;
};

int run_eval(const EvalArgs &a, ExecPolicy exec) {
  MolFile ref = read_molecule_file(a.ref);
  MolFile gen = read_molecule_file(a.gen);
  for (auto &c: gen.ensemble.conformers)
    c.molecule_id = ref.molecule.id();
  MetricsConfig mc { a.delta, exec };
  const MoleculeMetrics m = evaluate_molecule(gen.ensemble, ref.ensemble, ref.molecule, mc);
  nlohmann::json j = { { "id", m.molecule_id }, { "n_ref", m.n_ref }, { "n_gen", m.n_gen },
                       { "delta", a.delta },    { "cov", 100.0 * m.cov }, { "mat", m.mat } };
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

// pipeline -------------------------------------------------------------

struct PipelineArgs {
  std::string ref_dir, report, csv, manifest, config_file;
  std::vector<std::string> disabled, ingest;
  std::uint64_t seed = 0;
  int multiplier = 20;
  double delta = kThresholdQm9;
  bool allow_any_multiplier = false, redistribute = false, keep_going = false;
  bool echo_reference = false, strict_ingest = false, centroid = false;
  int fixed_count = 0;
  std::size_t filter_min = 0, filter_max = 0;
  int synthetic_refs = 0;
};

int run_pipeline(const PipelineArgs &a, ExecPolicy exec, const CLI::App &sub) {
  PipelineConfig cfg;
  if (!a.config_file.empty()) {
    std::ifstream in(a.config_file);
    if (!in)
      throw Error(ErrorCode::kIo, "cannot open " + a.config_file);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception &e) {
      throw Error(ErrorCode::kInvalidArgument, std::string("bad config file: ") + e.what());
    }
    cfg = config_from_json(j);
  }
  // Flags given on the command line override the config file.
  if (sub.count("--seed"))
    cfg.seed = a.seed;
  if (sub.count("--multiplier"))
    cfg.multiplier = a.multiplier;
  if (sub.count("--delta"))
    cfg.delta = a.delta;
  cfg.allow_any_multiplier |= a.allow_any_multiplier;
  cfg.redistribute |= a.redistribute;
  cfg.echo_reference |= a.echo_reference;
  cfg.strict_ingest |= a.strict_ingest;
  if (a.centroid)
    cfg.representative = RepresentativeMode::kCentroid;
  for (const auto &name: a.disabled) {
    auto k = parse_sampler(name);
    if (!k)
      throw Error(ErrorCode::kInvalidArgument, "unknown sampler '" + name + "'");
    cfg.enabled[static_cast<std::size_t>(*k)] = false;
  }
  if (a.fixed_count > 0)
    cfg.fixed_n_ref = a.fixed_count;
  if (sub.count("--filter-min"))
    cfg.filter_min = a.filter_min;
  if (sub.count("--filter-max"))
    cfg.filter_max = a.filter_max;
  cfg.exec = exec;
  cfg.sampler.exec = exec;
  validate_config(cfg);

  std::vector<MoleculeInput> inputs = load_reference_dir(a.ref_dir);
  if (inputs.empty())
    throw Error(ErrorCode::kInvalidArgument, "no molecule files in " + a.ref_dir);
  if (a.synthetic_refs > 0) {
    for (auto &in: inputs)
      in.reference = make_synthetic_references(in.molecule, a.synthetic_refs, cfg.seed, exec);
  }
  for (const auto &spec: a.ingest) {
    const auto eq = spec.find('=');
    auto role = eq == std::string::npos ? std::nullopt : parse_sampler(spec.substr(0, eq));
    if (!role)
      throw Error(ErrorCode::kInvalidArgument,
                  "--ingest expects role=dir with role uniform, geometric or energy");
    attach_external_dir(inputs, *role, spec.substr(eq + 1));
  }

  BenchmarkResult res = run_benchmark(inputs, cfg, a.keep_going);
  for (const auto &f: res.manifest.failures)
    std::fprintf(stderr, "failed: %s: %s\n", f.molecule_id.c_str(), f.message.c_str());
  if (!a.manifest.empty())
    write_text(a.manifest, manifest_to_json(res.manifest).dump(2) + "\n");
  if (!res.report) {
    std::fprintf(stderr, "every molecule failed\n");
    return kExitPartial;
  }
  const std::string report = report_to_json(*res.report, cfg, res.manifest.runs).dump(2) + "\n";
  if (a.report.empty())
    std::cout << report;
  else
    write_text(a.report, report);
  if (!a.csv.empty())
    write_text(a.csv, report_to_csv(*res.report, cfg, res.manifest.runs));
  std::fprintf(stderr, "%s: COV mean %.2f%% median %.2f%%, MAT mean %.4f median %.4f\n",
               config_label(cfg).c_str(), 100.0 * res.report->cov_mean,
               100.0 * res.report->cov_median, res.report->mat_mean, res.report->mat_median);
  return res.exit_code;
}

// make-refs ------------------------------------------------------------

struct RefsArgs {
  std::string in_dir, out_dir;
  int n_ref = 5;
  std::uint64_t seed = 0;
};

int run_make_refs(const RefsArgs &a, ExecPolicy exec) {
  auto inputs = load_reference_dir(a.in_dir);
  if (inputs.empty())
    throw Error(ErrorCode::kInvalidArgument, "no molecule files in " + a.in_dir);
  fs::create_directories(a.out_dir);
  for (const auto &in: inputs) {
    Ensemble refs = make_synthetic_references(in.molecule, a.n_ref, a.seed, exec);
    write_molecule_file(fs::path(a.out_dir) / (in.molecule.id() + ".sdf"), in.molecule, refs);
  }
  std::fprintf(stderr, "wrote %zu reference sets to %s\n", inputs.size(), a.out_dir.c_str());
  return kExitOk;
}

bool is_input_error(ErrorCode code) {
  return code != ErrorCode::kEmbeddingFailed && code != ErrorCode::kCoincidentAtoms;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app { "confkit: conformer ensemble generation and benchmarking" };
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "1 runs serially; 0 uses OpenMP defaults");

  SampleArgs sa;
  auto *sample = app.add_subcommand("sample", "draw conformers for one molecule");
  sample->add_option("--in", sa.in, "molecule file (SDF or XYZ)")->required();
  sample->add_option("--sampler", sa.sampler, "uniform, geometric, energy or all")
      ->check(CLI::IsMember({ "uniform", "geometric", "energy", "all" }));
  sample->add_option("--count", sa.count, "number of conformers")->required();
  sample->add_option("--seed", sa.seed);
  sample->add_option("--out", sa.out)->required();
  sample->add_flag("--no-clash-filter", sa.no_clash_filter);

  ClusterArgs ca;
  auto *cluster = app.add_subcommand("cluster", "k-means representatives of an ensemble");
  cluster->add_option("--in", ca.in)->required();
  cluster->add_option("--k", ca.k)->required()->check(CLI::PositiveNumber);
  cluster->add_option("--seed", ca.seed);
  cluster->add_option("--out", ca.out)->required();
  cluster->add_flag("--centroid", ca.centroid, "emit cluster means instead of medoids");
  cluster->add_flag("--all-atoms", ca.all_atoms, "cluster on all atoms, not heavy atoms");

  EvalArgs ea;
  auto *eval = app.add_subcommand("eval", "COV and MAT of a generated ensemble");
  eval->add_option("--gen", ea.gen)->required();
  eval->add_option("--ref", ea.ref)->required();
  eval->add_option("--delta", ea.delta, "coverage threshold in A");

  PipelineArgs pa;
  auto *pipe = app.add_subcommand("pipeline", "sample, cluster and score a reference set");
  pipe->add_option("--ref", pa.ref_dir, "directory of reference ensembles")->required();
  pipe->add_option("--multiplier", pa.multiplier);
  pipe->add_option("--disable-sampler", pa.disabled)
      ->check(CLI::IsMember({ "uniform", "geometric", "energy" }));
  pipe->add_option("--seed", pa.seed);
  pipe->add_option("--delta", pa.delta);
  pipe->add_option("--report", pa.report, "JSON report path (stdout if omitted)");
  pipe->add_option("--csv", pa.csv);
  pipe->add_option("--manifest", pa.manifest);
  pipe->add_option("--config", pa.config_file, "JSON config; flags override it");
  pipe->add_option("--ingest", pa.ingest, "role=dir of precomputed ensembles");
  pipe->add_option("--fixed-count", pa.fixed_count, "budget from this n_ref");
  pipe->add_option("--filter-min", pa.filter_min);
  pipe->add_option("--filter-max", pa.filter_max);
  pipe->add_option("--synthetic-refs", pa.synthetic_refs,
                   "replace references by N minimized conformers");
  pipe->add_flag("--allow-any-multiplier", pa.allow_any_multiplier);
  pipe->add_flag("--redistribute", pa.redistribute);
  pipe->add_flag("--keep-going", pa.keep_going);
  pipe->add_flag("--echo-reference", pa.echo_reference);
  pipe->add_flag("--strict-ingest", pa.strict_ingest);
  pipe->add_flag("--centroid", pa.centroid);

  RefsArgs ra;
  auto *refs = app.add_subcommand("make-refs", "write synthetic reference ensembles");
  refs->add_option("--in", ra.in_dir)->required();
  refs->add_option("--out", ra.out_dir)->required();
  refs->add_option("--n-ref", ra.n_ref)->check(CLI::PositiveNumber);
  refs->add_option("--seed", ra.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInvalid;
  }

  const ExecPolicy exec = policy(threads);
  try {
    if (*sample)
      return run_sample(sa, exec);
    if (*cluster)
      return run_cluster(ca, exec);
    if (*eval)
      return run_eval(ea, exec);
    if (*pipe)
      return run_pipeline(pa, exec, *pipe);
    if (*refs)
      return run_make_refs(ra, exec);
  } catch (const Error &e) {
    std::fprintf(stderr, "error [%s]: %s\n", std::string(error_code_name(e.code())).c_str(),
                 e.what());
    return is_input_error(e.code()) ? kExitInvalid : kExitPartial;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitPartial;
  }
  return kExitInvalid;
}
