//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#include "confkit/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "confkit/error.hpp"
#include "confkit/molio.hpp"
#include "confkit/random.hpp"

namespace confkit {
namespace {
  constexpr int kMaxSafeNref = 1500;
  constexpr std::array<int, 3> kRatio = { 1, 1, 4 };

  int ceil_div(long long a, long long b) { return static_cast<int>((a + b - 1) / b); }

  std::string capitalized(std::string_view s) {
    std::string out(s);
    if (!out.empty())
      out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out;
  }

  bool same_atoms(const Molecule &a, const Molecule &b) {
    if (a.size() != b.size())
      return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a.atoms()[i].atomic_number != b.atoms()[i].atomic_number)
        return false;
    }
    return true;
  }

  // Brings an ingested ensemble to the budgeted size.
  std::vector<Conformer> take_external(const Ensemble &ext, int budget,
                                       const Molecule &molecule, SamplerKind role,
                                       const PipelineConfig &config,
                                       std::vector<std::string> &warnings) {
    std::vector<Conformer> out;
    const auto want = static_cast<std::size_t>(budget);
    if (config.strict_ingest && ext.size() != want)
      throw Error(ErrorCode::kEnsembleMismatch,
                  "external " + std::string(sampler_name(role)) + " ensemble has "
                      + std::to_string(ext.size()) + " conformers, budget is "
                      + std::to_string(want));
    const std::size_t n = std::min(want, ext.size());
    if (ext.size() > want) {
      warnings.push_back("external " + std::string(sampler_name(role))
                         + " ensemble truncated from " + std::to_string(ext.size())
                         + " to " + std::to_string(want));
    } else if (ext.size() < want) {
      warnings.push_back("external " + std::string(sampler_name(role)) + " ensemble has "
                         + std::to_string(ext.size()) + " of "
                         + std::to_string(want) + " budgeted conformers");
    }
    for (std::size_t i = 0; i < n; ++i) {
      Conformer c = ext.conformers[i];
      c.molecule_id = molecule.id();
      validate_conformer(molecule, c);
      out.push_back(std::move(c));
    }
    return out;
  }

  nlohmann::json to_json(const SamplingBudget &b) {
    return { { "n_ref", b.n_ref }, { "n_e", b.n_e }, { "n_u", b.n_u },
             { "n_g", b.n_g },     { "multiplier", b.multiplier }, { "cap", b.cap } };
  }
}  // namespace

SamplingBudget compute_budget(int n_ref, int multiplier, int cap) {
  if (n_ref < 1)
    throw Error(ErrorCode::kInvalidArgument, "n_ref must be at least 1");
  if (multiplier < 1 || cap < 1)
    throw Error(ErrorCode::kInvalidArgument, "multiplier and cap must be positive");
  SamplingBudget b;
  b.n_ref = n_ref;
  b.multiplier = multiplier;
  b.cap = cap;
  b.n_e = static_cast<int>(std::min<long long>(1LL * multiplier * n_ref, cap));
  b.n_u = b.n_g = ceil_div(b.n_e, 4);
  return b;
}

std::string_view sampler_name(SamplerKind kind) {
  switch (kind) {
  case SamplerKind::kUniform:
    return "uniform";
  case SamplerKind::kGeometric:
    return "geometric";
  case SamplerKind::kEnergy:
    return "energy";
  }
  return "unknown";
}

std::optional<SamplerKind> parse_sampler(std::string_view name) {
  for (auto k: kAllSamplers) {
    if (sampler_name(k) == name)
      return k;
  }
  return std::nullopt;
}

void validate_config(const PipelineConfig &config) {
  if (std::none_of(config.enabled.begin(), config.enabled.end(), [](bool b) { return b; }))
    throw Error(ErrorCode::kInvalidArgument, "at least one sampler must be enabled");
  if (!(config.delta > 0))
    throw Error(ErrorCode::kInvalidArgument, "threshold must be positive");
  if (config.multiplier < 1 || config.cap < 1)
    throw Error(ErrorCode::kInvalidArgument, "multiplier and cap must be positive");
  if (!config.allow_any_multiplier
      && std::find(kAblationMultipliers.begin(), kAblationMultipliers.end(),
                   config.multiplier)
             == kAblationMultipliers.end())
    throw Error(ErrorCode::kInvalidArgument,
                "multiplier " + std::to_string(config.multiplier)
                    + " is not one of 2, 5, 10, 20 (pass the override to allow it)");
  if (config.fixed_n_ref && *config.fixed_n_ref < 1)
    throw Error(ErrorCode::kInvalidArgument, "fixed n_ref must be at least 1");
}

std::string config_label(const PipelineConfig &config) {
  std::string label;
  for (auto k: kAllSamplers) {
    if (config.is_enabled(k))
      continue;
    if (!label.empty())
      label += ", ";
    label += "w/o " + capitalized(sampler_name(k)) + " sampler";
  }
  if (label.empty())
    label = "all samplers";
  if (config.multiplier != 20)
    label += ", multiplier " + std::to_string(config.multiplier);
  if (config.echo_reference)
    label += ", reference echo";
  return label;
}

std::array<int, 3> sampler_counts(const SamplingBudget &budget, const PipelineConfig &config) {
  std::array<int, 3> counts = { budget.n_u, budget.n_g, budget.n_e };
  if (config.redistribute) {
    int weight = 0;
    for (auto k: kAllSamplers) {
      if (config.is_enabled(k))
        weight += kRatio[static_cast<std::size_t>(k)];
    }
    for (auto k: kAllSamplers) {
      const auto i = static_cast<std::size_t>(k);
      counts[i] = config.is_enabled(k)
                      ? ceil_div(1LL * budget.total() * kRatio[i], weight)
                      : 0;
    }
    return counts;
  }
  for (auto k: kAllSamplers) {
    if (!config.is_enabled(k))
      counts[static_cast<std::size_t>(k)] = 0;
  }
  return counts;
}

Ensemble generate_candidates(const MoleculeInput &input, const PipelineConfig &config,
                             MoleculeRun *run) {
  const Molecule &mol = input.molecule;
  const int n_ref = config.fixed_n_ref.value_or(static_cast<int>(input.reference.size()));
  const SamplingBudget budget = compute_budget(n_ref, config.multiplier, config.cap);
  const auto counts = sampler_counts(budget, config);

  MoleculeRun local;
  MoleculeRun &r = run ? *run : local;
  r.budget = budget;

  SamplerConfig sc = config.sampler;
  sc.exec = config.exec;

  bool need_internal = false;
  for (auto k: kAllSamplers) {
    const auto i = static_cast<std::size_t>(k);
    if (counts[i] > 0 && !input.external[i])
      need_internal = true;
  }

  std::optional<EnergyModel> model;
  std::optional<Conformer> templ;
  if (need_internal) {
    model = build_model(mol);
    const bool need_template =
        (counts[0] > 0 && !input.external[0]) || (counts[2] > 0 && !input.external[2]);
    if (need_template)
      templ = make_template(mol, *model, sc);
  }

  Ensemble out { mol.id(), { } };
  for (auto k: kAllSamplers) {
    const auto i = static_cast<std::size_t>(k);
    if (counts[i] == 0)
      continue;
    std::vector<Conformer> part;
    if (input.external[i]) {
      part = take_external(*input.external[i], counts[i], mol, k, config, r.warnings);
      r.external_counts[i] = part.size();
    } else {
      const auto n = static_cast<std::size_t>(counts[i]);
      Ensemble e;
      switch (k) {
      case SamplerKind::kUniform:
        e = sample_uniform(mol, *templ, n, sc);
        break;
      case SamplerKind::kGeometric:
        e = sample_geometric(mol, n, sc);
        break;
      case SamplerKind::kEnergy:
        e = sample_energy(mol, *model, n, sc, &*templ, config.minimizer);
        break;
      }
      part = std::move(e.conformers);
    }
    r.sampler_counts[i] = part.size();
    for (auto &c: part)
      out.conformers.push_back(std::move(c));
  }
  r.candidate_count = out.size();
  return out;
}

MoleculeRun run_molecule(const MoleculeInput &input, const PipelineConfig &config) {
  const auto t0 = std::chrono::steady_clock::now();
  validate_config(config);
  const Molecule &mol = input.molecule;
  if (input.reference.empty())
    throw Error(ErrorCode::kEmptyEnsemble, "reference ensemble for '" + mol.id()
                                               + "' is empty");
  validate_ensemble(mol, input.reference);

  MoleculeRun run;
  const int n_ref = config.fixed_n_ref.value_or(static_cast<int>(input.reference.size()));
  run.k = 2 * n_ref;
  if (n_ref > kMaxSafeNref)
    run.warnings.push_back("n_ref " + std::to_string(n_ref)
                           + " exceeds 1500: capped budgets may yield fewer than 2 n_ref "
                             "candidates");

  if (config.echo_reference) {
    run.budget = compute_budget(n_ref, config.multiplier, config.cap);
    run.selected = input.reference;
    run.candidate_count = run.selected.size();
  } else {
    Ensemble candidates = generate_candidates(input, config, &run);
    if (candidates.empty())
      throw Error(ErrorCode::kEmptyEnsemble, "no candidates generated for '" + mol.id() + "'");

    if (candidates.size() <= static_cast<std::size_t>(run.k)) {
      if (candidates.size() < static_cast<std::size_t>(run.k))
        run.warnings.push_back("only " + std::to_string(candidates.size())
                               + " candidates for k = " + std::to_string(run.k)
                               + "; returning all of them");
      run.selected = std::move(candidates);
    } else {
      const bool heavy = config.heavy_only_clustering
                         && config.representative == RepresentativeMode::kMedoid;
      const FeatureMatrix fm = featurize(candidates, mol, heavy);
      KmeansOptions ko;
      ko.exec = config.exec;
      const ClusterModel cm =
          kmeans(fm, run.k, derive_seed(config.seed, mol.id(), Stream::kKmeans, 0), ko);
      run.selected = select_representatives(candidates, cm, config.representative);
    }
  }

  MetricsConfig mc;
  mc.threshold = config.delta;
  mc.exec = config.exec;
  run.metrics = evaluate_molecule(run.selected, input.reference, mol, mc);
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

BenchmarkResult run_benchmark(const std::vector<MoleculeInput> &inputs,
                              const PipelineConfig &config, bool keep_going) {
  validate_config(config);
  if (inputs.empty())
    throw Error(ErrorCode::kInvalidArgument, "no molecules to run");
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<std::size_t> order(inputs.size());
  for (std::size_t i = 0; i < order.size(); ++i)
    order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return inputs[a].molecule.id() < inputs[b].molecule.id();
  });

  BenchmarkResult result;
  result.manifest.config = config;
  std::vector<MoleculeMetrics> metrics;
  for (std::size_t idx: order) {
    const auto &input = inputs[idx];
    const auto n = input.reference.size();
    if ((config.filter_min && n < *config.filter_min)
        || (config.filter_max && n > *config.filter_max)) {
      result.manifest.filtered.push_back(input.molecule.id());
      continue;
    }
    try {
      MoleculeRun run = run_molecule(input, config);
      metrics.push_back(run.metrics);
      result.manifest.runs.push_back(std::move(run));
    } catch (const std::exception &e) {
      result.manifest.failures.push_back({ input.molecule.id(), e.what() });
    }
  }

  if (!metrics.empty())
    result.report = summarize(metrics, config.delta);
  if (!result.manifest.failures.empty() && !keep_going)
    result.exit_code = 1;
  result.manifest.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

nlohmann::json config_to_json(const PipelineConfig &c) {
  nlohmann::json samplers = nlohmann::json::array();
  for (auto k: kAllSamplers) {
    if (c.is_enabled(k))
      samplers.push_back(sampler_name(k));
  }
  nlohmann::json j = {
    { "seed", c.seed },
    { "multiplier", c.multiplier },
    { "delta", c.delta },
    { "samplers", samplers },
    { "cap", c.cap },
    { "allow_any_multiplier", c.allow_any_multiplier },
    { "redistribute", c.redistribute },
    { "echo_reference", c.echo_reference },
    { "strict_ingest", c.strict_ingest },
    { "representative",
      c.representative == RepresentativeMode::kMedoid ? "medoid" : "centroid" },
    { "heavy_only_clustering", c.heavy_only_clustering },
    { "clash_factor", c.sampler.clash_factor },
    { "dg_refine_iters", c.sampler.dg_refine_iters },
    { "max_clash_attempts", c.sampler.max_clash_attempts },
    { "clash_filter", c.sampler.clash_filter },
    { "minimize_max_iters", c.minimizer.max_iters },
    { "minimize_tol", c.minimizer.tol },
    { "minimize_quasi_newton", c.minimizer.quasi_newton },
  };
  j["fixed_n_ref"] = c.fixed_n_ref ? nlohmann::json(*c.fixed_n_ref) : nlohmann::json();
  j["filter_min"] = c.filter_min ? nlohmann::json(*c.filter_min) : nlohmann::json();
  j["filter_max"] = c.filter_max ? nlohmann::json(*c.filter_max) : nlohmann::json();
  return j;
}

PipelineConfig config_from_json(const nlohmann::json &j) {
  PipelineConfig c;
  try {
    c.seed = j.value("seed", c.seed);
    c.multiplier = j.value("multiplier", c.multiplier);
    c.delta = j.value("delta", c.delta);
    if (j.contains("samplers")) {
      c.enabled = { false, false, false };
      for (const auto &name: j.at("samplers")) {
        auto k = parse_sampler(name.get<std::string>());
        if (!k)
          throw Error(ErrorCode::kInvalidArgument,
                      "unknown sampler '" + name.get<std::string>() + "'");
        c.enabled[static_cast<std::size_t>(*k)] = true;
      }
    }
    c.cap = j.value("cap", c.cap);
    c.allow_any_multiplier = j.value("allow_any_multiplier", c.allow_any_multiplier);
    c.redistribute = j.value("redistribute", c.redistribute);
    c.echo_reference = j.value("echo_reference", c.echo_reference);
    c.strict_ingest = j.value("strict_ingest", c.strict_ingest);
    if (j.value("representative", std::string("medoid")) == "centroid")
      c.representative = RepresentativeMode::kCentroid;
    c.heavy_only_clustering = j.value("heavy_only_clustering", c.heavy_only_clustering);
    c.sampler.clash_factor = j.value("clash_factor", c.sampler.clash_factor);
    c.sampler.dg_refine_iters = j.value("dg_refine_iters", c.sampler.dg_refine_iters);
    c.sampler.max_clash_attempts = j.value("max_clash_attempts", c.sampler.max_clash_attempts);
    c.sampler.clash_filter = j.value("clash_filter", c.sampler.clash_filter);
    c.minimizer.max_iters = j.value("minimize_max_iters", c.minimizer.max_iters);
    c.minimizer.tol = j.value("minimize_tol", c.minimizer.tol);
    c.minimizer.quasi_newton = j.value("minimize_quasi_newton", c.minimizer.quasi_newton);
    if (j.contains("fixed_n_ref") && !j["fixed_n_ref"].is_null())
      c.fixed_n_ref = j["fixed_n_ref"].get<int>();
    if (j.contains("filter_min") && !j["filter_min"].is_null())
      c.filter_min = j["filter_min"].get<std::size_t>();
    if (j.contains("filter_max") && !j["filter_max"].is_null())
      c.filter_max = j["filter_max"].get<std::size_t>();
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("bad config json: ") + e.what());
  }
  return c;
}

nlohmann::json report_to_json(const MetricsReport &report, const PipelineConfig &config,
                              const std::vector<MoleculeRun> &runs) {
  nlohmann::json mols = nlohmann::json::array();
  for (std::size_t i = 0; i < report.molecules.size(); ++i) {
    const auto &m = report.molecules[i];
    nlohmann::json warnings = nlohmann::json::array();
    if (i < runs.size()) {
      for (const auto &w: runs[i].warnings)
        warnings.push_back(w);
    }
    mols.push_back({ { "id", m.molecule_id },
                     { "n_ref", m.n_ref },
                     { "n_gen", m.n_gen },
                     { "cov", 100.0 * m.cov },
                     { "mat", m.mat },
                     { "warnings", warnings } });
  }
  const auto full = config_to_json(config);
  return {
    { "version", kReportVersion },
    { "tool_version", kToolVersion },
    { "label", config_label(config) },
    { "config",
      { { "seed", full["seed"] },
        { "multiplier", full["multiplier"] },
        { "delta", full["delta"] },
        { "samplers", full["samplers"] } } },
    { "molecules", mols },
    { "summary",
      { { "cov_mean", 100.0 * report.cov_mean },
        { "cov_median", 100.0 * report.cov_median },
        { "mat_mean", report.mat_mean },
        { "mat_median", report.mat_median } } },
  };
}

std::string report_to_csv(const MetricsReport &report, const PipelineConfig &config,
                          const std::vector<MoleculeRun> &runs) {
  std::ostringstream os;
  const auto cj = config_to_json(config);
  std::string samplers;
  for (const auto &s: cj["samplers"])
    samplers += (samplers.empty() ? "" : "+") + s.get<std::string>();
  os << "# confkit " << kToolVersion << " report v" << kReportVersion
     << "; label=" << config_label(config) << "; seed=" << config.seed
     << "; multiplier=" << config.multiplier << "; delta=" << config.delta
     << "; samplers=" << samplers << "\n";
  os << "id,n_ref,n_gen,cov_percent,mat,warnings\n";
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return std::string(buf);
  };
  for (std::size_t i = 0; i < report.molecules.size(); ++i) {
    const auto &m = report.molecules[i];
    const std::size_t nwarn = i < runs.size() ? runs[i].warnings.size() : 0;
    os << m.molecule_id << ',' << m.n_ref << ',' << m.n_gen << ',' << num(100.0 * m.cov)
       << ',' << num(m.mat) << ',' << nwarn << "\n";
  }
  os << "mean,,," << num(100.0 * report.cov_mean) << ',' << num(report.mat_mean) << ",\n";
  os << "median,,," << num(100.0 * report.cov_median) << ',' << num(report.mat_median)
     << ",\n";
  return os.str();
}

nlohmann::json manifest_to_json(const RunManifest &manifest) {
  nlohmann::json runs = nlohmann::json::array();
  for (const auto &r: manifest.runs) {
    nlohmann::json counts, external;
    for (auto k: kAllSamplers) {
      counts[std::string(sampler_name(k))] = r.sampler_counts[static_cast<std::size_t>(k)];
      external[std::string(sampler_name(k))] = r.external_counts[static_cast<std::size_t>(k)];
    }
    runs.push_back({ { "id", r.metrics.molecule_id },
                     { "budget", to_json(r.budget) },
                     { "sampler_counts", counts },
                     { "external_counts", external },
                     { "candidates", r.candidate_count },
                     { "k", r.k },
                     { "selected", r.selected.size() },
                     { "warnings", r.warnings },
                     { "seconds", r.seconds } });
  }
  nlohmann::json failures = nlohmann::json::array();
  for (const auto &f: manifest.failures)
    failures.push_back({ { "id", f.molecule_id }, { "error", f.message } });
  return { { "version", kReportVersion },
           { "tool_version", kToolVersion },
           { "label", config_label(manifest.config) },
           { "config", config_to_json(manifest.config) },
           { "molecules", runs },
           { "failures", failures },
           { "filtered", manifest.filtered },
           { "seconds", manifest.seconds } };
}

std::vector<MoleculeInput> load_reference_dir(const std::filesystem::path &dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir))
    throw Error(ErrorCode::kIo, "not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto &entry: fs::directory_iterator(dir)) {
    if (!entry.is_regular_file())
      continue;
    const auto ext = entry.path().extension().string();
    if (ext == ".sdf" || ext == ".sd" || ext == ".mol" || ext == ".xyz")
      files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<MoleculeInput> out;
  for (const auto &f: files) {
    MolFile mf = read_molecule_file(f);
    for (auto &c: mf.ensemble.conformers)
      c.provenance = Provenance::kReference;
    out.push_back({ std::move(mf.molecule), std::move(mf.ensemble), { } });
  }
  return out;
}

void attach_external_dir(std::vector<MoleculeInput> &inputs, SamplerKind role,
                         const std::filesystem::path &dir) {
  namespace fs = std::filesystem;
  for (auto &input: inputs) {
    for (const char *ext: { ".sdf", ".xyz" }) {
      const fs::path p = dir / (input.molecule.id() + ext);
      if (!fs::exists(p))
        continue;
      MolFile mf = read_molecule_file(p);
      if (!same_atoms(mf.molecule, input.molecule))
        throw Error(ErrorCode::kEnsembleMismatch,
                    p.string() + " does not match the atoms of '" + input.molecule.id()
                        + "'");
      mf.ensemble.molecule_id = input.molecule.id();
      for (auto &c: mf.ensemble.conformers)
        c.molecule_id = input.molecule.id();
      input.external[static_cast<std::size_t>(role)] = std::move(mf.ensemble);
      break;
    }
  }
}

Ensemble make_synthetic_references(const Molecule &molecule, int n_ref,
                                   std::uint64_t seed, ExecPolicy exec) {
  if (n_ref < 1)
    throw Error(ErrorCode::kInvalidArgument, "n_ref must be at least 1");
  SamplerConfig sc;
  sc.seed = derive_seed(seed, molecule.id(), Stream::kReference, 0);
  sc.exec = exec;
  const EnergyModel model = build_model(molecule);
  Ensemble refs = sample_energy(molecule, model, static_cast<std::size_t>(n_ref), sc);
  for (auto &c: refs.conformers) {
    c.provenance = Provenance::kReference;
    c.flags = kFlagNone;
  }
  return refs;
}

}  // namespace confkit
