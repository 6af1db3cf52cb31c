//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#ifndef CONFKIT_PIPELINE_HPP_
#define CONFKIT_PIPELINE_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "confkit/clustering.hpp"
#include "confkit/forcefield.hpp"
#include "confkit/metrics.hpp"
#include "confkit/molecule.hpp"
#include "confkit/samplers.hpp"

namespace confkit {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr int kReportVersion = 1;

/// Per-molecule sample counts. n_e = min(multiplier * n_ref, cap) and
/// n_u = n_g = ceil(n_e / 4).
struct SamplingBudget {
  int n_ref = 0;
  int n_e = 0;
  int n_u = 0;
  int n_g = 0;
  int multiplier = 20;
  int cap = 2000;

  int total() const { return n_e + n_u + n_g; }
};

/// Throws Error(kInvalidArgument) when n_ref < 1, multiplier < 1 or cap < 1.
SamplingBudget compute_budget(int n_ref, int multiplier = 20, int cap = 2000);

enum class SamplerKind : std::size_t {
  kUniform = 0,
  kGeometric = 1,
  kEnergy = 2,
};

inline constexpr std::array<SamplerKind, 3> kAllSamplers = {
  SamplerKind::kUniform, SamplerKind::kGeometric, SamplerKind::kEnergy
};

std::string_view sampler_name(SamplerKind kind);

/// Parses "uniform", "geometric" or "energy".
std::optional<SamplerKind> parse_sampler(std::string_view name);

inline constexpr std::array<int, 4> kAblationMultipliers = { 2, 5, 10, 20 };

struct PipelineConfig {
  std::uint64_t seed = 0;
  int multiplier = 20;
  int cap = 2000;
  bool allow_any_multiplier = false;
  std::array<bool, 3> enabled = { true, true, true };
  double delta = kThresholdQm9;

  // Keep the total candidate count when a sampler is disabled and share it
  // among the remaining samplers in the 1:1:4 proportion.
  bool redistribute = false;

  // Selected ensemble = copies of the reference (pipeline sanity check).
  bool echo_reference = false;

  // Budget from a fixed count instead of the reference size.
  std::optional<int> fixed_n_ref;

  // Ingested ensembles larger than the budget are truncated unless strict,
  // in which case any count mismatch is an error.
  bool strict_ingest = false;

  // Molecules whose reference count lies outside [min, max] are skipped.
  std::optional<std::size_t> filter_min;
  std::optional<std::size_t> filter_max;

  RepresentativeMode representative = RepresentativeMode::kMedoid;
  bool heavy_only_clustering = true;

  SamplerConfig sampler;
  MinimizeOptions minimizer;
  ExecPolicy exec = ExecPolicy::kParallel;

  bool is_enabled(SamplerKind k) const { return enabled[static_cast<std::size_t>(k)]; }
};

/// Throws Error(kInvalidArgument) for no enabled samplers, a non-positive
/// threshold, or a multiplier outside the ablation grid without
/// allow_any_multiplier.
void validate_config(const PipelineConfig &config);

/// Table-style label: "all samplers", "w/o Energy sampler", with the
/// multiplier appended when it differs from 20.
std::string config_label(const PipelineConfig &config);

struct MoleculeInput {
  Molecule molecule;
  Ensemble reference;
  // Externally generated candidates standing in for a sampler role.
  std::array<std::optional<Ensemble>, 3> external;
};

struct MoleculeRun {
  Ensemble selected;
  MoleculeMetrics metrics;
  SamplingBudget budget;
  std::array<std::size_t, 3> sampler_counts = { 0, 0, 0 };
  std::array<std::size_t, 3> external_counts = { 0, 0, 0 };
  std::size_t candidate_count = 0;
  int k = 0;
  std::vector<std::string> warnings;
  double seconds = 0;
};

/// Per-sampler counts after applying enablement and redistribution.
std::array<int, 3> sampler_counts(const SamplingBudget &budget, const PipelineConfig &config);

/// All candidates for one molecule, in uniform, geometric, energy order.
Ensemble generate_candidates(const MoleculeInput &input, const PipelineConfig &config,
                             MoleculeRun *run = nullptr);

/// Sample, cluster into k = 2 n_ref groups, keep one conformer per group and
/// score it against the reference.
/// Errors: kEmptyEnsemble for an empty reference or zero candidates;
/// module errors propagate.
MoleculeRun run_molecule(const MoleculeInput &input, const PipelineConfig &config);

struct MoleculeFailure {
  std::string molecule_id;
  std::string message;
};

struct RunManifest {
  PipelineConfig config;
  std::vector<MoleculeRun> runs;  // in molecule-id order
  std::vector<MoleculeFailure> failures;
  std::vector<std::string> filtered;
  double seconds = 0;
};

struct BenchmarkResult {
  std::optional<MetricsReport> report;  // empty when every molecule failed
  RunManifest manifest;
  int exit_code = 0;  // 0 success, 1 partial failure
};

/// Runs every molecule, skipping failures. The exit code is 1 when a
/// molecule failed and keep_going is false.
BenchmarkResult run_benchmark(const std::vector<MoleculeInput> &inputs,
                              const PipelineConfig &config, bool keep_going = false);

// Serialization.

nlohmann::json config_to_json(const PipelineConfig &config);

/// Inverse of config_to_json; missing keys keep their defaults.
PipelineConfig config_from_json(const nlohmann::json &j);

/// {version, tool_version, label, config, molecules, summary}; COV in percent.
nlohmann::json report_to_json(const MetricsReport &report, const PipelineConfig &config,
                              const std::vector<MoleculeRun> &runs);

std::string report_to_csv(const MetricsReport &report, const PipelineConfig &config,
                          const std::vector<MoleculeRun> &runs);

nlohmann::json manifest_to_json(const RunManifest &manifest);

/// Loads every .sdf/.sd/.mol/.xyz file in a directory as one reference
/// ensemble, sorted by file name.
std::vector<MoleculeInput> load_reference_dir(const std::filesystem::path &dir);

/// Attaches <dir>/<molecule id>.sdf (or .xyz) as the external ensemble for
/// `role` on every input that has such a file.
void attach_external_dir(std::vector<MoleculeInput> &inputs, SamplerKind role,
                         const std::filesystem::path &dir);

/// Synthetic reference set: n_ref energy-minimized conformers drawn on a
/// seed stream disjoint from the samplers'.
Ensemble make_synthetic_references(const Molecule &molecule, int n_ref,
                                   std::uint64_t seed,
                                   ExecPolicy exec = ExecPolicy::kParallel);

}  // namespace confkit

#endif  // CONFKIT_PIPELINE_HPP_
