//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include "confkit/error.hpp"
#include "confkit/pipeline.hpp"
#include "helpers.hpp"

using namespace confkit;

namespace {

MoleculeInput toy_input(const std::string &name, int n_ref, std::uint64_t seed) {
  auto f = testing::load_toy(name);
  auto refs = make_synthetic_references(f.molecule, n_ref, seed);
  return { f.molecule, refs, { } };
}

PipelineConfig fast_config(std::uint64_t seed) {
  PipelineConfig c;
  c.seed = seed;
  c.minimizer.max_iters = 200;
  return c;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("budget") {
  const int n_ref[] = { 1, 50, 100, 150, 500 };
  const int n_e[] = { 20, 1000, 2000, 2000, 2000 };
  for (int i = 0; i < 5; ++i) {
    auto b = compute_budget(n_ref[i]);
    CHECK(b.n_e == n_e[i]);
    CHECK(b.n_u == (n_e[i] + 3) / 4);
    CHECK(b.n_g == b.n_u);
  }
  CHECK(compute_budget(1, 2).n_e == 2);
  CHECK(compute_budget(1, 2).n_u == 1);
  CHECK(compute_budget(3, 5).n_u == 4);
  CHECK_THROWS_AS(compute_budget(0), Error);
}

TEST_CASE("sampler counts") {
  auto b = compute_budget(1);
  PipelineConfig c;
  CHECK(sampler_counts(b, c) == std::array<int, 3> { 5, 5, 20 });
  c.enabled[2] = false;
  CHECK(sampler_counts(b, c) == std::array<int, 3> { 5, 5, 0 });
  c.redistribute = true;
  CHECK(sampler_counts(b, c) == std::array<int, 3> { 15, 15, 0 });
  c.enabled = { true, false, true };
  CHECK(sampler_counts(b, c) == std::array<int, 3> { 6, 0, 24 });
}

TEST_CASE("labels") {
  PipelineConfig c;
  CHECK(config_label(c) == "all samplers");
  c.enabled[2] = false;
  CHECK(config_label(c) == "w/o Energy sampler");
  c.enabled[2] = true;
  c.enabled[0] = false;
  CHECK(config_label(c) == "w/o Uniform sampler");
  c.enabled[0] = true;
  c.multiplier = 5;
  CHECK(config_label(c) == "all samplers, multiplier 5");
}

TEST_CASE("config validation") {
  PipelineConfig c;
  CHECK_NOTHROW(validate_config(c));
  c.multiplier = 7;
  CHECK_THROWS_AS(validate_config(c), Error);
  c.allow_any_multiplier = true;
  CHECK_NOTHROW(validate_config(c));
  c.enabled = { false, false, false };
  CHECK_THROWS_AS(validate_config(c), Error);
  c.enabled = { true, true, true };
  c.delta = 0;
  CHECK_THROWS_AS(validate_config(c), Error);
}

TEST_CASE("config json round trip") {
  PipelineConfig c;
  c.seed = 77;
  c.multiplier = 10;
  c.enabled[1] = false;
  c.fixed_n_ref = 3;
  c.redistribute = true;
  auto back = config_from_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK_THROWS_AS(config_from_json({ { "samplers", { "bogus" } } }), Error);
}

TEST_CASE("one reference yields 30 candidates and 2 outputs") {
  auto input = toy_input("butane", 1, 3);
  auto run = run_molecule(input, fast_config(1));
  CHECK(run.candidate_count == 30);
  CHECK(run.sampler_counts == std::array<std::size_t, 3> { 5, 5, 20 });
  CHECK(run.k == 2);
  CHECK(run.selected.size() == 2);
  CHECK(run.metrics.n_gen == 2);
  CHECK(run.metrics.n_ref == 1);
}

TEST_CASE("output size is 2 n_ref") {
  for (const char *name: { "pentane", "cyclohexane" }) {
    CAPTURE(name);
    auto input = toy_input(name, 4, 9);
    auto run = run_molecule(input, fast_config(2));
    CHECK(run.selected.size() == 8);
  }
}

TEST_CASE("echo mode reproduces the reference") {
  auto input = toy_input("propanol", 3, 4);
  auto c = fast_config(0);
  c.echo_reference = true;
  auto run = run_molecule(input, c);
  CHECK(run.metrics.cov == 1.0);
  CHECK(run.metrics.mat < 1e-6);
}

TEST_CASE("fixed n_ref and few candidates") {
  auto input = toy_input("butane", 2, 5);
  auto c = fast_config(3);
  c.fixed_n_ref = 1;
  c.multiplier = 2;
  c.enabled = { false, false, true };
  // n_e = 2 candidates for k = 2.
  auto run = run_molecule(input, c);
  CHECK(run.candidate_count == 2);
  CHECK(run.selected.size() == 2);
}

TEST_CASE("external ensembles stand in for a sampler") {
  auto f = testing::load_fixture("butane_3rec.sdf");
  auto refs = make_synthetic_references(f.molecule, 1, 1);
  MoleculeInput input { f.molecule, refs, { } };
  input.external[2] = f.ensemble;
  auto run = run_molecule(input, fast_config(1));
  CHECK(run.external_counts[2] == 3);
  CHECK(run.sampler_counts[2] == 3);
  CHECK_FALSE(run.warnings.empty());

  auto strict = fast_config(1);
  strict.strict_ingest = true;
  CHECK_THROWS_AS(run_molecule(input, strict), Error);
}

TEST_CASE("benchmark report") {
  std::vector<MoleculeInput> inputs { toy_input("pentane", 2, 1), toy_input("butane", 2, 1) };
  auto c = fast_config(5);
  auto a = run_benchmark(inputs, c);
  REQUIRE(a.report);
  CHECK(a.exit_code == 0);
  CHECK(a.report->molecules[0].molecule_id == "butane");
  auto ja = report_to_json(*a.report, c, a.manifest.runs);
  CHECK(ja["version"] == kReportVersion);
  CHECK(ja["config"]["seed"] == 5);
  CHECK(ja["config"]["samplers"].size() == 3);
  CHECK(ja["molecules"].size() == 2);
  for (const char *key: { "cov_mean", "cov_median", "mat_mean", "mat_median" })
    CHECK(ja["summary"].contains(key));

  auto b = run_benchmark(inputs, c);
  auto jb = report_to_json(*b.report, c, b.manifest.runs);
  CHECK(ja.dump(2) == jb.dump(2));

  auto csv = report_to_csv(*a.report, c, a.manifest.runs);
  CHECK(csv.find("id,n_ref,n_gen,cov_percent,mat,warnings") != std::string::npos);
  auto manifest = manifest_to_json(a.manifest);
  CHECK(manifest["molecules"][0]["candidates"] == 60);
}

TEST_CASE("failures are isolated") {
  auto good = toy_input("butane", 1, 1);
  MoleculeInput bad { good.molecule, { "zzz", { } }, { } };
  bad.molecule = Molecule("zzz", good.molecule.atoms(), good.molecule.bonds());
  auto res = run_benchmark({ good, bad }, fast_config(1));
  CHECK(res.exit_code == 1);
  CHECK(res.manifest.failures.size() == 1);
  CHECK(res.report->molecules.size() == 1);
  CHECK(run_benchmark({ good, bad }, fast_config(1), true).exit_code == 0);
}

TEST_CASE("filters") {
  std::vector<MoleculeInput> inputs { toy_input("butane", 1, 1), toy_input("pentane", 3, 1) };
  auto c = fast_config(1);
  c.filter_min = 2;
  auto res = run_benchmark(inputs, c);
  CHECK(res.manifest.filtered == std::vector<std::string> { "butane" });
  CHECK(res.report->molecules.size() == 1);
}

TEST_CASE("reference directory loading") {
  auto inputs = load_reference_dir(std::filesystem::path(CONFKIT_DATA_DIR) / "toy");
  CHECK(inputs.size() >= 5);
  for (std::size_t i = 1; i < inputs.size(); ++i)
    CHECK(inputs[i - 1].molecule.id() < inputs[i].molecule.id());
  CHECK(inputs[0].reference.conformers[0].provenance == Provenance::kReference);
  CHECK_THROWS_AS(load_reference_dir("/nonexistent/dir"), Error);
}

TEST_CASE("synthetic references are deterministic") {
  auto m = testing::load_toy("pentane").molecule;
  auto a = make_synthetic_references(m, 3, 8);
  auto b = make_synthetic_references(m, 3, 8, ExecPolicy::kSerial);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(a.conformers[i].coords == b.conformers[i].coords);
}

}  // TEST_SUITE
