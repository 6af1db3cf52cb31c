//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//
// Serial reference vs OpenMP kernels. The second argument of each
// benchmark selects the policy: 0 serial, 1 parallel.
//

#include <benchmark/benchmark.h>

#include "confkit/clustering.hpp"
#include "confkit/forcefield.hpp"
#include "confkit/metrics.hpp"
#include "confkit/molio.hpp"
#include "confkit/random.hpp"
#include "confkit/samplers.hpp"

using namespace confkit;

namespace {

ExecPolicy policy(const benchmark::State &state) {
  return state.range(1) ? ExecPolicy::kParallel : ExecPolicy::kSerial;
}

std::vector<std::vector<Vec3>> random_sets(Rng &rng, std::size_t count, std::size_t atoms) {
  std::vector<std::vector<Vec3>> out(count, std::vector<Vec3>(atoms));
  for (auto &set: out)
    for (auto &p: set)
      p = Vec3(rng.normal(), rng.normal(), rng.normal()) * 3.0;
  return out;
}

const MolFile &pentane() {
  static const MolFile f = read_molecule_file(std::string(CONFKIT_DATA_DIR) + "/toy/pentane.sdf");
  return f;
}

void BM_RmsdMatrix(benchmark::State &state) {
  Rng rng(1);
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto rows = random_sets(rng, n, 20);
  const auto cols = random_sets(rng, n / 4, 20);
  for (auto _: state)
    benchmark::DoNotOptimize(kernels::rmsd_matrix(rows, cols, policy(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(rows.size() * cols.size()));
}

void BM_AssignNearest(benchmark::State &state) {
  Rng rng(2);
  const auto n = state.range(0);
  Eigen::MatrixXd rows(n, 45), centroids(40, 45);
  for (Eigen::Index i = 0; i < rows.size(); ++i)
    rows(i) = rng.normal();
  for (Eigen::Index i = 0; i < centroids.size(); ++i)
    centroids(i) = rng.normal();
  std::vector<int> assignments(static_cast<std::size_t>(n), -1);
  std::vector<double> dist2;
  for (auto _: state) {
    std::fill(assignments.begin(), assignments.end(), -1);
    benchmark::DoNotOptimize(
        kernels::assign_nearest(rows, centroids, assignments, dist2, policy(state)));
  }
  state.SetItemsProcessed(state.iterations() * n);
}

void BM_SampleGeometric(benchmark::State &state) {
  SamplerConfig cfg;
  cfg.seed = 3;
  cfg.exec = policy(state);
  for (auto _: state)
    benchmark::DoNotOptimize(
        sample_geometric(pentane().molecule, static_cast<std::size_t>(state.range(0)), cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SampleEnergy(benchmark::State &state) {
  SamplerConfig cfg;
  cfg.seed = 4;
  cfg.exec = policy(state);
  const auto model = build_model(pentane().molecule);
  for (auto _: state)
    benchmark::DoNotOptimize(
        sample_energy(pentane().molecule, model, static_cast<std::size_t>(state.range(0)), cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_RmsdMatrix)->ArgsProduct({ { 200, 800 }, { 0, 1 } })->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssignNearest)->ArgsProduct({ { 2000, 20000 }, { 0, 1 } })->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleGeometric)->ArgsProduct({ { 64 }, { 0, 1 } })->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampleEnergy)->ArgsProduct({ { 64 }, { 0, 1 } })->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
