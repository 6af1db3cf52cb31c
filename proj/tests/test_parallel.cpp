//
// confkit - conformer ensemble generation and benchmarking
// SPDX-License-Identifier: Apache-2.0
//

#include <doctest.h>

#include <atomic>

#include "confkit/clustering.hpp"
#include "confkit/error.hpp"
#include "confkit/metrics.hpp"
#include "confkit/parallel.hpp"
#include "helpers.hpp"

using namespace confkit;

TEST_SUITE("parallel") {

TEST_CASE("for_each_index visits every index once") {
  for (auto policy: { ExecPolicy::kSerial, ExecPolicy::kParallel }) {
    std::vector<std::atomic<int>> hits(1000);
    for_each_index(policy, hits.size(), [&](std::size_t i) { hits[i]++; });
    for (auto &h: hits)
      CHECK(h.load() == 1);
  }
}

TEST_CASE("for_each_index rethrows the lowest failing index") {
  for (auto policy: { ExecPolicy::kSerial, ExecPolicy::kParallel }) {
    try {
      for_each_index(policy, 100, [](std::size_t i) {
        if (i == 17 || i == 60)
          throw Error(ErrorCode::kInvalidArgument, std::to_string(i));
      });
      FAIL("expected error");
    } catch (const Error &e) {
      CHECK(std::string(e.what()) == "17");
    }
  }
}

TEST_CASE("rmsd matrix kernel matches serial reference") {
  Rng rng(3);
  std::vector<std::vector<Vec3>> rows, cols;
  for (int i = 0; i < 7; ++i)
    rows.push_back(testing::random_points(rng, 9));
  for (int i = 0; i < 13; ++i)
    cols.push_back(testing::random_points(rng, 9));
  auto s = kernels::rmsd_matrix(rows, cols, ExecPolicy::kSerial);
  auto p = kernels::rmsd_matrix(rows, cols, ExecPolicy::kParallel);
  CHECK(s == p);
  for (int r = 0; r < 7; ++r)
    for (int c = 0; c < 13; ++c)
      CHECK(s(r, c) == kabsch_rmsd(cols[c], rows[r]));
}

TEST_CASE("assign_nearest kernel matches serial reference") {
  Rng rng(4);
  Eigen::MatrixXd rows(200, 12), centroids(9, 12);
  for (Eigen::Index i = 0; i < rows.size(); ++i)
    rows(i) = rng.normal();
  for (Eigen::Index i = 0; i < centroids.size(); ++i)
    centroids(i) = rng.normal();
  std::vector<int> a(200, -1), b(200, -1);
  std::vector<double> da(200), db(200);
  auto ma = kernels::assign_nearest(rows, centroids, a, da, ExecPolicy::kSerial);
  auto mb = kernels::assign_nearest(rows, centroids, b, db, ExecPolicy::kParallel);
  CHECK(ma == mb);
  CHECK(ma == 200);
  CHECK(a == b);
  CHECK(da == db);
}

}  // TEST_SUITE
