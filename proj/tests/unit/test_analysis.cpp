#include <doctest.h>

#include <cmath>
#include <vector>

#include "btsim/analysis.hpp"

using namespace btsim;

namespace {

// Independent oracle: literal partial-sum scan in plain double arithmetic.
long long tail_sum_oracle(long long n_start, double target) {
  double sum = 0.0;
  long long k = 0;
  while (sum < target) {
    ++k;
    sum += 1.0 / static_cast<double>(n_start + k);
  }
  return k;
}

// Brute-force scheduler for the chain-of-clusters propagation. Clusters
// hold 2^m fully meshed peers; peer j of cluster c bridges to peer j of the
// neighboring clusters; the source is wired to all of cluster 0. The model:
// inter-cluster service delivers exactly one seed per cluster (a bridge is
// used only while the next cluster is still empty), after which holders
// duplicate inside their own cluster, one upload per holder per step and
// one download per peer per step. Returns steps until everyone holds the
// file.
long long chain_schedule_oracle(long long n_clusters, int m) {
  const long long size = 1LL << m;
  const long long total = n_clusters * size;
  auto id = [&](long long c, long long j) { return c * size + j; };
  std::vector<char> has(static_cast<std::size_t>(total), 0);
  std::vector<char> cluster_seeded(static_cast<std::size_t>(n_clusters), 0);
  long long holders = 0;
  long long steps = 0;
  while (holders < total) {
    ++steps;
    std::vector<char> receiving(static_cast<std::size_t>(total), 0);
    // The source serves one peer of cluster 0 per step.
    for (long long j = 0; j < size; ++j) {
      if (!has[static_cast<std::size_t>(id(0, j))] &&
          !receiving[static_cast<std::size_t>(id(0, j))]) {
        receiving[static_cast<std::size_t>(id(0, j))] = 1;
        cluster_seeded[0] = 1;
        break;
      }
    }
    for (long long c = 0; c < n_clusters; ++c) {
      for (long long j = 0; j < size; ++j) {
        if (!has[static_cast<std::size_t>(id(c, j))]) continue;
        long long target = -1;
        if (c + 1 < n_clusters &&
            !cluster_seeded[static_cast<std::size_t>(c + 1)] &&
            !has[static_cast<std::size_t>(id(c + 1, j))] &&
            !receiving[static_cast<std::size_t>(id(c + 1, j))]) {
          target = id(c + 1, j);
          cluster_seeded[static_cast<std::size_t>(c + 1)] = 1;
        }
        if (target < 0) {
          for (long long k = 0; k < size; ++k) {
            if (k != j && !has[static_cast<std::size_t>(id(c, k))] &&
                !receiving[static_cast<std::size_t>(id(c, k))]) {
              target = id(c, k);
              break;
            }
          }
        }
        if (target >= 0) receiving[static_cast<std::size_t>(target)] = 1;
      }
    }
    for (long long p = 0; p < total; ++p) {
      if (receiving[static_cast<std::size_t>(p)]) {
        has[static_cast<std::size_t>(p)] = 1;
        ++holders;
      }
    }
  }
  return steps;
}

}  // namespace

TEST_CASE("arrivals_to_fill: reference values") {
  CHECK(arrivals_to_fill(100) == 173);
  CHECK(arrivals_to_fill(1000) == 1720);
  CHECK(arrivals_to_fill(10000) == 17184);
  CHECK_THROWS(arrivals_to_fill(0));
}

TEST_CASE("arrivals_to_fill: agrees with the plain-double oracle") {
  for (long long n : {1LL, 7LL, 50LL, 333LL, 4096LL}) {
    CHECK(arrivals_to_fill(n) == tail_sum_oracle(n, 1.0));
  }
}

TEST_CASE("arrivals_to_fill_approx: (e-1) n and its error") {
  CHECK(arrivals_to_fill_approx(1) == doctest::Approx(std::exp(1.0) - 1.0));
  CHECK(arrivals_to_fill_approx(100) == doctest::Approx(171.8281828).epsilon(1e-9));

  const double err100 =
      100.0 * (173.0 - arrivals_to_fill_approx(100)) / 173.0;
  const double err1000 =
      100.0 * (1720.0 - arrivals_to_fill_approx(1000)) / 1720.0;
  // 0.677% and 0.0999%; the reference text floors them to 0.6% / 0.09%.
  CHECK(err100 == doctest::Approx(0.6774).epsilon(0.01));
  CHECK(err1000 == doctest::Approx(0.0999).epsilon(0.01));
  CHECK(std::floor(err100 * 10.0) / 10.0 == doctest::Approx(0.6));
  CHECK(std::floor(err1000 * 100.0) / 100.0 == doctest::Approx(0.09));
}

TEST_CASE("arrivals_to_fill: nondecreasing, ratio converges to e-1") {
  long long prev = 0;
  for (long long n = 1; n <= 3000; n += 37) {
    const long long k = arrivals_to_fill(n);
    CHECK(k >= prev);
    prev = k;
  }
  const long long k = arrivals_to_fill(100000);
  const double ratio = static_cast<double>(k) / 100000.0;
  CHECK(ratio == doctest::Approx(std::exp(1.0) - 1.0).epsilon(0.001));
}

TEST_CASE("arrivals_to_fill_general: ratio-driven targets") {
  // No missing connections when the caps are equal.
  CHECK(arrivals_to_fill_general({500, 80, 80}) == 0);

  // Half-outgoing reduces to the basic equation.
  CHECK(arrivals_to_fill_general({1000, 80, 40}) == 1720);
  CHECK(arrivals_to_fill_general({100, 160, 80}) == 173);

  // Quarter-outgoing: smallest K with the tail sum reaching 3.
  CHECK(arrivals_to_fill_general({100, 80, 20}) == tail_sum_oracle(100, 3.0));

  // Monotone in the cap ratio (K blows up fast, so keep the ratio modest).
  long long prev = 0;
  for (int outgoing : {80, 40, 20, 16}) {
    const long long k = arrivals_to_fill_general({200, 80, outgoing});
    CHECK(k >= prev);
    prev = k;
  }
  CHECK_THROWS(arrivals_to_fill_general({100, 80, 0}));
  CHECK_THROWS(arrivals_to_fill_general({100, 80, 81}));
}

TEST_CASE("mesh_service_time: doubling model") {
  CHECK(mesh_service_time(1) == 0);
  CHECK(mesh_service_time(2) == 1);
  CHECK(mesh_service_time(1024) == 10);
  CHECK_THROWS(mesh_service_time(3));
  CHECK_THROWS(mesh_service_time(0));

  // Doubling-recurrence oracle.
  for (int k = 0; k <= 14; ++k) {
    const long long n = 1LL << k;
    long long holders = 1, steps = 0;
    while (holders < n) {
      holders *= 2;
      ++steps;
    }
    CHECK(mesh_service_time(n) == steps);
  }
}

TEST_CASE("chain_service_time: closed form and brute-force scheduler agree") {
  CHECK(chain_service_time({1, 0}) == 1);
  CHECK(chain_service_time({10, 3}) == 13);
  CHECK_THROWS(chain_service_time({0, 1}));

  for (long long n = 1; n <= 8; ++n) {
    for (int m = 0; m <= 4; ++m) {
      CHECK(chain_service_time({n, m}) == chain_schedule_oracle(n, m));
    }
  }
}

TEST_CASE("chain never beats the mesh at equal population") {
  for (long long n = 1; n <= 8; ++n) {
    for (int m = 0; m <= 4; ++m) {
      const long long total = n << m;
      if ((total & (total - 1)) != 0) continue;  // mesh model domain
      CHECK(chain_service_time({n, m}) >= mesh_service_time(total));
    }
  }
}
