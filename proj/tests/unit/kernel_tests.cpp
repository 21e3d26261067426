#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vargram/errors.hpp>
#include <vargram/kernel_mmd.hpp>
#include <vargram/rng.hpp>

#include <cmath>
#include <sstream>
#include <vector>

#include "testutil/oracles.hpp"

using namespace vargram;

namespace {

Document named(const std::string& id, std::vector<int> tokens) {
  Document doc;
  doc.id = id;
  doc.tokens = std::move(tokens);
  return doc;
}

std::vector<int> random_tokens(int len, int W, Rng& rng) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(len));
  for (int i = 0; i < len; ++i) out.push_back(rng.uniform_int(W));
  return out;
}

}  // namespace

TEST_CASE("exact-match kernel on the two-letter pair") {
  // x = abab, y = abba over {a, b}: shared windows ab(x2)*ab(x1) + ba*ba.
  MismatchKernel kernel({2, 0, 2});
  std::vector<int> x = {0, 1, 0, 1};
  std::vector<int> y = {0, 1, 1, 0};
  CHECK(kernel.raw(x, y) == 3.0);
  CHECK(kernel.raw(x, x) == 5.0);
  CHECK(kernel.raw(y, y) == 3.0);
  CHECK(kernel.normalized(x, y) == doctest::Approx(3.0 / std::sqrt(15.0)).epsilon(1e-12));
  CHECK(kernel.normalized(x, x) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("windows shorter than k contribute nothing") {
  MismatchKernel kernel({3, 1, 2});
  std::vector<int> shorty = {0, 1};
  std::vector<int> other = {0, 1, 0, 1, 1};
  CHECK(kernel.raw(shorty, other) == 0.0);
  CHECK(kernel.raw(shorty, shorty) == 0.0);
  CHECK_THROWS_AS(kernel.normalized(shorty, other), NumericError);
}

TEST_CASE("saturated mismatch budget counts the whole k-mer space") {
  MismatchKernel kernel({2, 2, 3});
  std::vector<int> x = {0, 1, 2, 0};  // 3 windows
  std::vector<int> y = {2, 2, 1};     // 2 windows
  CHECK(kernel.raw(x, y) == 3.0 * 2.0 * 9.0);
}

TEST_CASE("g-table matches direct ball-intersection enumeration") {
  for (int W : {2, 3, 4, 6}) {
    for (int k : {1, 2, 3, 4}) {
      for (int m = 0; m <= std::min(k, 2); ++m) {
        MismatchKernel kernel({k, m, W});
        for (int d = 0; d <= k; ++d) {
          std::vector<int> u(static_cast<std::size_t>(k), 0);
          std::vector<int> v(static_cast<std::size_t>(k), 0);
          for (int q = 0; q < d; ++q) v[static_cast<std::size_t>(q)] = 1;
          CHECK(kernel.g(d) == static_cast<double>(testoracle::oracle_g(u, v, m, W)));
        }
      }
    }
  }
}

TEST_CASE("single-mismatch ball volume is 1 + k(W-1)") {
  for (int W : {2, 3, 5, 6})
    for (int k : {1, 2, 3, 4}) {
      MismatchKernel kernel({k, 1, W});
      CHECK(kernel.g(0) == 1.0 + k * (W - 1.0));
    }
}

TEST_CASE("pairs beyond twice the mismatch budget share no k-mers") {
  MismatchKernel kernel({4, 1, 3});
  CHECK(kernel.g(3) == 0.0);
  CHECK(kernel.g(4) == 0.0);
}

TEST_CASE("fast kernel equals the feature-map oracle on random pairs") {
  Rng rng(2024);
  int checked = 0;
  while (checked < 250) {
    const int W = 2 + rng.uniform_int(5);   // 2..6
    const int k = 1 + rng.uniform_int(4);   // 1..4
    const int m = rng.uniform_int(2);       // 0..1
    const int lx = 1 + rng.uniform_int(12);
    const int ly = 1 + rng.uniform_int(12);
    std::vector<int> x = random_tokens(lx, W, rng);
    std::vector<int> y = random_tokens(ly, W, rng);
    MismatchKernel kernel({k, m, W});
    const double fast = kernel.raw(x, y);
    const long long oracle = testoracle::oracle_mismatch_kernel(x, y, k, m, W);
    CHECK(fast == static_cast<double>(oracle));
    CHECK(kernel.raw(y, x) == fast);
    ++checked;
  }
}

TEST_CASE("gram matrix layout, symmetry and unit diagonal") {
  std::vector<Document> x = {named("x0", {0, 1, 0, 1, 2}), named("x1", {2, 2, 1, 0})};
  std::vector<Document> y = {named("y0", {1, 1, 1, 1}), named("y1", {0, 2, 0, 2, 0})};
  GramMatrix gm = gram(x, y, {2, 0, 3}, true, 2);
  REQUIRE(gm.labels.size() == 4);
  CHECK(gm.labels[0] == "x0");
  CHECK(gm.labels[2] == "y0");
  CHECK(gm.x_count == 2);
  CHECK(gm.y_count == 2);
  CHECK(gm.normalized);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(gm.values[i][i] == 1.0);
    for (std::size_t j = 0; j < 4; ++j) {
      CHECK(gm.values[i][j] == gm.values[j][i]);
      CHECK(gm.values[i][j] >= 0.0);
      CHECK(gm.values[i][j] <= 1.0 + 1e-12);
    }
  }
  // Parallel evaluation changes nothing.
  GramMatrix serial = gram(x, y, {2, 0, 3}, true, 1);
  for (std::size_t i = 0; i < 4; ++i) CHECK(gm.values[i] == serial.values[i]);
}

TEST_CASE("normalized gram drops zero-self sequences with a note") {
  std::vector<Document> x = {named("x0", {0, 1, 0}), named("tiny", {0})};
  std::vector<Document> y = {named("y0", {1, 0, 1})};
  GramMatrix gm = gram(x, y, {2, 0, 2}, true, 1);
  CHECK(gm.labels == std::vector<std::string>{"x0", "y0"});
  CHECK(gm.x_count == 1);
  REQUIRE(gm.excluded.size() == 1);
  CHECK(gm.excluded[0] == "tiny");

  GramMatrix raw = gram(x, y, {2, 0, 2}, false, 1);
  CHECK(raw.labels.size() == 3);
  CHECK(raw.excluded.empty());
}

TEST_CASE("gram csv round-trips labels and values") {
  std::vector<Document> x = {named("a", {0, 1, 0, 1}), named("b", {1, 1, 0, 0})};
  GramMatrix gm = gram(x, x, {2, 0, 2}, true, 1);
  std::istringstream csv(gm.to_csv());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "id,a,b,a,b");
  std::string line;
  std::getline(csv, line);
  CHECK(line.substr(0, 2) == "a,");
}

TEST_CASE("gram matrices are positive semi-definite") {
  Rng rng(515);
  for (int trial = 0; trial < 6; ++trial) {
    const int W = 2 + rng.uniform_int(3);
    std::vector<Document> docs;
    for (int i = 0; i < 6; ++i)
      docs.push_back(named("d" + std::to_string(i), random_tokens(5 + rng.uniform_int(10), W, rng)));
    for (bool normalized : {false, true}) {
      GramMatrix gm = gram(docs, {}, {3, 1, W}, normalized, 1);
      CHECK(testoracle::smallest_eigenvalue(gm.values) >= -1e-8);
    }
  }
}

TEST_CASE("identical populations give exactly zero mmd") {
  std::vector<Document> x = {named("x0", {0, 1, 0, 1}), named("x1", {0, 1, 0, 1})};
  std::vector<Document> y = {named("y0", {0, 1, 0, 1}), named("y1", {0, 1, 0, 1})};
  GramMatrix gm = gram(x, y, {2, 0, 2}, true, 1);
  CHECK(mmd2_unbiased(gm) == 0.0);
}

TEST_CASE("disjoint internally-identical populations give exactly two") {
  // Alphabet {0,1,2,3}; X uses only {0,1}, Y only {2,3}: no shared windows.
  std::vector<Document> x = {named("x0", {0, 1, 0, 1, 0}), named("x1", {0, 1, 0, 1, 0})};
  std::vector<Document> y = {named("y0", {2, 3, 2, 3, 2}), named("y1", {2, 3, 2, 3, 2})};
  GramMatrix gm = gram(x, y, {2, 0, 4}, true, 1);
  CHECK(mmd2_unbiased(gm) == 2.0);
}

TEST_CASE("mmd is invariant to reordering within a population") {
  Rng rng(88);
  std::vector<Document> x, y;
  for (int i = 0; i < 4; ++i) x.push_back(named("x" + std::to_string(i), random_tokens(12, 3, rng)));
  for (int i = 0; i < 5; ++i) y.push_back(named("y" + std::to_string(i), random_tokens(9, 3, rng)));
  const double base = mmd2_unbiased(gram(x, y, {3, 1, 3}, true, 1));
  std::swap(x[0], x[3]);
  std::swap(y[1], y[4]);
  CHECK(mmd2_unbiased(gram(x, y, {3, 1, 3}, true, 1)) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("mmd rejects undersized populations") {
  std::vector<Document> x = {named("x0", {0, 1, 0})};
  std::vector<Document> y = {named("y0", {1, 0, 1}), named("y1", {1, 1, 0})};
  GramMatrix gm = gram(x, y, {2, 0, 2}, true, 1);
  CHECK_THROWS_AS(mmd2_unbiased(gm), DataError);
}

TEST_CASE("kernel config validation") {
  CHECK_THROWS_AS(MismatchKernel({0, 0, 2}), UsageError);
  CHECK_THROWS_AS(MismatchKernel({2, -1, 2}), UsageError);
  CHECK_THROWS_AS(MismatchKernel({2, 3, 2}), UsageError);
  CHECK_THROWS_AS(MismatchKernel({2, 0, 1}), UsageError);
}
