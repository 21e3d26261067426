#include "vargram/kernel_mmd.hpp"

#include <cmath>
#include <functional>
#include <iomanip>
#include <sstream>

#include "vargram/errors.hpp"
#include "vargram/parallel.hpp"

namespace vargram {

namespace {

// Visits every sequence within Hamming distance `budget` of `base`,
// mutating `gamma` in place; positions are decided left to right.
void visit_ball(std::vector<int>& gamma, const std::vector<int>& base, std::size_t pos, int budget,
                int W, const std::function<void(const std::vector<int>&)>& visit) {
  if (pos == base.size()) {
    visit(gamma);
    return;
  }
  gamma[pos] = base[pos];
  visit_ball(gamma, base, pos + 1, budget, W, visit);
  if (budget > 0) {
    for (int s = 0; s < W; ++s) {
      if (s == base[pos]) continue;
      gamma[pos] = s;
      visit_ball(gamma, base, pos + 1, budget - 1, W, visit);
    }
    gamma[pos] = base[pos];
  }
}

int hamming(const std::vector<int>& a, const std::vector<int>& b) {
  int d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a[i] != b[i];
  return d;
}

}  // namespace

MismatchKernel::MismatchKernel(KernelConfig cfg) : cfg_(cfg) {
  if (cfg_.window < 1) throw UsageError("kernel window k must be >= 1");
  if (cfg_.max_mismatch < 0 || cfg_.max_mismatch > cfg_.window)
    throw UsageError("kernel mismatch m must satisfy 0 <= m <= k");
  if (cfg_.alphabet_size < 2) throw UsageError("kernel alphabet size must be >= 2");
  const int k = cfg_.window;
  const int m = cfg_.max_mismatch;
  const int W = cfg_.alphabet_size;
  g_table_.assign(static_cast<std::size_t>(k) + 1, 0.0);
  if (m == k) {
    // Both balls cover the whole k-mer space.
    const double full = std::pow(static_cast<double>(W), k);
    for (double& v : g_table_) v = full;
    return;
  }
  // g depends only on the distance between the two windows, so count
  // against a canonical pair: u all zeros, v with ones in the first d slots.
  for (int d = 0; d <= k; ++d) {
    const std::vector<int> u(static_cast<std::size_t>(k), 0);
    std::vector<int> v(u);
    for (int i = 0; i < d; ++i) v[static_cast<std::size_t>(i)] = 1;
    long long count = 0;
    std::vector<int> gamma(u);
    visit_ball(gamma, u, 0, m, W, [&](const std::vector<int>& g) {
      if (hamming(g, v) <= m) ++count;
    });
    g_table_[static_cast<std::size_t>(d)] = static_cast<double>(count);
  }
}

double MismatchKernel::raw(const std::vector<int>& x, const std::vector<int>& y) const {
  const int k = cfg_.window;
  if (static_cast<int>(x.size()) < k || static_cast<int>(y.size()) < k) return 0.0;
  const std::size_t nx = x.size() - static_cast<std::size_t>(k) + 1;
  const std::size_t ny = y.size() - static_cast<std::size_t>(k) + 1;
  const int cutoff = 2 * cfg_.max_mismatch;  // balls are disjoint past this
  double total = 0.0;
  for (std::size_t a = 0; a < nx; ++a) {
    for (std::size_t b = 0; b < ny; ++b) {
      int d = 0;
      for (int i = 0; i < k; ++i) {
        d += x[a + static_cast<std::size_t>(i)] != y[b + static_cast<std::size_t>(i)];
        if (d > cutoff) break;
      }
      if (d <= cutoff) total += g_table_[static_cast<std::size_t>(d)];
    }
  }
  return total;
}

double MismatchKernel::normalized(const std::vector<int>& x, const std::vector<int>& y) const {
  const double xx = raw(x, x);
  const double yy = raw(y, y);
  if (!(xx > 0.0) || !(yy > 0.0))
    throw NumericError("cannot normalize against a zero self-kernel");
  return raw(x, y) / std::sqrt(xx * yy);
}

std::string GramMatrix::to_csv() const {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "id";
  for (const auto& l : labels) out << ',' << l;
  out << '\n';
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out << labels[i];
    for (std::size_t j = 0; j < labels.size(); ++j) out << ',' << values[i][j];
    out << '\n';
  }
  return out.str();
}

GramMatrix gram(const std::vector<Document>& x, const std::vector<Document>& y,
                const KernelConfig& cfg, bool normalized, int jobs) {
  const MismatchKernel kernel(cfg);
  GramMatrix result;
  result.normalized = normalized;

  std::vector<const Document*> kept;
  std::vector<double> selfs;
  const auto consider = [&](const Document& doc, bool is_x) {
    const double self = kernel.raw(doc.tokens, doc.tokens);
    if (normalized && !(self > 0.0)) {
      result.excluded.push_back(doc.id);
      return;
    }
    kept.push_back(&doc);
    selfs.push_back(self);
    if (is_x) ++result.x_count;
    else ++result.y_count;
  };
  for (const auto& doc : x) consider(doc, true);
  for (const auto& doc : y) consider(doc, false);

  const std::size_t n = kept.size();
  result.labels.reserve(n);
  for (const auto* doc : kept) result.labels.push_back(doc->id);
  result.values.assign(n, std::vector<double>(n, 0.0));

  // Upper triangle (including diagonal), flattened so rows can be shared
  // across workers.
  parallel_for(jobs, n, [&](std::size_t i) {
    for (std::size_t j = i; j < n; ++j) {
      double v;
      if (i == j) {
        v = normalized ? 1.0 : selfs[i];
      } else {
        v = kernel.raw(kept[i]->tokens, kept[j]->tokens);
        if (normalized) v /= std::sqrt(selfs[i] * selfs[j]);
      }
      result.values[i][j] = v;
      result.values[j][i] = v;
    }
  });
  return result;
}

double mmd2_unbiased(const GramMatrix& g) {
  const int m = g.x_count;
  const int n = g.y_count;
  if (m < 2 || n < 2) throw DataError("MMD needs at least 2 sequences in each population");
  const std::size_t M = static_cast<std::size_t>(m);
  const std::size_t N = static_cast<std::size_t>(n);
  double xx = 0.0, yy = 0.0, xy = 0.0;
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j < M; ++j)
      if (i != j) xx += g.values[i][j];
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      if (i != j) yy += g.values[M + i][M + j];
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j < N; ++j) xy += g.values[i][M + j];
  return xx / (static_cast<double>(m) * (m - 1)) + yy / (static_cast<double>(n) * (n - 1)) -
         2.0 * xy / (static_cast<double>(m) * n);
}

}  // namespace vargram
