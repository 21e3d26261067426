#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vargram/corpus.hpp"

namespace vargram {

struct KernelConfig {
  int window = 4;        // k: subsequence length
  int max_mismatch = 1;  // m: Hamming tolerance
  int alphabet_size = 0; // W
};

// (k,m) mismatch kernel: inner product of feature vectors that count, for
// every k-mer gamma, the windows within Hamming distance m of gamma.  The
// pairwise value only depends on each window pair's Hamming distance, so a
// g-table indexed by distance replaces the W^k feature space.
class MismatchKernel {
 public:
  explicit MismatchKernel(KernelConfig cfg);

  const KernelConfig& config() const { return cfg_; }

  // Number of k-mers within distance m of both of two windows at Hamming
  // distance d from each other; 0 when no k-mer can satisfy both.
  double g(int d) const { return g_table_[static_cast<std::size_t>(d)]; }

  // Raw (unnormalized) kernel between two token sequences.
  double raw(const std::vector<int>& x, const std::vector<int>& y) const;

  // raw normalized by the self-kernels: raw(x,y)/sqrt(raw(x,x)raw(y,y)).
  double normalized(const std::vector<int>& x, const std::vector<int>& y) const;

 private:
  KernelConfig cfg_;
  std::vector<double> g_table_;  // indexed by window Hamming distance 0..k
};

struct GramMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> values;  // symmetric, labels-indexed
  bool normalized = false;
  int x_count = 0;  // first x_count rows belong to population X
  int y_count = 0;
  std::vector<std::string> excluded;  // ids dropped for zero self-kernel

  std::string to_csv() const;
};

// Full symmetric Gram matrix over X followed by Y.  Sequences whose
// self-kernel is zero (shorter than the window) are excluded with a note in
// `excluded`; when normalized is false they are kept.
GramMatrix gram(const std::vector<Document>& x, const std::vector<Document>& y,
                const KernelConfig& cfg, bool normalized, int jobs = 1);

// Unbiased two-sample MMD^2 from a normalized Gram matrix whose first m
// rows are population X and remaining n rows population Y.
double mmd2_unbiased(const GramMatrix& gram);

struct MmdResult {
  std::vector<double> repeats;
  double mean = 0.0;
  double std_dev = 0.0;
  int x_count = 0;
  int y_count = 0;
};

}  // namespace vargram
