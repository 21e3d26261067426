#pragma once

#include <map>
#include <span>
#include <vector>

#include "vargram/corpus.hpp"

namespace vargram {

// Node of a context tree.  The context is stored most-recent-first:
// context[0] is the symbol immediately preceding the position being
// predicted, context[1] the one before that, and so on.  A child extends
// its parent's context one step further into the past, so the edge label
// (`symbol`) is the oldest symbol of the child's context.
struct ContextNode {
  int id = 0;
  int parent = -1;  // -1 for the root
  int symbol = -1;  // edge label from parent; -1 for the root
  int depth = 0;
  std::vector<int> context;
  long long occurrences = 0;
  std::map<int, int> children;  // symbol -> node id
};

class ContextTree {
 public:
  // Root-only tree (depth 0); every position predicts from the root.
  explicit ContextTree(int alphabet_size);

  // Grows the tree from corpus statistics.  A context of length l is kept
  // when the number of positions whose preceding l symbols match it,
  // divided by the total token count of the corpus, reaches `threshold`.
  // Contexts never cross document boundaries.
  static ContextTree build(const Corpus& corpus, int max_depth, double threshold);

  int size() const { return static_cast<int>(nodes_.size()); }
  int alphabet_size() const { return alphabet_size_; }
  int max_depth() const { return max_depth_; }
  const ContextNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  const std::vector<ContextNode>& nodes() const { return nodes_; }

  // Child of `id` along `symbol`, or -1 when absent.
  int child_of(int id, int symbol) const;

  // Deepest node whose context matches the symbols preceding position
  // `pos` of `tokens`.  Position 0 always maps to the root.
  int lookup(std::span<const int> tokens, std::size_t pos) const;

  // Node with exactly this context (most-recent-first), or -1.
  int find_context(std::span<const int> context) const;

  // Node ids from `id` up to the root, inclusive, starting at `id`.
  const std::vector<int>& path_to_root(int id) const {
    return paths_[static_cast<std::size_t>(id)];
  }

  // Appends a child node; used when growing or deserializing a tree.
  // Returns the new node's id.
  int add_child(int parent, int symbol);

  // Recomputes per-node root paths; call after a batch of add_child.
  void finalize();

 private:
  int alphabet_size_ = 0;
  int max_depth_ = 0;
  std::vector<ContextNode> nodes_;
  std::vector<std::vector<int>> paths_;
};

}  // namespace vargram
