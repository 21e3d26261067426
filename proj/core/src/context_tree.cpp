#include "vargram/context_tree.hpp"

#include <algorithm>
#include <stdexcept>

#include "vargram/errors.hpp"

namespace vargram {

ContextTree::ContextTree(int alphabet_size) : alphabet_size_(alphabet_size) {
  if (alphabet_size < 2) throw DataError("context tree needs an alphabet of size >= 2");
  nodes_.push_back(ContextNode{});
  finalize();
}

int ContextTree::child_of(int id, int symbol) const {
  const auto& kids = nodes_[static_cast<std::size_t>(id)].children;
  const auto it = kids.find(symbol);
  return it == kids.end() ? -1 : it->second;
}

int ContextTree::add_child(int parent, int symbol) {
  if (parent < 0 || parent >= size()) throw std::out_of_range("add_child: bad parent id");
  if (symbol < 0 || symbol >= alphabet_size_) throw std::out_of_range("add_child: bad symbol");
  auto& p = nodes_[static_cast<std::size_t>(parent)];
  if (p.children.count(symbol)) throw std::invalid_argument("add_child: duplicate edge");
  ContextNode n;
  n.id = size();
  n.parent = parent;
  n.symbol = symbol;
  n.depth = p.depth + 1;
  n.context = p.context;
  n.context.push_back(symbol);
  p.children[symbol] = n.id;
  max_depth_ = std::max(max_depth_, n.depth);
  nodes_.push_back(std::move(n));
  return size() - 1;
}

void ContextTree::finalize() {
  paths_.assign(nodes_.size(), {});
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    auto& path = paths_[i];
    for (int cur = static_cast<int>(i); cur >= 0; cur = nodes_[static_cast<std::size_t>(cur)].parent)
      path.push_back(cur);
  }
}

int ContextTree::lookup(std::span<const int> tokens, std::size_t pos) const {
  int cur = 0;
  std::size_t back = pos;
  while (back > 0) {
    const int next = child_of(cur, tokens[back - 1]);
    if (next < 0) break;
    cur = next;
    --back;
  }
  return cur;
}

int ContextTree::find_context(std::span<const int> context) const {
  int cur = 0;
  for (int sym : context) {
    cur = child_of(cur, sym);
    if (cur < 0) return -1;
  }
  return cur;
}

ContextTree ContextTree::build(const Corpus& corpus, int max_depth, double threshold) {
  if (max_depth < 0) throw DataError("context tree depth must be >= 0");
  ContextTree tree(corpus.alphabet().size());
  tree.nodes_[0].occurrences = static_cast<long long>(corpus.total_tokens());
  if (max_depth == 0 || corpus.total_tokens() == 0) {
    tree.finalize();
    return tree;
  }
  const double total = static_cast<double>(corpus.total_tokens());

  // Grow one level per pass: tally, for every position, the symbol that
  // would extend its current deepest match, then keep extensions whose
  // occurrence count clears the threshold.
  for (int level = 1; level <= max_depth; ++level) {
    std::map<std::pair<int, int>, long long> extension_counts;
    for (const auto& doc : corpus.documents()) {
      for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
        const int j = tree.lookup(doc.tokens, t);
        const auto& n = tree.nodes_[static_cast<std::size_t>(j)];
        if (n.depth >= max_depth) continue;
        const std::size_t used = static_cast<std::size_t>(n.depth);
        if (t < used + 1) continue;  // history exhausted
        const int older = doc.tokens[t - used - 1];
        ++extension_counts[{j, older}];
      }
    }
    bool grew = false;
    for (const auto& [edge, count] : extension_counts) {
      if (static_cast<double>(count) / total >= threshold) {
        const int id = tree.add_child(edge.first, edge.second);
        tree.nodes_[static_cast<std::size_t>(id)].occurrences = count;
        grew = true;
      }
    }
    if (!grew) break;
  }
  tree.finalize();
  return tree;
}

}  // namespace vargram
