#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "vargram/alphabet.hpp"

namespace vargram {

struct Document {
  std::string id;
  std::vector<int> tokens;
  std::map<std::string, std::string> tags;  // opaque metadata, e.g. key=G

  std::size_t length() const { return tokens.size(); }
};

// Immutable after construction; documents share one alphabet, ids unique.
class Corpus {
 public:
  Corpus(Alphabet alphabet, std::vector<Document> documents);

  const Alphabet& alphabet() const { return alphabet_; }
  std::size_t size() const { return documents_.size(); }
  const Document& doc(std::size_t i) const { return documents_.at(i); }
  const std::vector<Document>& documents() const { return documents_; }
  std::size_t total_tokens() const { return total_tokens_; }

  // Index of the document with the given id, or -1.
  int find(std::string_view id) const;

 private:
  Alphabet alphabet_;
  std::vector<Document> documents_;
  std::size_t total_tokens_ = 0;
};

// Line-oriented corpus format: `<id>\t<tok> <tok> ...`, `#` comment lines.
// A line without a tab must be a bare id (an empty document).
Corpus parse_corpus(std::istream& in, const Alphabet& alphabet);
void serialize_corpus(const Corpus& corpus, std::ostream& out);

// Sidecar tag file: `<id>\t<key>=<value> ...` per line. Returns a copy of
// the corpus with tags attached; unknown ids are an error.
Corpus attach_tags(const Corpus& corpus, std::istream& tags_in);

// Substitute each CONTINUATION with the most recent pitch. The document must
// be over the melodic alphabet. A continuation with no preceding symbol, or
// whose most recent non-continuation symbol is SILENCE, is rejected: the
// sustain target is undefined.
Document remap_continuation(const Document& doc, const Alphabet& alphabet);

// Remap every document; result is over Alphabet::melodic_remapped().
Corpus remap_corpus(const Corpus& corpus);

// First ceil(T/2) tokens.
Document truncate_half(const Document& doc);

}  // namespace vargram
