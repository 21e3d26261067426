#include "vargram/corpus.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "vargram/errors.hpp"

namespace vargram {

Corpus::Corpus(Alphabet alphabet, std::vector<Document> documents)
    : alphabet_(std::move(alphabet)), documents_(std::move(documents)) {
  std::unordered_set<std::string> seen;
  for (const auto& d : documents_) {
    if (d.id.empty()) throw DataError("document with empty id");
    if (!seen.insert(d.id).second) throw DataError("duplicate document id '" + d.id + "'");
    for (int tok : d.tokens) {
      if (tok < 0 || tok >= alphabet_.size())
        throw DataError("document '" + d.id + "' has token index out of range");
    }
    total_tokens_ += d.tokens.size();
  }
}

int Corpus::find(std::string_view id) const {
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    if (documents_[i].id == id) return static_cast<int>(i);
  }
  return -1;
}

Corpus parse_corpus(std::istream& in, const Alphabet& alphabet) {
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;

    Document doc;
    const auto tab = line.find('\t');
    std::string body;
    if (tab == std::string::npos) {
      if (line.find(' ') != std::string::npos)
        throw DataError("line " + std::to_string(line_no) +
                        ": malformed document line (expected '<id>\\t<tokens>')");
      doc.id = line;
    } else {
      doc.id = line.substr(0, tab);
      body = line.substr(tab + 1);
    }
    if (doc.id.empty())
      throw DataError("line " + std::to_string(line_no) + ": empty document id");

    std::istringstream toks(body);
    std::string tok;
    while (toks >> tok) {
      const int idx = alphabet.index_of(tok);
      if (idx < 0)
        throw DataError("line " + std::to_string(line_no) + ": unknown token '" + tok + "'");
      doc.tokens.push_back(idx);
    }
    docs.push_back(std::move(doc));
  }
  return Corpus(alphabet, std::move(docs));
}

void serialize_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& d : corpus.documents()) {
    out << d.id << '\t';
    for (std::size_t t = 0; t < d.tokens.size(); ++t) {
      if (t > 0) out << ' ';
      out << corpus.alphabet().name(d.tokens[t]);
    }
    out << '\n';
  }
}

Corpus attach_tags(const Corpus& corpus, std::istream& tags_in) {
  std::vector<Document> docs = corpus.documents();
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(tags_in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw DataError("tags line " + std::to_string(line_no) + ": expected '<id>\\t<k>=<v> ...'");
    const std::string id = line.substr(0, tab);
    const int d = corpus.find(id);
    if (d < 0) throw DataError("tags line " + std::to_string(line_no) + ": unknown document id '" + id + "'");
    std::istringstream pairs(line.substr(tab + 1));
    std::string kv;
    while (pairs >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0)
        throw DataError("tags line " + std::to_string(line_no) + ": malformed tag '" + kv + "'");
      docs[static_cast<std::size_t>(d)].tags[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
  }
  return Corpus(corpus.alphabet(), std::move(docs));
}

Document remap_continuation(const Document& doc, const Alphabet& alphabet) {
  if (!alphabet.is_melodic())
    throw DataError("remap_continuation requires the melodic alphabet");
  Document out;
  out.id = doc.id;
  out.tags = doc.tags;
  out.tokens.reserve(doc.tokens.size());
  int last = -1;  // most recent non-continuation symbol
  for (std::size_t t = 0; t < doc.tokens.size(); ++t) {
    const int tok = doc.tokens[t];
    if (tok == Alphabet::kContinuation) {
      if (last < 0)
        throw DataError("document '" + doc.id + "': continuation at position " +
                        std::to_string(t) + " has no preceding pitch");
      if (last == Alphabet::kSilence)
        throw DataError("document '" + doc.id + "': continuation after SILENCE at position " +
                        std::to_string(t));
      out.tokens.push_back(last);
    } else {
      out.tokens.push_back(tok);
      last = tok;
    }
  }
  return out;
}

Corpus remap_corpus(const Corpus& corpus) {
  std::vector<Document> docs;
  docs.reserve(corpus.size());
  for (const auto& d : corpus.documents()) docs.push_back(remap_continuation(d, corpus.alphabet()));
  return Corpus(Alphabet::melodic_remapped(), std::move(docs));
}

Document truncate_half(const Document& doc) {
  Document out = doc;
  out.tokens.resize((doc.tokens.size() + 1) / 2);
  return out;
}

}  // namespace vargram
