#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vargram {

// Ordered symbol inventory. A symbol's index is its position in the list.
class Alphabet {
 public:
  // Validates: at least 2 symbols, names unique and non-empty, no whitespace
  // inside names (the corpus file format is whitespace-delimited).
  explicit Alphabet(std::vector<std::string> symbols);

  int size() const { return static_cast<int>(symbols_.size()); }
  const std::string& name(int index) const { return symbols_.at(static_cast<std::size_t>(index)); }
  const std::vector<std::string>& symbols() const { return symbols_; }

  // Index of a symbol name, or -1 when absent.
  int index_of(std::string_view name) const;

  bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }
  bool operator!=(const Alphabet& other) const { return !(*this == other); }

  // The 26-symbol melodic inventory: 24 chromatic pitches C4..B5, then
  // SILENCE, then CONTINUATION.
  static Alphabet melodic();
  // The 25-symbol inventory left after continuation removal.
  static Alphabet melodic_remapped();
  // Generic synthetic alphabet s0..s{w-1}.
  static Alphabet generic(int w);

  bool is_melodic() const;

  static constexpr int kMelodicSize = 26;
  static constexpr int kSilence = 24;       // index in the melodic alphabet
  static constexpr int kContinuation = 25;  // index in the melodic alphabet

  // One symbol name per line; index = 0-based line number.
  static Alphabet load(std::istream& in);
  void save(std::ostream& out) const;

 private:
  std::vector<std::string> symbols_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace vargram
