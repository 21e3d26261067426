#include "vargram/alphabet.hpp"

#include <cctype>
#include <istream>
#include <ostream>

#include "vargram/errors.hpp"

namespace vargram {

Alphabet::Alphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.size() < 2) throw DataError("alphabet must contain at least 2 symbols");
  index_.reserve(symbols_.size());
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    const std::string& s = symbols_[i];
    if (s.empty()) throw DataError("alphabet symbol names must be non-empty");
    for (char c : s) {
      if (std::isspace(static_cast<unsigned char>(c)))
        throw DataError("alphabet symbol '" + s + "' contains whitespace");
    }
    if (!index_.emplace(s, static_cast<int>(i)).second)
      throw DataError("duplicate alphabet symbol '" + s + "'");
  }
}

int Alphabet::index_of(std::string_view name) const {
  auto it = index_.find(std::string(name));
  return it == index_.end() ? -1 : it->second;
}

namespace {

std::vector<std::string> melodic_pitches() {
  static const char* kChroma[12] = {"C", "C#", "D", "D#", "E", "F",
                                    "F#", "G", "G#", "A", "A#", "B"};
  std::vector<std::string> names;
  names.reserve(24);
  for (int octave : {4, 5}) {
    for (const char* c : kChroma) names.push_back(std::string(c) + std::to_string(octave));
  }
  return names;
}

}  // namespace

Alphabet Alphabet::melodic() {
  auto names = melodic_pitches();
  names.emplace_back("SILENCE");
  names.emplace_back("CONTINUATION");
  return Alphabet(std::move(names));
}

Alphabet Alphabet::melodic_remapped() {
  auto names = melodic_pitches();
  names.emplace_back("SILENCE");
  return Alphabet(std::move(names));
}

Alphabet Alphabet::generic(int w) {
  if (w < 2) throw DataError("alphabet must contain at least 2 symbols");
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(w));
  for (int i = 0; i < w; ++i) names.push_back("s" + std::to_string(i));
  return Alphabet(std::move(names));
}

bool Alphabet::is_melodic() const {
  static const Alphabet m = melodic();
  return *this == m;
}

Alphabet Alphabet::load(std::istream& in) {
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    names.push_back(line);
  }
  if (names.empty()) throw DataError("empty alphabet file");
  return Alphabet(std::move(names));
}

void Alphabet::save(std::ostream& out) const {
  for (const auto& s : symbols_) out << s << '\n';
}

}  // namespace vargram
