#ifndef MDSUM_PORTER_HPP
#define MDSUM_PORTER_HPP

// Porter's suffix-stripping stemmer, following the original 1980 rule set
// (no later revisions such as "logi" -> "log" or "bli" -> "ble").
// Input is expected to be lowercase ASCII; other bytes are treated as
// consonants and simply pass through.

#include <array>
#include <string>
#include <string_view>
#include <utility>

namespace mdsum {

namespace porter_detail {

class Word {
 public:
  explicit Word(std::string w) : w_(std::move(w)) {}

  const std::string& str() const { return w_; }
  std::string release() { return std::move(w_); }

  bool ends_with(std::string_view s) const {
    return w_.size() >= s.size() &&
           std::string_view(w_).substr(w_.size() - s.size()) == s;
  }

  // Consonant test at position i of the first `len` characters.
  bool consonant(std::size_t i) const {
    switch (w_[i]) {
      case 'a': case 'e': case 'i': case 'o': case 'u':
        return false;
      case 'y':
        return i == 0 ? true : !consonant(i - 1);
      default:
        return true;
    }
  }

  // m in [C](VC)^m[V], computed over the prefix of length len.
  int measure(std::size_t len) const {
    int m = 0;
    std::size_t i = 0;
    while (i < len && consonant(i)) ++i;
    while (i < len) {
      while (i < len && !consonant(i)) ++i;
      if (i >= len) break;
      while (i < len && consonant(i)) ++i;
      ++m;
    }
    return m;
  }

  bool has_vowel(std::size_t len) const {
    for (std::size_t i = 0; i < len; ++i)
      if (!consonant(i)) return true;
    return false;
  }

  bool double_consonant(std::size_t len) const {
    return len >= 2 && w_[len - 1] == w_[len - 2] && consonant(len - 1);
  }

  // *o: stem ends cvc, where the final c is not w, x or y.
  bool cvc(std::size_t len) const {
    if (len < 3) return false;
    if (!consonant(len - 1) || consonant(len - 2) || !consonant(len - 3)) return false;
    const char c = w_[len - 1];
    return c != 'w' && c != 'x' && c != 'y';
  }

  void replace_tail(std::size_t suffix_len, std::string_view with) {
    w_.resize(w_.size() - suffix_len);
    w_.append(with);
  }

 private:
  std::string w_;
};

struct Rule {
  std::string_view suffix;
  std::string_view replacement;
};

// Applies the first rule (longest suffix first within the list) whose
// suffix matches; when its stem fails min_measure the step ends unchanged.
template <std::size_t N>
inline void apply_measure_rules(Word& w, const std::array<Rule, N>& rules, int min_measure) {
  for (const auto& r : rules) {
    if (!w.ends_with(r.suffix)) continue;
    const std::size_t stem = w.str().size() - r.suffix.size();
    if (w.measure(stem) > min_measure) w.replace_tail(r.suffix.size(), r.replacement);
    return;
  }
}

inline void step1a(Word& w) {
  if (w.ends_with("sses")) w.replace_tail(4, "ss");
  else if (w.ends_with("ies")) w.replace_tail(3, "i");
  else if (w.ends_with("ss")) return;
  else if (w.ends_with("s")) w.replace_tail(1, "");
}

inline void step1b(Word& w) {
  if (w.ends_with("eed")) {
    if (w.measure(w.str().size() - 3) > 0) w.replace_tail(3, "ee");
    return;
  }
  std::size_t cut = 0;
  if (w.ends_with("ed")) cut = 2;
  else if (w.ends_with("ing")) cut = 3;
  if (cut == 0 || !w.has_vowel(w.str().size() - cut)) return;
  w.replace_tail(cut, "");

  if (w.ends_with("at")) w.replace_tail(2, "ate");
  else if (w.ends_with("bl")) w.replace_tail(2, "ble");
  else if (w.ends_with("iz")) w.replace_tail(2, "ize");
  else {
    const std::size_t n = w.str().size();
    if (w.double_consonant(n)) {
      const char c = w.str()[n - 1];
      if (c != 'l' && c != 's' && c != 'z') w.replace_tail(1, "");
    } else if (w.measure(n) == 1 && w.cvc(n)) {
      w.replace_tail(0, "e");
    }
  }
}

inline void step1c(Word& w) {
  if (w.ends_with("y") && w.has_vowel(w.str().size() - 1)) w.replace_tail(1, "i");
}

inline void step2(Word& w) {
  static constexpr std::array<Rule, 20> rules{{
      {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"},   {"anci", "ance"},
      {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},     {"entli", "ent"},
      {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
      {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
      {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
  }};
  apply_measure_rules(w, rules, 0);
}

inline void step3(Word& w) {
  static constexpr std::array<Rule, 7> rules{{
      {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
      {"ical", "ic"},  {"ful", ""},   {"ness", ""},
  }};
  apply_measure_rules(w, rules, 0);
}

inline void step4(Word& w) {
  static constexpr std::array<std::string_view, 19> suffixes{
      "al",  "ance", "ence", "er",  "ic",  "able", "ible", "ant", "ement", "ment",
      "ent", "ion",  "ou",   "ism", "ate", "iti",  "ous",  "ive", "ize"};
  for (auto s : suffixes) {
    if (!w.ends_with(s)) continue;
    const std::size_t stem = w.str().size() - s.size();
    if (w.measure(stem) <= 1) return;
    if (s == "ion") {
      const char c = stem > 0 ? w.str()[stem - 1] : '\0';
      if (c != 's' && c != 't') return;
    }
    w.replace_tail(s.size(), "");
    return;
  }
}

inline void step5(Word& w) {
  if (w.ends_with("e")) {
    const std::size_t stem = w.str().size() - 1;
    const int m = w.measure(stem);
    if (m > 1 || (m == 1 && !w.cvc(stem))) w.replace_tail(1, "");
  }
  const std::size_t n = w.str().size();
  if (n > 0 && w.str()[n - 1] == 'l' && w.double_consonant(n) && w.measure(n) > 1)
    w.replace_tail(1, "");
}

}  // namespace porter_detail

/// Stems a single lowercase token.
inline std::string porter_stem(std::string word) {
  if (word.empty()) return word;
  porter_detail::Word w(std::move(word));
  porter_detail::step1a(w);
  porter_detail::step1b(w);
  porter_detail::step1c(w);
  porter_detail::step2(w);
  porter_detail::step3(w);
  porter_detail::step4(w);
  porter_detail::step5(w);
  return w.release();
}

}  // namespace mdsum

#endif  // MDSUM_PORTER_HPP
