#ifndef MDSUM_CORPUS_HPP
#define MDSUM_CORPUS_HPP

// Cluster loading and English preprocessing: sentence splitting, dialog
// filtering, tokenization, stopword removal, stemming, and the TFIDF
// term-by-sentence matrix with the topic sentence in column 0.

#include <mdsum/error.hpp>
#include <mdsum/linalg.hpp>
#include <mdsum/porter.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace mdsum {

struct RawDocument {
  std::string doc_id;
  std::string text;
};

struct RawCluster {
  std::string topic_id;
  std::string topic_statement;  // empty when the cluster has no topic.txt
  std::vector<RawDocument> documents;
};

struct Sentence {
  std::string raw_text;
  std::vector<std::string> tokens;
  int doc_index = -1;         // -1 for a topic statement that is not from a document
  int position_in_doc = 0;    // 1-based; 0 for a topic statement
  int doc_sentence_count = 0; // sentences the splitter found in the source document
  bool is_topic_sentence = false;
};

class Wordmap {
 public:
  Wordmap() = default;

  // Indices follow lexicographic order of the words.
  template <class Range>
  static Wordmap from_words(const Range& words) {
    std::set<std::string> sorted(std::begin(words), std::end(words));
    Wordmap wm;
    wm.words_.assign(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < wm.words_.size(); ++i) wm.index_.emplace(wm.words_[i], i);
    return wm;
  }

  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  const std::string& word(std::size_t i) const { return words_.at(i); }
  const std::vector<std::string>& words() const { return words_; }

  std::optional<std::size_t> find(std::string_view w) const {
    auto it = index_.find(std::string(w));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  bool contains(std::string_view w) const { return find(w).has_value(); }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct TermDocMatrix {
  Matrix a;  // M x (N+1), column 0 is the topic sentence
};

// ---------------------------------------------------------------------------
// Text utilities
// ---------------------------------------------------------------------------

namespace text_detail {

inline bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline bool is_upper(unsigned char c) { return c >= 'A' && c <= 'Z'; }

// Decodes one UTF-8 code point at s[i]; returns (codepoint, byte length).
// Malformed bytes decode as themselves with length 1.
inline std::pair<char32_t, std::size_t> decode(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return {b0, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) { len = 2; cp = b0 & 0x1F; }
  else if ((b0 & 0xF0) == 0xE0) { len = 3; cp = b0 & 0x0F; }
  else if ((b0 & 0xF8) == 0xF0) { len = 4; cp = b0 & 0x07; }
  else return {b0, 1};
  if (i + len > s.size()) return {b0, 1};
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) return {b0, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len};
}

inline bool is_apostrophe(char32_t cp) { return cp == U'\'' || cp == U'’' || cp == U'‘'; }

inline bool is_closing_mark(char32_t cp) {
  return cp == U'"' || cp == U'\'' || cp == U')' || cp == U']' || cp == U'”' ||
         cp == U'’';
}

inline bool is_opening_mark(char32_t cp) {
  return cp == U'"' || cp == U'\'' || cp == U'(' || cp == U'[' || cp == U'“' ||
         cp == U'‘';
}

// Non-ASCII code points count as word characters unless they are
// Latin-1 or general punctuation.
inline bool is_word_cp(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
  }
  if (cp >= 0x00A0 && cp <= 0x00BF) return false;
  if (cp == 0x00D7 || cp == 0x00F7) return false;
  if (cp >= 0x2000 && cp <= 0x206F) return false;
  if (cp >= 0x3000 && cp <= 0x303F) return false;
  return true;
}

inline std::string collapse_ws(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending = false;
  for (char ch : s) {
    if (is_space(static_cast<unsigned char>(ch))) {
      pending = !out.empty();
    } else {
      if (pending) out.push_back(' ');
      pending = false;
      out.push_back(ch);
    }
  }
  return out;
}

inline const std::unordered_set<std::string>& abbreviations() {
  static const std::unordered_set<std::string> abbr{
      "mr",   "mrs",  "ms",   "dr",   "prof", "sr",   "jr",   "st",   "mt",  "gen",
      "gov",  "sen",  "rep",  "col",  "lt",   "sgt",  "capt", "cmdr", "adm", "maj",
      "rev",  "hon",  "inc",  "corp", "co",   "ltd",  "bros", "vs",   "e.g", "i.e",
      "u.s",  "u.k",  "u.n",  "a.m",  "p.m",  "jan",  "feb",  "mar",  "apr", "jun",
      "jul",  "aug",  "sep",  "sept", "oct",  "nov",  "dec",  "fig",  "approx",
      "dept", "est",  "ave",  "blvd", "rd",   "no"};
  return abbr;
}

// The word (lowercased, leading marks stripped) ending just before text[dot].
inline std::string word_before(std::string_view text, std::size_t dot) {
  std::size_t b = dot;
  while (b > 0 && !is_space(static_cast<unsigned char>(text[b - 1]))) --b;
  std::string w(text.substr(b, dot - b));
  std::size_t lead = 0;
  while (lead < w.size() && (w[lead] == '"' || w[lead] == '(' || w[lead] == '[' || w[lead] == '\''))
    ++lead;
  w.erase(0, lead);
  for (auto& ch : w) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return w;
}

}  // namespace text_detail

/// Lowercased word tokens with punctuation removed. Apostrophes inside a
/// word are dropped ("don't" -> "dont"); every other non-word character
/// separates tokens.
inline std::vector<std::string> tokenize(std::string_view s) {
  using namespace text_detail;
  std::vector<std::string> out;
  std::string cur;
  std::size_t i = 0;
  while (i < s.size()) {
    auto [cp, len] = decode(s, i);
    if (is_word_cp(cp)) {
      if (cp < 0x80)
        cur.push_back(static_cast<char>(std::tolower(static_cast<int>(cp))));
      else
        cur.append(s.substr(i, len));
    } else if (is_apostrophe(cp) && !cur.empty() && i + len < s.size() &&
               is_word_cp(decode(s, i + len).first)) {
      // joined: skip the apostrophe
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
    i += len;
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

/// Whitespace-delimited word count of raw text (the summary budget unit).
inline std::size_t raw_word_count(std::string_view s) {
  std::size_t n = 0;
  bool in_word = false;
  for (char ch : s) {
    const bool sp = text_detail::is_space(static_cast<unsigned char>(ch));
    if (!sp && !in_word) ++n;
    in_word = !sp;
  }
  return n;
}

class StopwordSet {
 public:
  StopwordSet() = default;
  explicit StopwordSet(std::initializer_list<std::string_view> words) {
    for (auto w : words) insert(w);
  }

  void insert(std::string_view entry) {
    for (auto& t : tokenize(entry)) words_.insert(std::move(t));
  }
  bool contains(const std::string& w) const { return words_.count(w) != 0; }
  std::size_t size() const { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

/// One entry per line; blank lines and lines starting with '#' are ignored.
inline StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read stopword file: " + path.string());
  StopwordSet set;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = text_detail::collapse_ws(line);
    if (t.empty() || t.front() == '#') continue;
    set.insert(t);
  }
  return set;
}

/// Rule-based sentence splitter. A boundary follows '.', '!' or '?' (plus
/// any closing quotes or brackets) when the next non-space character is an
/// uppercase letter, possibly behind an opening quote, or when the text
/// ends. A '.' after a known abbreviation or a single-letter initial is not
/// a boundary. A blank line always ends a sentence. Returned sentences have
/// whitespace runs collapsed to single spaces.
inline std::vector<std::string> split_sentences(std::string_view text) {
  using namespace text_detail;
  std::vector<std::string> out;
  auto emit = [&](std::size_t b, std::size_t e) {
    std::string s = collapse_ws(text.substr(b, e - b));
    if (!s.empty()) out.push_back(std::move(s));
  };

  std::size_t start = 0;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const char c = text[i];
    if (c == '\n') {
      std::size_t k = i + 1;
      int newlines = 1;
      while (k < n && is_space(static_cast<unsigned char>(text[k]))) {
        if (text[k] == '\n') ++newlines;
        ++k;
      }
      if (newlines >= 2) {
        emit(start, i);
        start = k;
        i = k;
        continue;
      }
      ++i;
      continue;
    }
    if (c != '.' && c != '!' && c != '?') {
      ++i;
      continue;
    }

    std::size_t j = i + 1;
    while (j < n && (text[j] == '.' || text[j] == '!' || text[j] == '?')) ++j;
    while (j < n) {
      auto [cp, len] = decode(text, j);
      if (!is_closing_mark(cp)) break;
      j += len;
    }
    std::size_t k = j;
    while (k < n && is_space(static_cast<unsigned char>(text[k]))) ++k;

    bool boundary = false;
    if (k >= n) {
      boundary = true;
    } else if (k > j) {
      std::size_t m = k;
      auto [cp, len] = decode(text, m);
      if (is_opening_mark(cp)) m += len;
      boundary = m < n && is_upper(static_cast<unsigned char>(text[m]));
    }
    if (boundary && c == '.' && j == i + 1) {
      const std::string w = word_before(text, i);
      if (abbreviations().count(w) != 0) boundary = false;
      if (w.size() == 1 && std::isalpha(static_cast<unsigned char>(w[0]))) boundary = false;
    }
    if (boundary) {
      emit(start, j);
      start = k;
      i = k;
    } else {
      i = j;
    }
  }
  emit(start, n);
  return out;
}

/// Lowercase, strip punctuation, drop stopwords, then stem what remains.
inline std::vector<std::string> preprocess(std::string_view sentence, const StopwordSet& stopwords,
                                           bool stem = true) {
  std::vector<std::string> out;
  for (auto& tok : tokenize(sentence)) {
    if (stopwords.contains(tok)) continue;
    out.push_back(stem ? porter_stem(std::move(tok)) : std::move(tok));
  }
  return out;
}

/// True when a double-quoted span covers more than half of the sentence's
/// characters. Straight quotes pair up in order; curly quotes open and close.
inline bool is_dialog_sentence(std::string_view s) {
  using namespace text_detail;
  std::size_t total = 0;
  std::size_t longest = 0;
  bool open = false;
  std::size_t open_at = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    auto [cp, len] = decode(s, i);
    if (cp == U'"' || cp == U'“' || cp == U'”') {
      const bool opens = cp == U'“' || (cp == U'"' && !open);
      if (opens && !open) {
        open = true;
        open_at = total;
      } else if (!opens && open) {
        longest = std::max(longest, total - open_at + 1);
        open = false;
      }
    }
    ++total;
    i += len;
  }
  return total > 0 && 2 * longest > total;
}

// ---------------------------------------------------------------------------
// Cluster loading
// ---------------------------------------------------------------------------

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("error reading file: " + path.string());
  return ss.str();
}

/// Reads `<dir>/*.txt` as documents in lexicographic filename order and
/// `<dir>/topic.txt`, when present, as the topic statement.
inline RawCluster load_cluster(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw IoError("not a cluster directory: " + dir.string());

  RawCluster cluster;
  cluster.topic_id = dir.filename().string();
  if (cluster.topic_id.empty()) cluster.topic_id = dir.parent_path().filename().string();

  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    const auto& p = entry.path();
    if (p.extension() != ".txt") continue;
    if (p.filename() == "topic.txt") {
      cluster.topic_statement = read_file(p);
      continue;
    }
    files.push_back(p);
  }
  if (ec) throw IoError("cannot list cluster directory: " + dir.string());
  if (files.empty()) throw EmptyClusterError("cluster has no documents: " + dir.string());

  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  for (const auto& p : files) cluster.documents.push_back({p.stem().string(), read_file(p)});
  return cluster;
}

// ---------------------------------------------------------------------------
// TFIDF matrix
// ---------------------------------------------------------------------------

struct BuiltMatrix {
  Wordmap wordmap;
  TermDocMatrix matrix;
  std::vector<std::size_t> kept_columns;  // indices into the input columns
};

/// A[w][s] = tf(w,s) * ln(C / df(w)) over C columns. Column 0 is the topic
/// sentence and is always kept. Other columns that come out all-zero are
/// dropped and the weights recomputed until none remain, unless that would
/// drop every non-topic column, in which case the zero columns stay.
inline BuiltMatrix build_matrix(std::span<const std::vector<std::string>> columns) {
  if (columns.empty()) throw DegenerateClusterError("no columns to build a matrix from");

  std::vector<std::size_t> active(columns.size());
  for (std::size_t i = 0; i < active.size(); ++i) active[i] = i;

  while (true) {
    std::vector<std::string> all;
    for (auto c : active) all.insert(all.end(), columns[c].begin(), columns[c].end());
    Wordmap wm = Wordmap::from_words(all);
    if (wm.empty()) throw DegenerateClusterError("empty vocabulary after preprocessing");

    const auto m = static_cast<Eigen::Index>(wm.size());
    const auto ncol = static_cast<Eigen::Index>(active.size());
    Matrix tf = Matrix::Zero(m, ncol);
    for (Eigen::Index j = 0; j < ncol; ++j)
      for (const auto& tok : columns[active[static_cast<std::size_t>(j)]])
        tf(static_cast<Eigen::Index>(*wm.find(tok)), j) += 1.0;

    Vector idf(m);
    for (Eigen::Index w = 0; w < m; ++w) {
      const double df = static_cast<double>((tf.row(w).array() > 0.0).count());
      idf(w) = std::log(static_cast<double>(ncol) / df);
    }
    Matrix a = idf.asDiagonal() * tf;

    std::vector<std::size_t> next{active.front()};
    for (Eigen::Index j = 1; j < ncol; ++j)
      if (a.col(j).maxCoeff() > 0.0) next.push_back(active[static_cast<std::size_t>(j)]);

    if (next.size() == active.size() || next.size() == 1) {
      return BuiltMatrix{std::move(wm), TermDocMatrix{std::move(a)}, std::move(active)};
    }
    active = std::move(next);
  }
}

// ---------------------------------------------------------------------------
// Whole-cluster preprocessing
// ---------------------------------------------------------------------------

struct PreparedCluster {
  std::string topic_id;
  std::vector<Sentence> sentences;  // sentences[0] is the topic sentence
  Wordmap wordmap;
  TermDocMatrix matrix;

  std::size_t node_count() const { return sentences.size(); }
};

struct PrepareOptions {
  bool remove_dialog = true;
  bool stem = true;
};

/// Splits, filters and preprocesses every document, designates the topic
/// sentence (the topic statement, or the first retained sentence when the
/// statement is empty), and builds the TFIDF matrix.
inline PreparedCluster prepare_cluster(const RawCluster& raw, const StopwordSet& stopwords,
                                       const PrepareOptions& opts = {}) {
  std::vector<Sentence> body;
  for (std::size_t d = 0; d < raw.documents.size(); ++d) {
    const auto parts = split_sentences(raw.documents[d].text);
    const int count = static_cast<int>(parts.size());
    for (std::size_t p = 0; p < parts.size(); ++p) {
      if (opts.remove_dialog && is_dialog_sentence(parts[p])) continue;
      Sentence s;
      s.raw_text = parts[p];
      s.tokens = preprocess(parts[p], stopwords, opts.stem);
      if (s.tokens.empty()) continue;
      s.doc_index = static_cast<int>(d);
      s.position_in_doc = static_cast<int>(p) + 1;
      s.doc_sentence_count = count;
      body.push_back(std::move(s));
    }
  }

  Sentence topic;
  const std::string statement = text_detail::collapse_ws(raw.topic_statement);
  if (!statement.empty()) {
    topic.raw_text = statement;
    topic.tokens = preprocess(statement, stopwords, opts.stem);
  }
  if (topic.tokens.empty()) {
    if (body.empty()) throw DegenerateClusterError("no usable sentences in cluster " + raw.topic_id);
    topic = std::move(body.front());
    body.erase(body.begin());
  }
  topic.is_topic_sentence = true;
  if (body.empty()) throw DegenerateClusterError("cluster " + raw.topic_id + " has only a topic sentence");

  std::vector<std::vector<std::string>> columns;
  columns.reserve(body.size() + 1);
  columns.push_back(topic.tokens);
  for (const auto& s : body) columns.push_back(s.tokens);
  auto built = build_matrix(columns);

  PreparedCluster out;
  out.topic_id = raw.topic_id;
  out.sentences.reserve(built.kept_columns.size());
  out.sentences.push_back(std::move(topic));
  for (std::size_t k = 1; k < built.kept_columns.size(); ++k)
    out.sentences.push_back(std::move(body[built.kept_columns[k] - 1]));
  out.wordmap = std::move(built.wordmap);
  out.matrix = std::move(built.matrix);
  if (out.sentences.size() < 2)
    throw DegenerateClusterError("cluster " + raw.topic_id + " has no retained sentences");
  return out;
}

/// Post-preprocessing corpus statistics: average sentences per topic,
/// average tokens per sentence and global wordmap size.
class CorpusStats {
 public:
  void add(const PreparedCluster& c) {
    ++clusters_;
    for (std::size_t i = 1; i < c.sentences.size(); ++i) {
      ++sentences_;
      tokens_ += c.sentences[i].tokens.size();
    }
    for (const auto& w : c.wordmap.words()) vocab_.insert(w);
  }

  std::size_t clusters() const { return clusters_; }
  double avg_sentences_per_topic() const {
    return clusters_ == 0 ? 0.0 : static_cast<double>(sentences_) / static_cast<double>(clusters_);
  }
  double avg_tokens_per_sentence() const {
    return sentences_ == 0 ? 0.0 : static_cast<double>(tokens_) / static_cast<double>(sentences_);
  }
  std::size_t wordmap_size() const { return vocab_.size(); }

 private:
  std::size_t clusters_ = 0;
  std::size_t sentences_ = 0;
  std::size_t tokens_ = 0;
  std::set<std::string> vocab_;
};

}  // namespace mdsum

#endif  // MDSUM_CORPUS_HPP
