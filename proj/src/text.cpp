// Apache License, Version 2.0, refer to LICENSE.txt

#include "blogflux/text.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "blogflux/tsv.hpp"

namespace blogflux {
namespace {

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

std::size_t code_points(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(
      s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

}  // namespace

std::vector<std::string> tokenize(std::string_view body, const TokenizerConfig& config) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < body.size()) {
    while (i < body.size() && !is_word_byte(static_cast<unsigned char>(body[i]))) ++i;
    const std::size_t start = i;
    while (i < body.size() && is_word_byte(static_cast<unsigned char>(body[i]))) ++i;
    if (i == start) continue;
    std::string word(body.substr(start, i - start));
    for (auto& c : word) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    if (code_points(word) < config.min_len || config.stopwords.contains(word)) continue;
    out.push_back(std::move(word));
  }
  return out;
}

std::vector<std::string> WordTokenizer::tokenize(std::string_view body) const {
  return blogflux::tokenize(body, config_);
}

std::unordered_set<std::string> load_stopwords(std::istream& in) {
  std::unordered_set<std::string> out;
  std::string line;
  while (tsv::next_record(in, line)) {
    const auto first = line.find_first_not_of(" \t");
    const auto last = line.find_last_not_of(" \t");
    if (first == std::string::npos) continue;
    std::string word = line.substr(first, last - first + 1);
    for (auto& c : word) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    out.insert(std::move(word));
  }
  return out;
}

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> doc_freq,
                       std::size_t max_size)
    : terms_(std::move(terms)), doc_freq_(std::move(doc_freq)), max_size_(max_size) {
  if (terms_.size() != doc_freq_.size()) throw InvalidArgument("terms/doc_freq size mismatch");
  if (terms_.size() > max_size_) throw InvalidArgument("vocabulary exceeds max_size");
  index_.reserve(terms_.size());
  for (TermId i = 0; i < terms_.size(); ++i) {
    if (!index_.emplace(terms_[i], i).second) {
      throw InvalidArgument("duplicate vocabulary term: " + terms_[i]);
    }
  }
}

std::optional<TermId> Vocabulary::find(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocabulary(std::span<const std::vector<std::string>> docs, std::size_t max_size) {
  if (max_size < 1) throw InvalidArgument("vocabulary max_size must be >= 1");
  std::unordered_map<std::string, std::size_t> df;
  std::vector<std::string> distinct;
  for (const auto& doc : docs) {
    distinct.assign(doc.begin(), doc.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    for (const auto& t : distinct) ++df[t];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(df.begin(), df.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (ranked.size() > max_size) ranked.resize(max_size);
  std::vector<std::string> terms;
  std::vector<std::size_t> freqs;
  for (auto& [t, f] : ranked) {
    terms.push_back(std::move(t));
    freqs.push_back(f);
  }
  return Vocabulary(std::move(terms), std::move(freqs), max_size);
}

void write_vocabulary_tsv(std::ostream& out, const Vocabulary& vocab) {
  for (TermId i = 0; i < vocab.size(); ++i) out << vocab.term(i) << '\t' << vocab.doc_freq()[i] << '\n';
}

Vocabulary read_vocabulary_tsv(std::istream& in) {
  std::vector<std::string> terms;
  std::vector<std::size_t> df;
  std::string line;
  while (tsv::next_record(in, line)) {
    const auto f = tsv::split(line);
    auto n = f.size() == 2 ? tsv::parse_int(f[1]) : std::nullopt;
    if (!n || *n < 0) throw FormatError("bad vocabulary row: " + line);
    terms.emplace_back(f[0]);
    df.push_back(static_cast<std::size_t>(*n));
  }
  const std::size_t cap = std::max<std::size_t>(terms.size(), 1);
  return Vocabulary(std::move(terms), std::move(df), cap);
}

std::uint32_t TermVector::count(TermId term) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), term,
                             [](const auto& e, TermId t) { return e.first < t; });
  return it != entries.end() && it->first == term ? it->second : 0;
}

TermVector to_term_vector(std::span<const std::string> tokens, const Vocabulary& vocab) {
  std::map<TermId, std::uint32_t> counts;
  for (const auto& t : tokens) {
    if (auto id = vocab.find(t)) ++counts[*id];
  }
  TermVector v;
  v.entries.assign(counts.begin(), counts.end());
  for (const auto& [id, c] : v.entries) v.token_count += c;
  return v;
}

double cosine(const TermVector& u, const TermVector& v) {
  double dot = 0, nu = 0, nv = 0;
  for (const auto& [id, c] : u.entries) nu += double(c) * c;
  for (const auto& [id, c] : v.entries) nv += double(c) * c;
  if (nu == 0 || nv == 0) return 0.0;
  auto a = u.entries.begin();
  auto b = v.entries.begin();
  while (a != u.entries.end() && b != v.entries.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      dot += double(a->second) * b->second;
      ++a;
      ++b;
    }
  }
  return std::min(1.0, dot / std::sqrt(nu * nv));
}

double cosine(const TermVector& u, const TermVector& v, std::span<const double> w) {
  double dot = 0, nu = 0, nv = 0;
  for (const auto& [id, c] : u.entries) nu += (c * w[id]) * (c * w[id]);
  for (const auto& [id, c] : v.entries) nv += (c * w[id]) * (c * w[id]);
  if (nu == 0 || nv == 0) return 0.0;
  auto a = u.entries.begin();
  auto b = v.entries.begin();
  while (a != u.entries.end() && b != v.entries.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      dot += (a->second * w[a->first]) * (b->second * w[b->first]);
      ++a;
      ++b;
    }
  }
  return std::min(1.0, dot / std::sqrt(nu * nv));
}

std::vector<double> idf_weights(const Vocabulary& vocab, std::size_t n_docs) {
  std::vector<double> w(vocab.size());
  for (TermId i = 0; i < vocab.size(); ++i) {
    w[i] = std::log((1.0 + double(n_docs)) / (1.0 + double(vocab.doc_freq()[i]))) + 1.0;
  }
  return w;
}

std::vector<TermId> shared_terms(const TermVector& u, const TermVector& v) {
  std::vector<TermId> out;
  auto a = u.entries.begin();
  auto b = v.entries.begin();
  while (a != u.entries.end() && b != v.entries.end()) {
    if (a->first < b->first) {
      ++a;
    } else if (b->first < a->first) {
      ++b;
    } else {
      out.push_back(a->first);
      ++a;
      ++b;
    }
  }
  return out;
}

}  // namespace blogflux
