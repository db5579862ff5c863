// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "blogflux/common.hpp"

namespace blogflux {

struct TokenizerConfig {
  std::size_t min_len = 2;  // in code points
  std::unordered_set<std::string> stopwords;
};

// Pluggable segmentation; the default splits on word boundaries.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;
  virtual std::vector<std::string> tokenize(std::string_view body) const = 0;
};

// ASCII letters and digits plus any non-ASCII UTF-8 sequence form words;
// everything else separates them. Words are ASCII-lowercased, then stopwords
// and words shorter than min_len are dropped.
class WordTokenizer : public Tokenizer {
 public:
  explicit WordTokenizer(TokenizerConfig config = {}) : config_(std::move(config)) {}
  std::vector<std::string> tokenize(std::string_view body) const override;

 private:
  TokenizerConfig config_;
};

std::vector<std::string> tokenize(std::string_view body, const TokenizerConfig& config);

// One token per line; blank lines and '#' comments skipped.
std::unordered_set<std::string> load_stopwords(std::istream& in);

class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> doc_freq,
             std::size_t max_size);

  std::size_t size() const { return terms_.size(); }
  std::size_t max_size() const { return max_size_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::size_t>& doc_freq() const { return doc_freq_; }
  const std::string& term(TermId id) const { return terms_[id]; }
  std::optional<TermId> find(std::string_view term) const;

 private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> doc_freq_;
  std::size_t max_size_ = 0;
  std::unordered_map<std::string, TermId> index_;
};

// Keeps the max_size terms with the highest document frequency; ties go to
// the lexicographically smaller term. Terms are ordered by that ranking.
Vocabulary build_vocabulary(std::span<const std::vector<std::string>> docs, std::size_t max_size);

// `term<TAB>df` rows in vocabulary order.
void write_vocabulary_tsv(std::ostream& out, const Vocabulary& vocab);
Vocabulary read_vocabulary_tsv(std::istream& in);

struct TermVector {
  std::vector<std::pair<TermId, std::uint32_t>> entries;  // sorted by term id
  std::uint32_t token_count = 0;                          // sum of counts

  std::uint32_t count(TermId term) const;
};

// Out-of-vocabulary tokens are dropped.
TermVector to_term_vector(std::span<const std::string> tokens, const Vocabulary& vocab);

// dot(u, v) / (|u| |v|); 0 when either vector is empty.
double cosine(const TermVector& u, const TermVector& v);
// Same with per-term weights applied to both vectors (e.g. idf).
double cosine(const TermVector& u, const TermVector& v, std::span<const double> term_weights);

std::vector<double> idf_weights(const Vocabulary& vocab, std::size_t n_docs);

// Terms present in both vectors, ascending.
std::vector<TermId> shared_terms(const TermVector& u, const TermVector& v);

}  // namespace blogflux
