// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "blogflux/corpus.hpp"
#include "blogflux/implicit.hpp"
#include "blogflux/synth.hpp"
#include "blogflux/text.hpp"

namespace blogflux {

inline constexpr const char* kVersion = "1.0.0";

// An input file produced by an earlier subcommand is absent.
class MissingInput : public Error {
 public:
  explicit MissingInput(std::string path)
      : Error("missing input: " + path), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct PipelineConfig {
  std::string out_dir = "blogflux_out";
  std::string content_path;     // default <out_dir>/posts.tsv
  std::string access_log_path;  // default <out_dir>/access.log
  std::string stopwords_path;   // optional

  int window_hours = 12;
  int tau_hours = 2;
  int tz_offset_hours = 9;
  std::size_t vocab_max_size = 5000;
  std::size_t min_tokens = 10;
  std::size_t min_bucket_n = 30;
  bool plsa_all_posts = false;
  bool tf_weighting = false;

  std::size_t topics = 50;
  std::size_t iolap_influenced = 10;
  std::size_t iolap_influencer = 10;
  std::size_t communities = 10;
  std::size_t plsa_iters = 200;
  std::size_t iolap_iters = 200;
  std::size_t pcl_iters = 100;
  std::size_t restarts = 1;
  double tolerance = 1e-7;
  double pcl_l2 = 0.0;
  std::size_t top_n = 10;

  std::string query_blogger;
  std::string query_keywords;  // comma separated
  std::string method = "iolap";

  std::uint64_t seed = 1;
  int threads = 1;
  SynthConfig synth;

  // Throws InvalidArgument.
  void validate() const;
  // Every setting that can change an output, as key=value; paths and the
  // worker count are left out.
  std::vector<std::pair<std::string, std::string>> canonical() const;
  // FNV-1a over canonical().
  std::uint64_t hash() const;

  std::string content() const;
  std::string access_log() const;
};

const std::vector<std::string>& subcommands();
// One-line description for --help.
std::string subcommand_help(const std::string& name);

// Runs one stage; returns its one-line summary. Throws MissingInput,
// InvalidArgument, FormatError or NumericError.
std::string run_subcommand(const std::string& name, const PipelineConfig& config);

// Maps an exception from run_subcommand to the documented exit status.
int exit_status_for(const std::exception& e);

struct PrepareOptions {
  int window_hours = 12;
  std::size_t vocab_max_size = 5000;
  std::size_t min_tokens = 10;
  TokenizerConfig tokenizer;
  CleaningRules cleaning;
};

// Cleaned corpus with vocabulary, per-post term vectors and the implicit
// network annotated with similarities.
struct PreparedNetwork {
  Corpus corpus;
  Vocabulary vocab;
  std::vector<TermVector> vectors;
  ImplicitNetwork implicit;
  CleaningReport cleaning;
};

std::vector<TermVector> post_vectors(const Corpus& corpus, const Vocabulary& vocab,
                                     const TokenizerConfig& tokenizer);
Vocabulary corpus_vocabulary(const Corpus& corpus, const TokenizerConfig& tokenizer,
                             std::size_t max_size);

PreparedNetwork prepare_network(const Corpus& raw, const PrepareOptions& options);

}  // namespace blogflux
