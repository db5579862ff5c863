// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "blogflux/common.hpp"
#include "blogflux/text.hpp"

namespace blogflux {

// Compressed sparse rows of term counts, one row per document.
struct DocTermMatrix {
  std::size_t n_terms = 0;
  std::vector<std::size_t> offsets{0};
  std::vector<TermId> terms;
  std::vector<double> counts;

  std::size_t docs() const { return offsets.size() - 1; }
  double total() const;
};

DocTermMatrix make_doc_term(std::span<const TermVector> docs, std::size_t n_terms);

struct PlsaConfig {
  std::size_t topics = 50;
  std::size_t max_iters = 200;
  double tolerance = 1e-7;  // relative log-likelihood change
  std::uint64_t seed = 1;
  int threads = 1;
};

struct TopicModel {
  Eigen::MatrixXd p_w_given_t;  // V x K, columns sum to 1
  Eigen::VectorXd p_t;          // K
  Eigen::MatrixXd p_t_given_d;  // D x K, rows sum to 1
  std::vector<double> loglik_trace;

  std::size_t topics() const { return static_cast<std::size_t>(p_t.size()); }
  std::size_t terms() const { return static_cast<std::size_t>(p_w_given_t.rows()); }
};

// EM for the aspect model from Dirichlet(1) starting points. The trace
// holds the log-likelihood before every M-step followed by the final value.
TopicModel fit_plsa(const DocTermMatrix& docs, const PlsaConfig& config);

double plsa_loglik(const DocTermMatrix& docs, const TopicModel& model);

// Topic t is 0-based. Descending probability, ties by term string.
std::vector<std::pair<std::string, double>> top_keywords(const TopicModel& model,
                                                         const Vocabulary& vocab, std::size_t t,
                                                         std::size_t n);

// Blocks p_t, p_w_given_t (rows labelled by term) and loglik.
void write_topic_model(std::ostream& out, const TopicModel& model, const Vocabulary& vocab);
// Term rows must match `vocab` in order.
TopicModel read_topic_model(std::istream& in, const Vocabulary& vocab);

}  // namespace blogflux
