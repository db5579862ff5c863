// Apache License, Version 2.0, refer to LICENSE.txt

#include "blogflux/topics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "blogflux/matrix_io.hpp"
#include "blogflux/parallel.hpp"
#include "blogflux/rng.hpp"

namespace blogflux {
namespace {

constexpr std::size_t kChunks = 8;

struct Accumulators {
  Eigen::MatrixXd word_topic;  // V x K
  double loglik = 0;
};

// One E-step pass: new document mixtures in place of `next_theta`, word
// counts per chunk in `acc`. Returns the log-likelihood of the current
// parameters.
double em_pass(const DocTermMatrix& docs, const Eigen::MatrixXd& phi, const Eigen::MatrixXd& theta,
               Eigen::MatrixXd& next_theta, std::vector<Accumulators>& acc, int threads) {
  const auto K = phi.cols();
  const std::size_t D = docs.docs();
  parallel_chunks(kChunks, threads, [&](std::size_t c) {
    auto& a = acc[c];
    a.word_topic.setZero();
    a.loglik = 0;
    Eigen::VectorXd post(K);
    const auto [begin, end] = chunk_range(D, kChunks, c);
    for (std::size_t d = begin; d < end; ++d) {
      next_theta.row(static_cast<Eigen::Index>(d)).setZero();
      for (std::size_t e = docs.offsets[d]; e < docs.offsets[d + 1]; ++e) {
        const auto w = static_cast<Eigen::Index>(docs.terms[e]);
        const double n = docs.counts[e];
        post = phi.row(w).transpose().cwiseProduct(theta.row(static_cast<Eigen::Index>(d)).transpose());
        const double denom = post.sum();
        a.loglik += n * std::log(denom);
        if (denom > 0) post *= n / denom;
        a.word_topic.row(w) += post.transpose();
        next_theta.row(static_cast<Eigen::Index>(d)) += post.transpose();
      }
    }
  });
  double total = 0;
  for (const auto& a : acc) total += a.loglik;
  return total;
}

void normalize_columns(Eigen::MatrixXd& m, const Eigen::MatrixXd& fallback) {
  for (Eigen::Index k = 0; k < m.cols(); ++k) {
    const double s = m.col(k).sum();
    if (s > 0) {
      m.col(k) /= s;
    } else {
      m.col(k) = fallback.col(k);
    }
  }
}

}  // namespace

double DocTermMatrix::total() const { return std::accumulate(counts.begin(), counts.end(), 0.0); }

DocTermMatrix make_doc_term(std::span<const TermVector> docs, std::size_t n_terms) {
  DocTermMatrix m;
  m.n_terms = n_terms;
  for (const auto& v : docs) {
    for (const auto& [id, c] : v.entries) {
      if (id >= n_terms) throw InvalidArgument("term id outside the vocabulary");
      m.terms.push_back(id);
      m.counts.push_back(c);
    }
    m.offsets.push_back(m.terms.size());
  }
  return m;
}

TopicModel fit_plsa(const DocTermMatrix& docs, const PlsaConfig& config) {
  const std::size_t D = docs.docs();
  const std::size_t V = docs.n_terms;
  const std::size_t K = config.topics;
  if (D == 0 || docs.terms.empty()) throw InvalidArgument("empty document-term matrix");
  if (K < 1) throw InvalidArgument("topic count must be >= 1");
  if (K > D) throw InvalidArgument("more topics than documents");
  for (std::size_t d = 0; d < D; ++d) {
    if (docs.offsets[d] == docs.offsets[d + 1]) throw InvalidArgument("document without tokens");
  }

  Rng rng(config.seed);
  TopicModel m;
  m.p_w_given_t.resize(static_cast<Eigen::Index>(V), static_cast<Eigen::Index>(K));
  for (std::size_t k = 0; k < K; ++k) {
    const auto col = rng.dirichlet_ones(V);
    for (std::size_t w = 0; w < V; ++w) m.p_w_given_t(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(k)) = col[w];
  }
  m.p_t_given_d.resize(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(K));
  for (std::size_t d = 0; d < D; ++d) {
    const auto row = rng.dirichlet_ones(K);
    for (std::size_t k = 0; k < K; ++k) m.p_t_given_d(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k)) = row[k];
  }

  std::vector<Accumulators> acc(kChunks);
  for (auto& a : acc) a.word_topic.resize(static_cast<Eigen::Index>(V), static_cast<Eigen::Index>(K));
  Eigen::MatrixXd next_theta(m.p_t_given_d.rows(), m.p_t_given_d.cols());
  Eigen::MatrixXd next_phi(m.p_w_given_t.rows(), m.p_w_given_t.cols());

  for (std::size_t it = 0; it < config.max_iters; ++it) {
    const double ll = em_pass(docs, m.p_w_given_t, m.p_t_given_d, next_theta, acc, config.threads);
    if (!std::isfinite(ll)) throw NumericError("PLSA log-likelihood is not finite", it);
    const bool converged = !m.loglik_trace.empty() &&
                           std::abs(ll - m.loglik_trace.back()) <= config.tolerance * std::abs(ll);
    m.loglik_trace.push_back(ll);
    if (converged) break;
    next_phi.setZero();
    for (const auto& a : acc) next_phi += a.word_topic;
    normalize_columns(next_phi, m.p_w_given_t);
    m.p_w_given_t.swap(next_phi);
    for (std::size_t d = 0; d < D; ++d) {
      auto row = next_theta.row(static_cast<Eigen::Index>(d));
      const double s = row.sum();
      if (s > 0) {
        row /= s;
      } else {
        row = m.p_t_given_d.row(static_cast<Eigen::Index>(d));
      }
    }
    m.p_t_given_d.swap(next_theta);
  }
  m.loglik_trace.push_back(plsa_loglik(docs, m));

  m.p_t = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(K));
  double mass = 0;
  for (std::size_t d = 0; d < D; ++d) {
    double n = 0;
    for (std::size_t e = docs.offsets[d]; e < docs.offsets[d + 1]; ++e) n += docs.counts[e];
    m.p_t += n * m.p_t_given_d.row(static_cast<Eigen::Index>(d)).transpose();
    mass += n;
  }
  m.p_t /= mass;
  return m;
}

double plsa_loglik(const DocTermMatrix& docs, const TopicModel& model) {
  double ll = 0;
  for (std::size_t d = 0; d < docs.docs(); ++d) {
    for (std::size_t e = docs.offsets[d]; e < docs.offsets[d + 1]; ++e) {
      const double p = model.p_w_given_t.row(static_cast<Eigen::Index>(docs.terms[e]))
                           .dot(model.p_t_given_d.row(static_cast<Eigen::Index>(d)));
      ll += docs.counts[e] * std::log(p);
    }
  }
  return ll;
}

std::vector<std::pair<std::string, double>> top_keywords(const TopicModel& model,
                                                         const Vocabulary& vocab, std::size_t t,
                                                         std::size_t n) {
  if (t >= model.topics()) throw InvalidArgument("topic index out of range");
  if (vocab.size() != model.terms()) throw InvalidArgument("vocabulary does not match the model");
  std::vector<TermId> ids(vocab.size());
  std::iota(ids.begin(), ids.end(), 0);
  const auto col = model.p_w_given_t.col(static_cast<Eigen::Index>(t));
  auto better = [&](TermId a, TermId b) {
    const double pa = col(a), pb = col(b);
    return pa != pb ? pa > pb : vocab.term(a) < vocab.term(b);
  };
  n = std::min(n, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n), ids.end(), better);
  std::vector<std::pair<std::string, double>> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(vocab.term(ids[i]), col(ids[i]));
  return out;
}

void write_topic_model(std::ostream& out, const TopicModel& model, const Vocabulary& vocab) {
  write_block(out, "p_t", model.p_t);
  write_block(out, "p_w_given_t", model.p_w_given_t, vocab.terms());
  write_block(out, "loglik",
              Eigen::Map<const Eigen::VectorXd>(model.loglik_trace.data(),
                                                static_cast<Eigen::Index>(model.loglik_trace.size())));
}

TopicModel read_topic_model(std::istream& in, const Vocabulary& vocab) {
  const auto file = read_blocks(in);
  TopicModel m;
  m.p_t = require_block(file, "p_t").values.col(0);
  const auto& words = require_block(file, "p_w_given_t");
  if (words.row_labels != vocab.terms()) throw FormatError("topic model terms differ from the vocabulary");
  if (words.values.cols() != m.p_t.size()) throw FormatError("topic model blocks disagree on K");
  m.p_w_given_t = words.values;
  const auto& ll = require_block(file, "loglik").values;
  m.loglik_trace.assign(ll.data(), ll.data() + ll.size());
  return m;
}

}  // namespace blogflux
