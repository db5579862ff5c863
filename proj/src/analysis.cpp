// Apache License, Version 2.0, refer to LICENSE.txt

#include "blogflux/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include "blogflux/tensor.hpp"
#include "blogflux/tsv.hpp"

namespace blogflux {
namespace {

TopicRankings rank_columns(const Eigen::MatrixXd& scores) {
  TopicRankings out;
  for (Eigen::Index t = 0; t < scores.cols(); ++t) {
    std::vector<RankedBlogger> list;
    for (Eigen::Index j = 0; j < scores.rows(); ++j) {
      list.push_back({static_cast<std::uint32_t>(j), scores(j, t)});
    }
    std::sort(list.begin(), list.end(), [](const RankedBlogger& a, const RankedBlogger& b) {
      return a.score != b.score ? a.score > b.score : a.node < b.node;
    });
    out.push_back(std::move(list));
  }
  return out;
}

// log-sum-exp normalization in place; -inf entries become 0.
void normalize_log(Eigen::VectorXd& v) {
  const double top = v.maxCoeff();
  if (!std::isfinite(top)) throw UnanswerableQuery();
  v = (v.array() - top).exp();
  v /= v.sum();
}

Eigen::VectorXd candidate_ratio(const Eigen::VectorXd& b, const Eigen::MatrixXd& y,
                                const Eigen::VectorXd& community_weight,
                                const std::vector<bool>& exclude) {
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(y.cols());
  for (Eigen::Index j = 0; j < y.rows(); ++j) {
    if (!exclude[static_cast<std::size_t>(j)]) mass += b(j) * y.row(j).transpose();
  }
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(y.rows());
  for (Eigen::Index k = 0; k < y.cols(); ++k) {
    if (mass(k) <= 0 || community_weight(k) <= 0) continue;
    scores += (community_weight(k) / mass(k)) * b.cwiseProduct(y.col(k));
  }
  return scores;
}

void check_exclude(const std::vector<bool>& exclude, Eigen::Index n) {
  if (exclude.size() != static_cast<std::size_t>(n)) {
    throw InvalidArgument("exclusion mask does not match the model");
  }
}

}  // namespace

double idr(const TopicRankings& rankings, std::size_t n) {
  const std::size_t K = rankings.size();
  if (K < 2) throw InvalidArgument("IDR needs at least two topics");
  if (n < 1) throw InvalidArgument("IDR needs N >= 1");
  std::set<std::uint32_t> seen;
  for (const auto& list : rankings) {
    if (list.size() < n) throw InvalidArgument("ranking shorter than N");
    for (std::size_t r = 0; r < n; ++r) seen.insert(list[r].node);
  }
  const double cn = static_cast<double>(seen.size());
  return (cn - static_cast<double>(n)) / (static_cast<double>(n) * static_cast<double>(K - 1));
}

TopicRankings iolap_rankings(const IolapModel& model) {
  Eigen::MatrixXd scores(model.Y.rows(), static_cast<Eigen::Index>(model.K));
  for (std::size_t t = 0; t < model.K; ++t) scores.col(static_cast<Eigen::Index>(t)) = iolap_topic_distribution(model, t);
  return rank_columns(scores);
}

TopicRankings community_rankings(const Eigen::VectorXd& popularity, const Eigen::MatrixXd& memberships) {
  Eigen::MatrixXd scores = memberships;
  for (Eigen::Index k = 0; k < scores.cols(); ++k) {
    scores.col(k) = scores.col(k).cwiseProduct(popularity);
    const double s = scores.col(k).sum();
    if (s > 0) scores.col(k) /= s;
  }
  return rank_columns(scores);
}

TopicRankings pcldc_topic_rankings(const PcldcModel& model, const TopicModel& topics) {
  if (topics.terms() != static_cast<std::size_t>(model.term_given_community.rows())) {
    throw InvalidArgument("PCL-DC and topic model vocabularies differ");
  }
  // K_topics x K_communities affinities.
  Eigen::MatrixXd affinity = topics.p_w_given_t.transpose() * model.term_given_community;
  Eigen::VectorXd mass = model.Y.transpose() * model.popularity;
  Eigen::MatrixXd scores(model.Y.rows(), affinity.rows());
  for (Eigen::Index t = 0; t < affinity.rows(); ++t) {
    const double s = affinity.row(t).sum();
    Eigen::VectorXd col = Eigen::VectorXd::Zero(model.Y.rows());
    for (Eigen::Index k = 0; k < affinity.cols(); ++k) {
      if (mass(k) > 0 && s > 0) col += (affinity(t, k) / s / mass(k)) * model.popularity.cwiseProduct(model.Y.col(k));
    }
    scores.col(t) = col;
  }
  return rank_columns(scores);
}

TrainTestSplit split_train_test(const BloggerGraph& graph, std::span<const ImplicitLink> links,
                                std::span<const TermVector> post_vectors, Rng& rng) {
  const auto offsets = graph.out_offsets();
  TrainTestSplit split;
  split.train.nodes = graph.nodes;
  std::set<std::pair<std::uint32_t, std::uint32_t>> held_out;
  for (std::uint32_t a = 0; a < graph.size(); ++a) {
    const std::size_t begin = offsets[a], end = offsets[a + 1];
    std::size_t pick = end;
    if (end - begin >= 2) {
      pick = begin + rng.index(end - begin);
      held_out.emplace(a, graph.edges[pick].dst);
      split.test.push_back({a, graph.edges[pick].dst, {}});
    }
    for (std::size_t e = begin; e < end; ++e) {
      if (e != pick) split.train.edges.push_back(graph.edges[e]);
    }
  }
  if (split.test.empty()) throw InvalidArgument("no node has two or more out-links to hold out");

  std::map<std::pair<std::uint32_t, std::uint32_t>, std::set<TermId>> keywords;
  for (const auto& l : links) {
    auto a = graph.local(l.reader);
    auto b = graph.local(l.author);
    if (!a || !b) throw InvalidArgument("link endpoint outside the graph");
    if (held_out.contains({*a, *b})) {
      for (TermId t : shared_terms(post_vectors[l.q], post_vectors[l.p])) keywords[{*a, *b}].insert(t);
    } else {
      split.train_links.push_back(l);
    }
  }
  for (auto& q : split.test) {
    const auto& w = keywords[{q.source, q.target}];
    q.keywords.assign(w.begin(), w.end());
  }
  return split;
}

std::vector<bool> bookmark_exclusions(const BloggerGraph& train, std::uint32_t source) {
  std::vector<bool> exclude(train.size(), false);
  exclude[source] = true;
  for (const auto& e : train.edges) {
    if (e.src == source) exclude[e.dst] = true;
  }
  return exclude;
}

std::vector<RankedBlogger> top_candidates(const Eigen::VectorXd& scores,
                                          const std::vector<bool>& exclude, std::size_t n) {
  check_exclude(exclude, scores.size());
  std::vector<RankedBlogger> c;
  double total = 0;
  for (Eigen::Index j = 0; j < scores.size(); ++j) {
    if (exclude[static_cast<std::size_t>(j)]) continue;
    c.push_back({static_cast<std::uint32_t>(j), scores(j)});
    total += scores(j);
  }
  if (total > 0) {
    for (auto& r : c) r.score /= total;
  }
  n = std::min(n, c.size());
  std::partial_sort(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(n), c.end(),
                    [](const RankedBlogger& a, const RankedBlogger& b) {
                      return a.score != b.score ? a.score > b.score : a.node < b.node;
                    });
  c.resize(n);
  return c;
}

std::vector<RankedBlogger> recommend_tg(const IolapModel& iolap, const TopicModel& topics,
                                        std::span<const TermId> keywords, std::size_t n,
                                        const std::vector<bool>& exclude) {
  const auto K = static_cast<Eigen::Index>(topics.topics());
  if (static_cast<std::size_t>(K) != iolap.K) throw InvalidArgument("iOLAP and topic model disagree on K");
  Eigen::VectorXd log_post = topics.p_t.array().log();
  bool any = false;
  for (TermId w : keywords) {
    if (w >= topics.terms()) continue;
    const auto row = topics.p_w_given_t.row(w);
    if (row.maxCoeff() <= 0) continue;  // never observed by the topic model
    log_post += row.transpose().array().log().matrix();
    any = true;
  }
  if (!any) throw UnanswerableQuery();
  normalize_log(log_post);
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(iolap.Y.rows());
  for (Eigen::Index t = 0; t < K; ++t) {
    if (log_post(t) > 0) scores += log_post(t) * iolap_topic_distribution(iolap, static_cast<std::size_t>(t));
  }
  return top_candidates(scores, exclude, n);
}

std::vector<RankedBlogger> recommend_iolap(const IolapModel& model, std::uint32_t source,
                                           std::span<const TermId> keywords, std::size_t n,
                                           const std::vector<bool>& exclude) {
  if (source >= model.X.rows()) throw InvalidArgument("unknown query blogger");
  Eigen::VectorXd zsum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.K));
  for (TermId w : keywords) {
    if (w < model.Z.rows()) zsum += model.Z.row(w).transpose();
  }
  if (zsum.sum() <= 0) throw UnanswerableQuery();
  Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(model.J));
  for (std::size_t a = 0; a < model.I; ++a) {
    const double xa = model.X(source, static_cast<Eigen::Index>(a));
    if (xa == 0) continue;
    for (std::size_t b = 0; b < model.J; ++b) {
      double s = 0;
      for (std::size_t c = 0; c < model.K; ++c) s += model.c(a, b, c) * zsum(static_cast<Eigen::Index>(c));
      u(static_cast<Eigen::Index>(b)) += xa * s;
    }
  }
  return top_candidates(model.Y * u, exclude, n);
}

std::vector<RankedBlogger> recommend_pcldc(const PcldcModel& model, std::uint32_t source,
                                           std::span<const TermId> keywords, std::size_t n,
                                           const std::vector<bool>& exclude) {
  if (source >= model.Y.rows()) throw InvalidArgument("unknown query blogger");
  check_exclude(exclude, model.Y.rows());
  const auto& p = model.term_given_community;
  Eigen::VectorXd log_post = model.Y.row(source).transpose().array().log();
  bool any = false;
  for (TermId w : keywords) {
    if (w >= p.rows()) continue;
    log_post += p.row(w).transpose().array().log().matrix();
    any = true;
  }
  if (!any) throw UnanswerableQuery();
  normalize_log(log_post);
  return top_candidates(candidate_ratio(model.popularity, model.Y, log_post, exclude), exclude, n);
}

std::vector<RankedBlogger> recommend_pcl(const PclModel& model, std::uint32_t source, std::size_t n,
                                         const std::vector<bool>& exclude) {
  if (source >= model.Y.rows()) throw InvalidArgument("unknown query blogger");
  check_exclude(exclude, model.Y.rows());
  const Eigen::VectorXd weight = model.Y.row(source).transpose();
  return top_candidates(candidate_ratio(model.popularity, model.Y, weight, exclude), exclude, n);
}

std::vector<double> recall_curve(const TrainTestSplit& split, const Recommender& recommender,
                                 std::size_t max_n) {
  if (split.test.empty()) throw InvalidArgument("empty test set");
  std::vector<double> hits(max_n, 0.0);
  for (const auto& q : split.test) {
    std::vector<RankedBlogger> ranked;
    try {
      ranked = recommender(q, max_n, bookmark_exclusions(split.train, q.source));
    } catch (const UnanswerableQuery&) {
      continue;
    }
    for (std::size_t r = 0; r < ranked.size() && r < max_n; ++r) {
      if (ranked[r].node == q.target) {
        for (std::size_t k = r; k < max_n; ++k) hits[k] += 1.0;
        break;
      }
    }
  }
  for (auto& h : hits) h /= static_cast<double>(split.test.size());
  return hits;
}

double recall_at_n(const TrainTestSplit& split, const Recommender& recommender, std::size_t n) {
  if (n == 0) {
    if (split.test.empty()) throw InvalidArgument("empty test set");
    return 0.0;
  }
  return recall_curve(split, recommender, n).back();
}

RecommenderSuite fit_recommenders(const TrainTestSplit& split, const Corpus& corpus,
                                  std::span<const TermVector> post_vectors, std::size_t n_terms,
                                  const SuiteConfig& config) {
  RecommenderSuite s;
  std::set<PostId> posts;
  for (const auto& l : split.train_links) {
    posts.insert(l.q);
    posts.insert(l.p);
  }
  std::vector<TermVector> docs;
  for (PostId p : posts) {
    if (!post_vectors[p].entries.empty()) docs.push_back(post_vectors[p]);
  }
  s.topics = fit_plsa(make_doc_term(docs, n_terms), config.plsa);
  const auto tensor = build_influence_tensor(split.train_links, post_vectors, n_terms, split.train.nodes);
  s.iolap = fit_iolap(tensor, s.topics.p_w_given_t, config.iolap);
  const auto content = blogger_content(split.train.nodes, corpus, post_vectors, n_terms);
  s.pcldc = fit_pcldc(split.train, content, config.pcl);
  s.pcl = fit_pcl(split.train, config.pcl);
  return s;
}

std::vector<MethodCurve> evaluate_recommenders(const TrainTestSplit& split,
                                               const RecommenderSuite& suite, std::size_t max_n) {
  std::vector<MethodCurve> out;
  out.push_back({"iolap", recall_curve(split, [&](const TestQuery& q, std::size_t n, const std::vector<bool>& ex) {
                   return recommend_iolap(suite.iolap, q.source, q.keywords, n, ex);
                 }, max_n)});
  out.push_back({"tg", recall_curve(split, [&](const TestQuery& q, std::size_t n, const std::vector<bool>& ex) {
                   return recommend_tg(suite.iolap, suite.topics, q.keywords, n, ex);
                 }, max_n)});
  out.push_back({"pcldc", recall_curve(split, [&](const TestQuery& q, std::size_t n, const std::vector<bool>& ex) {
                   return recommend_pcldc(suite.pcldc, q.source, q.keywords, n, ex);
                 }, max_n)});
  out.push_back({"pcl", recall_curve(split, [&](const TestQuery& q, std::size_t n, const std::vector<bool>& ex) {
                   return recommend_pcl(suite.pcl, q.source, n, ex);
                 }, max_n)});
  return out;
}

void write_recall_tsv(std::ostream& out, std::span<const MethodCurve> curves) {
  out << "method\tN\trecall\n";
  for (const auto& c : curves) {
    for (std::size_t n = 0; n < c.recall.size(); ++n) {
      out << c.method << '\t' << n + 1 << '\t' << tsv::format_double(c.recall[n]) << '\n';
    }
  }
}

}  // namespace blogflux
