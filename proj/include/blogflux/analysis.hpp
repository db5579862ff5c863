// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "blogflux/implicit.hpp"
#include "blogflux/iolap.hpp"
#include "blogflux/pcl.hpp"
#include "blogflux/rng.hpp"
#include "blogflux/text.hpp"
#include "blogflux/topics.hpp"

namespace blogflux {

struct RankedBlogger {
  std::uint32_t node = 0;  // local graph index
  double score = 0;

  bool operator==(const RankedBlogger&) const = default;
};

// One ranked list per topic, best first.
using TopicRankings = std::vector<std::vector<RankedBlogger>>;

// (C_N - N) / (N (K - 1)) with C_N the distinct bloggers among all top-N lists.
double idr(const TopicRankings& rankings, std::size_t n);

// Full per-topic influencer rankings from an iOLAP model.
TopicRankings iolap_rankings(const IolapModel& model);
// Per-community rankings by y_jk b_j from a PCL or PCL-DC model.
TopicRankings community_rankings(const Eigen::VectorXd& popularity, const Eigen::MatrixXd& memberships);
// Per PLSA topic t: sum_k P(k|t) y_Bk b_B / sum_j y_jk b_j with
// P(k|t) proportional to sum_w p(w|t) p(w|k).
TopicRankings pcldc_topic_rankings(const PcldcModel& model, const TopicModel& topics);

struct TestQuery {
  std::uint32_t source = 0;  // A, local index
  std::uint32_t target = 0;  // B, the held-out influencer
  std::vector<TermId> keywords;  // W_AB, ascending
};

struct TrainTestSplit {
  BloggerGraph train;              // same node set as the input graph
  std::vector<ImplicitLink> train_links;  // post-level links behind train edges
  std::vector<TestQuery> test;
};

// Every node with out-degree >= 2 loses one uniformly chosen out-edge to the
// test set; W_AB is the union of shared terms over the post links behind it.
TrainTestSplit split_train_test(const BloggerGraph& graph, std::span<const ImplicitLink> links,
                                std::span<const TermVector> post_vectors, Rng& rng);

// A itself plus its training out-neighbours.
std::vector<bool> bookmark_exclusions(const BloggerGraph& train, std::uint32_t source);

// Candidates are nodes not excluded; scores are normalized over candidates.
std::vector<RankedBlogger> top_candidates(const Eigen::VectorXd& scores,
                                          const std::vector<bool>& exclude, std::size_t n);

// sum_k P(B | t_k) P(t_k | W); naive-Bayes topic posterior with the PLSA prior.
std::vector<RankedBlogger> recommend_tg(const IolapModel& iolap, const TopicModel& topics,
                                        std::span<const TermId> keywords, std::size_t n,
                                        const std::vector<bool>& exclude);

// sum_{w in W} [C x X x Y x Z]_{A, B, w}.
std::vector<RankedBlogger> recommend_iolap(const IolapModel& model, std::uint32_t source,
                                           std::span<const TermId> keywords, std::size_t n,
                                           const std::vector<bool>& exclude);

// sum_k P(k | A, W) y_Bk b_B / sum_{candidates} y_jk b_j.
std::vector<RankedBlogger> recommend_pcldc(const PcldcModel& model, std::uint32_t source,
                                           std::span<const TermId> keywords, std::size_t n,
                                           const std::vector<bool>& exclude);

// Same ratio with P(k | A) = y_Ak; keywords are ignored.
std::vector<RankedBlogger> recommend_pcl(const PclModel& model, std::uint32_t source, std::size_t n,
                                         const std::vector<bool>& exclude);

using Recommender =
    std::function<std::vector<RankedBlogger>(const TestQuery&, std::size_t, const std::vector<bool>&)>;

// Fraction of test queries whose target is in the top n. Unanswerable
// queries count as misses.
double recall_at_n(const TrainTestSplit& split, const Recommender& recommender, std::size_t n);

// recall_at_n for n = 1..max_n from a single pass.
std::vector<double> recall_curve(const TrainTestSplit& split, const Recommender& recommender,
                                 std::size_t max_n);

// Models fitted on a training split, for the four recommenders.
struct RecommenderSuite {
  TopicModel topics;
  IolapModel iolap;
  PcldcModel pcldc;
  PclModel pcl;
};

struct SuiteConfig {
  PlsaConfig plsa;
  IolapConfig iolap;
  PclConfig pcl;
};

// PLSA on the posts of the training links, the tensor on the training links,
// both block models on the training graph.
RecommenderSuite fit_recommenders(const TrainTestSplit& split, const Corpus& corpus,
                                  std::span<const TermVector> post_vectors, std::size_t n_terms,
                                  const SuiteConfig& config);

struct MethodCurve {
  std::string method;
  std::vector<double> recall;  // index n-1 holds recall@n
};

// Curves for iolap, tg, pcldc, pcl in that order.
std::vector<MethodCurve> evaluate_recommenders(const TrainTestSplit& split,
                                               const RecommenderSuite& suite, std::size_t max_n);

// `method<TAB>N<TAB>recall`.
void write_recall_tsv(std::ostream& out, std::span<const MethodCurve> curves);

}  // namespace blogflux
