// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "blogflux/corpus.hpp"
#include "blogflux/implicit.hpp"
#include "blogflux/text.hpp"

namespace blogflux {

using ContentMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// One L2-normalized row per node: summed term counts over the blogger's posts.
ContentMatrix blogger_content(std::span<const BloggerId> nodes, const Corpus& corpus,
                              std::span<const TermVector> post_vectors, std::size_t n_terms);

struct PclConfig {
  std::size_t communities = 10;
  std::size_t max_iters = 100;
  double tolerance = 1e-7;  // relative objective change
  std::size_t gradient_steps = 5;
  double l2 = 0.0;          // penalty 0.5 * l2 * |W|^2
  double init_scale = 1.0;  // stddev of the initial W entries
  std::uint64_t seed = 1;
};

// Edge (i -> j) with weight s_ij is explained as
//   sum_k y_ik * y_jk b_j / sum_{j' in out(i)} y_j'k b_j'.
// Nodes without in-links keep their initial popularity; nodes without any
// link contribute nothing.
double link_objective(const BloggerGraph& graph, const Eigen::VectorXd& popularity,
                      const Eigen::MatrixXd& memberships);

// y_m = softmax(W^T x_m), rows of the result.
Eigen::MatrixXd softmax_memberships(const ContentMatrix& content, const Eigen::MatrixXd& weights);

double pcldc_objective(const BloggerGraph& graph, const ContentMatrix& content,
                       const Eigen::MatrixXd& weights, const Eigen::VectorXd& popularity,
                       double l2 = 0.0);

// Analytic d objective / d W.
Eigen::MatrixXd pcldc_gradient(const BloggerGraph& graph, const ContentMatrix& content,
                               const Eigen::MatrixXd& weights, const Eigen::VectorXd& popularity,
                               double l2 = 0.0);

struct PcldcModel {
  Eigen::VectorXd popularity;  // b
  Eigen::MatrixXd W;           // terms x K
  Eigen::MatrixXd Y;           // nodes x K
  Eigen::MatrixXd term_given_community;  // community_term_distribution(W)
  std::vector<double> objective_trace;
};

struct PclModel {
  Eigen::VectorXd popularity;
  Eigen::MatrixXd Y;
  std::vector<double> objective_trace;
};

PcldcModel fit_pcldc(const BloggerGraph& graph, const ContentMatrix& content,
                     const PclConfig& config);
PclModel fit_pcl(const BloggerGraph& graph, const PclConfig& config);

// p(w | k): per-term community softmax renormalized over the vocabulary.
Eigen::MatrixXd community_term_distribution(const Eigen::MatrixXd& weights);

// sum over (A, B) of log sum_k y_Ak y_Bk b_B / sum_{j != A} y_jk b_j.
double heldout_loglik(const Eigen::VectorXd& popularity, const Eigen::MatrixXd& memberships,
                      std::span<const std::pair<std::uint32_t, std::uint32_t>> pairs);

void write_pcldc_model(std::ostream& out, const PcldcModel& model,
                       const std::vector<std::string>& node_labels, const Vocabulary& vocab);
PcldcModel read_pcldc_model(std::istream& in);
void write_pcl_model(std::ostream& out, const PclModel& model,
                     const std::vector<std::string>& node_labels);
PclModel read_pcl_model(std::istream& in);

}  // namespace blogflux
