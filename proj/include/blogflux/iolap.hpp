// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <istream>
#include <ostream>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "blogflux/corpus.hpp"
#include "blogflux/tensor.hpp"
#include "blogflux/text.hpp"

namespace blogflux {

struct IolapConfig {
  std::size_t influenced_groups = 10;  // I
  std::size_t influencer_groups = 10;  // J
  std::size_t max_iters = 200;
  double tolerance = 1e-7;  // relative log-likelihood change
  std::uint64_t seed = 1;
  std::size_t restarts = 1;  // best final log-likelihood wins
  int threads = 1;
};

// P(i, j, k) = sum_abc C[a,b,c] X[i,a] Y[j,b] Z[k,c].
struct IolapModel {
  std::size_t I = 0, J = 0, K = 0;
  std::vector<double> core;  // (a * J + b) * K + c, sums to 1
  Eigen::MatrixXd X;         // bloggers x I, influenced side, columns sum to 1
  Eigen::MatrixXd Y;         // bloggers x J, influencing side, columns sum to 1
  Eigen::MatrixXd Z;         // terms x K, columns sum to 1
  bool z_fixed = true;
  std::vector<double> loglik_trace;

  double c(std::size_t a, std::size_t b, std::size_t k) const { return core[(a * J + b) * K + k]; }
};

// Z is copied from `topics` (terms x K, column-stochastic) and never updated.
IolapModel fit_iolap(const InfluenceTensor& tensor, const Eigen::MatrixXd& topics,
                     const IolapConfig& config);
// Z is learned from a Dirichlet(1) start.
IolapModel fit_iolap(const InfluenceTensor& tensor, std::size_t topics, const IolapConfig& config);

double iolap_loglik(const InfluenceTensor& tensor, const IolapModel& model);

// P(j | topic t) = sum_b Y[j,b] pi(b|t), pi(b|t) proportional to sum_a C[a,b,t].
Eigen::VectorXd iolap_topic_distribution(const IolapModel& model, std::size_t t);

// Top n (local blogger index, score) for 0-based topic t, ties by index.
std::vector<std::pair<std::uint32_t, double>> iolap_topic_influencers(const IolapModel& model,
                                                                      std::size_t t, std::size_t n);

void write_iolap_model(std::ostream& out, const IolapModel& model, const InfluenceTensor& tensor,
                       const Corpus& corpus, const Vocabulary& vocab);
IolapModel read_iolap_model(std::istream& in);

}  // namespace blogflux
