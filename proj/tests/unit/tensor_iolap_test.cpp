// Apache License, Version 2.0, refer to LICENSE.txt

#include <gtest/gtest.h>

#include <map>
#include <numeric>
#include <sstream>

#include "blogflux/iolap.hpp"
#include "blogflux/rng.hpp"
#include "blogflux/tensor.hpp"
#include "fixtures.hpp"

namespace bf = blogflux;

namespace {

bf::TermVector vec(std::vector<std::pair<bf::TermId, std::uint32_t>> e) {
  bf::TermVector v;
  v.entries = std::move(e);
  for (auto [t, c] : v.entries) v.token_count += c;
  return v;
}

bf::InfluenceTensor random_tensor(std::uint64_t seed, std::uint32_t bloggers, bf::TermId terms,
                                  double density = 0.4) {
  bf::Rng rng(seed);
  bf::InfluenceTensor t;
  t.nodes.resize(bloggers);
  std::iota(t.nodes.begin(), t.nodes.end(), 0);
  t.terms = terms;
  for (std::uint32_t i = 0; i < bloggers; ++i)
    for (std::uint32_t j = 0; j < bloggers; ++j)
      for (bf::TermId k = 0; k < terms; ++k)
        if (i != j && rng.uniform() < density) t.entries.push_back({i, j, k, double(1 + rng.index(5))});
  return t;
}

bool monotone(const std::vector<double>& t) {
  for (std::size_t i = 1; i < t.size(); ++i)
    if (t[i] < t[i - 1] - 1e-9 * std::abs(t[i - 1])) return false;
  return true;
}

Eigen::MatrixXd column_stochastic(std::uint64_t seed, int rows, int cols) {
  bf::Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = rng.uniform_open();
    m.col(c) /= m.col(c).sum();
  }
  return m;
}

}  // namespace

TEST(Tensor, OneTriplePerSharedTerm) {
  std::vector<bf::TermVector> v = {vec({{1, 2}, {2, 1}, {5, 1}}), vec({{1, 1}, {2, 3}}), vec({{1, 4}})};
  // q=0 by blogger 10 read p=1 by 20, twice via two posts; q=2 by 10 read p=1.
  std::vector<bf::ImplicitLink> links = {{0, 1, 10, 20, 5, 0.5}, {2, 1, 10, 20, 5, 0.5}};
  const auto t = bf::build_influence_tensor(links, v, 6);
  EXPECT_EQ(t.nodes, (std::vector<bf::BloggerId>{10, 20}));
  ASSERT_EQ(t.entries.size(), 2u);
  EXPECT_EQ(t.entries[0], (bf::TensorEntry{0, 1, 1, 2.0}));
  EXPECT_EQ(t.entries[1], (bf::TensorEntry{0, 1, 2, 1.0}));
  bf::TensorOptions tf;
  tf.tf_weighting = true;
  const auto w = bf::build_influence_tensor(links, v, 6, tf);
  EXPECT_DOUBLE_EQ(w.entries[0].count, 2.0 * 1 + 4.0 * 1);
}

TEST(Tensor, MatchesBruteForceEnumeration) {
  bf::Rng rng(21);
  std::vector<bf::TermVector> v;
  for (int p = 0; p < 30; ++p) {
    std::vector<std::pair<bf::TermId, std::uint32_t>> e;
    for (bf::TermId t = 0; t < 12; ++t)
      if (rng.uniform() < 0.3) e.emplace_back(t, 1 + rng.index(3));
    v.push_back(vec(e));
  }
  std::vector<bf::ImplicitLink> links;
  for (int i = 0; i < 60; ++i) {
    const bf::PostId q = rng.index(30), p = rng.index(30);
    links.push_back({q, p, bf::BloggerId(q % 7), bf::BloggerId(p % 7 == q % 7 ? (p + 1) % 7 : p % 7), 1, 0.5});
  }
  const auto t = bf::build_influence_tensor(links, v, 12);
  std::map<std::tuple<bf::BloggerId, bf::BloggerId, bf::TermId>, double> oracle;
  double mass = 0;
  std::size_t empty = 0;
  for (const auto& l : links) {
    bool any = false;
    for (bf::TermId k = 0; k < 12; ++k)
      if (v[l.q].count(k) > 0 && v[l.p].count(k) > 0) {
        oracle[{l.reader, l.author, k}] += 1;
        mass += 1;
        any = true;
      }
    empty += !any;
  }
  ASSERT_EQ(t.entries.size(), oracle.size());
  for (const auto& e : t.entries) EXPECT_EQ(oracle.at({t.nodes[e.i], t.nodes[e.j], e.k}), e.count);
  EXPECT_DOUBLE_EQ(t.total(), mass);
  EXPECT_EQ(t.links_without_terms, empty);
}

TEST(Iolap, RankOneIsModeMarginals) {
  const auto t = random_tensor(1, 5, 6);
  Eigen::VectorXd mi = Eigen::VectorXd::Zero(5), mj = mi, mk = Eigen::VectorXd::Zero(6);
  for (const auto& e : t.entries) {
    mi[e.i] += e.count;
    mj[e.j] += e.count;
    mk[e.k] += e.count;
  }
  bf::IolapConfig cfg;
  cfg.influenced_groups = cfg.influencer_groups = 1;
  const auto m = bf::fit_iolap(t, 1, cfg);
  EXPECT_LE((m.X.col(0) - mi / t.total()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((m.Y.col(0) - mj / t.total()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((m.Z.col(0) - mk / t.total()).cwiseAbs().maxCoeff(), 1e-12);
  double ll = 0;
  for (const auto& e : t.entries) ll += e.count * std::log(m.X(e.i, 0) * m.Y(e.j, 0) * m.Z(e.k, 0));
  EXPECT_NEAR(bf::iolap_loglik(t, m), ll, 1e-9 * std::abs(ll));
}

TEST(Iolap, StochasticFactorsAndMonotoneTrace) {
  const auto t = random_tensor(2, 8, 10);
  bf::IolapConfig cfg;
  cfg.influenced_groups = 3;
  cfg.influencer_groups = 2;
  cfg.max_iters = 80;
  cfg.tolerance = 0;
  for (bool fixed : {true, false}) {
    const auto m = fixed ? bf::fit_iolap(t, column_stochastic(3, 10, 4), cfg) : bf::fit_iolap(t, 4, cfg);
    EXPECT_TRUE(monotone(m.loglik_trace));
    EXPECT_NEAR(std::accumulate(m.core.begin(), m.core.end(), 0.0), 1.0, 1e-8);
    for (int a = 0; a < 3; ++a) EXPECT_NEAR(m.X.col(a).sum(), 1.0, 1e-8);
    for (int b = 0; b < 2; ++b) EXPECT_NEAR(m.Y.col(b).sum(), 1.0, 1e-8);
    for (int c = 0; c < 4; ++c) EXPECT_NEAR(m.Z.col(c).sum(), 1.0, 1e-8);
    EXPECT_TRUE((m.X.array() >= 0).all() && (m.Y.array() >= 0).all());
  }
}

TEST(Iolap, FixedTopicsAreNeverTouched) {
  const auto t = random_tensor(4, 6, 8);
  const Eigen::MatrixXd z = column_stochastic(5, 8, 3);
  bf::IolapConfig cfg;
  cfg.influenced_groups = cfg.influencer_groups = 2;
  const auto m = bf::fit_iolap(t, z, cfg);
  EXPECT_TRUE(m.z_fixed);
  EXPECT_TRUE(m.Z == z);
  Eigen::MatrixXd bad = z;
  bad(0, 0) += 0.1;
  EXPECT_THROW(bf::fit_iolap(t, bad, cfg), bf::InvalidArgument);
}

TEST(Iolap, LoglikIsEquivariantUnderBloggerPermutation) {
  const auto t = random_tensor(6, 5, 4);
  bf::IolapConfig cfg;
  cfg.influenced_groups = cfg.influencer_groups = 2;
  const auto m = bf::fit_iolap(t, 2, cfg);
  const std::vector<std::uint32_t> perm = {3, 0, 4, 1, 2};
  bf::InfluenceTensor pt = t;
  for (auto& e : pt.entries) {
    e.i = perm[e.i];
    e.j = perm[e.j];
  }
  std::sort(pt.entries.begin(), pt.entries.end(), [](const auto& a, const auto& b) {
    return std::tuple(a.i, a.j, a.k) < std::tuple(b.i, b.j, b.k);
  });
  bf::IolapModel pm = m;
  for (int r = 0; r < 5; ++r) {
    pm.X.row(perm[r]) = m.X.row(r);
    pm.Y.row(perm[r]) = m.Y.row(r);
  }
  EXPECT_NEAR(bf::iolap_loglik(pt, pm), bf::iolap_loglik(t, m), 1e-9);
}

TEST(Iolap, RestartsKeepTheBest) {
  const auto t = random_tensor(7, 6, 5);
  bf::IolapConfig cfg;
  cfg.influenced_groups = cfg.influencer_groups = 2;
  cfg.restarts = 1;
  const double one = bf::fit_iolap(t, 2, cfg).loglik_trace.back();
  cfg.restarts = 6;
  EXPECT_GE(bf::fit_iolap(t, 2, cfg).loglik_trace.back(), one - 1e-9);
}

TEST(Iolap, ThreadCountDoesNotChangeResult) {
  const auto t = random_tensor(8, 9, 7);
  bf::IolapConfig cfg;
  cfg.influenced_groups = 2;
  cfg.influencer_groups = 3;
  const auto a = bf::fit_iolap(t, 3, cfg);
  cfg.threads = 3;
  const auto b = bf::fit_iolap(t, 3, cfg);
  EXPECT_EQ(a.loglik_trace, b.loglik_trace);
  EXPECT_TRUE(a.X == b.X);
}

TEST(Iolap, RejectsEmptyTensor) {
  bf::InfluenceTensor t;
  t.nodes = {0, 1};
  t.terms = 3;
  EXPECT_THROW(bf::fit_iolap(t, 2, {}), bf::InvalidArgument);
}

TEST(Iolap, TopicInfluencersSumToOneAndFollowY) {
  const auto t = random_tensor(9, 6, 5);
  bf::IolapConfig cfg;
  cfg.influenced_groups = 2;
  cfg.influencer_groups = 1;
  const auto m = bf::fit_iolap(t, 2, cfg);
  const auto p = bf::iolap_topic_distribution(m, 0);
  EXPECT_NEAR(p.sum(), 1.0, 1e-12);
  const auto top = bf::iolap_topic_influencers(m, 1, 6);
  ASSERT_EQ(top.size(), 6u);
  for (std::size_t r = 1; r < top.size(); ++r) {
    // J = 1: ranking is the order of the single Y column.
    EXPECT_GE(m.Y(top[r - 1].first, 0), m.Y(top[r].first, 0));
  }
}

TEST(Iolap, ModelRoundTrip) {
  const auto t = random_tensor(10, 4, 3);
  bf::IolapConfig cfg;
  cfg.influenced_groups = 2;
  cfg.influencer_groups = 3;
  const auto m = bf::fit_iolap(t, 2, cfg);
  std::vector<bf::BlogPost> posts;
  for (int b = 0; b < 4; ++b) posts.push_back(bf::testing::make_post("ip", 0, "u" + std::to_string(b), "/" + std::to_string(b)));
  bf::Corpus corpus(posts, {});
  const bf::Vocabulary vocab({"a", "b", "c"}, {1, 1, 1}, 3);
  std::stringstream io;
  bf::write_iolap_model(io, m, t, corpus, vocab);
  const auto back = bf::read_iolap_model(io);
  EXPECT_EQ(back.I, 2u);
  EXPECT_EQ(back.J, 3u);
  EXPECT_EQ(back.core, m.core);
  EXPECT_TRUE(back.X == m.X && back.Y == m.Y && back.Z == m.Z);
  EXPECT_EQ(back.z_fixed, m.z_fixed);
}
