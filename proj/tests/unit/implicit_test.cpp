// Apache License, Version 2.0, refer to LICENSE.txt

#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "blogflux/implicit.hpp"
#include "blogflux/rng.hpp"
#include "fixtures.hpp"

namespace bf = blogflux;
using bf::testing::make_access;
using bf::testing::make_post;
using bf::testing::t0;

TEST(ImplicitLinks, WindowBoundaries) {
  const auto t = t0();
  bf::Corpus c({make_post("ipB", t - 86400, "bob", "/bob/1.html"),
                make_post("ipA", t + 5400, "alice", "/alice/1.html"),
                make_post("ipA", t + 13 * 3600, "alice", "/alice/2.html"),
                make_post("ipA", t + 12 * 3600, "alice", "/alice/3.html")},
               {make_access("ipA", t, "/bob/1.html")});
  const auto net = bf::build_implicit_links(c, 12);
  // 1.5 h and exactly 12 h are inside the window; 13 h is not.
  ASSERT_EQ(net.links.size(), 2u);
  EXPECT_EQ(net.links[0].gap_seconds, 5400);
  EXPECT_EQ(net.links[1].gap_seconds, 12 * 3600);
}

TEST(ImplicitLinks, RepeatedClicksKeepSmallestGap) {
  const auto t = t0();
  bf::Corpus c({make_post("ipB", t - 86400, "bob", "/bob/1.html"),
                make_post("ipA", t + 7200, "alice", "/alice/1.html")},
               {make_access("ipA", t, "/bob/1.html"), make_access("ipA", t + 3600, "/bob/1.html")});
  const auto net = bf::build_implicit_links(c);
  ASSERT_EQ(net.links.size(), 1u);
  EXPECT_EQ(net.links[0].gap_seconds, 3600);
}

TEST(ImplicitLinks, OwnPostsAndLaterClicksDoNotLink) {
  const auto t = t0();
  bf::Corpus c({make_post("ipA", t - 100, "alice", "/alice/0.html"),
                make_post("ipB", t - 86400, "bob", "/bob/1.html"),
                make_post("ipA", t + 60, "alice", "/alice/1.html")},
               {make_access("ipA", t, "/alice/0.html"), make_access("ipA", t + 120, "/bob/1.html")});
  EXPECT_TRUE(bf::build_implicit_links(c).links.empty());
}

// Every (post, click) pair checked directly.
std::map<std::pair<bf::PostId, bf::PostId>, std::int64_t> brute_force(const bf::Corpus& c, int window) {
  std::map<std::pair<bf::PostId, bf::PostId>, std::int64_t> out;
  for (bf::PostId q = 0; q < c.posts().size(); ++q) {
    for (const auto& a : c.accesses()) {
      auto p = c.find_post(a.request);
      if (!p) continue;
      const auto owners = c.owners_of_ip(a.hashed_ip);
      const auto reader = c.author_of(q);
      if (std::find(owners.begin(), owners.end(), reader) == owners.end()) continue;
      if (c.author_of(*p) == reader) continue;
      const auto gap = c.posts()[q].upload_ts - a.access_ts;
      if (gap <= 0 || gap > window * 3600) continue;
      auto [it, fresh] = out.emplace(std::pair(q, *p), gap);
      if (!fresh) it->second = std::min(it->second, gap);
    }
  }
  return out;
}

TEST(ImplicitLinks, MatchBruteForceEnumeration) {
  bf::Rng rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<bf::BlogPost> posts;
    std::vector<bf::AccessRecord> accesses;
    const int bloggers = 6;
    for (int i = 0; i < 60; ++i) {
      const auto b = rng.index(bloggers);
      const auto ip = "ip" + std::to_string(b) + (rng.uniform() < 0.2 ? "x" : "");
      posts.push_back(make_post(ip, t0() + bf::Timestamp(rng.index(3 * 86400)), "u" + std::to_string(b),
                                "/p" + std::to_string(i)));
    }
    for (int i = 0; i < 400; ++i) {
      const auto b = rng.index(bloggers);
      accesses.push_back(make_access("ip" + std::to_string(b), t0() + bf::Timestamp(rng.index(3 * 86400)),
                                     "/p" + std::to_string(rng.index(60))));
    }
    bf::Corpus c(posts, accesses);
    const auto net = bf::build_implicit_links(c, 12);
    const auto oracle = brute_force(c, 12);
    ASSERT_EQ(net.links.size(), oracle.size());
    for (const auto& l : net.links) {
      EXPECT_EQ(oracle.at({l.q, l.p}), l.gap_seconds);
      EXPECT_EQ(l.reader, c.author_of(l.q));
      EXPECT_EQ(l.author, c.author_of(l.p));
    }
    EXPECT_TRUE(std::is_sorted(net.links.begin(), net.links.end(), [](const auto& a, const auto& b) {
      return std::pair(a.q, a.p) < std::pair(b.q, b.p);
    }));
  }
}

TEST(GapBuckets, HourlyRightClosed) {
  EXPECT_EQ(bf::gap_bucket(1), 1);
  EXPECT_EQ(bf::gap_bucket(3600), 1);
  EXPECT_EQ(bf::gap_bucket(3601), 2);
  std::vector<bf::ImplicitLink> links(3);
  links[0].gap_seconds = 10;
  links[1].gap_seconds = 7200;
  links[2].gap_seconds = 50 * 3600;
  EXPECT_EQ(bf::gap_histogram(links, 3), (std::vector<std::size_t>{1, 1, 0}));
}

TEST(Similarity, ShortPostsGetNone) {
  std::vector<bf::TermVector> v(2);
  v[0] = {{{0, 5}, {1, 5}}, 10};
  v[1] = {{{0, 3}}, 3};
  std::vector<bf::ImplicitLink> links = {{0, 1, 0, 1, 60, std::nullopt}};
  bf::annotate_similarity(links, v, 3);
  ASSERT_TRUE(links[0].similarity);
  EXPECT_NEAR(*links[0].similarity, 5.0 / std::sqrt(50.0), 1e-15);
  bf::annotate_similarity(links, v, 4);
  EXPECT_FALSE(links[0].similarity);
}

TEST(Projection, WeightsCountPostLinks) {
  std::vector<bf::ImplicitLink> links = {
      {0, 5, 3, 7, 1, {}}, {1, 5, 3, 7, 1, {}}, {2, 6, 7, 3, 1, {}}, {4, 5, 9, 7, 1, {}}};
  const auto g = bf::blogger_projection(links);
  EXPECT_EQ(g.nodes, (std::vector<bf::BloggerId>{3, 7, 9}));
  ASSERT_EQ(g.edges.size(), 3u);
  EXPECT_EQ(g.edges[0], (bf::WeightedEdge{0, 1, 2.0}));
  EXPECT_EQ(g.edges[1], (bf::WeightedEdge{1, 0, 1.0}));
  EXPECT_EQ(g.edges[2], (bf::WeightedEdge{2, 1, 1.0}));
  EXPECT_EQ(g.out_offsets(), (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_DOUBLE_EQ(g.total_weight(), 4.0);
  EXPECT_THROW(bf::blogger_projection(links, {3, 7}), bf::InvalidArgument);
}

TEST(LinksTsv, RoundTrip) {
  bf::Corpus c({make_post("a", 0, "u1", "/x"), make_post("b", 0, "u2", "/y")}, {});
  std::vector<bf::ImplicitLink> links = {{0, 1, 0, 1, 42, 0.25}, {1, 0, 1, 0, 7, std::nullopt}};
  std::stringstream io;
  bf::write_links_tsv(io, c, links);
  EXPECT_EQ(bf::read_links_tsv(io, c), links);
}
