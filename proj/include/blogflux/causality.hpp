// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "blogflux/common.hpp"
#include "blogflux/corpus.hpp"
#include "blogflux/implicit.hpp"
#include "blogflux/rng.hpp"

namespace blogflux {

inline constexpr double kOneSidedCritical = 2.326;  // p = 0.01
inline constexpr double kTwoSidedCritical = 2.576;  // p = 0.01

enum class Face : std::uint8_t { kTail = 0, kHead = 1 };

struct Coin {
  int bucket = 0;  // 1-based hour bucket of the link gap
  Face face = Face::kTail;
};

struct CoinSeries {
  PostId anchor = 0;
  std::vector<Coin> coins;
  double median_sim = 0;
  std::size_t ties = 0;  // similarities equal to the median
};

// Median with the even-size convention of averaging the middle pair.
double median(std::vector<double> values);

// Similarity above the anchor's median is a head, below is a tail. Values
// equal to the median are assigned at random so that heads and tails differ
// by at most one. Requires at least two similarities.
CoinSeries make_coins(PostId anchor, std::span<const double> sims,
                      std::span<const std::int64_t> gaps, Rng& rng);

struct ZTestConfig {
  std::size_t min_bucket_n = 30;
  int buckets = 12;
};

struct BucketStat {
  int bucket = 0;
  std::size_t n = 0;
  std::size_t heads = 0;
  double xbar = 0;
  double sigma = 0;  // sqrt(xbar (1 - xbar))
  double z = 0;
  bool available = false;  // n >= min_bucket_n
  bool reject_two_sided = false;
  bool reject_one_sided = false;
};

// z = (xbar - 0.5) / (sigma / sqrt(n)) for one bucket of pooled coins.
BucketStat bucket_statistic(int bucket, std::size_t n, std::size_t heads,
                            std::size_t min_bucket_n = 30);

struct ZReport {
  std::vector<BucketStat> buckets;  // index h-1 holds bucket h
  std::size_t series_used = 0;
  std::size_t series_skipped = 0;
  std::size_t coins = 0;
};

ZReport z_test(std::span<const CoinSeries> series, const ZTestConfig& config = {});

enum class CoinAnchor { kReadingPost, kReadPost };

// One coin series per anchor post (q for the forward test, p for the
// reversed one) over links carrying a similarity. Anchors with fewer than two
// such links are skipped and counted.
std::vector<CoinSeries> build_coin_series(std::span<const ImplicitLink> links, CoinAnchor anchor,
                                          Rng& rng, std::size_t* skipped = nullptr);

ZReport forward_z_test(const ImplicitNetwork& net, Rng& rng, const ZTestConfig& config = {});
ZReport reversed_z_test(const ImplicitNetwork& net, Rng& rng, const ZTestConfig& config = {});

// `bucket n heads xbar sigma z flag`; flag is one of NA, two_sided, one_sided, ns.
void write_zreport_tsv(std::ostream& out, const ZReport& report);

struct LinkVerdict {
  bool passed_time = false;
  bool passed_content = false;
};

// Per implicit link: gap <= tau_hours and similarity strictly above the
// median over the same q's window links.
std::vector<LinkVerdict> judge_links(const ImplicitNetwork& net, int tau_hours = 2);

struct InfluenceNetwork {
  std::vector<ImplicitLink> links;  // passed both criteria, sorted by (q, p)
  int tau_hours = 2;
  int window_hours = 12;
  LinkCounts counts;
};

InfluenceNetwork extract_influence(const ImplicitNetwork& net, int tau_hours = 2);

// Link export (see write_links_tsv) plus `passed_time<TAB>passed_content` as 0/1.
void write_influence_tsv(std::ostream& out, const Corpus& corpus,
                         std::span<const ImplicitLink> links,
                         std::span<const LinkVerdict> verdicts = {});

struct RankShift {
  std::string item;
  std::size_t rank_all = 0;
  std::size_t rank_influence = 0;

  bool operator==(const RankShift&) const = default;
};

// Dense 1-based ranks by descending count (ties lexicographic). Items absent
// from one side get that side's item count + 1.
std::vector<RankShift> rank_shift(const std::map<std::string, std::size_t>& all,
                                  const std::map<std::string, std::size_t>& influence);

// Theme frequencies over all posts vs. over influenced posts (distinct q).
std::vector<RankShift> theme_rank_shift(const Corpus& corpus, std::span<const ImplicitLink> influence);

// Access counts per author in the implicit vs. the influence network.
std::vector<RankShift> blogger_rank_shift(const Corpus& corpus,
                                          std::span<const ImplicitLink> implicit,
                                          std::span<const ImplicitLink> influence);

void write_rank_shift_tsv(std::ostream& out, std::span<const RankShift> rows);

}  // namespace blogflux
