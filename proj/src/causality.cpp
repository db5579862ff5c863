// Apache License, Version 2.0, refer to LICENSE.txt

#include "blogflux/causality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "blogflux/tsv.hpp"

namespace blogflux {

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median of an empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return (lower + upper) / 2.0;
}

CoinSeries make_coins(PostId anchor, std::span<const double> sims,
                      std::span<const std::int64_t> gaps, Rng& rng) {
  if (sims.size() != gaps.size()) throw InvalidArgument("sims and gaps differ in length");
  if (sims.size() < 2) throw InvalidArgument("a coin series needs at least two links");

  CoinSeries s;
  s.anchor = anchor;
  s.median_sim = median(std::vector<double>(sims.begin(), sims.end()));
  s.coins.resize(sims.size());
  std::vector<std::size_t> ties;
  std::size_t above = 0;
  for (std::size_t i = 0; i < sims.size(); ++i) {
    s.coins[i].bucket = gap_bucket(gaps[i]);
    if (sims[i] > s.median_sim) {
      s.coins[i].face = Face::kHead;
      ++above;
    } else if (sims[i] < s.median_sim) {
      s.coins[i].face = Face::kTail;
    } else {
      ties.push_back(i);
    }
  }
  s.ties = ties.size();
  if (ties.empty()) return s;

  // At most floor(N/2) values lie strictly above or strictly below the
  // median, so the tie count can always absorb the balance.
  const std::size_t n = sims.size();
  std::size_t target_heads = n / 2;
  if (n % 2 == 1 && rng.coin()) ++target_heads;
  const std::size_t tie_heads =
      std::min(ties.size(), target_heads > above ? target_heads - above : std::size_t{0});
  rng.shuffle(ties);
  for (std::size_t i = 0; i < ties.size(); ++i) {
    s.coins[ties[i]].face = i < tie_heads ? Face::kHead : Face::kTail;
  }
  return s;
}

BucketStat bucket_statistic(int bucket, std::size_t n, std::size_t heads, std::size_t min_bucket_n) {
  BucketStat b;
  b.bucket = bucket;
  b.n = n;
  b.heads = heads;
  if (n == 0) {
    b.xbar = b.sigma = b.z = std::numeric_limits<double>::quiet_NaN();
    return b;
  }
  b.xbar = static_cast<double>(heads) / static_cast<double>(n);
  b.sigma = std::sqrt(b.xbar * (1.0 - b.xbar));
  const double diff = b.xbar - 0.5;
  if (b.sigma > 0) {
    b.z = diff / (b.sigma / std::sqrt(static_cast<double>(n)));
  } else {
    b.z = diff > 0 ? std::numeric_limits<double>::infinity()
                   : -std::numeric_limits<double>::infinity();
  }
  b.available = n >= min_bucket_n;
  if (b.available) {
    b.reject_two_sided = std::abs(b.z) > kTwoSidedCritical;
    b.reject_one_sided = b.z > kOneSidedCritical;
  }
  return b;
}

ZReport z_test(std::span<const CoinSeries> series, const ZTestConfig& config) {
  std::vector<std::size_t> n(static_cast<std::size_t>(config.buckets), 0);
  std::vector<std::size_t> heads(n.size(), 0);
  ZReport r;
  for (const auto& s : series) {
    ++r.series_used;
    for (const auto& c : s.coins) {
      if (c.bucket < 1 || c.bucket > config.buckets) continue;
      const auto h = static_cast<std::size_t>(c.bucket - 1);
      ++n[h];
      if (c.face == Face::kHead) ++heads[h];
      ++r.coins;
    }
  }
  for (std::size_t h = 0; h < n.size(); ++h) {
    r.buckets.push_back(
        bucket_statistic(static_cast<int>(h + 1), n[h], heads[h], config.min_bucket_n));
  }
  return r;
}

std::vector<CoinSeries> build_coin_series(std::span<const ImplicitLink> links, CoinAnchor anchor,
                                          Rng& rng, std::size_t* skipped) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < links.size(); ++i) {
    if (links[i].similarity) order.push_back(i);
  }
  auto key = [&](std::size_t i) {
    return anchor == CoinAnchor::kReadingPost ? std::make_pair(links[i].q, links[i].p)
                                              : std::make_pair(links[i].p, links[i].q);
  };
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });

  std::vector<CoinSeries> out;
  std::size_t skip = 0;
  std::vector<double> sims;
  std::vector<std::int64_t> gaps;
  for (std::size_t begin = 0; begin < order.size();) {
    const PostId id = key(order[begin]).first;
    std::size_t end = begin;
    sims.clear();
    gaps.clear();
    while (end < order.size() && key(order[end]).first == id) {
      sims.push_back(*links[order[end]].similarity);
      gaps.push_back(links[order[end]].gap_seconds);
      ++end;
    }
    if (sims.size() < 2) {
      ++skip;
    } else {
      out.push_back(make_coins(id, sims, gaps, rng));
    }
    begin = end;
  }
  if (skipped) *skipped = skip;
  return out;
}

namespace {

ZReport run_test(const ImplicitNetwork& net, CoinAnchor anchor, Rng& rng, const ZTestConfig& config) {
  std::size_t skipped = 0;
  auto series = build_coin_series(net.links, anchor, rng, &skipped);
  ZReport r = z_test(series, config);
  r.series_skipped = skipped;
  return r;
}

}  // namespace

ZReport forward_z_test(const ImplicitNetwork& net, Rng& rng, const ZTestConfig& config) {
  return run_test(net, CoinAnchor::kReadingPost, rng, config);
}

ZReport reversed_z_test(const ImplicitNetwork& net, Rng& rng, const ZTestConfig& config) {
  return run_test(net, CoinAnchor::kReadPost, rng, config);
}

void write_zreport_tsv(std::ostream& out, const ZReport& report) {
  out << "bucket\tn\theads\txbar\tsigma\tz\tflag\n";
  for (const auto& b : report.buckets) {
    const char* flag = !b.available       ? "NA"
                       : b.reject_two_sided ? (b.reject_one_sided ? "one_sided" : "two_sided")
                                            : "ns";
    out << b.bucket << '\t' << b.n << '\t' << b.heads << '\t' << tsv::format_double(b.xbar)
        << '\t' << tsv::format_double(b.sigma) << '\t' << tsv::format_double(b.z) << '\t' << flag
        << '\n';
  }
}

std::vector<LinkVerdict> judge_links(const ImplicitNetwork& net, int tau_hours) {
  if (tau_hours < 1) throw InvalidArgument("tau_hours must be >= 1");
  const std::int64_t tau = tau_hours * kSecondsPerHour;
  std::vector<LinkVerdict> verdicts(net.links.size());
  std::vector<double> sims;
  for (std::size_t begin = 0; begin < net.links.size();) {
    std::size_t end = begin;
    sims.clear();
    while (end < net.links.size() && net.links[end].q == net.links[begin].q) {
      if (net.links[end].similarity) sims.push_back(*net.links[end].similarity);
      ++end;
    }
    const double med = sims.empty() ? 0.0 : median(sims);
    for (std::size_t i = begin; i < end; ++i) {
      const auto& l = net.links[i];
      verdicts[i].passed_time = l.gap_seconds <= tau;
      verdicts[i].passed_content = l.similarity && *l.similarity > med;
    }
    begin = end;
  }
  return verdicts;
}

InfluenceNetwork extract_influence(const ImplicitNetwork& net, int tau_hours) {
  InfluenceNetwork out;
  out.tau_hours = tau_hours;
  out.window_hours = net.window_hours;
  const auto verdicts = judge_links(net, tau_hours);
  for (std::size_t i = 0; i < net.links.size(); ++i) {
    if (verdicts[i].passed_time && verdicts[i].passed_content) out.links.push_back(net.links[i]);
  }
  out.counts = count_links(out.links);
  return out;
}

void write_influence_tsv(std::ostream& out, const Corpus& corpus,
                         std::span<const ImplicitLink> links, std::span<const LinkVerdict> verdicts) {
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto& l = links[i];
    const bool t = verdicts.empty() || verdicts[i].passed_time;
    const bool c = verdicts.empty() || verdicts[i].passed_content;
    out << corpus.posts()[l.q].url << '\t' << corpus.posts()[l.p].url << '\t'
        << corpus.bloggers()[l.reader] << '\t' << corpus.bloggers()[l.author] << '\t'
        << l.gap_seconds << '\t' << (l.similarity ? tsv::format_double(*l.similarity) : "NA")
        << '\t' << int(t) << '\t' << int(c) << '\n';
  }
}

std::vector<RankShift> rank_shift(const std::map<std::string, std::size_t>& all,
                                  const std::map<std::string, std::size_t>& influence) {
  auto ranks = [](const std::map<std::string, std::size_t>& counts) {
    std::vector<std::pair<std::string, std::size_t>> v(counts.begin(), counts.end());
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    std::map<std::string, std::size_t> r;
    for (std::size_t i = 0; i < v.size(); ++i) r[v[i].first] = i + 1;
    return r;
  };
  const auto ra = ranks(all);
  const auto ri = ranks(influence);
  std::vector<RankShift> rows;
  auto lookup = [](const std::map<std::string, std::size_t>& r, const std::string& item) {
    auto it = r.find(item);
    return it == r.end() ? r.size() + 1 : it->second;
  };
  std::map<std::string, bool> items;
  for (const auto& [k, v] : ra) items[k] = true;
  for (const auto& [k, v] : ri) items[k] = true;
  for (const auto& [item, unused] : items) {
    rows.push_back({item, lookup(ra, item), lookup(ri, item)});
  }
  std::sort(rows.begin(), rows.end(), [](const RankShift& a, const RankShift& b) {
    return a.rank_all != b.rank_all ? a.rank_all < b.rank_all : a.item < b.item;
  });
  return rows;
}

std::vector<RankShift> theme_rank_shift(const Corpus& corpus, std::span<const ImplicitLink> influence) {
  std::map<std::string, std::size_t> all, infl;
  for (const auto& p : corpus.posts()) {
    for (const auto& t : p.themes) ++all[t];
  }
  std::vector<PostId> influenced;
  for (const auto& l : influence) influenced.push_back(l.q);
  std::sort(influenced.begin(), influenced.end());
  influenced.erase(std::unique(influenced.begin(), influenced.end()), influenced.end());
  for (auto q : influenced) {
    for (const auto& t : corpus.posts()[q].themes) ++infl[t];
  }
  return rank_shift(all, infl);
}

std::vector<RankShift> blogger_rank_shift(const Corpus& corpus,
                                          std::span<const ImplicitLink> implicit,
                                          std::span<const ImplicitLink> influence) {
  std::map<std::string, std::size_t> all, infl;
  for (const auto& l : implicit) ++all[corpus.bloggers()[l.author]];
  for (const auto& l : influence) ++infl[corpus.bloggers()[l.author]];
  return rank_shift(all, infl);
}

void write_rank_shift_tsv(std::ostream& out, std::span<const RankShift> rows) {
  out << "item\trank_all\trank_influence\n";
  for (const auto& r : rows) out << r.item << '\t' << r.rank_all << '\t' << r.rank_influence << '\n';
}

}  // namespace blogflux
