// Apache License, Version 2.0, refer to LICENSE.txt

#include "blogflux/implicit.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

#include "blogflux/tsv.hpp"

namespace blogflux {

LinkCounts count_links(std::span<const ImplicitLink> links) {
  std::set<PostId> posts;
  std::set<BloggerId> bloggers;
  std::set<std::pair<BloggerId, BloggerId>> pairs;
  for (const auto& l : links) {
    posts.insert(l.q);
    posts.insert(l.p);
    bloggers.insert(l.reader);
    bloggers.insert(l.author);
    pairs.emplace(l.reader, l.author);
  }
  return {bloggers.size(), posts.size(), links.size(), pairs.size()};
}

ImplicitNetwork build_implicit_links(const Corpus& corpus, int window_hours) {
  if (window_hours < 1) throw InvalidArgument("window_hours must be >= 1");
  const std::int64_t window = window_hours * kSecondsPerHour;

  struct Click {
    Timestamp ts;
    PostId target;
  };
  std::unordered_map<std::string, std::vector<Click>> clicks_by_ip;
  for (const auto& a : corpus.accesses()) {
    if (auto target = corpus.find_post(a.request)) {
      clicks_by_ip[a.hashed_ip].push_back({a.access_ts, *target});
    }
  }
  for (auto& [ip, clicks] : clicks_by_ip) {
    std::stable_sort(clicks.begin(), clicks.end(),
                     [](const Click& x, const Click& y) { return x.ts < y.ts; });
  }

  ImplicitNetwork net;
  net.window_hours = window_hours;
  std::map<PostId, std::int64_t> best_gap;
  for (PostId q = 0; q < corpus.posts().size(); ++q) {
    const Timestamp upload = corpus.posts()[q].upload_ts;
    const BloggerId reader = corpus.author_of(q);
    best_gap.clear();
    for (const auto& ip : corpus.ips_of(reader)) {
      auto it = clicks_by_ip.find(ip);
      if (it == clicks_by_ip.end()) continue;
      const auto& clicks = it->second;
      auto first = std::lower_bound(clicks.begin(), clicks.end(), upload - window,
                                    [](const Click& c, Timestamp t) { return c.ts < t; });
      for (auto c = first; c != clicks.end() && c->ts < upload; ++c) {
        if (corpus.author_of(c->target) == reader) continue;
        const std::int64_t gap = upload - c->ts;
        auto [slot, inserted] = best_gap.emplace(c->target, gap);
        if (!inserted) slot->second = std::min(slot->second, gap);
      }
    }
    for (const auto& [p, gap] : best_gap) {
      net.links.push_back({q, p, reader, corpus.author_of(p), gap, std::nullopt});
    }
  }
  net.counts = count_links(net.links);
  return net;
}

std::vector<std::size_t> gap_histogram(std::span<const ImplicitLink> links, int buckets) {
  std::vector<std::size_t> h(static_cast<std::size_t>(std::max(buckets, 0)), 0);
  for (const auto& l : links) {
    const int b = gap_bucket(l.gap_seconds);
    if (b >= 1 && b <= buckets) ++h[static_cast<std::size_t>(b - 1)];
  }
  return h;
}

void annotate_similarity(std::span<ImplicitLink> links, std::span<const TermVector> vectors,
                         std::size_t min_tokens, std::span<const double> term_weights) {
  for (auto& l : links) {
    const auto& u = vectors[l.q];
    const auto& v = vectors[l.p];
    if (u.token_count < min_tokens || v.token_count < min_tokens) {
      l.similarity.reset();
    } else {
      l.similarity = term_weights.empty() ? cosine(u, v) : cosine(u, v, term_weights);
    }
  }
}

std::optional<std::uint32_t> BloggerGraph::local(BloggerId global) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), global);
  if (it == nodes.end() || *it != global) return std::nullopt;
  return static_cast<std::uint32_t>(it - nodes.begin());
}

std::vector<std::size_t> BloggerGraph::out_offsets() const {
  std::vector<std::size_t> off(nodes.size() + 1, 0);
  for (const auto& e : edges) ++off[e.src + 1];
  for (std::size_t i = 0; i < nodes.size(); ++i) off[i + 1] += off[i];
  return off;
}

double BloggerGraph::total_weight() const {
  double total = 0;
  for (const auto& e : edges) total += e.weight;
  return total;
}

BloggerGraph blogger_projection(std::span<const ImplicitLink> links) {
  std::vector<BloggerId> nodes;
  for (const auto& l : links) {
    nodes.push_back(l.reader);
    nodes.push_back(l.author);
  }
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return blogger_projection(links, std::move(nodes));
}

BloggerGraph blogger_projection(std::span<const ImplicitLink> links, std::vector<BloggerId> nodes) {
  BloggerGraph g;
  g.nodes = std::move(nodes);
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> weights;
  for (const auto& l : links) {
    auto src = g.local(l.reader);
    auto dst = g.local(l.author);
    if (!src || !dst) throw InvalidArgument("link endpoint outside the node set");
    weights[{*src, *dst}] += 1.0;
  }
  for (const auto& [key, w] : weights) g.edges.push_back({key.first, key.second, w});
  return g;
}

void write_links_tsv(std::ostream& out, const Corpus& corpus, std::span<const ImplicitLink> links) {
  for (const auto& l : links) {
    out << corpus.posts()[l.q].url << '\t' << corpus.posts()[l.p].url << '\t'
        << corpus.bloggers()[l.reader] << '\t' << corpus.bloggers()[l.author] << '\t'
        << l.gap_seconds << '\t' << (l.similarity ? tsv::format_double(*l.similarity) : "NA")
        << '\n';
  }
}

std::vector<ImplicitLink> read_links_tsv(std::istream& in, const Corpus& corpus) {
  std::vector<ImplicitLink> links;
  std::string line;
  while (tsv::next_record(in, line)) {
    const auto f = tsv::split(line);
    if (f.size() < 5) throw FormatError("bad link row: " + line);
    auto q = corpus.find_post(f[0]);
    auto p = corpus.find_post(f[1]);
    auto gap = tsv::parse_int(f[4]);
    if (!q || !p || !gap) throw FormatError("link row does not match corpus: " + line);
    std::optional<double> sim;
    if (f.size() > 5 && f[5] != "NA") {
      sim = tsv::parse_double(f[5]);
      if (!sim) throw FormatError("bad similarity in link row: " + line);
    }
    links.push_back({*q, *p, corpus.author_of(*q), corpus.author_of(*p), *gap, sim});
  }
  return links;
}

}  // namespace blogflux
