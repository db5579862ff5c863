// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "blogflux/common.hpp"
#include "blogflux/corpus.hpp"
#include "blogflux/text.hpp"

namespace blogflux {

// q (by reader) links to p (by author) when the reader clicked p
// gap_seconds before uploading q.
struct ImplicitLink {
  PostId q = 0;
  PostId p = 0;
  BloggerId reader = 0;
  BloggerId author = 0;
  std::int64_t gap_seconds = 0;
  std::optional<double> similarity;

  bool operator==(const ImplicitLink&) const = default;
};

struct LinkCounts {
  std::size_t bloggers = 0;
  std::size_t posts = 0;
  std::size_t post_links = 0;
  std::size_t blogger_links = 0;  // distinct (reader, author) pairs

  bool operator==(const LinkCounts&) const = default;
};

LinkCounts count_links(std::span<const ImplicitLink> links);

struct ImplicitNetwork {
  std::vector<ImplicitLink> links;  // sorted by (q, p), unique
  int window_hours = 12;
  LinkCounts counts;
};

// Emits (q, p) when an IP owned by q's author accessed p within
// (0, window_hours] before q's upload and p has a different author.
// Repeated clicks on the same p before the same q keep the smallest gap.
ImplicitNetwork build_implicit_links(const Corpus& corpus, int window_hours = 12);

// 1-based hour bucket: gap in ((h-1)*3600, h*3600].
inline int gap_bucket(std::int64_t gap_seconds) {
  return static_cast<int>((gap_seconds + kSecondsPerHour - 1) / kSecondsPerHour);
}

// Index h-1 holds bucket h. Gaps beyond the last bucket are not counted.
std::vector<std::size_t> gap_histogram(std::span<const ImplicitLink> links, int buckets = 12);

// Cosine similarity for links where both posts keep at least min_tokens
// vocabulary tokens; other links get std::nullopt.
void annotate_similarity(std::span<ImplicitLink> links, std::span<const TermVector> post_vectors,
                         std::size_t min_tokens = 10, std::span<const double> term_weights = {});

struct WeightedEdge {
  std::uint32_t src = 0;  // local node index
  std::uint32_t dst = 0;
  double weight = 0;

  bool operator==(const WeightedEdge&) const = default;
};

// Directed weighted blogger graph over a compact node set.
struct BloggerGraph {
  std::vector<BloggerId> nodes;     // ascending global ids; local index = position
  std::vector<WeightedEdge> edges;  // sorted by (src, dst), unique

  std::size_t size() const { return nodes.size(); }
  std::optional<std::uint32_t> local(BloggerId global) const;
  // CSR offsets into `edges` by source node (size() + 1 entries).
  std::vector<std::size_t> out_offsets() const;
  double total_weight() const;
};

// Edge (A, B) weighted by the number of post-level links from A's posts to
// B's posts. Nodes are the bloggers touched by the links.
BloggerGraph blogger_projection(std::span<const ImplicitLink> links);
// Same, over a caller-supplied node set that must contain every endpoint.
BloggerGraph blogger_projection(std::span<const ImplicitLink> links, std::vector<BloggerId> nodes);

// `q<TAB>p<TAB>reader<TAB>author<TAB>gap_seconds<TAB>similarity`, posts by url,
// bloggers by user id, similarity NA when absent. Extra columns are ignored
// on reading.
void write_links_tsv(std::ostream& out, const Corpus& corpus, std::span<const ImplicitLink> links);
std::vector<ImplicitLink> read_links_tsv(std::istream& in, const Corpus& corpus);

}  // namespace blogflux
