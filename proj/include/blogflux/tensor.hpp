// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "blogflux/common.hpp"
#include "blogflux/corpus.hpp"
#include "blogflux/implicit.hpp"
#include "blogflux/text.hpp"

namespace blogflux {

struct TensorEntry {
  std::uint32_t i = 0;  // influenced blogger, local index
  std::uint32_t j = 0;  // influencing blogger, local index
  TermId k = 0;
  double count = 0;

  bool operator==(const TensorEntry&) const = default;
};

// Sparse (influenced, influencer, term) counts.
struct InfluenceTensor {
  std::vector<BloggerId> nodes;       // local index -> global blogger id
  std::size_t terms = 0;
  std::vector<TensorEntry> entries;   // sorted by (i, j, k), unique
  std::size_t links_without_terms = 0;

  std::size_t bloggers() const { return nodes.size(); }
  double total() const;
};

struct TensorOptions {
  // Add count(q) * count(p) per shared term instead of 1.
  bool tf_weighting = false;
};

// For every link (q by A after reading p by B) and every vocabulary term in
// both posts, adds to D[A, B, term]. `nodes` must hold every link endpoint.
InfluenceTensor build_influence_tensor(std::span<const ImplicitLink> links,
                                       std::span<const TermVector> post_vectors,
                                       std::size_t n_terms, std::vector<BloggerId> nodes,
                                       const TensorOptions& options = {});
// Node set = bloggers touched by the links.
InfluenceTensor build_influence_tensor(std::span<const ImplicitLink> links,
                                       std::span<const TermVector> post_vectors,
                                       std::size_t n_terms, const TensorOptions& options = {});

// `influenced<TAB>influencer<TAB>term<TAB>count` with user ids and term strings.
void write_tensor_tsv(std::ostream& out, const InfluenceTensor& tensor, const Corpus& corpus,
                      const Vocabulary& vocab);

}  // namespace blogflux
