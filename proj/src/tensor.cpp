// Apache License, Version 2.0, refer to LICENSE.txt

#include "blogflux/tensor.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "blogflux/tsv.hpp"

namespace blogflux {

double InfluenceTensor::total() const {
  double t = 0;
  for (const auto& e : entries) t += e.count;
  return t;
}

InfluenceTensor build_influence_tensor(std::span<const ImplicitLink> links,
                                       std::span<const TermVector> post_vectors,
                                       std::size_t n_terms, std::vector<BloggerId> nodes,
                                       const TensorOptions& options) {
  InfluenceTensor t;
  t.nodes = std::move(nodes);
  t.terms = n_terms;
  if (!std::is_sorted(t.nodes.begin(), t.nodes.end())) throw InvalidArgument("tensor nodes must be sorted");
  auto local = [&](BloggerId g) {
    auto it = std::lower_bound(t.nodes.begin(), t.nodes.end(), g);
    if (it == t.nodes.end() || *it != g) throw InvalidArgument("link endpoint outside the tensor nodes");
    return static_cast<std::uint32_t>(it - t.nodes.begin());
  };
  std::map<std::tuple<std::uint32_t, std::uint32_t, TermId>, double> cells;
  for (const auto& l : links) {
    const auto i = local(l.reader);
    const auto j = local(l.author);
    const auto& u = post_vectors[l.q];
    const auto& v = post_vectors[l.p];
    const auto shared = shared_terms(u, v);
    if (shared.empty()) ++t.links_without_terms;
    for (TermId k : shared) {
      if (k >= n_terms) throw InvalidArgument("term id outside the vocabulary");
      cells[{i, j, k}] += options.tf_weighting ? double(u.count(k)) * v.count(k) : 1.0;
    }
  }
  for (const auto& [key, c] : cells) {
    t.entries.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), c});
  }
  return t;
}

InfluenceTensor build_influence_tensor(std::span<const ImplicitLink> links,
                                       std::span<const TermVector> post_vectors,
                                       std::size_t n_terms, const TensorOptions& options) {
  return build_influence_tensor(links, post_vectors, n_terms, blogger_projection(links).nodes,
                                options);
}

void write_tensor_tsv(std::ostream& out, const InfluenceTensor& tensor, const Corpus& corpus,
                      const Vocabulary& vocab) {
  for (const auto& e : tensor.entries) {
    out << corpus.bloggers()[tensor.nodes[e.i]] << '\t' << corpus.bloggers()[tensor.nodes[e.j]]
        << '\t' << vocab.term(e.k) << '\t' << tsv::format_double(e.count) << '\n';
  }
}

}  // namespace blogflux
