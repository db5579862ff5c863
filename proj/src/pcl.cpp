// Apache License, Version 2.0, refer to LICENSE.txt

#include "blogflux/pcl.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "blogflux/matrix_io.hpp"
#include "blogflux/rng.hpp"

namespace blogflux {
namespace {

// Posterior quantities of the link model at fixed (b, y).
struct LinkStats {
  Eigen::MatrixXd normalizer;  // D_ik = sum_{j in out(i)} y_jk b_j
  Eigen::MatrixXd as_source;   // sum_j s_ij q_ijk
  Eigen::MatrixXd as_target;   // sum_i s_ij q_ijk, indexed by j
  double objective = 0;
};

LinkStats link_stats(const BloggerGraph& g, const Eigen::VectorXd& b, const Eigen::MatrixXd& y) {
  const auto n = static_cast<Eigen::Index>(g.size());
  const auto K = y.cols();
  if (y.rows() != n || b.size() != n) throw InvalidArgument("model size does not match the graph");
  LinkStats s;
  s.normalizer = Eigen::MatrixXd::Zero(n, K);
  s.as_source = Eigen::MatrixXd::Zero(n, K);
  s.as_target = Eigen::MatrixXd::Zero(n, K);
  for (const auto& e : g.edges) s.normalizer.row(e.src) += b(e.dst) * y.row(e.dst);
  Eigen::VectorXd q(K);
  for (const auto& e : g.edges) {
    for (Eigen::Index k = 0; k < K; ++k) {
      const double d = s.normalizer(e.src, k);
      q(k) = d > 0 ? y(e.src, k) * y(e.dst, k) * b(e.dst) / d : 0.0;
    }
    const double t = q.sum();
    s.objective += e.weight * std::log(t);
    if (!(t > 0)) continue;
    q *= e.weight / t;
    s.as_source.row(e.src) += q.transpose();
    s.as_target.row(e.dst) += q.transpose();
  }
  return s;
}

// b_j = in-weight_j / sum_{i: j in out(i)} sum_k S_ik y_jk / D_ik.
void update_popularity(const BloggerGraph& g, const Eigen::MatrixXd& y, const LinkStats& s,
                       Eigen::VectorXd& b) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::VectorXd in_weight = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd denom = Eigen::VectorXd::Zero(n);
  for (const auto& e : g.edges) {
    in_weight(e.dst) += e.weight;
    for (Eigen::Index k = 0; k < y.cols(); ++k) {
      const double d = s.normalizer(e.src, k);
      if (d > 0) denom(e.dst) += s.as_source(e.src, k) * y(e.dst, k) / d;
    }
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    if (in_weight(j) > 0 && denom(j) > 0) b(j) = in_weight(j) / denom(j);
  }
}

// Maximizes sum_k a_k log y_k - sum_k c_k y_k over the simplex.
// Returns `current` when no entry of a is positive.
Eigen::RowVectorXd solve_simplex_row(const Eigen::VectorXd& a, const Eigen::VectorXd& c,
                                     const Eigen::RowVectorXd& current) {
  double min_c = INFINITY, total = 0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    if (a(k) > 0) {
      min_c = std::min(min_c, c(k));
      total += a(k);
    }
  }
  if (total <= 0) return current;
  auto f = [&](double lambda) {
    double v = 0;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      if (a(k) > 0) v += a(k) / (c(k) + lambda);
    }
    return v;
  };
  double lo = -min_c, hi = -min_c + total;
  for (int it = 0; it < 200 && hi - lo > 0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (f(mid) > 1.0 ? lo : hi) = mid;
  }
  const double lambda = hi;
  Eigen::RowVectorXd y(a.size());
  for (Eigen::Index k = 0; k < a.size(); ++k) y(k) = a(k) > 0 ? a(k) / (c(k) + lambda) : 0.0;
  return y / y.sum();
}

Eigen::VectorXd initial_popularity(const BloggerGraph& g) {
  Eigen::VectorXd b = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(g.size()));
  for (const auto& e : g.edges) b(e.dst) += 1.0;
  return b;
}

void check_graph(const BloggerGraph& g, const PclConfig& config) {
  if (g.size() == 0 || g.edges.empty()) throw InvalidArgument("empty link graph");
  if (config.communities < 1) throw InvalidArgument("community count must be >= 1");
  for (std::size_t x = 1; x < g.edges.size(); ++x) {
    const auto& a = g.edges[x - 1];
    const auto& b = g.edges[x];
    if (a.src > b.src || (a.src == b.src && a.dst >= b.dst)) {
      throw InvalidArgument("graph edges must be sorted and unique");
    }
  }
  for (const auto& e : g.edges) {
    if (e.src == e.dst) throw InvalidArgument("self-links are not allowed");
    if (!(e.weight > 0)) throw InvalidArgument("edge weights must be positive");
  }
}

bool converged(const std::vector<double>& trace, double tol) {
  if (trace.size() < 2) return false;
  const double a = trace[trace.size() - 2], b = trace.back();
  return std::abs(b - a) <= tol * std::max(std::abs(b), 1e-300);
}

}  // namespace

ContentMatrix blogger_content(std::span<const BloggerId> nodes, const Corpus& corpus,
                              std::span<const TermVector> post_vectors, std::size_t n_terms) {
  std::vector<Eigen::Triplet<double>> cells;
  for (std::size_t m = 0; m < nodes.size(); ++m) {
    std::map<TermId, double> tf;
    for (PostId p : corpus.posts_of(nodes[m])) {
      for (const auto& [id, c] : post_vectors[p].entries) tf[id] += c;
    }
    double norm = 0;
    for (const auto& [id, c] : tf) norm += c * c;
    norm = std::sqrt(norm);
    for (const auto& [id, c] : tf) {
      if (id >= n_terms) throw InvalidArgument("term id outside the vocabulary");
      cells.emplace_back(static_cast<int>(m), static_cast<int>(id), c / norm);
    }
  }
  ContentMatrix x(static_cast<Eigen::Index>(nodes.size()), static_cast<Eigen::Index>(n_terms));
  x.setFromTriplets(cells.begin(), cells.end());
  return x;
}

double link_objective(const BloggerGraph& graph, const Eigen::VectorXd& popularity,
                      const Eigen::MatrixXd& memberships) {
  return link_stats(graph, popularity, memberships).objective;
}

Eigen::MatrixXd softmax_memberships(const ContentMatrix& content, const Eigen::MatrixXd& weights) {
  Eigen::MatrixXd a = content * weights;
  for (Eigen::Index m = 0; m < a.rows(); ++m) {
    const double top = a.row(m).maxCoeff();
    a.row(m) = (a.row(m).array() - top).exp();
    a.row(m) /= a.row(m).sum();
  }
  return a;
}

double pcldc_objective(const BloggerGraph& graph, const ContentMatrix& content,
                       const Eigen::MatrixXd& weights, const Eigen::VectorXd& popularity, double l2) {
  return link_objective(graph, popularity, softmax_memberships(content, weights)) -
         0.5 * l2 * weights.squaredNorm();
}

Eigen::MatrixXd pcldc_gradient(const BloggerGraph& graph, const ContentMatrix& content,
                               const Eigen::MatrixXd& weights, const Eigen::VectorXd& popularity,
                               double l2) {
  const Eigen::MatrixXd y = softmax_memberships(content, weights);
  const LinkStats s = link_stats(graph, popularity, y);
  // y_mk * d objective / d y_mk, split into the log terms and the normalizer.
  Eigen::MatrixXd yg = s.as_source + s.as_target;
  for (const auto& e : graph.edges) {
    for (Eigen::Index k = 0; k < y.cols(); ++k) {
      const double d = s.normalizer(e.src, k);
      if (d > 0) yg(e.dst, k) -= y(e.dst, k) * popularity(e.dst) * s.as_source(e.src, k) / d;
    }
  }
  // Softmax chain rule: d/da_mk = yg_mk - y_mk * sum_l yg_ml.
  Eigen::MatrixXd ga = yg;
  for (Eigen::Index m = 0; m < y.rows(); ++m) ga.row(m) -= y.row(m) * yg.row(m).sum();
  return Eigen::MatrixXd(content.transpose() * ga) - l2 * weights;
}

PcldcModel fit_pcldc(const BloggerGraph& graph, const ContentMatrix& content,
                     const PclConfig& config) {
  check_graph(graph, config);
  if (content.rows() != static_cast<Eigen::Index>(graph.size())) {
    throw InvalidArgument("content rows do not match the graph");
  }
  Rng rng(config.seed);
  PcldcModel m;
  const auto V = content.cols();
  const auto K = static_cast<Eigen::Index>(config.communities);
  m.W.resize(V, K);
  for (Eigen::Index w = 0; w < V; ++w) {
    for (Eigen::Index k = 0; k < K; ++k) m.W(w, k) = rng.normal(0.0, config.init_scale);
  }
  m.popularity = initial_popularity(graph);
  m.Y = softmax_memberships(content, m.W);
  auto objective = [&](const Eigen::MatrixXd& W) {
    return pcldc_objective(graph, content, W, m.popularity, config.l2);
  };
  m.objective_trace.push_back(objective(m.W));
  if (!std::isfinite(m.objective_trace.back())) throw NumericError("PCL-DC objective is not finite", 0);

  for (std::size_t it = 1; it <= config.max_iters; ++it) {
    update_popularity(graph, m.Y, link_stats(graph, m.popularity, m.Y), m.popularity);
    double current = objective(m.W);
    for (std::size_t step = 0; step < config.gradient_steps; ++step) {
      const Eigen::MatrixXd grad = pcldc_gradient(graph, content, m.W, m.popularity, config.l2);
      bool accepted = false;
      for (double rate = 1.0; rate > 1e-12; rate *= 0.5) {
        Eigen::MatrixXd trial = m.W + rate * grad;
        const double value = objective(trial);
        if (std::isfinite(value) && value >= current) {
          m.W.swap(trial);
          current = value;
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }
    m.Y = softmax_memberships(content, m.W);
    if (!std::isfinite(current)) throw NumericError("PCL-DC objective is not finite", it);
    m.objective_trace.push_back(current);
    if (converged(m.objective_trace, config.tolerance)) break;
  }
  m.term_given_community = community_term_distribution(m.W);
  return m;
}

PclModel fit_pcl(const BloggerGraph& graph, const PclConfig& config) {
  check_graph(graph, config);
  Rng rng(config.seed);
  PclModel m;
  const auto n = static_cast<Eigen::Index>(graph.size());
  const auto K = static_cast<Eigen::Index>(config.communities);
  m.Y.resize(n, K);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto row = rng.dirichlet_ones(config.communities);
    for (Eigen::Index k = 0; k < K; ++k) m.Y(i, k) = row[static_cast<std::size_t>(k)];
  }
  m.popularity = initial_popularity(graph);
  m.objective_trace.push_back(link_objective(graph, m.popularity, m.Y));
  if (!std::isfinite(m.objective_trace.back())) throw NumericError("PCL objective is not finite", 0);

  for (std::size_t it = 1; it <= config.max_iters; ++it) {
    update_popularity(graph, m.Y, link_stats(graph, m.popularity, m.Y), m.popularity);
    const LinkStats s = link_stats(graph, m.popularity, m.Y);
    Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(n, K);
    for (const auto& e : graph.edges) {
      for (Eigen::Index k = 0; k < K; ++k) {
        const double d = s.normalizer(e.src, k);
        if (d > 0) cost(e.dst, k) += m.popularity(e.dst) * s.as_source(e.src, k) / d;
      }
    }
    const Eigen::MatrixXd gain = s.as_source + s.as_target;
    for (Eigen::Index i = 0; i < n; ++i) {
      m.Y.row(i) = solve_simplex_row(gain.row(i).transpose(), cost.row(i).transpose(), m.Y.row(i));
    }
    const double value = link_objective(graph, m.popularity, m.Y);
    if (!std::isfinite(value)) throw NumericError("PCL objective is not finite", it);
    m.objective_trace.push_back(value);
    if (converged(m.objective_trace, config.tolerance)) break;
  }
  return m;
}

Eigen::MatrixXd community_term_distribution(const Eigen::MatrixXd& weights) {
  Eigen::MatrixXd p(weights.rows(), weights.cols());
  for (Eigen::Index w = 0; w < weights.rows(); ++w) {
    const double top = weights.row(w).maxCoeff();
    p.row(w) = (weights.row(w).array() - top).exp();
    p.row(w) /= p.row(w).sum();
  }
  for (Eigen::Index k = 0; k < p.cols(); ++k) p.col(k) /= p.col(k).sum();
  return p;
}

double heldout_loglik(const Eigen::VectorXd& b, const Eigen::MatrixXd& y,
                      std::span<const std::pair<std::uint32_t, std::uint32_t>> pairs) {
  const Eigen::RowVectorXd all = b.transpose() * y;  // sum_j y_jk b_j
  double ll = 0;
  for (const auto& [a, t] : pairs) {
    double p = 0;
    for (Eigen::Index k = 0; k < y.cols(); ++k) {
      const double denom = all(k) - y(a, k) * b(a);
      if (denom > 0) p += y(a, k) * y(t, k) * b(t) / denom;
    }
    ll += std::log(p);
  }
  return ll;
}

namespace {

Eigen::Map<const Eigen::VectorXd> trace_block(const std::vector<double>& trace) {
  return {trace.data(), static_cast<Eigen::Index>(trace.size())};
}

}  // namespace

void write_pcldc_model(std::ostream& out, const PcldcModel& model,
                       const std::vector<std::string>& node_labels, const Vocabulary& vocab) {
  write_block(out, "popularity", model.popularity, node_labels);
  write_block(out, "Y", model.Y, node_labels);
  write_block(out, "W", model.W, vocab.terms());
  write_block(out, "objective", trace_block(model.objective_trace));
}

PcldcModel read_pcldc_model(std::istream& in) {
  const auto file = read_blocks(in);
  PcldcModel m;
  m.popularity = require_block(file, "popularity").values.col(0);
  m.Y = require_block(file, "Y").values;
  m.W = require_block(file, "W").values;
  const auto& t = require_block(file, "objective").values;
  m.objective_trace.assign(t.data(), t.data() + t.size());
  if (m.Y.rows() != m.popularity.size() || m.W.cols() != m.Y.cols()) {
    throw FormatError("PCL-DC blocks disagree in shape");
  }
  m.term_given_community = community_term_distribution(m.W);
  return m;
}

void write_pcl_model(std::ostream& out, const PclModel& model,
                     const std::vector<std::string>& node_labels) {
  write_block(out, "popularity", model.popularity, node_labels);
  write_block(out, "Y", model.Y, node_labels);
  write_block(out, "objective", trace_block(model.objective_trace));
}

PclModel read_pcl_model(std::istream& in) {
  const auto file = read_blocks(in);
  PclModel m;
  m.popularity = require_block(file, "popularity").values.col(0);
  m.Y = require_block(file, "Y").values;
  const auto& t = require_block(file, "objective").values;
  m.objective_trace.assign(t.data(), t.data() + t.size());
  if (m.Y.rows() != m.popularity.size()) throw FormatError("PCL blocks disagree in shape");
  return m;
}

}  // namespace blogflux
