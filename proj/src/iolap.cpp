// Apache License, Version 2.0, refer to LICENSE.txt

#include "blogflux/iolap.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "blogflux/matrix_io.hpp"
#include "blogflux/parallel.hpp"
#include "blogflux/rng.hpp"

namespace blogflux {
namespace {

constexpr std::size_t kChunks = 8;

struct PairRange {
  std::uint32_t i, j;
  std::size_t begin, end;
};

std::vector<PairRange> group_pairs(const InfluenceTensor& t) {
  std::vector<PairRange> pairs;
  for (std::size_t e = 0; e < t.entries.size();) {
    std::size_t end = e;
    while (end < t.entries.size() && t.entries[end].i == t.entries[e].i &&
           t.entries[end].j == t.entries[e].j) {
      ++end;
    }
    pairs.push_back({t.entries[e].i, t.entries[e].j, e, end});
    e = end;
  }
  return pairs;
}

struct Stats {
  std::vector<double> core;
  Eigen::MatrixXd X, Y, Z;
  double loglik = 0;
};

// Expected sufficient statistics under the current model; returns the
// log-likelihood of the current model.
double e_step(const InfluenceTensor& t, const std::vector<PairRange>& pairs, const IolapModel& m,
              std::vector<Stats>& stats, bool want_z, int threads) {
  const std::size_t I = m.I, J = m.J, K = m.K;
  parallel_chunks(kChunks, threads, [&](std::size_t chunk) {
    auto& s = stats[chunk];
    std::fill(s.core.begin(), s.core.end(), 0.0);
    s.X.setZero();
    s.Y.setZero();
    if (want_z) s.Z.setZero();
    s.loglik = 0;
    std::vector<double> mix(K), resp(K), cxy(I * J * K);
    const auto [pb, pe] = chunk_range(pairs.size(), kChunks, chunk);
    for (std::size_t pi = pb; pi < pe; ++pi) {
      const auto& pr = pairs[pi];
      // cxy[a,b,c] = C X_ia Y_jb; mix[c] = sum_ab cxy
      std::fill(mix.begin(), mix.end(), 0.0);
      for (std::size_t a = 0; a < I; ++a) {
        const double xa = m.X(pr.i, static_cast<Eigen::Index>(a));
        for (std::size_t b = 0; b < J; ++b) {
          const double xy = xa * m.Y(pr.j, static_cast<Eigen::Index>(b));
          const std::size_t base = (a * J + b) * K;
          for (std::size_t c = 0; c < K; ++c) {
            cxy[base + c] = m.core[base + c] * xy;
            mix[c] += cxy[base + c];
          }
        }
      }
      std::fill(resp.begin(), resp.end(), 0.0);
      for (std::size_t e = pr.begin; e < pr.end; ++e) {
        const auto& en = t.entries[e];
        const auto k = static_cast<Eigen::Index>(en.k);
        double p = 0;
        for (std::size_t c = 0; c < K; ++c) p += mix[c] * m.Z(k, static_cast<Eigen::Index>(c));
        s.loglik += en.count * std::log(p);
        if (!(p > 0)) continue;
        const double w = en.count / p;
        for (std::size_t c = 0; c < K; ++c) {
          const double z = m.Z(k, static_cast<Eigen::Index>(c));
          resp[c] += w * z;
          if (want_z) s.Z(k, static_cast<Eigen::Index>(c)) += w * z * mix[c];
        }
      }
      for (std::size_t a = 0; a < I; ++a) {
        for (std::size_t b = 0; b < J; ++b) {
          const std::size_t base = (a * J + b) * K;
          double ab = 0;
          for (std::size_t c = 0; c < K; ++c) {
            const double r = cxy[base + c] * resp[c];
            s.core[base + c] += r;
            ab += r;
          }
          s.X(pr.i, static_cast<Eigen::Index>(a)) += ab;
          s.Y(pr.j, static_cast<Eigen::Index>(b)) += ab;
        }
      }
    }
  });
  double ll = 0;
  for (const auto& s : stats) ll += s.loglik;
  return ll;
}

void normalize_columns_into(Eigen::MatrixXd& target, const Eigen::MatrixXd& counts) {
  for (Eigen::Index c = 0; c < counts.cols(); ++c) {
    const double s = counts.col(c).sum();
    if (s > 0) target.col(c) = counts.col(c) / s;  // unused groups keep their column
  }
}

Eigen::MatrixXd dirichlet_columns(Rng& rng, std::size_t rows, std::size_t cols) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t c = 0; c < cols; ++c) {
    const auto v = rng.dirichlet_ones(rows);
    for (std::size_t r = 0; r < rows; ++r) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v[r];
  }
  return m;
}

void run_em(const InfluenceTensor& t, IolapModel& m, const IolapConfig& config) {
  const auto pairs = group_pairs(t);
  const bool want_z = !m.z_fixed;
  std::vector<Stats> stats(kChunks);
  for (auto& s : stats) {
    s.core.assign(m.core.size(), 0.0);
    s.X.resize(m.X.rows(), m.X.cols());
    s.Y.resize(m.Y.rows(), m.Y.cols());
    if (want_z) s.Z.resize(m.Z.rows(), m.Z.cols());
  }
  std::vector<double> core(m.core.size());
  Eigen::MatrixXd X(m.X.rows(), m.X.cols()), Y(m.Y.rows(), m.Y.cols()), Z;
  if (want_z) Z.resize(m.Z.rows(), m.Z.cols());

  for (std::size_t it = 0; it < config.max_iters; ++it) {
    const double ll = e_step(t, pairs, m, stats, want_z, config.threads);
    if (!std::isfinite(ll)) throw NumericError("iOLAP log-likelihood is not finite", it);
    const bool converged = !m.loglik_trace.empty() &&
                           std::abs(ll - m.loglik_trace.back()) <= config.tolerance * std::abs(ll);
    m.loglik_trace.push_back(ll);
    if (converged) break;

    std::fill(core.begin(), core.end(), 0.0);
    X.setZero();
    Y.setZero();
    if (want_z) Z.setZero();
    for (const auto& s : stats) {
      for (std::size_t x = 0; x < core.size(); ++x) core[x] += s.core[x];
      X += s.X;
      Y += s.Y;
      if (want_z) Z += s.Z;
    }
    const double mass = std::accumulate(core.begin(), core.end(), 0.0);
    for (std::size_t x = 0; x < core.size(); ++x) m.core[x] = core[x] / mass;
    normalize_columns_into(m.X, X);
    normalize_columns_into(m.Y, Y);
    if (want_z) normalize_columns_into(m.Z, Z);
  }
  const double final_ll = iolap_loglik(t, m);
  if (!std::isfinite(final_ll)) throw NumericError("iOLAP log-likelihood is not finite", config.max_iters);
  m.loglik_trace.push_back(final_ll);
}

void check_tensor(const InfluenceTensor& t, const IolapConfig& config) {
  if (t.entries.empty()) throw InvalidArgument("empty influence tensor");
  if (config.influenced_groups < 1 || config.influencer_groups < 1) {
    throw InvalidArgument("group counts must be >= 1");
  }
  if (config.restarts < 1) throw InvalidArgument("restarts must be >= 1");
}

IolapModel fit(const InfluenceTensor& t, const Eigen::MatrixXd* fixed_z, std::size_t free_k,
               const IolapConfig& config) {
  check_tensor(t, config);
  Rng rng(config.seed);
  IolapModel best;
  bool have_best = false;
  for (std::size_t r = 0; r < config.restarts; ++r) {
    Rng local = rng.fork();
    IolapModel m;
    m.I = config.influenced_groups;
    m.J = config.influencer_groups;
    m.K = fixed_z ? static_cast<std::size_t>(fixed_z->cols()) : free_k;
    m.z_fixed = fixed_z != nullptr;
    m.core = local.dirichlet_ones(m.I * m.J * m.K);
    m.X = dirichlet_columns(local, t.bloggers(), m.I);
    m.Y = dirichlet_columns(local, t.bloggers(), m.J);
    m.Z = fixed_z ? *fixed_z : dirichlet_columns(local, t.terms, m.K);
    run_em(t, m, config);
    if (!have_best || m.loglik_trace.back() > best.loglik_trace.back()) {
      best = std::move(m);
      have_best = true;
    }
  }
  return best;
}

}  // namespace

IolapModel fit_iolap(const InfluenceTensor& tensor, const Eigen::MatrixXd& topics,
                     const IolapConfig& config) {
  if (static_cast<std::size_t>(topics.rows()) != tensor.terms || topics.cols() < 1) {
    throw InvalidArgument("topic matrix does not match the tensor vocabulary");
  }
  for (Eigen::Index c = 0; c < topics.cols(); ++c) {
    if (std::abs(topics.col(c).sum() - 1.0) > 1e-8 || topics.col(c).minCoeff() < 0) {
      throw InvalidArgument("topic matrix columns must be distributions");
    }
  }
  return fit(tensor, &topics, 0, config);
}

IolapModel fit_iolap(const InfluenceTensor& tensor, std::size_t topics, const IolapConfig& config) {
  if (topics < 1) throw InvalidArgument("topic count must be >= 1");
  return fit(tensor, nullptr, topics, config);
}

double iolap_loglik(const InfluenceTensor& t, const IolapModel& m) {
  double ll = 0;
  std::vector<double> mix(m.K);
  for (const auto& pr : group_pairs(t)) {
    std::fill(mix.begin(), mix.end(), 0.0);
    for (std::size_t a = 0; a < m.I; ++a) {
      for (std::size_t b = 0; b < m.J; ++b) {
        const double xy = m.X(pr.i, static_cast<Eigen::Index>(a)) * m.Y(pr.j, static_cast<Eigen::Index>(b));
        for (std::size_t c = 0; c < m.K; ++c) mix[c] += m.c(a, b, c) * xy;
      }
    }
    for (std::size_t e = pr.begin; e < pr.end; ++e) {
      const auto& en = t.entries[e];
      double p = 0;
      for (std::size_t c = 0; c < m.K; ++c) p += mix[c] * m.Z(en.k, static_cast<Eigen::Index>(c));
      ll += en.count * std::log(p);
    }
  }
  return ll;
}

Eigen::VectorXd iolap_topic_distribution(const IolapModel& m, std::size_t t) {
  if (t >= m.K) throw InvalidArgument("topic index out of range");
  Eigen::VectorXd pi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m.J));
  for (std::size_t a = 0; a < m.I; ++a) {
    for (std::size_t b = 0; b < m.J; ++b) pi(static_cast<Eigen::Index>(b)) += m.c(a, b, t);
  }
  const double s = pi.sum();
  if (s > 0) {
    pi /= s;
  } else {
    pi.setConstant(1.0 / static_cast<double>(m.J));
  }
  return m.Y * pi;
}

std::vector<std::pair<std::uint32_t, double>> iolap_topic_influencers(const IolapModel& m,
                                                                      std::size_t t, std::size_t n) {
  const Eigen::VectorXd p = iolap_topic_distribution(m, t);
  std::vector<std::uint32_t> idx(static_cast<std::size_t>(p.size()));
  std::iota(idx.begin(), idx.end(), 0);
  n = std::min(n, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n), idx.end(),
                    [&](std::uint32_t a, std::uint32_t b) { return p(a) != p(b) ? p(a) > p(b) : a < b; });
  std::vector<std::pair<std::uint32_t, double>> out;
  for (std::size_t r = 0; r < n; ++r) out.emplace_back(idx[r], p(idx[r]));
  return out;
}

void write_iolap_model(std::ostream& out, const IolapModel& m, const InfluenceTensor& tensor,
                       const Corpus& corpus, const Vocabulary& vocab) {
  Eigen::MatrixXd shape(1, 4);
  shape << double(m.I), double(m.J), double(m.K), m.z_fixed ? 1.0 : 0.0;
  write_block(out, "shape", shape);
  Eigen::MatrixXd core(static_cast<Eigen::Index>(m.I * m.J), static_cast<Eigen::Index>(m.K));
  for (std::size_t r = 0; r < m.I * m.J; ++r) {
    for (std::size_t c = 0; c < m.K; ++c) core(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m.core[r * m.K + c];
  }
  write_block(out, "core", core);
  std::vector<std::string> users;
  for (auto g : tensor.nodes) users.push_back(corpus.bloggers()[g]);
  write_block(out, "X", m.X, users);
  write_block(out, "Y", m.Y, users);
  write_block(out, "Z", m.Z, vocab.terms());
  write_block(out, "loglik",
              Eigen::Map<const Eigen::VectorXd>(m.loglik_trace.data(),
                                                static_cast<Eigen::Index>(m.loglik_trace.size())));
}

IolapModel read_iolap_model(std::istream& in) {
  const auto file = read_blocks(in);
  const auto& shape = require_block(file, "shape").values;
  if (shape.size() != 4) throw FormatError("bad iOLAP shape block");
  IolapModel m;
  m.I = static_cast<std::size_t>(shape(0, 0));
  m.J = static_cast<std::size_t>(shape(0, 1));
  m.K = static_cast<std::size_t>(shape(0, 2));
  m.z_fixed = shape(0, 3) != 0;
  const auto& core = require_block(file, "core").values;
  if (static_cast<std::size_t>(core.rows()) != m.I * m.J || static_cast<std::size_t>(core.cols()) != m.K) {
    throw FormatError("iOLAP core block has the wrong shape");
  }
  m.core.resize(m.I * m.J * m.K);
  for (std::size_t r = 0; r < m.I * m.J; ++r) {
    for (std::size_t c = 0; c < m.K; ++c) m.core[r * m.K + c] = core(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  m.X = require_block(file, "X").values;
  m.Y = require_block(file, "Y").values;
  m.Z = require_block(file, "Z").values;
  if (static_cast<std::size_t>(m.X.cols()) != m.I || static_cast<std::size_t>(m.Y.cols()) != m.J ||
      static_cast<std::size_t>(m.Z.cols()) != m.K) {
    throw FormatError("iOLAP factor blocks disagree with the shape");
  }
  const auto& ll = require_block(file, "loglik").values;
  m.loglik_trace.assign(ll.data(), ll.data() + ll.size());
  return m;
}

}  // namespace blogflux
