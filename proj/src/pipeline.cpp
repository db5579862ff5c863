// Apache License, Version 2.0, refer to LICENSE.txt

#include "blogflux/pipeline.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "blogflux/analysis.hpp"
#include "blogflux/causality.hpp"
#include "blogflux/iolap.hpp"
#include "blogflux/pcl.hpp"
#include "blogflux/rng.hpp"
#include "blogflux/tensor.hpp"
#include "blogflux/topics.hpp"
#include "blogflux/tsv.hpp"

namespace blogflux {

namespace fs = std::filesystem;

namespace {

constexpr const char* kPosts = "corpus_posts.tsv";
constexpr const char* kAccess = "corpus_access.tsv";
constexpr const char* kVocab = "vocab.tsv";
constexpr const char* kImplicit = "implicit_links.tsv";
constexpr const char* kInfluence = "influence_links.tsv";
constexpr const char* kTopics = "topics.tsv";
constexpr const char* kIolap = "iolap.tsv";
constexpr const char* kPcldc = "pcldc.tsv";
constexpr const char* kPcl = "pcl.tsv";
constexpr const char* kSplitTrain = "split_train.tsv";
constexpr const char* kSplitTest = "split_test.tsv";

std::string fmt(double v) { return tsv::format_double(v); }

class Stage {
 public:
  Stage(const PipelineConfig& config, std::string name) : config_(config), name_(std::move(name)) {
    fs::create_directories(config_.out_dir);
  }

  const PipelineConfig& config() const { return config_; }

  // Path of an upstream artifact; throws MissingInput when absent.
  std::string input(const std::string& path) const {
    if (!fs::exists(path)) throw MissingInput(path);
    return path;
  }
  std::string artifact(const std::string& file) const { return input(local(file)); }
  std::string local(const std::string& file) const { return (fs::path(config_.out_dir) / file).string(); }

  std::ifstream open(const std::string& path) const {
    std::ifstream in(input(path), std::ios::binary);
    if (!in) throw IngestError("cannot read " + path);
    return in;
  }

  std::ofstream create(const std::string& file) {
    const std::string path = local(file);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestError("cannot write " + path);
    char hash[32];
    std::snprintf(hash, sizeof hash, "%016" PRIx64, config_.hash());
    out << "# blogflux " << kVersion << " subcommand=" << name_ << " config=" << hash
        << " seed=" << config_.seed << '\n';
    return out;
  }

 private:
  const PipelineConfig& config_;
  std::string name_;
};

TokenizerConfig tokenizer_config(const Stage& s) {
  TokenizerConfig t;
  if (!s.config().stopwords_path.empty()) {
    auto in = s.open(s.config().stopwords_path);
    t.stopwords = load_stopwords(in);
  }
  return t;
}

Corpus load_corpus(const Stage& s) {
  auto posts_in = s.open(s.artifact(kPosts));
  auto access_in = s.open(s.artifact(kAccess));
  auto posts = parse_content_file(posts_in);
  auto accesses = parse_access_tsv(access_in);
  return Corpus(std::move(posts.records), std::move(accesses.records));
}

Vocabulary load_vocab(const Stage& s) {
  auto in = s.open(s.artifact(kVocab));
  return read_vocabulary_tsv(in);
}

std::vector<ImplicitLink> load_links(const Stage& s, const char* file, const Corpus& corpus) {
  auto in = s.open(s.artifact(file));
  return read_links_tsv(in, corpus);
}

// Everything the model stages share.
struct InfluenceInputs {
  Corpus corpus;
  Vocabulary vocab;
  std::vector<TermVector> vectors;
  std::vector<ImplicitLink> links;
  BloggerGraph graph;
};

InfluenceInputs load_influence(const Stage& s) {
  InfluenceInputs in;
  in.corpus = load_corpus(s);
  in.vocab = load_vocab(s);
  in.links = load_links(s, kInfluence, in.corpus);
  if (in.links.empty()) throw InvalidArgument("the influence network is empty");
  in.vectors = post_vectors(in.corpus, in.vocab, tokenizer_config(s));
  in.graph = blogger_projection(in.links);
  return in;
}

std::vector<std::string> node_labels(const BloggerGraph& g, const Corpus& corpus) {
  std::vector<std::string> out;
  for (auto b : g.nodes) out.push_back(corpus.bloggers()[b]);
  return out;
}

PlsaConfig plsa_config(const PipelineConfig& c) {
  PlsaConfig p;
  p.topics = c.topics;
  p.max_iters = c.plsa_iters;
  p.tolerance = c.tolerance;
  p.seed = c.seed;
  p.threads = c.threads;
  return p;
}

IolapConfig iolap_config(const PipelineConfig& c) {
  IolapConfig p;
  p.influenced_groups = c.iolap_influenced;
  p.influencer_groups = c.iolap_influencer;
  p.max_iters = c.iolap_iters;
  p.tolerance = c.tolerance;
  p.seed = c.seed;
  p.restarts = c.restarts;
  p.threads = c.threads;
  return p;
}

PclConfig pcl_config(const PipelineConfig& c) {
  PclConfig p;
  p.communities = c.communities;
  p.max_iters = c.pcl_iters;
  p.tolerance = c.tolerance;
  p.l2 = c.pcl_l2;
  p.seed = c.seed;
  return p;
}

TopicModel load_topics(const Stage& s, const Vocabulary& vocab) {
  auto in = s.open(s.artifact(kTopics));
  return read_topic_model(in, vocab);
}

IolapModel load_iolap(const Stage& s) {
  auto in = s.open(s.artifact(kIolap));
  return read_iolap_model(in);
}

PcldcModel load_pcldc(const Stage& s) {
  auto in = s.open(s.artifact(kPcldc));
  return read_pcldc_model(in);
}

PclModel load_pcl(const Stage& s) {
  auto in = s.open(s.artifact(kPcl));
  return read_pcl_model(in);
}

void check_nodes(Eigen::Index rows, const BloggerGraph& g, const char* what) {
  if (rows != static_cast<Eigen::Index>(g.size())) {
    throw FormatError(std::string(what) + " does not match the influence network");
  }
}

// ---- stages ----

std::string run_synth(Stage& s) {
  SynthConfig sc = s.config().synth;
  sc.seed = s.config().seed;
  sc.tz_offset_hours = s.config().tz_offset_hours;
  const SynthCorpus synth = generate(sc);
  {
    auto out = s.create("posts.tsv");
    for (const auto& p : synth.posts) out << format_content_line(p) << '\n';
  }
  {
    auto out = s.create("access.log");
    write_access_log(out, synth);
  }
  {
    auto out = s.create("truth.tsv");
    write_truth_tsv(out, synth.truth);
  }
  {
    auto out = s.create("experts.tsv");
    write_experts_tsv(out, synth.truth);
  }
  return "synth: " + std::to_string(synth.posts.size()) + " posts, " +
         std::to_string(synth.accesses.size() + synth.extra_log_lines.size()) + " log lines, " +
         std::to_string(synth.truth.influence_pairs.size()) + " influence pairs";
}

std::string run_ingest(Stage& s) {
  const auto& c = s.config();
  auto content_in = s.open(c.content());
  auto log_in = s.open(c.access_log());
  auto posts = parse_content_file(content_in);
  auto accesses = parse_access_log(log_in);
  const auto post_stats = posts.stats;
  const auto access_stats = accesses.stats;
  Corpus raw(std::move(posts.records), std::move(accesses.records));
  CleaningRules rules;
  rules.window_hours = c.window_hours;
  CleaningReport report;
  const Corpus corpus = clean_accesses(raw, rules, &report);

  {
    auto out = s.create(kPosts);
    write_posts_tsv(out, corpus);
  }
  {
    auto out = s.create(kAccess);
    write_accesses_tsv(out, corpus);
  }
  {
    auto out = s.create("ingest_report.tsv");
    out << "content_lines\t" << post_stats.lines << "\ncontent_parsed\t" << post_stats.parsed
        << "\ncontent_malformed\t" << post_stats.malformed << "\ncontent_ignored\t" << post_stats.ignored
        << "\naccess_lines\t" << access_stats.lines << "\naccess_parsed\t" << access_stats.parsed
        << "\naccess_malformed\t" << access_stats.malformed << "\naccess_ignored\t" << access_stats.ignored
        << "\nclean_input\t" << report.input << "\nclean_non_blogger_ip\t" << report.non_blogger_ip
        << "\nclean_robot\t" << report.robot << "\nclean_index_html\t" << report.index_html
        << "\nclean_non_post\t" << report.non_post << "\nclean_self_access\t" << report.self_access
        << "\nclean_outside_window\t" << report.outside_window << "\nclean_kept\t" << report.kept
        << "\nbloggers\t" << corpus.bloggers().size() << '\n';
  }
  const auto h = activity_histograms(corpus, c.tz_offset_hours);
  {
    auto out = s.create("hist_post_hour.tsv");
    write_histogram_tsv(out, h.post_hour);
  }
  {
    auto out = s.create("hist_post_weekday.tsv");
    write_histogram_tsv(out, h.post_weekday);
  }
  {
    auto out = s.create("hist_access_hour.tsv");
    write_histogram_tsv(out, h.access_hour);
  }
  {
    auto out = s.create("hist_access_weekday.tsv");
    write_histogram_tsv(out, h.access_weekday);
  }
  {
    auto out = s.create("posts_per_blogger.tsv");
    for (const auto& [user, n] : h.posts_per_blogger) out << user << '\t' << n << '\n';
    const auto& d = h.posts_per_blogger_summary;
    out << "# count=" << d.count << " mean=" << fmt(d.mean) << " median=" << fmt(d.median)
        << " q1=" << fmt(d.q1) << " q3=" << fmt(d.q3) << " min=" << fmt(d.min) << " max=" << fmt(d.max)
        << '\n';
  }
  return "ingest: " + std::to_string(corpus.posts().size()) + " posts, " +
         std::to_string(report.kept) + " of " + std::to_string(report.input) + " accesses kept";
}

std::string run_links(Stage& s) {
  const auto& c = s.config();
  PrepareOptions opt;
  opt.window_hours = c.window_hours;
  opt.vocab_max_size = c.vocab_max_size;
  opt.min_tokens = c.min_tokens;
  opt.tokenizer = tokenizer_config(s);
  const Corpus corpus = load_corpus(s);
  const Vocabulary vocab = corpus_vocabulary(corpus, opt.tokenizer, opt.vocab_max_size);
  const auto vectors = post_vectors(corpus, vocab, opt.tokenizer);
  ImplicitNetwork net = build_implicit_links(corpus, c.window_hours);
  annotate_similarity(net.links, vectors, c.min_tokens);
  {
    auto out = s.create(kVocab);
    write_vocabulary_tsv(out, vocab);
  }
  {
    auto out = s.create(kImplicit);
    write_links_tsv(out, corpus, net.links);
  }
  {
    auto out = s.create("link_gap_hist.tsv");
    const auto h = gap_histogram(net.links, c.window_hours);
    out << "hours\tlinks\n";
    for (std::size_t b = 0; b < h.size(); ++b) out << b + 1 << '\t' << h[b] << '\n';
  }
  {
    auto out = s.create("links_summary.tsv");
    out << "bloggers\t" << net.counts.bloggers << "\nposts\t" << net.counts.posts << "\npost_links\t"
        << net.counts.post_links << "\nblogger_links\t" << net.counts.blogger_links << '\n';
  }
  return "links: " + std::to_string(net.counts.post_links) + " implicit links among " +
         std::to_string(net.counts.bloggers) + " bloggers";
}

std::string run_causality(Stage& s) {
  const auto& c = s.config();
  const Corpus corpus = load_corpus(s);
  ImplicitNetwork net;
  net.links = load_links(s, kImplicit, corpus);
  net.window_hours = c.window_hours;
  ZTestConfig zc;
  zc.min_bucket_n = c.min_bucket_n;
  zc.buckets = c.window_hours;
  Rng rng(c.seed);
  Rng forward_rng = rng.fork();
  Rng reversed_rng = rng.fork();
  const auto fwd = forward_z_test(net, forward_rng, zc);
  const auto rev = reversed_z_test(net, reversed_rng, zc);
  {
    auto out = s.create("z_forward.tsv");
    write_zreport_tsv(out, fwd);
  }
  {
    auto out = s.create("z_reversed.tsv");
    write_zreport_tsv(out, rev);
  }
  return "causality: hour-1 z forward " + fmt(fwd.buckets[0].z) + ", reversed " + fmt(rev.buckets[0].z);
}

std::string run_influence(Stage& s) {
  const auto& c = s.config();
  const Corpus corpus = load_corpus(s);
  ImplicitNetwork net;
  net.links = load_links(s, kImplicit, corpus);
  net.window_hours = c.window_hours;
  const auto verdicts = judge_links(net, c.tau_hours);
  const auto infl = extract_influence(net, c.tau_hours);
  {
    auto out = s.create("link_verdicts.tsv");
    write_influence_tsv(out, corpus, net.links, verdicts);
  }
  {
    auto out = s.create(kInfluence);
    write_links_tsv(out, corpus, infl.links);
  }
  {
    auto out = s.create("rank_themes.tsv");
    write_rank_shift_tsv(out, theme_rank_shift(corpus, infl.links));
  }
  {
    auto out = s.create("rank_bloggers.tsv");
    write_rank_shift_tsv(out, blogger_rank_shift(corpus, net.links, infl.links));
  }
  {
    auto out = s.create("influence_summary.tsv");
    out << "bloggers\t" << infl.counts.bloggers << "\nposts\t" << infl.counts.posts << "\npost_links\t"
        << infl.counts.post_links << "\nblogger_links\t" << infl.counts.blogger_links << '\n';
  }
  return "influence: " + std::to_string(infl.counts.post_links) + " of " +
         std::to_string(net.links.size()) + " implicit links kept";
}

std::string run_topics(Stage& s) {
  const auto& c = s.config();
  const Corpus corpus = load_corpus(s);
  const Vocabulary vocab = load_vocab(s);
  const auto vectors = post_vectors(corpus, vocab, tokenizer_config(s));
  std::vector<TermVector> docs;
  if (c.plsa_all_posts) {
    for (const auto& v : vectors) {
      if (!v.entries.empty()) docs.push_back(v);
    }
  } else {
    std::set<PostId> posts;
    for (const auto& l : load_links(s, kInfluence, corpus)) {
      posts.insert(l.q);
      posts.insert(l.p);
    }
    for (PostId p : posts) {
      if (!vectors[p].entries.empty()) docs.push_back(vectors[p]);
    }
  }
  const TopicModel model = fit_plsa(make_doc_term(docs, vocab.size()), plsa_config(c));
  {
    auto out = s.create(kTopics);
    write_topic_model(out, model, vocab);
  }
  {
    auto out = s.create("topic_keywords.tsv");
    out << "topic\trank\tterm\tprob\n";
    for (std::size_t t = 0; t < model.topics(); ++t) {
      const auto kw = top_keywords(model, vocab, t, c.top_n);
      for (std::size_t r = 0; r < kw.size(); ++r) {
        out << t + 1 << '\t' << r + 1 << '\t' << kw[r].first << '\t' << fmt(kw[r].second) << '\n';
      }
    }
  }
  return "topics: K=" + std::to_string(model.topics()) + " over " + std::to_string(docs.size()) +
         " documents, loglik " + fmt(model.loglik_trace.back());
}

std::string run_tensor(Stage& s) {
  const auto in = load_influence(s);
  TensorOptions opt;
  opt.tf_weighting = s.config().tf_weighting;
  const auto t = build_influence_tensor(in.links, in.vectors, in.vocab.size(), in.graph.nodes, opt);
  {
    auto out = s.create("tensor.tsv");
    write_tensor_tsv(out, t, in.corpus, in.vocab);
  }
  return "tensor: " + std::to_string(t.entries.size()) + " non-zeros, mass " + fmt(t.total());
}

std::string run_iolap(Stage& s) {
  const auto& c = s.config();
  const auto in = load_influence(s);
  const TopicModel topics = load_topics(s, in.vocab);
  TensorOptions opt;
  opt.tf_weighting = c.tf_weighting;
  const auto t = build_influence_tensor(in.links, in.vectors, in.vocab.size(), in.graph.nodes, opt);
  const IolapModel m = fit_iolap(t, topics.p_w_given_t, iolap_config(c));
  {
    auto out = s.create(kIolap);
    write_iolap_model(out, m, t, in.corpus, in.vocab);
  }
  {
    auto out = s.create("iolap_influencers.tsv");
    out << "topic\trank\tblogger\tscore\n";
    for (std::size_t k = 0; k < m.K; ++k) {
      const auto top = iolap_topic_influencers(m, k, c.top_n);
      for (std::size_t r = 0; r < top.size(); ++r) {
        out << k + 1 << '\t' << r + 1 << '\t' << in.corpus.bloggers()[in.graph.nodes[top[r].first]]
            << '\t' << fmt(top[r].second) << '\n';
      }
    }
  }
  return "iolap: I=" + std::to_string(m.I) + " J=" + std::to_string(m.J) + " K=" +
         std::to_string(m.K) + ", loglik " + fmt(m.loglik_trace.back());
}

std::string run_pcldc(Stage& s) {
  const auto in = load_influence(s);
  const auto content = blogger_content(in.graph.nodes, in.corpus, in.vectors, in.vocab.size());
  const PcldcModel m = fit_pcldc(in.graph, content, pcl_config(s.config()));
  {
    auto out = s.create(kPcldc);
    write_pcldc_model(out, m, node_labels(in.graph, in.corpus), in.vocab);
  }
  return "pcldc: " + std::to_string(in.graph.size()) + " bloggers, objective " +
         fmt(m.objective_trace.back());
}

std::string run_pcl(Stage& s) {
  const auto in = load_influence(s);
  const PclModel m = fit_pcl(in.graph, pcl_config(s.config()));
  {
    auto out = s.create(kPcl);
    write_pcl_model(out, m, node_labels(in.graph, in.corpus));
  }
  return "pcl: " + std::to_string(in.graph.size()) + " bloggers, objective " +
         fmt(m.objective_trace.back());
}

std::string run_idr(Stage& s) {
  const auto& c = s.config();
  const Vocabulary vocab = load_vocab(s);
  const TopicModel topics = load_topics(s, vocab);
  const IolapModel iolap = load_iolap(s);
  const PcldcModel pcldc = load_pcldc(s);
  const auto r_iolap = iolap_rankings(iolap);
  const auto r_pcldc = pcldc_topic_rankings(pcldc, topics);
  const std::size_t max_n = std::min<std::size_t>(c.top_n, static_cast<std::size_t>(iolap.Y.rows()));
  auto out = s.create("idr.tsv");
  out << "method\tN\tidr\n";
  for (const auto& [name, rankings] : {std::pair{"iolap", &r_iolap}, std::pair{"pcldc", &r_pcldc}}) {
    for (std::size_t n = 1; n <= max_n; ++n) out << name << '\t' << n << '\t' << fmt(idr(*rankings, n)) << '\n';
  }
  return "idr: IDR_" + std::to_string(max_n) + " iolap " + fmt(idr(r_iolap, max_n)) + ", pcldc " +
         fmt(idr(r_pcldc, max_n));
}

std::string run_split(Stage& s) {
  const auto in = load_influence(s);
  Rng rng(s.config().seed);
  const auto split = split_train_test(in.graph, in.links, in.vectors, rng);
  const auto labels = node_labels(in.graph, in.corpus);
  {
    auto out = s.create(kSplitTrain);
    for (const auto& e : split.train.edges) {
      out << labels[e.src] << '\t' << labels[e.dst] << '\t' << fmt(e.weight) << '\n';
    }
  }
  {
    auto out = s.create(kSplitTest);
    for (const auto& q : split.test) {
      out << labels[q.source] << '\t' << labels[q.target] << '\t';
      for (std::size_t i = 0; i < q.keywords.size(); ++i) out << (i ? "," : "") << in.vocab.term(q.keywords[i]);
      out << '\n';
    }
  }
  return "split: " + std::to_string(split.train.edges.size()) + " training edges, " +
         std::to_string(split.test.size()) + " test queries";
}

TrainTestSplit load_split(const Stage& s, const InfluenceInputs& in) {
  TrainTestSplit split;
  split.train.nodes = in.graph.nodes;
  auto node = [&](std::string_view user) {
    auto b = in.corpus.blogger_id(user);
    auto l = b ? in.graph.local(*b) : std::nullopt;
    if (!l) throw FormatError("split refers to an unknown blogger: " + std::string(user));
    return *l;
  };
  std::string line;
  {
    auto f = s.open(s.artifact(kSplitTrain));
    while (tsv::next_record(f, line)) {
      const auto x = tsv::split(line);
      auto w = x.size() == 3 ? tsv::parse_double(x[2]) : std::nullopt;
      if (!w) throw FormatError("bad split row: " + line);
      split.train.edges.push_back({node(x[0]), node(x[1]), *w});
    }
  }
  std::set<std::pair<BloggerId, BloggerId>> held_out;
  {
    auto f = s.open(s.artifact(kSplitTest));
    while (tsv::next_record(f, line)) {
      const auto x = tsv::split(line);
      if (x.size() != 3) throw FormatError("bad split row: " + line);
      TestQuery q{node(x[0]), node(x[1]), {}};
      for (auto term : tsv::split(x[2], ',')) {
        if (auto id = in.vocab.find(term)) q.keywords.push_back(*id);
      }
      held_out.emplace(in.graph.nodes[q.source], in.graph.nodes[q.target]);
      split.test.push_back(std::move(q));
    }
  }
  for (const auto& l : in.links) {
    if (!held_out.contains({l.reader, l.author})) split.train_links.push_back(l);
  }
  return split;
}

std::string run_recommend(Stage& s) {
  const auto& c = s.config();
  const auto in = load_influence(s);
  if (c.query_blogger.empty()) throw InvalidArgument("recommend needs --query-blogger");
  const auto b = in.corpus.blogger_id(c.query_blogger);
  const auto a = b ? in.graph.local(*b) : std::nullopt;
  if (!a) throw InvalidArgument("unknown query blogger: " + c.query_blogger);
  std::vector<TermId> keywords;
  for (auto term : tsv::split(c.query_keywords, ',')) {
    if (auto id = in.vocab.find(term)) keywords.push_back(*id);
  }
  const auto exclude = bookmark_exclusions(in.graph, *a);
  std::vector<RankedBlogger> ranked;
  if (c.method == "iolap") {
    const auto m = load_iolap(s);
    check_nodes(m.X.rows(), in.graph, "iOLAP model");
    ranked = recommend_iolap(m, *a, keywords, c.top_n, exclude);
  } else if (c.method == "tg") {
    const auto m = load_iolap(s);
    check_nodes(m.X.rows(), in.graph, "iOLAP model");
    ranked = recommend_tg(m, load_topics(s, in.vocab), keywords, c.top_n, exclude);
  } else if (c.method == "pcldc") {
    const auto m = load_pcldc(s);
    check_nodes(m.Y.rows(), in.graph, "PCL-DC model");
    ranked = recommend_pcldc(m, *a, keywords, c.top_n, exclude);
  } else {
    const auto m = load_pcl(s);
    check_nodes(m.Y.rows(), in.graph, "PCL model");
    ranked = recommend_pcl(m, *a, c.top_n, exclude);
  }
  auto out = s.create("recommendations.tsv");
  out << "rank\tblogger\tscore\n";
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    out << r + 1 << '\t' << in.corpus.bloggers()[in.graph.nodes[ranked[r].node]] << '\t'
        << fmt(ranked[r].score) << '\n';
  }
  return "recommend: " + std::to_string(ranked.size()) + " bloggers for " + c.query_blogger + " by " + c.method;
}

std::string run_eval(Stage& s) {
  const auto& c = s.config();
  const auto in = load_influence(s);
  const auto split = load_split(s, in);
  SuiteConfig sc{plsa_config(c), iolap_config(c), pcl_config(c)};
  const auto suite = fit_recommenders(split, in.corpus, in.vectors, in.vocab.size(), sc);
  const auto curves = evaluate_recommenders(split, suite, c.top_n);
  {
    auto out = s.create("eval_recall.tsv");
    write_recall_tsv(out, curves);
  }
  std::string summary = "eval: recall@" + std::to_string(c.top_n);
  for (const auto& cv : curves) summary += " " + cv.method + "=" + fmt(cv.recall.back());
  return summary;
}

std::string run_report(Stage& s) {
  const std::vector<std::pair<std::string, std::string>> parts = {
      {"post_hour", "hist_post_hour.tsv"},       {"post_weekday", "hist_post_weekday.tsv"},
      {"access_hour", "hist_access_hour.tsv"},   {"access_weekday", "hist_access_weekday.tsv"},
      {"link_gap", "link_gap_hist.tsv"},         {"z_forward", "z_forward.tsv"},
      {"z_reversed", "z_reversed.tsv"},          {"idr", "idr.tsv"},
      {"recall", "eval_recall.tsv"}};
  for (const auto& [kind, file] : parts) s.artifact(file);
  const fs::path dir = fs::path(s.config().out_dir) / "report";
  fs::create_directories(dir);
  for (const auto& [kind, file] : parts) {
    fs::copy_file(s.local(file), dir / file, fs::copy_options::overwrite_existing);
  }
  auto out = s.create("report/index.tsv");
  out << "kind\tfile\n";
  for (const auto& [kind, file] : parts) out << kind << '\t' << file << '\n';
  return "report: " + std::to_string(parts.size()) + " plot-data files in " + dir.string();
}

}  // namespace

void PipelineConfig::validate() const {
  auto fail = [](const std::string& what) { throw InvalidArgument("config: " + what); };
  if (out_dir.empty()) fail("out-dir must not be empty");
  if (window_hours < 1) fail("window-hours must be >= 1");
  if (tau_hours < 1) fail("tau-hours must be >= 1");
  if (tz_offset_hours < -12 || tz_offset_hours > 14) fail("tz-offset must be within [-12, 14]");
  if (vocab_max_size < 1) fail("vocab-size must be >= 1");
  if (min_bucket_n < 1) fail("min-bucket-n must be >= 1");
  if (topics < 1 || communities < 1) fail("topic and community counts must be >= 1");
  if (iolap_influenced < 1 || iolap_influencer < 1) fail("rank I,J must be >= 1");
  if (restarts < 1) fail("restarts must be >= 1");
  if (!(tolerance >= 0)) fail("tolerance must be >= 0");
  if (!(pcl_l2 >= 0)) fail("pcl-l2 must be >= 0");
  if (top_n < 1) fail("top-n must be >= 1");
  if (threads < 1) fail("threads must be >= 1");
  if (method != "iolap" && method != "tg" && method != "pcldc" && method != "pcl") {
    fail("method must be one of iolap, tg, pcldc, pcl");
  }
  synth.validate();
}

std::vector<std::pair<std::string, std::string>> PipelineConfig::canonical() const {
  const auto& y = synth;
  return {
      {"window_hours", std::to_string(window_hours)},
      {"tau_hours", std::to_string(tau_hours)},
      {"tz_offset", std::to_string(tz_offset_hours)},
      {"vocab_size", std::to_string(vocab_max_size)},
      {"min_tokens", std::to_string(min_tokens)},
      {"min_bucket_n", std::to_string(min_bucket_n)},
      {"plsa_all_posts", std::to_string(plsa_all_posts)},
      {"tf_weighting", std::to_string(tf_weighting)},
      {"topics", std::to_string(topics)},
      {"rank_i", std::to_string(iolap_influenced)},
      {"rank_j", std::to_string(iolap_influencer)},
      {"communities", std::to_string(communities)},
      {"plsa_iters", std::to_string(plsa_iters)},
      {"iolap_iters", std::to_string(iolap_iters)},
      {"pcl_iters", std::to_string(pcl_iters)},
      {"restarts", std::to_string(restarts)},
      {"tolerance", fmt(tolerance)},
      {"pcl_l2", fmt(pcl_l2)},
      {"top_n", std::to_string(top_n)},
      {"query_blogger", query_blogger},
      {"query_keywords", query_keywords},
      {"method", method},
      {"seed", std::to_string(seed)},
      {"synth_bloggers", std::to_string(y.n_bloggers)},
      {"synth_days", std::to_string(y.n_days)},
      {"synth_vocab", std::to_string(y.vocab_size)},
      {"synth_topics", std::to_string(y.topics)},
      {"synth_post_rate", fmt(y.posts_per_blogger_rate)},
      {"synth_read_rate", fmt(y.reads_per_post_rate)},
      {"synth_read_gap_mean", fmt(y.read_gap_mean_hours)},
      {"synth_copy_prob", fmt(y.copy_prob)},
      {"synth_copy_gap", fmt(y.copy_gap_max_hours)},
      {"synth_copy_fraction", fmt(y.copy_fraction)},
      {"synth_confounder", fmt(y.confounder_strength)},
      {"synth_groups", std::to_string(y.groups)},
      {"synth_experts", std::to_string(y.experts_per_cell)},
      {"synth_expert_focus", fmt(y.expert_focus)},
      {"synth_noise", fmt(y.noise_per_read)},
  };
}

std::uint64_t PipelineConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [k, v] : canonical()) {
    for (char ch : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(ch);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string PipelineConfig::content() const {
  return content_path.empty() ? (fs::path(out_dir) / "posts.tsv").string() : content_path;
}

std::string PipelineConfig::access_log() const {
  return access_log_path.empty() ? (fs::path(out_dir) / "access.log").string() : access_log_path;
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {
      "synth", "ingest", "links", "causality", "influence", "topics", "tensor", "iolap",
      "pcldc", "pcl",    "idr",   "split",     "recommend", "eval",   "report"};
  return names;
}

std::string subcommand_help(const std::string& name) {
  static const std::map<std::string, std::string> help = {
      {"synth", "Generate posts.tsv, access.log and ground truth"},
      {"ingest", "Parse and clean the content file and access log"},
      {"links", "Build the vocabulary and implicit links"},
      {"causality", "Forward and reversed z tests over the implicit links"},
      {"influence", "Extract influence links and rank shifts"},
      {"topics", "Fit PLSA"},
      {"tensor", "Build the influence tensor"},
      {"iolap", "Fit the topic-aware tensor model"},
      {"pcldc", "Fit the popularity and content block model"},
      {"pcl", "Fit the content-free block model"},
      {"idr", "Influence diversity of the fitted models"},
      {"split", "Hold out one influence edge per eligible blogger"},
      {"recommend", "Recommend influencers for one query"},
      {"eval", "Recall curves of the four recommenders"},
      {"report", "Collect plot data into report/"}};
  auto it = help.find(name);
  return it == help.end() ? std::string() : it->second;
}

std::string run_subcommand(const std::string& name, const PipelineConfig& config) {
  config.validate();
  Stage s(config, name);
  if (name == "synth") return run_synth(s);
  if (name == "ingest") return run_ingest(s);
  if (name == "links") return run_links(s);
  if (name == "causality") return run_causality(s);
  if (name == "influence") return run_influence(s);
  if (name == "topics") return run_topics(s);
  if (name == "tensor") return run_tensor(s);
  if (name == "iolap") return run_iolap(s);
  if (name == "pcldc") return run_pcldc(s);
  if (name == "pcl") return run_pcl(s);
  if (name == "idr") return run_idr(s);
  if (name == "split") return run_split(s);
  if (name == "recommend") return run_recommend(s);
  if (name == "eval") return run_eval(s);
  if (name == "report") return run_report(s);
  throw InvalidArgument("unknown subcommand: " + name);
}

int exit_status_for(const std::exception& e) {
  if (dynamic_cast<const MissingInput*>(&e)) return 2;
  if (dynamic_cast<const NumericError*>(&e)) return 3;
  return 1;
}

std::vector<TermVector> post_vectors(const Corpus& corpus, const Vocabulary& vocab,
                                     const TokenizerConfig& tokenizer) {
  std::vector<TermVector> out;
  out.reserve(corpus.posts().size());
  for (const auto& p : corpus.posts()) out.push_back(to_term_vector(tokenize(p.body, tokenizer), vocab));
  return out;
}

Vocabulary corpus_vocabulary(const Corpus& corpus, const TokenizerConfig& tokenizer,
                             std::size_t max_size) {
  std::vector<std::vector<std::string>> docs;
  docs.reserve(corpus.posts().size());
  for (const auto& p : corpus.posts()) docs.push_back(tokenize(p.body, tokenizer));
  return build_vocabulary(docs, max_size);
}

PreparedNetwork prepare_network(const Corpus& raw, const PrepareOptions& options) {
  PreparedNetwork out;
  CleaningRules rules = options.cleaning;
  rules.window_hours = options.window_hours;
  out.corpus = clean_accesses(raw, rules, &out.cleaning);
  out.vocab = corpus_vocabulary(out.corpus, options.tokenizer, options.vocab_max_size);
  out.vectors = post_vectors(out.corpus, out.vocab, options.tokenizer);
  out.implicit = build_implicit_links(out.corpus, options.window_hours);
  annotate_similarity(out.implicit.links, out.vectors, options.min_tokens);
  return out;
}

}  // namespace blogflux
