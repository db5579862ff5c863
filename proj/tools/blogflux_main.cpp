// Apache License, Version 2.0, refer to LICENSE.txt

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "blogflux/pipeline.hpp"

namespace {

void parse_rank(const std::string& text, blogflux::PipelineConfig& cfg) {
  const auto comma = text.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument(text);
    std::size_t used = 0;
    const long i = std::stol(text.substr(0, comma), &used);
    if (used != comma) throw std::invalid_argument(text);
    const long j = std::stol(text.substr(comma + 1), &used);
    if (used != text.size() - comma - 1 || i < 1 || j < 1) throw std::invalid_argument(text);
    cfg.iolap_influenced = static_cast<std::size_t>(i);
    cfg.iolap_influencer = static_cast<std::size_t>(j);
  } catch (const std::exception&) {
    throw blogflux::InvalidArgument("--rank expects I,J with positive integers, got " + text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  blogflux::PipelineConfig cfg;
  auto& sy = cfg.synth;
  std::string rank;

  CLI::App app{"Influence extraction and topic-aware influence models for blog logs"};
  app.set_version_flag("--version", blogflux::kVersion);
  app.set_config("--config", "", "Flat key=value config file; flags override it");
  app.require_subcommand(1);

  app.add_option("--out-dir", cfg.out_dir, "Directory for all artifacts");
  app.add_option("--content", cfg.content_path, "Content file (default <out-dir>/posts.tsv)");
  app.add_option("--access-log", cfg.access_log_path, "Access log (default <out-dir>/access.log)");
  app.add_option("--stopwords", cfg.stopwords_path, "Stopword list, one word per line");
  app.add_option("--seed", cfg.seed, "Random seed");
  app.add_option("--threads", cfg.threads, "Worker cap");
  app.add_option("--window-hours", cfg.window_hours, "Implicit link window");
  app.add_option("--tau-hours", cfg.tau_hours, "Influence time threshold");
  app.add_option("--tz-offset", cfg.tz_offset_hours, "Local time offset for histograms");
  app.add_option("--vocab-size", cfg.vocab_max_size, "Vocabulary cap");
  app.add_option("--min-tokens", cfg.min_tokens, "Tokens a post needs for a similarity");
  app.add_option("--min-bucket-n", cfg.min_bucket_n, "Coins a z bucket needs");
  app.add_flag("--plsa-all-posts", cfg.plsa_all_posts, "Fit topics on every post");
  app.add_flag("--tf-weighting", cfg.tf_weighting, "Weight tensor entries by term frequency");
  app.add_option("--topics", cfg.topics, "Number of topics K");
  app.add_option("--rank", rank, "Influenced and influencer group counts as I,J");
  app.add_option("--communities", cfg.communities, "Communities for PCL and PCL-DC");
  app.add_option("--plsa-iters", cfg.plsa_iters, "PLSA iteration cap");
  app.add_option("--iolap-iters", cfg.iolap_iters, "iOLAP iteration cap");
  app.add_option("--pcl-iters", cfg.pcl_iters, "PCL/PCL-DC iteration cap");
  app.add_option("--restarts", cfg.restarts, "iOLAP restarts");
  app.add_option("--tolerance", cfg.tolerance, "Relative convergence tolerance");
  app.add_option("--pcl-l2", cfg.pcl_l2, "L2 penalty on PCL-DC weights");
  app.add_option("--top-n", cfg.top_n, "List length for keywords, IDR and recall");
  app.add_option("--query-blogger", cfg.query_blogger, "User id for recommend");
  app.add_option("--query-keywords", cfg.query_keywords, "Comma separated keywords for recommend");
  app.add_option("--method", cfg.method, "Recommender: iolap, tg, pcldc or pcl");

  app.add_option("--synth-bloggers", sy.n_bloggers, "Generated bloggers");
  app.add_option("--synth-days", sy.n_days, "Days of activity");
  app.add_option("--synth-vocab", sy.vocab_size, "Generated vocabulary size");
  app.add_option("--synth-topics", sy.topics, "Generated topics");
  app.add_option("--synth-post-rate", sy.posts_per_blogger_rate, "Posts per blogger per day");
  app.add_option("--synth-read-rate", sy.reads_per_post_rate, "Reads before each post");
  app.add_option("--synth-read-gap-mean", sy.read_gap_mean_hours, "Mean read-to-post gap in hours");
  app.add_option("--synth-copy-prob", sy.copy_prob, "Chance a post copies a recent read");
  app.add_option("--synth-copy-gap", sy.copy_gap_max_hours, "Largest copy gap in hours");
  app.add_option("--synth-copy-fraction", sy.copy_fraction, "Share of tokens copied");
  app.add_option("--synth-confounder", sy.confounder_strength, "Chance a read targets a same-topic author");
  app.add_option("--synth-groups", sy.groups, "Member groups (0 disables experts)");
  app.add_option("--synth-experts", sy.experts_per_cell, "Experts per group and topic");
  app.add_option("--synth-expert-focus", sy.expert_focus, "Chance a member read goes to its experts");
  app.add_option("--synth-noise", sy.noise_per_read, "Noise log lines per read");

  for (const auto& name : blogflux::subcommands()) {
    app.add_subcommand(name, blogflux::subcommand_help(name))->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (!rank.empty()) parse_rank(rank, cfg);
    std::cout << blogflux::run_subcommand(name, cfg) << '\n';
  } catch (const std::exception& e) {
    std::cerr << "blogflux " << name << ": " << e.what() << '\n';
    return blogflux::exit_status_for(e);
  }
  return 0;
}
