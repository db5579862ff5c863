// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "blogflux/corpus.hpp"

namespace blogflux {

struct SynthConfig {
  std::size_t n_bloggers = 300;
  std::size_t n_days = 28;
  std::size_t vocab_size = 1500;
  std::size_t topics = 8;
  double posts_per_blogger_rate = 0.7;  // per day
  double reads_per_post_rate = 5.0;     // reads in the window before each post
  double read_gap_mean_hours = 4.0;     // exponential, truncated to the window
  int read_window_hours = 12;
  double copy_prob = 0.0;
  double copy_gap_max_hours = 2.0;
  double copy_fraction = 0.3;           // share of tokens replaced by copied ones
  double confounder_strength = 0.6;     // chance a read targets a same-topic author
  double topic_focus = 0.8;             // weight of a blogger's primary topic
  double background_fraction = 0.3;
  double post_length_mean = 80;
  std::size_t recency_days = 7;         // read targets are at most this old
  // Member groups with planted experts per (group, topic); 0 disables.
  std::size_t groups = 0;
  std::size_t experts_per_cell = 3;
  double expert_focus = 0.7;            // chance a member read goes to its experts
  double dialect_fraction = 0.1;        // tokens drawn from the group's own words
  double second_ip_fraction = 0.05;
  double noise_per_read = 0.2;          // extra log lines removed by cleaning
  std::string influence_theme = "meetup";
  double influence_theme_prob = 0.5;
  int tz_offset_hours = 9;
  std::uint64_t seed = 1;

  // Throws InvalidArgument.
  void validate() const;
};

struct ExpertCell {
  std::size_t group = 0;
  std::size_t topic = 0;
  std::string user_id;
};

struct GroundTruth {
  std::vector<std::pair<std::string, std::string>> influence_pairs;  // (q url, p url)
  std::vector<ExpertCell> experts;
  std::vector<std::pair<std::string, std::size_t>> member_groups;  // user -> group
};

struct SynthCorpus {
  std::vector<BlogPost> posts;             // ordered by upload time
  std::vector<AccessRecord> accesses;      // GET records, ordered by time
  std::vector<std::pair<Timestamp, std::string>> extra_log_lines;  // non-GET lines
  GroundTruth truth;
};

// Throws InvalidArgument when the configuration yields no posts.
SynthCorpus generate(const SynthConfig& config);

// Apache combined lines for accesses and extra lines merged by time.
void write_access_log(std::ostream& out, const SynthCorpus& synth);
// `q<TAB>p` urls.
void write_truth_tsv(std::ostream& out, const GroundTruth& truth);
// `group<TAB>topic<TAB>user`.
void write_experts_tsv(std::ostream& out, const GroundTruth& truth);
std::vector<std::pair<std::string, std::string>> read_truth_tsv(std::istream& in);

}  // namespace blogflux
