// Apache License, Version 2.0, refer to LICENSE.txt

#include "blogflux/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "blogflux/rng.hpp"
#include "blogflux/time_util.hpp"
#include "blogflux/tsv.hpp"

namespace blogflux {
namespace {

constexpr std::int64_t kDay = 24 * kSecondsPerHour;

// Sunday first.
constexpr std::array<double, 7> kWeekday = {1.4, 0.9, 0.9, 0.9, 0.9, 1.0, 1.2};
// Local clock.
constexpr std::array<double, 24> kHourly = {1.0, 0.6, 0.3, 0.2, 0.15, 0.15, 0.3, 0.6,
                                            0.8, 0.9, 1.0, 1.1, 1.4, 1.1, 1.0, 1.0,
                                            1.0, 1.1, 1.2, 1.4, 1.6, 1.8, 1.8, 1.5};

class Sampler {
 public:
  explicit Sampler(std::vector<double> weights) : cumulative_(std::move(weights)) {
    for (std::size_t i = 1; i < cumulative_.size(); ++i) cumulative_[i] += cumulative_[i - 1];
  }
  std::size_t draw(Rng& rng) const {
    const double u = rng.uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
  }

 private:
  std::vector<double> cumulative_;
};

Sampler zipf(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t r = 0; r < n; ++r) w[r] = 1.0 / std::pow(double(r + 1), 0.8);
  return Sampler(std::move(w));
}

std::string word(std::size_t i) {
  static const char* kConsonants = "kstnhmyrwgzdbp";
  static const char* kVowels = "aiueo";
  std::string w;
  std::size_t x = i;
  do {
    w.push_back(kConsonants[x % 14]);
    x /= 14;
    w.push_back(kVowels[x % 5]);
    x /= 5;
  } while (x > 0);
  if (w.size() < 4) w += "n";
  return w;
}

std::string hex_id(const char* prefix, std::uint64_t x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%s%012llx", prefix,
                static_cast<unsigned long long>(Rng::mix(x) & 0xffffffffffffULL));
  return buf;
}

std::string theme_name(std::size_t t) {
  static const std::array<const char*, 10> kNames = {"diary", "cooking", "pets",  "travel", "music",
                                                     "movies", "sports", "fashion", "games", "books"};
  return t < kNames.size() ? kNames[t] : "theme" + std::to_string(t);
}

struct Blogger {
  std::string user;
  std::vector<std::string> ips;
  std::size_t primary = 0;
  std::vector<double> mixture;
  std::ptrdiff_t group = -1;
  bool expert = false;
};

struct Draft {
  std::size_t blogger;
  Timestamp ts;
  std::size_t ip;
};

}  // namespace

void SynthConfig::validate() const {
  auto fail = [](const std::string& what) { throw InvalidArgument("synth config: " + what); };
  if (n_bloggers < 2) fail("n_bloggers must be >= 2");
  if (n_days < 1) fail("n_days must be >= 1");
  if (topics < 1) fail("topics must be >= 1");
  if (posts_per_blogger_rate < 0 || reads_per_post_rate < 0 || noise_per_read < 0) fail("rates must be >= 0");
  if (read_gap_mean_hours <= 0 || read_window_hours < 1) fail("read gaps need a positive mean and window");
  if (copy_prob < 0 || copy_prob > 1) fail("copy_prob must be in [0, 1]");
  if (copy_fraction < 0 || copy_fraction > 1) fail("copy_fraction must be in [0, 1]");
  if (copy_gap_max_hours <= 0) fail("copy_gap_max_hours must be positive");
  for (double p : {confounder_strength, topic_focus, background_fraction, expert_focus,
                   dialect_fraction, second_ip_fraction, influence_theme_prob}) {
    if (p < 0 || p > 1) fail("probabilities must be in [0, 1]");
  }
  if (background_fraction + dialect_fraction > 1) fail("background and dialect fractions exceed 1");
  if (post_length_mean < 1) fail("post_length_mean must be >= 1");
  const std::size_t dialect_words = groups * 20;
  if (vocab_size < topics * 10 + dialect_words + 10) fail("vocab_size too small for the topics");
  if (groups > 0 && groups * topics * experts_per_cell >= n_bloggers) fail("not enough bloggers for the experts");
  if (groups > 0 && experts_per_cell < 1) fail("experts_per_cell must be >= 1");
}

SynthCorpus generate(const SynthConfig& c) {
  c.validate();
  Rng rng(c.seed);
  Rng layout = rng.fork();
  Rng timing = rng.fork();
  Rng reading = rng.fork();
  Rng writing = rng.fork();
  Rng noise = rng.fork();

  // Vocabulary layout: background words, then per-group dialect words, then topic blocks.
  const std::size_t n_background = c.vocab_size / 4;
  const std::size_t n_dialect = c.groups > 0 ? 20 : 0;
  const std::size_t per_topic = (c.vocab_size - n_background - n_dialect * c.groups) / c.topics;
  std::vector<std::string> words(c.vocab_size);
  for (std::size_t i = 0; i < c.vocab_size; ++i) words[i] = word(i);
  const Sampler background = zipf(n_background);
  const Sampler topical = zipf(per_topic);
  const std::size_t dialect_base = n_background;
  const std::size_t topic_base = n_background + n_dialect * c.groups;

  // Bloggers; experts come first when groups are on.
  std::vector<Blogger> bloggers(c.n_bloggers);
  const std::size_t n_experts = c.groups * c.topics * c.experts_per_cell;
  SynthCorpus out;
  for (std::size_t b = 0; b < c.n_bloggers; ++b) {
    auto& bl = bloggers[b];
    char buf[32];
    std::snprintf(buf, sizeof buf, "u%04zu", b);
    bl.user = buf;
    bl.ips.push_back(hex_id("ip", c.seed * 1000003 + b));
    if (layout.uniform() < c.second_ip_fraction) bl.ips.push_back(hex_id("ip", c.seed * 1000003 + b + 500000));
    double focus = c.topic_focus;
    if (b < n_experts) {
      const std::size_t cell = b / c.experts_per_cell;
      bl.group = static_cast<std::ptrdiff_t>(cell / c.topics);
      bl.primary = cell % c.topics;
      bl.expert = true;
      focus = std::max(focus, 0.9);
      out.truth.experts.push_back({cell / c.topics, bl.primary, bl.user});
    } else {
      if (c.groups > 0) bl.group = static_cast<std::ptrdiff_t>((b - n_experts) % c.groups);
      bl.primary = layout.index(c.topics);
    }
    if (bl.group >= 0) out.truth.member_groups.emplace_back(bl.user, static_cast<std::size_t>(bl.group));
    bl.mixture.assign(c.topics, (1.0 - focus) / double(c.topics));
    bl.mixture[bl.primary] += focus;
  }
  std::vector<std::vector<std::size_t>> by_topic(c.topics);
  for (std::size_t b = 0; b < c.n_bloggers; ++b) by_topic[bloggers[b].primary].push_back(b);
  auto expert_of = [&](std::size_t g, std::size_t t, std::size_t e) {
    return (g * c.topics + t) * c.experts_per_cell + e;
  };

  // Upload times.
  const Timestamp start = make_utc(2008, 9, 1);
  const double max_weekday = *std::max_element(kWeekday.begin(), kWeekday.end());
  const Sampler hour_of_day(std::vector<double>(kHourly.begin(), kHourly.end()));
  std::vector<Draft> drafts;
  for (std::size_t b = 0; b < c.n_bloggers; ++b) {
    const auto n = timing.poisson(c.posts_per_blogger_rate * double(c.n_days));
    for (std::uint64_t x = 0; x < n; ++x) {
      std::size_t day;
      do {
        day = timing.index(c.n_days);
      } while (timing.uniform() * max_weekday > kWeekday[static_cast<std::size_t>(
                                                     local_weekday(start + Timestamp(day) * kDay, 0))]);
      const auto hour = static_cast<Timestamp>(hour_of_day.draw(timing));
      const auto second = static_cast<Timestamp>(timing.index(3600));
      const Timestamp ts = start + Timestamp(day) * kDay + hour * kSecondsPerHour + second -
                           c.tz_offset_hours * kSecondsPerHour;
      const std::size_t ip = bloggers[b].ips.size() > 1 && timing.uniform() < 0.3 ? 1 : 0;
      drafts.push_back({b, ts, ip});
    }
  }
  if (drafts.empty()) throw InvalidArgument("synth config produced no posts");
  std::stable_sort(drafts.begin(), drafts.end(), [](const Draft& a, const Draft& b) {
    return a.ts != b.ts ? a.ts < b.ts : a.blogger < b.blogger;
  });

  std::vector<std::vector<std::size_t>> posts_by(c.n_bloggers);
  std::vector<std::size_t> seq(c.n_bloggers, 0);
  std::vector<std::vector<std::uint32_t>> tokens(drafts.size());
  const std::int64_t window = c.read_window_hours * kSecondsPerHour;
  const std::int64_t recency = static_cast<std::int64_t>(c.recency_days) * kDay;
  const auto copy_gap = static_cast<std::int64_t>(c.copy_gap_max_hours * double(kSecondsPerHour));
  std::vector<Timestamp> post_times;
  for (const auto& d : drafts) post_times.push_back(d.ts);

  // A post of `author` uploaded in [from, until), uniformly chosen; -1 if none.
  auto pick_post_of = [&](std::size_t author, Timestamp from, Timestamp until) -> std::ptrdiff_t {
    const auto& list = posts_by[author];
    auto lo = std::lower_bound(list.begin(), list.end(), from,
                               [&](std::size_t p, Timestamp t) { return post_times[p] < t; });
    auto hi = std::lower_bound(list.begin(), list.end(), until,
                               [&](std::size_t p, Timestamp t) { return post_times[p] < t; });
    if (lo == hi) return -1;
    return static_cast<std::ptrdiff_t>(*(lo + static_cast<std::ptrdiff_t>(reading.index(static_cast<std::size_t>(hi - lo)))));
  };

  struct Read {
    Timestamp ts;
    std::size_t target;
    std::int64_t gap;
  };
  std::vector<Read> reads;
  for (std::size_t q = 0; q < drafts.size(); ++q) {
    const auto& d = drafts[q];
    const auto& bl = bloggers[d.blogger];

    reads.clear();
    const auto n_reads = reading.poisson(c.reads_per_post_rate);
    for (std::uint64_t r = 0; r < n_reads; ++r) {
      double hours;
      do {
        hours = reading.exponential(c.read_gap_mean_hours);
      } while (hours * double(kSecondsPerHour) > double(window));
      const std::int64_t gap = std::clamp<std::int64_t>(std::llround(hours * double(kSecondsPerHour)), 1, window);
      const Timestamp ts = d.ts - gap;
      std::size_t author;
      if (bl.group >= 0 && !bl.expert && reading.uniform() < c.expert_focus) {
        const std::size_t t = Sampler(bl.mixture).draw(reading);
        author = expert_of(static_cast<std::size_t>(bl.group), t, reading.index(c.experts_per_cell));
      } else if (reading.uniform() < c.confounder_strength && by_topic[bl.primary].size() > 1) {
        author = by_topic[bl.primary][reading.index(by_topic[bl.primary].size())];
      } else {
        author = reading.index(c.n_bloggers);
      }
      std::ptrdiff_t target = author == d.blogger ? -1 : pick_post_of(author, ts - recency, ts);
      for (int attempt = 0; target < 0 && attempt < 20; ++attempt) {
        // Any recent post by someone else.
        auto lo = std::lower_bound(post_times.begin(), post_times.end(), ts - recency);
        auto hi = std::lower_bound(post_times.begin(), post_times.end(), ts);
        if (lo == hi) break;
        const auto p = static_cast<std::size_t>(lo - post_times.begin()) +
                       reading.index(static_cast<std::size_t>(hi - lo));
        if (drafts[p].blogger != d.blogger) target = static_cast<std::ptrdiff_t>(p);
      }
      if (target < 0) continue;
      reads.push_back({ts, static_cast<std::size_t>(target), gap});
    }

    // Content.
    const std::size_t primary = Sampler(bl.mixture).draw(writing);
    const auto length = std::max<std::uint64_t>(15, writing.poisson(c.post_length_mean));
    auto& toks = tokens[q];
    for (std::uint64_t x = 0; x < length; ++x) {
      const double u = writing.uniform();
      if (u < c.background_fraction) {
        toks.push_back(static_cast<std::uint32_t>(background.draw(writing)));
      } else if (bl.group >= 0 && u < c.background_fraction + c.dialect_fraction) {
        toks.push_back(static_cast<std::uint32_t>(dialect_base + static_cast<std::size_t>(bl.group) * n_dialect +
                                                  writing.index(n_dialect)));
      } else {
        const std::size_t t = writing.uniform() < 0.75 ? primary : Sampler(bl.mixture).draw(writing);
        toks.push_back(static_cast<std::uint32_t>(topic_base + t * per_topic + topical.draw(writing)));
      }
    }
    std::vector<std::string> themes = {theme_name(primary)};
    if (writing.uniform() < c.copy_prob) {
      std::vector<std::size_t> eligible;
      for (std::size_t r = 0; r < reads.size(); ++r) {
        if (reads[r].gap <= copy_gap) eligible.push_back(r);
      }
      if (!eligible.empty()) {
        const std::size_t source = reads[eligible[writing.index(eligible.size())]].target;
        const auto& from = tokens[source];
        std::vector<std::size_t> slots(toks.size());
        for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i;
        writing.shuffle(slots);
        const auto n_copy = static_cast<std::size_t>(std::llround(c.copy_fraction * double(toks.size())));
        for (std::size_t i = 0; i < n_copy && i < slots.size(); ++i) toks[slots[i]] = from[writing.index(from.size())];
        out.truth.influence_pairs.emplace_back(std::to_string(q), std::to_string(source));
        if (!c.influence_theme.empty() && writing.uniform() < c.influence_theme_prob) {
          themes.push_back(c.influence_theme);
        }
      }
    }

    BlogPost post;
    post.hashed_ip = bl.ips[d.ip];
    post.upload_ts = d.ts;
    post.user_id = bl.user;
    post.url = "/" + bl.user + "/entry-" + std::to_string(++seq[d.blogger]) + ".html";
    post.title = "entry " + std::to_string(seq[d.blogger]);
    post.blog_name = bl.user + " blog";
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (i) post.body.push_back(' ');
      post.body += words[toks[i]];
    }
    post.themes = std::move(themes);
    out.posts.push_back(std::move(post));
    posts_by[d.blogger].push_back(q);

    for (const auto& r : reads) {
      out.accesses.push_back({bl.ips[d.ip], r.ts, out.posts[r.target].url,
                              reading.uniform() < 0.5 ? "-" : "http://blog.example.jp/"});
    }
  }
  for (auto& [qs, ps] : out.truth.influence_pairs) {
    qs = out.posts[std::stoul(qs)].url;
    ps = out.posts[std::stoul(ps)].url;
  }

  // Lines that cleaning or parsing must discard.
  const auto n_noise = noise.poisson(c.noise_per_read * double(out.accesses.size()));
  const Timestamp span = Timestamp(c.n_days) * kDay;
  for (std::uint64_t x = 0; x < n_noise; ++x) {
    const Timestamp ts = start + static_cast<Timestamp>(noise.index(static_cast<std::size_t>(span)));
    const auto& who = bloggers[noise.index(c.n_bloggers)];
    const auto& some_post = out.posts[noise.index(out.posts.size())];
    switch (noise.index(6)) {
      case 0:
        out.accesses.push_back({who.ips[0], ts, some_post.url, "http://rss.example.jp/feed"});
        break;
      case 1:
        out.accesses.push_back({who.ips[0], ts, "/" + some_post.user_id + "/index.html", "-"});
        break;
      case 2:
        out.accesses.push_back({who.ips[0], ts, "/images/icon" + std::to_string(noise.index(50)) + ".gif", "-"});
        break;
      case 3:
        out.accesses.push_back({hex_id("anon", noise.next()), ts, some_post.url, "-"});
        break;
      case 4:
        // The author reading their own post.
        out.accesses.push_back({some_post.hashed_ip,
                                some_post.upload_ts + static_cast<Timestamp>(noise.index(3600 * 6)),
                                some_post.url, "-"});
        break;
      default:
        out.extra_log_lines.emplace_back(
            ts, who.ips[0] + " - - [" + format_apache_time(ts) + "] \"POST " + some_post.url +
                    " HTTP/1.1\" 200 0 \"-\" \"-\"");
        break;
    }
  }
  std::stable_sort(out.accesses.begin(), out.accesses.end(),
                   [](const AccessRecord& a, const AccessRecord& b) { return a.access_ts < b.access_ts; });
  std::stable_sort(out.extra_log_lines.begin(), out.extra_log_lines.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

void write_access_log(std::ostream& out, const SynthCorpus& synth) {
  std::size_t e = 0;
  for (const auto& a : synth.accesses) {
    while (e < synth.extra_log_lines.size() && synth.extra_log_lines[e].first <= a.access_ts) {
      out << synth.extra_log_lines[e++].second << '\n';
    }
    out << format_access_line(a) << '\n';
  }
  for (; e < synth.extra_log_lines.size(); ++e) out << synth.extra_log_lines[e].second << '\n';
}

void write_truth_tsv(std::ostream& out, const GroundTruth& truth) {
  for (const auto& [q, p] : truth.influence_pairs) out << q << '\t' << p << '\n';
}

void write_experts_tsv(std::ostream& out, const GroundTruth& truth) {
  for (const auto& e : truth.experts) out << e.group << '\t' << e.topic << '\t' << e.user_id << '\n';
}

std::vector<std::pair<std::string, std::string>> read_truth_tsv(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  while (tsv::next_record(in, line)) {
    const auto f = tsv::split(line);
    if (f.size() != 2) throw FormatError("bad truth row: " + line);
    out.emplace_back(f[0], f[1]);
  }
  return out;
}

}  // namespace blogflux
