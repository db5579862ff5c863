// Apache License, Version 2.0, refer to LICENSE.txt

#include "blogflux/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <unordered_set>

#include "blogflux/time_util.hpp"
#include "blogflux/tsv.hpp"

namespace blogflux {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool has_field_breaks(std::string_view s) {
  return s.find_first_of("\t\n\r") != std::string_view::npos;
}

template <class Record, class LineParser>
Parsed<Record> parse_stream(std::istream& in, LineParser&& parse_line) {
  if (!in.good()) throw IngestError("input stream is not readable");
  Parsed<Record> result;
  std::string line;
  while (tsv::next_record(in, line)) {
    ++result.stats.lines;
    bool ignored = false;
    auto record = parse_line(line, ignored);
    if (record) {
      result.records.push_back(std::move(*record));
      ++result.stats.parsed;
    } else if (ignored) {
      ++result.stats.ignored;
    } else {
      ++result.stats.malformed;
    }
  }
  if (in.bad()) throw IngestError("read failure on input stream");
  if (result.stats.malformed * 2 > result.stats.lines) {
    throw FormatError(std::to_string(result.stats.malformed) + " of " +
                      std::to_string(result.stats.lines) + " records are malformed");
  }
  return result;
}

// Position just past the closing quote of a quoted field starting at `open`.
std::optional<std::pair<std::string_view, std::size_t>> quoted(std::string_view line,
                                                               std::size_t open) {
  if (open >= line.size() || line[open] != '"') return std::nullopt;
  std::size_t pos = open + 1;
  while (pos < line.size()) {
    if (line[pos] == '\\' && pos + 1 < line.size()) {
      pos += 2;
      continue;
    }
    if (line[pos] == '"') return std::make_pair(line.substr(open + 1, pos - open - 1), pos + 1);
    ++pos;
  }
  return std::nullopt;
}

std::size_t skip_spaces(std::string_view line, std::size_t pos) {
  while (pos < line.size() && line[pos] == ' ') ++pos;
  return pos;
}

}  // namespace

std::string normalize_url(std::string_view url) {
  std::string_view path = url;
  if (const auto scheme = path.find("://"); scheme != std::string_view::npos) {
    const auto slash = path.find('/', scheme + 3);
    path = slash == std::string_view::npos ? std::string_view("/") : path.substr(slash);
  }
  if (const auto cut = path.find_first_of("?#"); cut != std::string_view::npos) {
    path = path.substr(0, cut);
  }
  std::string out = lower(path);
  if (out.empty() || out.front() != '/') out.insert(out.begin(), '/');
  while (out.size() > 1 && out.back() == '/') out.pop_back();
  return out;
}

std::optional<BlogPost> parse_content_line(std::string_view line) {
  const auto f = tsv::split(line);
  if (f.size() != 8) return std::nullopt;
  auto ts = parse_iso8601(f[1]);
  if (!ts || f[2].empty() || f[3].empty()) return std::nullopt;
  BlogPost post;
  post.hashed_ip = std::string(f[0]);
  post.upload_ts = *ts;
  post.user_id = std::string(f[2]);
  post.url = normalize_url(f[3]);
  post.title = std::string(f[4]);
  post.blog_name = std::string(f[5]);
  post.body = std::string(f[6]);
  if (!f[7].empty()) {
    for (auto theme : tsv::split(f[7], ',')) {
      if (!theme.empty()) post.themes.emplace_back(theme);
    }
  }
  return post;
}

std::string format_content_line(const BlogPost& p) {
  for (const auto* field : {&p.hashed_ip, &p.user_id, &p.url, &p.title, &p.blog_name, &p.body}) {
    if (has_field_breaks(*field)) throw InvalidArgument("post field contains a tab or newline");
  }
  std::string themes;
  for (std::size_t i = 0; i < p.themes.size(); ++i) {
    if (i) themes.push_back(',');
    themes += p.themes[i];
  }
  return tsv::join({p.hashed_ip, format_iso8601(p.upload_ts), p.user_id, p.url, p.title,
                    p.blog_name, p.body, themes});
}

std::optional<AccessRecord> parse_access_line(std::string_view line, bool* ignored) {
  if (ignored) *ignored = false;
  const auto host_end = line.find(' ');
  if (host_end == std::string_view::npos || host_end == 0) return std::nullopt;
  const auto open = line.find('[', host_end);
  if (open == std::string_view::npos) return std::nullopt;
  const auto close = line.find(']', open);
  if (close == std::string_view::npos) return std::nullopt;
  auto ts = parse_apache_time(line.substr(open + 1, close - open - 1));
  if (!ts) return std::nullopt;

  auto request = quoted(line, skip_spaces(line, close + 1));
  if (!request) return std::nullopt;
  const auto parts = tsv::split(request->first, ' ');
  if (parts.size() < 2 || parts[1].empty()) return std::nullopt;

  // status and bytes, then optional quoted referrer and user agent
  std::size_t pos = request->second;
  for (int i = 0; i < 2; ++i) {
    pos = skip_spaces(line, pos);
    const auto end = line.find(' ', pos);
    if (pos >= line.size()) return std::nullopt;
    pos = end == std::string_view::npos ? line.size() : end;
  }
  std::string referrer;
  pos = skip_spaces(line, pos);
  if (pos < line.size()) {
    auto ref = quoted(line, pos);
    if (!ref) return std::nullopt;
    if (ref->first != "-") referrer = std::string(ref->first);
  }

  if (parts[0] != "GET") {
    if (ignored) *ignored = true;
    return std::nullopt;
  }
  AccessRecord rec;
  rec.hashed_ip = std::string(line.substr(0, host_end));
  rec.access_ts = *ts;
  rec.request = normalize_url(parts[1]);
  rec.referrer = std::move(referrer);
  return rec;
}

std::string format_access_line(const AccessRecord& a) {
  return a.hashed_ip + " - - [" + format_apache_time(a.access_ts) + "] \"GET " + a.request +
         " HTTP/1.1\" 200 0 \"" + (a.referrer.empty() ? std::string("-") : a.referrer) +
         "\" \"-\"";
}

std::optional<AccessRecord> parse_access_tsv_line(std::string_view line) {
  const auto f = tsv::split(line);
  if (f.size() != 4 || f[0].empty()) return std::nullopt;
  auto ts = parse_iso8601(f[1]);
  if (!ts || f[2].empty()) return std::nullopt;
  return AccessRecord{std::string(f[0]), *ts, normalize_url(f[2]), std::string(f[3])};
}

std::string format_access_tsv_line(const AccessRecord& a) {
  return tsv::join({a.hashed_ip, format_iso8601(a.access_ts), a.request, a.referrer});
}

Parsed<BlogPost> parse_content_file(std::istream& in, const ContentParseOptions& options) {
  std::unordered_set<std::string> seen_urls;
  return parse_stream<BlogPost>(in, [&](std::string_view line, bool& ignored) {
    auto post = parse_content_line(line);
    if (!post) return post;
    if (options.collection_period && !options.collection_period->contains(post->upload_ts)) {
      ignored = true;
      return std::optional<BlogPost>{};
    }
    if (!seen_urls.insert(post->url).second) return std::optional<BlogPost>{};
    return post;
  });
}

Parsed<AccessRecord> parse_access_log(std::istream& in) {
  return parse_stream<AccessRecord>(
      in, [](std::string_view line, bool& ignored) { return parse_access_line(line, &ignored); });
}

Parsed<AccessRecord> parse_access_tsv(std::istream& in) {
  return parse_stream<AccessRecord>(
      in, [](std::string_view line, bool&) { return parse_access_tsv_line(line); });
}

void CleaningRules::validate() const {
  if (window_hours < 1) throw InvalidArgument("window_hours must be >= 1");
}

Corpus::Corpus(std::vector<BlogPost> posts, std::vector<AccessRecord> accesses)
    : posts_(std::move(posts)), accesses_(std::move(accesses)) {
  for (const auto& p : posts_) {
    if (p.user_id.empty()) throw InvalidArgument("post with empty user id: " + p.url);
    bloggers_.push_back(p.user_id);
  }
  std::sort(bloggers_.begin(), bloggers_.end());
  bloggers_.erase(std::unique(bloggers_.begin(), bloggers_.end()), bloggers_.end());

  posts_by_blogger_.resize(bloggers_.size());
  ips_by_blogger_.resize(bloggers_.size());
  post_author_.reserve(posts_.size());
  url_to_post_.reserve(posts_.size());
  for (PostId id = 0; id < posts_.size(); ++id) {
    const auto& p = posts_[id];
    if (!url_to_post_.emplace(p.url, id).second) {
      throw InvalidArgument("duplicate post url: " + p.url);
    }
    const BloggerId b = *blogger_id(p.user_id);
    post_author_.push_back(b);
    posts_by_blogger_[b].push_back(id);
    ips_by_blogger_[b].push_back(p.hashed_ip);
  }
  for (BloggerId b = 0; b < bloggers_.size(); ++b) {
    auto& own = posts_by_blogger_[b];
    std::stable_sort(own.begin(), own.end(), [&](PostId x, PostId y) {
      return posts_[x].upload_ts < posts_[y].upload_ts;
    });
    auto& ips = ips_by_blogger_[b];
    std::sort(ips.begin(), ips.end());
    ips.erase(std::unique(ips.begin(), ips.end()), ips.end());
    for (const auto& ip : ips) ip_owners_[ip].push_back(b);
  }
}

std::optional<BloggerId> Corpus::blogger_id(std::string_view user_id) const {
  auto it = std::lower_bound(bloggers_.begin(), bloggers_.end(), user_id);
  if (it == bloggers_.end() || *it != user_id) return std::nullopt;
  return static_cast<BloggerId>(it - bloggers_.begin());
}

std::optional<PostId> Corpus::find_post(std::string_view url) const {
  auto it = url_to_post_.find(std::string(url));
  if (it == url_to_post_.end()) return std::nullopt;
  return it->second;
}

std::span<const BloggerId> Corpus::owners_of_ip(std::string_view hashed_ip) const {
  auto it = ip_owners_.find(std::string(hashed_ip));
  if (it == ip_owners_.end()) return {};
  return it->second;
}

std::map<std::string, std::set<std::string>> Corpus::ip_to_bloggers() const {
  std::map<std::string, std::set<std::string>> out;
  for (const auto& [ip, owners] : ip_owners_) {
    for (auto b : owners) out[ip].insert(bloggers_[b]);
  }
  return out;
}

Corpus Corpus::with_accesses(std::vector<AccessRecord> accesses) const {
  Corpus out = *this;
  out.accesses_ = std::move(accesses);
  return out;
}

Corpus clean_accesses(const Corpus& corpus, const CleaningRules& rules, CleaningReport* report) {
  rules.validate();
  CleaningReport r;
  r.input = corpus.accesses().size();
  std::vector<std::string> patterns;
  for (const auto& p : rules.robot_referrer_patterns) patterns.push_back(lower(p));
  const std::int64_t window = rules.window_hours * kSecondsPerHour;

  auto is_index = [](const std::string& path) {
    return path == "/index.html" || path.ends_with("/index.html");
  };
  auto near_upload = [&](std::span<const BloggerId> owners, Timestamp ts) {
    for (auto b : owners) {
      const auto own = corpus.posts_of(b);
      auto it = std::lower_bound(own.begin(), own.end(), ts - window, [&](PostId id, Timestamp t) {
        return corpus.posts()[id].upload_ts < t;
      });
      if (it != own.end() && corpus.posts()[*it].upload_ts <= ts + window) return true;
    }
    return false;
  };

  std::vector<AccessRecord> kept;
  for (const auto& a : corpus.accesses()) {
    const auto owners = corpus.owners_of_ip(a.hashed_ip);
    if (rules.drop_non_blogger_ips && owners.empty()) {
      ++r.non_blogger_ip;
      continue;
    }
    if (rules.drop_robot_referrers && !a.referrer.empty()) {
      const std::string ref = lower(a.referrer);
      if (std::any_of(patterns.begin(), patterns.end(),
                      [&](const std::string& p) { return ref.find(p) != std::string::npos; })) {
        ++r.robot;
        continue;
      }
    }
    if (rules.drop_index_html && is_index(a.request)) {
      ++r.index_html;
      continue;
    }
    const auto target = corpus.find_post(a.request);
    if (rules.drop_non_html && !target) {
      ++r.non_post;
      continue;
    }
    if (rules.drop_self_access && target) {
      const BloggerId author = corpus.author_of(*target);
      if (std::find(owners.begin(), owners.end(), author) != owners.end()) {
        ++r.self_access;
        continue;
      }
    }
    if (rules.drop_outside_window && !near_upload(owners, a.access_ts)) {
      ++r.outside_window;
      continue;
    }
    kept.push_back(a);
  }
  r.kept = kept.size();
  if (report) *report = r;
  return corpus.with_accesses(std::move(kept));
}

DistributionSummary summarize(std::vector<double> values) {
  DistributionSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  auto quantile = [&](double p) {
    const double h = (static_cast<double>(values.size()) - 1.0) * p;
    const auto lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  s.median = quantile(0.5);
  s.q1 = quantile(0.25);
  s.q3 = quantile(0.75);
  s.min = values.front();
  s.max = values.back();
  return s;
}

HistogramReport activity_histograms(const Corpus& corpus, int tz_offset_hours) {
  HistogramReport h;
  for (const auto& p : corpus.posts()) {
    ++h.post_hour[local_hour(p.upload_ts, tz_offset_hours)];
    ++h.post_weekday[local_weekday(p.upload_ts, tz_offset_hours)];
  }
  for (const auto& a : corpus.accesses()) {
    ++h.access_hour[local_hour(a.access_ts, tz_offset_hours)];
    ++h.access_weekday[local_weekday(a.access_ts, tz_offset_hours)];
  }
  std::vector<double> counts;
  for (BloggerId b = 0; b < corpus.bloggers().size(); ++b) {
    h.posts_per_blogger.emplace_back(corpus.bloggers()[b], corpus.posts_of(b).size());
    counts.push_back(static_cast<double>(corpus.posts_of(b).size()));
  }
  h.posts_per_blogger_summary = summarize(std::move(counts));
  return h;
}

void write_histogram_tsv(std::ostream& out, std::span<const std::size_t> counts) {
  for (std::size_t i = 0; i < counts.size(); ++i) out << i << '\t' << counts[i] << '\n';
}

void write_posts_tsv(std::ostream& out, const Corpus& corpus) {
  for (const auto& p : corpus.posts()) out << format_content_line(p) << '\n';
}

void write_accesses_tsv(std::ostream& out, const Corpus& corpus) {
  for (const auto& a : corpus.accesses()) out << format_access_tsv_line(a) << '\n';
}

}  // namespace blogflux
