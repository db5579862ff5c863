// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <array>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "blogflux/common.hpp"

namespace blogflux {

struct BlogPost {
  std::string hashed_ip;
  Timestamp upload_ts = 0;
  std::string user_id;
  std::string url;
  std::string title;
  std::string blog_name;
  std::string body;
  std::vector<std::string> themes;

  bool operator==(const BlogPost&) const = default;
};

struct AccessRecord {
  std::string hashed_ip;
  Timestamp access_ts = 0;
  std::string request;
  std::string referrer;

  bool operator==(const AccessRecord&) const = default;
};

struct ParseStats {
  std::size_t lines = 0;      // non-comment records seen
  std::size_t parsed = 0;
  std::size_t malformed = 0;  // skipped as broken
  std::size_t ignored = 0;    // well-formed but out of scope (non-GET, outside period)
};

template <class Record>
struct Parsed {
  std::vector<Record> records;
  ParseStats stats;
};

struct TimeRange {
  Timestamp begin = 0;  // inclusive
  Timestamp end = 0;    // exclusive
  bool contains(Timestamp t) const { return t >= begin && t < end; }
};

struct ContentParseOptions {
  std::optional<TimeRange> collection_period;
};

// Lowercased host-less path with query, fragment and trailing slash removed.
std::string normalize_url(std::string_view url);

// Eight tab-separated fields: ip, upload time (ISO-8601 UTC), user id, url,
// title, blog name, body, comma-joined themes.
std::optional<BlogPost> parse_content_line(std::string_view line);
std::string format_content_line(const BlogPost& post);

// Apache combined log format. Non-GET requests parse to std::nullopt with
// `ignored` set.
std::optional<AccessRecord> parse_access_line(std::string_view line, bool* ignored = nullptr);
std::string format_access_line(const AccessRecord& access);

// Four tab-separated fields: ip, access time (ISO-8601 UTC), request, referrer.
std::optional<AccessRecord> parse_access_tsv_line(std::string_view line);
std::string format_access_tsv_line(const AccessRecord& access);

// Malformed lines are skipped and counted. Throws IngestError on an unreadable
// stream and FormatError when more than half of the records are malformed.
Parsed<BlogPost> parse_content_file(std::istream& in, const ContentParseOptions& options = {});
Parsed<AccessRecord> parse_access_log(std::istream& in);
Parsed<AccessRecord> parse_access_tsv(std::istream& in);

struct CleaningRules {
  int window_hours = 12;
  bool drop_non_blogger_ips = true;
  bool drop_robot_referrers = true;
  bool drop_index_html = true;
  bool drop_non_html = true;
  bool drop_self_access = true;
  bool drop_outside_window = true;
  std::vector<std::string> robot_referrer_patterns = {"rss", "feed", "bot", "crawler",
                                                      "spider"};

  void validate() const;
};

class Corpus {
 public:
  Corpus() = default;
  // Throws InvalidArgument on duplicate post URLs or empty user ids.
  Corpus(std::vector<BlogPost> posts, std::vector<AccessRecord> accesses);

  const std::vector<BlogPost>& posts() const { return posts_; }
  const std::vector<AccessRecord>& accesses() const { return accesses_; }

  // Sorted distinct user ids; BloggerId indexes into this list.
  const std::vector<std::string>& bloggers() const { return bloggers_; }
  std::optional<BloggerId> blogger_id(std::string_view user_id) const;
  BloggerId author_of(PostId post) const { return post_author_[post]; }

  // Posts of one blogger ordered by upload time.
  std::span<const PostId> posts_of(BloggerId blogger) const { return posts_by_blogger_[blogger]; }

  std::optional<PostId> find_post(std::string_view url) const;
  const std::unordered_map<std::string, PostId>& url_to_post() const { return url_to_post_; }

  // Bloggers that uploaded at least one post from this IP (empty when none).
  std::span<const BloggerId> owners_of_ip(std::string_view hashed_ip) const;
  // IPs a blogger uploaded from, sorted.
  std::span<const std::string> ips_of(BloggerId blogger) const { return ips_by_blogger_[blogger]; }

  std::map<std::string, std::set<std::string>> ip_to_bloggers() const;

  // Same posts, replaced access list.
  Corpus with_accesses(std::vector<AccessRecord> accesses) const;

 private:
  std::vector<BlogPost> posts_;
  std::vector<AccessRecord> accesses_;
  std::vector<std::string> bloggers_;
  std::vector<BloggerId> post_author_;
  std::vector<std::vector<PostId>> posts_by_blogger_;
  std::vector<std::vector<std::string>> ips_by_blogger_;
  std::unordered_map<std::string, PostId> url_to_post_;
  std::unordered_map<std::string, std::vector<BloggerId>> ip_owners_;
};

struct CleaningReport {
  std::size_t input = 0;
  std::size_t non_blogger_ip = 0;
  std::size_t robot = 0;
  std::size_t index_html = 0;
  std::size_t non_post = 0;
  std::size_t self_access = 0;
  std::size_t outside_window = 0;
  std::size_t kept = 0;
};

// Removes, in order: unknown IPs, robot/RSS referrers, index.html requests,
// requests that do not resolve to a post, self-accesses, and accesses with
// no post by the IP's bloggers within +/- window_hours.
Corpus clean_accesses(const Corpus& corpus, const CleaningRules& rules,
                      CleaningReport* report = nullptr);

struct DistributionSummary {
  std::size_t count = 0;
  double mean = 0, median = 0, q1 = 0, q3 = 0, min = 0, max = 0;
};

// Quartiles use linear interpolation between order statistics.
DistributionSummary summarize(std::vector<double> values);

struct HistogramReport {
  std::array<std::size_t, 24> post_hour{};
  std::array<std::size_t, 7> post_weekday{};  // 0 = Sunday
  std::array<std::size_t, 24> access_hour{};
  std::array<std::size_t, 7> access_weekday{};
  std::vector<std::pair<std::string, std::size_t>> posts_per_blogger;
  DistributionSummary posts_per_blogger_summary;
};

HistogramReport activity_histograms(const Corpus& corpus, int tz_offset_hours = 9);

// `bin<TAB>count` rows.
void write_histogram_tsv(std::ostream& out, std::span<const std::size_t> counts);

void write_posts_tsv(std::ostream& out, const Corpus& corpus);
void write_accesses_tsv(std::ostream& out, const Corpus& corpus);

}  // namespace blogflux
