// Apache License, Version 2.0, refer to LICENSE.txt

#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "blogflux/rng.hpp"
#include "blogflux/time_util.hpp"
#include "blogflux/tsv.hpp"

namespace bf = blogflux;

TEST(Tsv, SplitKeepsEmptyFields) {
  const auto f = bf::tsv::split("a\t\tb\t");
  ASSERT_EQ(f.size(), 4u);
  EXPECT_EQ(f[1], "");
  EXPECT_EQ(f[3], "");
}

TEST(Tsv, DoubleRoundTripIsExact) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
    EXPECT_EQ(*bf::tsv::parse_double(bf::tsv::format_double(v)), v);
  }
  EXPECT_FALSE(bf::tsv::parse_double("1.5x"));
  EXPECT_FALSE(bf::tsv::parse_double(""));
  EXPECT_FALSE(bf::tsv::parse_int("12a"));
  EXPECT_EQ(*bf::tsv::parse_int("-42"), -42);
}

TEST(Tsv, NextRecordSkipsCommentsAndBlankLines) {
  std::istringstream in("# header\n\nx\ty\n#c\nz\n");
  std::string line;
  std::vector<std::string> seen;
  while (bf::tsv::next_record(in, line)) seen.push_back(line);
  EXPECT_EQ(seen, (std::vector<std::string>{"x\ty", "z"}));
}

TEST(Time, Iso8601RoundTrip) {
  const auto ts = bf::make_utc(2008, 9, 1, 13, 5, 7);
  EXPECT_EQ(bf::format_iso8601(ts), "2008-09-01T13:05:07Z");
  EXPECT_EQ(*bf::parse_iso8601("2008-09-01T13:05:07Z"), ts);
  EXPECT_FALSE(bf::parse_iso8601("2008-13-01T00:00:00Z"));
}

TEST(Time, ApacheTimeHonoursOffset) {
  const auto ts = bf::parse_apache_time("10/Oct/2000:13:55:36 -0700");
  ASSERT_TRUE(ts);
  EXPECT_EQ(*ts, bf::make_utc(2000, 10, 10, 20, 55, 36));
  EXPECT_EQ(*bf::parse_apache_time(bf::format_apache_time(*ts)), *ts);
}

TEST(Time, LocalCalendar) {
  const auto monday_noon_utc = bf::make_utc(2008, 9, 1, 12);
  EXPECT_EQ(bf::local_weekday(monday_noon_utc, 0), 1);
  EXPECT_EQ(bf::local_hour(monday_noon_utc, 9), 21);
  EXPECT_EQ(bf::local_weekday(bf::make_utc(2008, 9, 1, 20), 9), 2);
}

TEST(Rng, SameSeedSameStream) {
  bf::Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
}

TEST(Rng, IndexStaysInRangeAndCoversIt) {
  bf::Rng r(3);
  std::set<std::size_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto x = r.index(7);
    ASSERT_LT(x, 7u);
    seen.insert(x);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(Rng, DirichletSumsToOne) {
  bf::Rng r(9);
  const auto d = r.dirichlet_ones(6);
  double s = 0;
  for (double v : d) {
    EXPECT_GT(v, 0);
    s += v;
  }
  EXPECT_NEAR(s, 1.0, 1e-12);
}
