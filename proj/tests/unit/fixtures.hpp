// Apache License, Version 2.0, refer to LICENSE.txt

#pragma once

#include <string>
#include <vector>

#include "blogflux/corpus.hpp"
#include "blogflux/time_util.hpp"

namespace blogflux::testing {

inline BlogPost make_post(std::string ip, Timestamp ts, std::string user, std::string url,
                          std::string body = "", std::vector<std::string> themes = {"misc"}) {
  BlogPost p;
  p.hashed_ip = std::move(ip);
  p.upload_ts = ts;
  p.user_id = std::move(user);
  p.url = std::move(url);
  p.title = "title";
  p.blog_name = "blog";
  p.body = std::move(body);
  p.themes = std::move(themes);
  return p;
}

inline AccessRecord make_access(std::string ip, Timestamp ts, std::string request,
                                std::string referrer = "-") {
  return {std::move(ip), ts, std::move(request), std::move(referrer)};
}

inline Timestamp t0() { return make_utc(2008, 9, 1, 12); }

}  // namespace blogflux::testing
