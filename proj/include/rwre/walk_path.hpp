#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "rwre/env_law.hpp"

namespace rwre {

// A nearest-neighbor walk as its increment sequence; positions are the
// partial sums from `start`.
struct WalkPath {
  std::int64_t start{0};
  std::vector<int> increments;  // each entry is +1 or -1

  std::int64_t length() const {
    return static_cast<std::int64_t>(increments.size());
  }
  std::int64_t endpoint() const;
  std::vector<std::int64_t> positions() const;  // length()+1 entries
};

bool valid_increments(const WalkPath& path);

// Jump counts out of each visited site, split by direction; the total over
// all sites equals the path length.
std::map<std::int64_t, CountVector> local_time_counts(const WalkPath& path);

nlohmann::json path_to_json(const WalkPath& path);
WalkPath path_from_json(const nlohmann::json& j);

}  // namespace rwre
