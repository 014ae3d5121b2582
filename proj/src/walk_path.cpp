#include "rwre/walk_path.hpp"

#include <stdexcept>

namespace rwre {

std::int64_t WalkPath::endpoint() const {
  std::int64_t pos = start;
  for (int z : increments) pos += z;
  return pos;
}

std::vector<std::int64_t> WalkPath::positions() const {
  std::vector<std::int64_t> out;
  out.reserve(increments.size() + 1);
  std::int64_t pos = start;
  out.push_back(pos);
  for (int z : increments) {
    pos += z;
    out.push_back(pos);
  }
  return out;
}

bool valid_increments(const WalkPath& path) {
  for (int z : path.increments)
    if (z != 1 && z != -1) return false;
  return true;
}

std::map<std::int64_t, CountVector> local_time_counts(const WalkPath& path) {
  if (!valid_increments(path))
    throw std::invalid_argument("path increments must be +1 or -1");
  std::map<std::int64_t, CountVector> counts;
  std::int64_t pos = path.start;
  for (int z : path.increments) {
    counts[pos].bump(z);
    pos += z;
  }
  return counts;
}

nlohmann::json path_to_json(const WalkPath& path) {
  nlohmann::json j = nlohmann::json::array();
  for (int z : path.increments) j.push_back(z);
  return j;
}

WalkPath path_from_json(const nlohmann::json& j) {
  WalkPath path;
  for (const auto& z : j) path.increments.push_back(z.get<int>());
  if (!valid_increments(path))
    throw std::invalid_argument("path increments must be +1 or -1");
  return path;
}

}  // namespace rwre
