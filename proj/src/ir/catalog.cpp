#include "clickguard/catalog.hpp"

#include <fstream>
#include <sstream>

namespace clickguard {

std::string_view to_string(ApiCategory c) {
  switch (c) {
    case ApiCategory::AxisGetter: return "axis_getter";
    case ApiCategory::ViewSize: return "view_size";
    case ApiCategory::Rng: return "rng";
    case ApiCategory::Sys: return "sys";
    case ApiCategory::Obtain: return "obtain";
    case ApiCategory::Dispatch: return "dispatch";
    case ApiCategory::Other: return "other";
  }
  return "other";
}

ApiCatalog ApiCatalog::defaults() {
  ApiCatalog cat;
  auto set = [&](ApiCategory c) -> auto& {
    return cat.sets_[static_cast<std::size_t>(c)];
  };
  set(ApiCategory::AxisGetter) = {"MotionEvent.getX", "MotionEvent.getY",
                                  "MotionEvent.getRawX", "MotionEvent.getRawY"};
  set(ApiCategory::ViewSize) = {"View.getWidth", "View.getHeight"};
  set(ApiCategory::Rng) = {"Random.nextInt", "Random.nextFloat",
                           "Random.nextDouble", "Random.nextGaussian",
                           "Math.random"};
  // RemoteConfig.* model values delivered by a remote server.
  set(ApiCategory::Sys) = {"System.currentTimeMillis", "Build.getModel",
                           "Connectivity.getNetworkState", "Battery.getLevel",
                           "Locale.getCountry", "RemoteConfig.getInt",
                           "RemoteConfig.getFloat"};
  set(ApiCategory::Obtain) = {"MotionEvent.obtain"};
  set(ApiCategory::Dispatch) = {"View.dispatchTouchEvent"};
  return cat;
}

ApiCatalog ApiCatalog::from_text(std::string_view text) {
  ApiCatalog cat = defaults();
  std::set<std::string> replaced;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream words(line);
    std::string category;
    if (!(words >> category)) continue;
    std::string api;
    if (category == "view_lookup") {
      if (!(words >> api))
        throw CatalogError("catalog line " + std::to_string(lineno) +
                           ": view_lookup needs an API name");
      cat.view_lookup_ = api;
      continue;
    }
    std::size_t idx = kCategorizedCount;
    for (std::size_t c = 0; c < kCategorizedCount; ++c)
      if (to_string(static_cast<ApiCategory>(c)) == category) idx = c;
    if (idx == kCategorizedCount)
      throw CatalogError("catalog line " + std::to_string(lineno) +
                         ": unknown category '" + category + "'");
    if (replaced.insert(category).second) cat.sets_[idx].clear();
    while (words >> api) {
      if (api.find('.') == std::string::npos)
        throw CatalogError("catalog line " + std::to_string(lineno) +
                           ": '" + api + "' is not a dotted API name");
      cat.sets_[idx].insert(api);
    }
  }
  cat.check_disjoint();
  return cat;
}

ApiCatalog ApiCatalog::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CatalogError("cannot read catalog file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return from_text(buf.str());
}

void ApiCatalog::check_disjoint() const {
  for (std::size_t a = 0; a < kCategorizedCount; ++a)
    for (std::size_t b = a + 1; b < kCategorizedCount; ++b)
      for (const auto& api : sets_[a])
        if (sets_[b].count(api))
          throw CatalogError("API '" + api + "' listed in both " +
                             std::string(to_string(static_cast<ApiCategory>(a))) +
                             " and " +
                             std::string(to_string(static_cast<ApiCategory>(b))));
}

ApiCategory ApiCatalog::classify(std::string_view api) const {
  for (std::size_t c = 0; c < kCategorizedCount; ++c)
    if (sets_[c].find(api) != sets_[c].end()) return static_cast<ApiCategory>(c);
  return ApiCategory::Other;
}

const std::set<std::string, std::less<>>& ApiCatalog::members(
    ApiCategory c) const {
  static const std::set<std::string, std::less<>> empty;
  if (c == ApiCategory::Other) return empty;
  return sets_[static_cast<std::size_t>(c)];
}

std::string ApiCatalog::to_text() const {
  std::string out;
  for (std::size_t c = 0; c < kCategorizedCount; ++c) {
    out += to_string(static_cast<ApiCategory>(c));
    for (const auto& api : sets_[c]) out += " " + api;
    out += "\n";
  }
  out += "view_lookup " + view_lookup_ + "\n";
  return out;
}

}  // namespace clickguard
