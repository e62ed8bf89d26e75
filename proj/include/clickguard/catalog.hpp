#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>

namespace clickguard {

enum class ApiCategory : std::uint8_t {
  AxisGetter,
  ViewSize,
  Rng,
  Sys,
  Obtain,
  Dispatch,
  Other
};

inline constexpr std::size_t kCategorizedCount = 6;  // all but Other

std::string_view to_string(ApiCategory c);

class CatalogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Data-driven mapping from platform API names to semantic categories.
// Category sets are pairwise disjoint; anything unlisted is Other.
class ApiCatalog {
 public:
  static ApiCatalog defaults();

  // Overlays a catalog file on the defaults. Each non-comment line is
  //   <category> <Api.name> [<Api.name> ...]
  // where <category> is one of axis_getter, view_size, rng, sys, obtain,
  // dispatch, view_lookup. The first line naming a category replaces its
  // default set; later lines for the same category append.
  static ApiCatalog from_text(std::string_view text);
  static ApiCatalog from_file(const std::string& path);

  ApiCategory classify(std::string_view api) const;
  const std::set<std::string, std::less<>>& members(ApiCategory c) const;

  // API that resolves a declared view by name from a string literal argument.
  const std::string& view_lookup() const { return view_lookup_; }

  bool is_obtain(std::string_view api) const {
    return classify(api) == ApiCategory::Obtain;
  }
  bool is_dispatch(std::string_view api) const {
    return classify(api) == ApiCategory::Dispatch;
  }

  std::string to_text() const;

 private:
  void check_disjoint() const;

  std::array<std::set<std::string, std::less<>>, kCategorizedCount> sets_;
  std::string view_lookup_ = "Activity.findViewById";
};

// Position of the x and y coordinates in the canonical six-argument
// MotionEvent.obtain(downTime, eventTime, action, x, y, metaState).
inline constexpr std::size_t kObtainArgX = 3;
inline constexpr std::size_t kObtainArgY = 4;

}  // namespace clickguard
