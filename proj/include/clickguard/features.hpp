#pragma once

#include <array>
#include <bitset>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "clickguard/catalog.hpp"
#include "clickguard/slicer.hpp"

namespace clickguard::features {

enum class Feature : std::uint8_t {
  AxisApi,
  ViewSizeApi,
  Const,
  RandAxis,
  DdgSize,
  RandCondition,
  SysApi
};

inline constexpr std::size_t kFeatureCount = 7;
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames{
    "AxisAPI", "ViewSizeAPI", "Const", "RandAxis",
    "DDGSize", "RandCondition", "SysAPI"};

using Vec = std::array<double, kFeatureCount>;
using FeatureMask = std::bitset<kFeatureCount>;

inline FeatureMask all_features() { return FeatureMask{}.set(); }
// Parses "AxisAPI,DDGSize" (names as in kFeatureNames) or "all".
FeatureMask parse_mask(std::string_view names);
std::string mask_names(const FeatureMask& mask);

struct FeatureVector {
  std::string site_id;
  std::array<std::uint32_t, kFeatureCount> counts{};
  bool oversized = false;

  std::uint32_t& operator[](Feature f) { return counts[static_cast<std::size_t>(f)]; }
  std::uint32_t operator[](Feature f) const {
    return counts[static_cast<std::size_t>(f)];
  }
  Vec raw() const;
  bool operator==(const FeatureVector&) const = default;
};

// Node census of the two DDGs of a site: axis-parameter DDG for the first
// five features, condition DDG for the last two.
FeatureVector extract_features(const slicer::ClickSite& site,
                               const slicer::Ddg& axis_ddg,
                               const slicer::Ddg& cond_ddg,
                               const ApiCatalog& catalog);

struct NormalizationParams {
  Vec min{};
  Vec max{};
  Vec weights{};
  bool operator==(const NormalizationParams&) const = default;
};

// Per-feature min/max over the rows and entropy weights of the min-max
// scaled columns. Requires at least two rows.
NormalizationParams fit_normalization(std::span<const Vec> rows);

// Min-max scaling clamped to [0, 1]; a constant feature maps to 0.
Vec scale(const NormalizationParams& params, const Vec& raw);
// Scaled vector multiplied component-wise by the entropy weights.
Vec apply_normalization(const NormalizationParams& params, const Vec& raw);

// Entropy weights of already scaled, non-negative columns.
Vec entropy_weights(std::span<const Vec> scaled);

// Zeroes the features outside the mask.
Vec apply_mask(const Vec& v, const FeatureMask& mask);

std::string csv_header();
std::string csv_row(const FeatureVector& fv, const Vec& weighted);

}  // namespace clickguard::features
