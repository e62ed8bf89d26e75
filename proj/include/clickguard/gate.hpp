#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "clickguard/ir.hpp"

namespace clickguard::gate {

enum class Verdict : std::uint8_t { Analyze, Skip };
enum class Reason : std::uint8_t { NoNetworkPermission, NoAdLibrary, NoAdViews, Pass };

std::string_view to_string(Verdict v);
std::string_view to_string(Reason r);

struct GateDecision {
  Verdict verdict = Verdict::Skip;
  Reason reason = Reason::NoNetworkPermission;
  std::set<std::string> ad_views;
  bool operator==(const GateDecision&) const = default;
};

// Ad-view cues: string markers in the name or text labels, known ad view
// classes, and banner-shaped placement.
struct AdViewRules {
  std::vector<std::string> marker_tokens{"ad", "ads", "banner", "interstitial"};
  std::set<std::string> ad_classes{
      "com.ads.Banner",
      "com.ads.Interstitial",
      "com.google.android.gms.ads.AdView",
      "com.google.android.gms.ads.InterstitialAd",
      "com.facebook.ads.AdView",
      "com.bytedance.sdk.openadsdk.TTBannerView",
  };
  std::int64_t banner_min_width = 300;
  std::int64_t banner_min_height = 40;
  std::int64_t banner_max_height = 120;
};

struct GateConfig {
  std::set<std::string> ad_library_allowlist{
      "com.google.android.gms.ads", "com.facebook.ads", "com.unity3d.ads",
      "com.applovin",               "com.mopub",        "com.bytedance.sdk.openadsdk",
      "com.qq.e.ads",               "com.baidu.mobads",
  };
  AdViewRules rules;

  // Missing keys keep their defaults; unknown keys or wrong types throw.
  static GateConfig from_json(const nlohmann::json& j);
  static GateConfig from_file(const std::string& path);
  nlohmann::json to_json() const;
};

// Splits an identifier or label into lower-cased word tokens at
// non-alphanumerics, camelCase humps and letter/digit changes.
std::vector<std::string> word_tokens(std::string_view s);

bool matches_marker(const ir::ViewDecl& view, const AdViewRules& rules);
bool matches_class(const ir::ViewDecl& view, const AdViewRules& rules);
bool matches_placement(const ir::ViewDecl& view, const AdViewRules& rules);
bool is_ad_view(const ir::ViewDecl& view, const AdViewRules& rules);

GateDecision apply_gate(const ir::Package& pkg,
                        const std::set<std::string>& ad_library_allowlist,
                        const AdViewRules& rules);

inline GateDecision apply_gate(const ir::Package& pkg, const GateConfig& cfg) {
  return apply_gate(pkg, cfg.ad_library_allowlist, cfg.rules);
}

}  // namespace clickguard::gate
