#include "clickguard/gate.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace clickguard::gate {

std::string_view to_string(Verdict v) {
  return v == Verdict::Analyze ? "analyze" : "skip";
}

std::string_view to_string(Reason r) {
  switch (r) {
    case Reason::NoNetworkPermission: return "no_network_permission";
    case Reason::NoAdLibrary: return "no_ad_library";
    case Reason::NoAdViews: return "no_ad_views";
    case Reason::Pass: return "pass";
  }
  return "?";
}

std::vector<std::string> word_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto c = static_cast<unsigned char>(s[i]);
    if (!std::isalnum(c)) {
      flush();
      continue;
    }
    if (!cur.empty()) {
      const auto prev = static_cast<unsigned char>(s[i - 1]);
      const bool next_lower =
          i + 1 < s.size() && std::islower(static_cast<unsigned char>(s[i + 1]));
      if ((std::islower(prev) && std::isupper(c)) ||
          (std::isupper(prev) && std::isupper(c) && next_lower) ||
          (std::isdigit(prev) != 0) != (std::isdigit(c) != 0))
        flush();
    }
    cur += static_cast<char>(std::tolower(c));
  }
  flush();
  return out;
}

namespace {

bool has_marker(std::string_view text, const AdViewRules& rules) {
  for (const auto& tok : word_tokens(text))
    for (const auto& marker : rules.marker_tokens) {
      if (tok.size() != marker.size()) continue;
      if (std::equal(tok.begin(), tok.end(), marker.begin(), [](char a, char b) {
            return a == std::tolower(static_cast<unsigned char>(b));
          }))
        return true;
    }
  return false;
}

bool has_permission(const ir::Manifest& m, std::string_view name) {
  constexpr std::string_view prefix = "android.permission.";
  for (std::string_view p : m.permissions) {
    if (p.substr(0, prefix.size()) == prefix) p.remove_prefix(prefix.size());
    if (p == name) return true;
  }
  return false;
}

}  // namespace

bool matches_marker(const ir::ViewDecl& view, const AdViewRules& rules) {
  if (has_marker(view.name, rules)) return true;
  return std::any_of(view.text_labels.begin(), view.text_labels.end(),
                     [&](const auto& t) { return has_marker(t, rules); });
}

bool matches_class(const ir::ViewDecl& view, const AdViewRules& rules) {
  return rules.ad_classes.count(view.class_type) > 0;
}

bool matches_placement(const ir::ViewDecl& view, const AdViewRules& rules) {
  return view.width_dp >= rules.banner_min_width &&
         view.height_dp >= rules.banner_min_height &&
         view.height_dp <= rules.banner_max_height;
}

bool is_ad_view(const ir::ViewDecl& view, const AdViewRules& rules) {
  return matches_marker(view, rules) || matches_class(view, rules) ||
         matches_placement(view, rules);
}

GateDecision apply_gate(const ir::Package& pkg,
                        const std::set<std::string>& ad_library_allowlist,
                        const AdViewRules& rules) {
  GateDecision d;
  if (!has_permission(pkg.manifest, "INTERNET") &&
      !has_permission(pkg.manifest, "ACCESS_NETWORK_STATE")) {
    d.reason = Reason::NoNetworkPermission;
    return d;
  }
  const bool has_ad_lib =
      std::any_of(pkg.manifest.libraries.begin(), pkg.manifest.libraries.end(),
                  [&](const auto& l) { return ad_library_allowlist.count(l); });
  if (!has_ad_lib) {
    d.reason = Reason::NoAdLibrary;
    return d;
  }
  for (const auto& v : pkg.views)
    if (is_ad_view(v, rules)) d.ad_views.insert(v.name);
  if (d.ad_views.empty()) {
    d.reason = Reason::NoAdViews;
    return d;
  }
  d.verdict = Verdict::Analyze;
  d.reason = Reason::Pass;
  return d;
}

GateConfig GateConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::runtime_error("gate config must be a JSON object");
  GateConfig cfg;
  for (const auto& [k, v] : j.items()) {
    if (k == "ad_libraries") {
      cfg.ad_library_allowlist = v.get<std::set<std::string>>();
    } else if (k == "marker_tokens") {
      cfg.rules.marker_tokens = v.get<std::vector<std::string>>();
    } else if (k == "ad_classes") {
      cfg.rules.ad_classes = v.get<std::set<std::string>>();
    } else if (k == "banner") {
      cfg.rules.banner_min_width = v.value("min_width", cfg.rules.banner_min_width);
      cfg.rules.banner_min_height = v.value("min_height", cfg.rules.banner_min_height);
      cfg.rules.banner_max_height = v.value("max_height", cfg.rules.banner_max_height);
    } else {
      throw std::runtime_error("unknown gate config key '" + k + "'");
    }
  }
  if (cfg.rules.banner_min_height > cfg.rules.banner_max_height)
    throw std::runtime_error("gate config: banner min_height > max_height");
  return cfg;
}

GateConfig GateConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read gate config '" + path + "'");
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("malformed gate config '" + path + "': " + e.what());
  }
}

nlohmann::json GateConfig::to_json() const {
  return {
      {"ad_libraries", ad_library_allowlist},
      {"marker_tokens", rules.marker_tokens},
      {"ad_classes", rules.ad_classes},
      {"banner",
       {{"min_width", rules.banner_min_width},
        {"min_height", rules.banner_min_height},
        {"max_height", rules.banner_max_height}}},
  };
}

}  // namespace clickguard::gate
