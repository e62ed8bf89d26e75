#include "clickguard/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace clickguard::features {

FeatureMask parse_mask(std::string_view names) {
  if (names == "all") return all_features();
  FeatureMask mask;
  std::size_t start = 0;
  while (start <= names.size()) {
    auto end = names.find(',', start);
    if (end == std::string_view::npos) end = names.size();
    const auto name = names.substr(start, end - start);
    const auto it = std::find(kFeatureNames.begin(), kFeatureNames.end(), name);
    if (it == kFeatureNames.end())
      throw std::invalid_argument("unknown feature '" + std::string(name) + "'");
    mask.set(static_cast<std::size_t>(it - kFeatureNames.begin()));
    start = end + 1;
  }
  return mask;
}

std::string mask_names(const FeatureMask& mask) {
  std::string out;
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    if (!mask.test(j)) continue;
    if (!out.empty()) out += ',';
    out += kFeatureNames[j];
  }
  return out;
}

Vec FeatureVector::raw() const {
  Vec v{};
  for (std::size_t j = 0; j < kFeatureCount; ++j) v[j] = counts[j];
  return v;
}

namespace {

std::uint32_t count_api(const slicer::Ddg& ddg, const ApiCatalog& catalog,
                        ApiCategory category) {
  return static_cast<std::uint32_t>(
      std::count_if(ddg.nodes.begin(), ddg.nodes.end(), [&](const auto& n) {
        return n.key.kind == slicer::NodeKind::Api &&
               catalog.classify(n.label) == category;
      }));
}

}  // namespace

FeatureVector extract_features(const slicer::ClickSite& site,
                               const slicer::Ddg& axis_ddg,
                               const slicer::Ddg& cond_ddg,
                               const ApiCatalog& catalog) {
  FeatureVector fv;
  fv.site_id = site.id;
  fv[Feature::AxisApi] = count_api(axis_ddg, catalog, ApiCategory::AxisGetter);
  fv[Feature::ViewSizeApi] = count_api(axis_ddg, catalog, ApiCategory::ViewSize);
  fv[Feature::Const] = static_cast<std::uint32_t>(
      std::count_if(axis_ddg.nodes.begin(), axis_ddg.nodes.end(),
                    [](const auto& n) { return n.key.kind == slicer::NodeKind::Const; }));
  fv[Feature::RandAxis] = count_api(axis_ddg, catalog, ApiCategory::Rng);
  fv[Feature::DdgSize] = static_cast<std::uint32_t>(axis_ddg.size());
  fv[Feature::RandCondition] = count_api(cond_ddg, catalog, ApiCategory::Rng);
  fv[Feature::SysApi] = count_api(cond_ddg, catalog, ApiCategory::Sys);
  fv.oversized = axis_ddg.oversized() || cond_ddg.oversized();
  return fv;
}

Vec entropy_weights(std::span<const Vec> scaled) {
  const auto n = scaled.size();
  if (n < 2) throw std::invalid_argument("entropy weights need at least 2 rows");
  const double inv_log_n = 1.0 / std::log(static_cast<double>(n));
  Vec d{};
  double total = 0.0;
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    double col_sum = 0.0;
    bool constant = true;
    for (const auto& row : scaled) {
      col_sum += row[j];
      constant = constant && row[j] == scaled.front()[j];
    }
    // A constant column carries no information; rounding would otherwise
    // leave it a weight of a few ulps.
    double e = 1.0;
    if (col_sum > 0.0 && !constant) {
      double acc = 0.0;
      for (const auto& row : scaled) {
        const double p = row[j] / col_sum;
        if (p > 0.0) acc += p * std::log(p);
      }
      e = -inv_log_n * acc;
    }
    d[j] = std::max(0.0, 1.0 - e);
    total += d[j];
  }
  Vec w{};
  for (std::size_t j = 0; j < kFeatureCount; ++j)
    w[j] = total > 0.0 ? d[j] / total : 1.0 / kFeatureCount;
  return w;
}

NormalizationParams fit_normalization(std::span<const Vec> rows) {
  if (rows.size() < 2)
    throw std::invalid_argument("normalization needs at least 2 training vectors");
  NormalizationParams p;
  p.min = rows.front();
  p.max = rows.front();
  for (const auto& row : rows)
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
      p.min[j] = std::min(p.min[j], row[j]);
      p.max[j] = std::max(p.max[j], row[j]);
    }
  std::vector<Vec> scaled;
  scaled.reserve(rows.size());
  for (const auto& row : rows) scaled.push_back(scale(p, row));
  p.weights = entropy_weights(scaled);
  return p;
}

Vec scale(const NormalizationParams& params, const Vec& raw) {
  Vec out{};
  for (std::size_t j = 0; j < kFeatureCount; ++j) {
    const double range = params.max[j] - params.min[j];
    out[j] = range > 0.0 ? std::clamp((raw[j] - params.min[j]) / range, 0.0, 1.0)
                         : 0.0;
  }
  return out;
}

Vec apply_normalization(const NormalizationParams& params, const Vec& raw) {
  auto out = scale(params, raw);
  for (std::size_t j = 0; j < kFeatureCount; ++j) out[j] *= params.weights[j];
  return out;
}

Vec apply_mask(const Vec& v, const FeatureMask& mask) {
  Vec out{};
  for (std::size_t j = 0; j < kFeatureCount; ++j) out[j] = mask.test(j) ? v[j] : 0.0;
  return out;
}

namespace {

std::string fmt_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

}  // namespace

std::string csv_header() {
  std::string out = "site_id";
  for (auto name : kFeatureNames) out += "," + std::string(name);
  for (auto name : kFeatureNames) out += ",w_" + std::string(name);
  out += ",oversized";
  return out;
}

std::string csv_row(const FeatureVector& fv, const Vec& weighted) {
  std::string out = fv.site_id;
  for (auto c : fv.counts) out += "," + std::to_string(c);
  for (auto w : weighted) out += "," + fmt_double(w);
  out += fv.oversized ? ",1" : ",0";
  return out;
}

}  // namespace clickguard::features
