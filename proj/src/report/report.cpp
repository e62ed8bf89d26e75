#include "clickguard/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

namespace clickguard::report {

using nlohmann::json;

ScanReport build_report(const std::vector<pipeline::PackageResult>& results,
                        const detector::VaeModel& model, double threshold,
                        const std::vector<std::pair<std::string, bool>>& labels) {
  const std::map<std::string, bool> label_of(labels.begin(), labels.end());
  ScanReport rep;
  rep.model_digest = detector::model_digest(model);
  rep.threshold = threshold;

  std::vector<detector::Label> site_pred, app_pred;
  std::vector<bool> site_truth, app_truth;
  for (const auto& r : results) {
    PackageReport p;
    p.path = r.path;
    p.package_id = r.package_id;
    p.status = std::string(pipeline::to_string(r.status));
    p.gate_verdict = std::string(gate::to_string(r.gate.verdict));
    p.gate_reason = std::string(gate::to_string(r.gate.reason));
    p.ad_views.assign(r.gate.ad_views.begin(), r.gate.ad_views.end());
    p.error = r.error;
    p.millis = r.millis;
    if (auto it = label_of.find(r.path); it != label_of.end()) p.labeled_fraud = it->second;

    std::set<std::string> locations;
    for (const auto& s : r.sites) {
      SiteReport sr;
      sr.id = s.site.id;
      sr.location = s.location;
      sr.raw = s.features.counts;
      sr.oversized = s.features.oversized;
      sr.weighted = model.prepare(s.features.raw());
      sr.score = detector::score(model, sr.weighted);
      sr.verdict = detector::label_for(sr.score, threshold);
      if (sr.verdict == detector::Label::Fraud) locations.insert(sr.location);
      if (p.labeled_fraud) {
        site_pred.push_back(sr.verdict);
        site_truth.push_back(*p.labeled_fraud);
      }
      p.sites.push_back(std::move(sr));
    }
    p.fraud_locations.assign(locations.begin(), locations.end());
    switch (r.status) {
      case pipeline::Status::Analyzed: p.verdict = locations.empty() ? "benign" : "fraud"; break;
      case pipeline::Status::Skipped: p.verdict = "skip"; break;
      case pipeline::Status::Timeout: p.verdict = "timeout"; break;
      case pipeline::Status::Error: p.verdict = "error"; break;
    }
    if (p.labeled_fraud && r.status != pipeline::Status::Error) {
      app_pred.push_back(p.verdict == "fraud" ? detector::Label::Fraud : detector::Label::Benign);
      app_truth.push_back(*p.labeled_fraud);
    }

    auto& s = rep.summary;
    ++s.packages;
    s.analyzed += r.status == pipeline::Status::Analyzed;
    s.skipped += r.status == pipeline::Status::Skipped;
    s.timeouts += r.status == pipeline::Status::Timeout;
    s.errors += r.status == pipeline::Status::Error;
    s.sites += p.sites.size();
    s.fraud_sites += static_cast<std::size_t>(std::count_if(
        p.sites.begin(), p.sites.end(),
        [](const auto& x) { return x.verdict == detector::Label::Fraud; }));
    s.fraud_packages += p.verdict == "fraud";
    rep.packages.push_back(std::move(p));
  }
  if (!site_truth.empty()) rep.summary.site_metrics = detector::confusion(site_pred, site_truth);
  if (!app_truth.empty()) rep.summary.app_metrics = detector::confusion(app_pred, app_truth);
  std::sort(rep.packages.begin(), rep.packages.end(), [](const auto& a, const auto& b) {
    return std::tie(a.package_id, a.path) < std::tie(b.package_id, b.path);
  });
  return rep;
}

bool has_fraud(const ScanReport& r) { return r.summary.fraud_packages > 0; }

namespace {

json metrics_json(const detector::Metrics& m) {
  return {{"tp", m.tp},           {"fp", m.fp},         {"tn", m.tn},
          {"fn", m.fn},           {"precision", m.precision},
          {"recall", m.recall},   {"f_score", m.f_score}};
}

detector::Metrics metrics_from(const json& j) {
  detector::Metrics m;
  m.tp = j.at("tp");
  m.fp = j.at("fp");
  m.tn = j.at("tn");
  m.fn = j.at("fn");
  m.precision = j.at("precision");
  m.recall = j.at("recall");
  m.f_score = j.at("f_score");
  return m;
}

detector::Label label_from(const std::string& s) {
  if (s == "fraud") return detector::Label::Fraud;
  if (s == "benign") return detector::Label::Benign;
  throw std::runtime_error("report: unknown verdict '" + s + "'");
}

}  // namespace

json to_json(const ScanReport& r) {
  json pkgs = json::array();
  for (const auto& p : r.packages) {
    json sites = json::array();
    for (const auto& s : p.sites) {
      json raw = json::object();
      for (std::size_t j = 0; j < features::kFeatureCount; ++j)
        raw[std::string(features::kFeatureNames[j])] = s.raw[j];
      sites.push_back({{"id", s.id},
                       {"location", s.location},
                       {"raw", raw},
                       {"weighted", s.weighted},
                       {"oversized", s.oversized},
                       {"score", s.score},
                       {"verdict", std::string(detector::to_string(s.verdict))}});
    }
    json pj = {{"path", p.path},
               {"package_id", p.package_id},
               {"status", p.status},
               {"gate", {{"verdict", p.gate_verdict},
                         {"reason", p.gate_reason},
                         {"ad_views", p.ad_views}}},
               {"sites", sites},
               {"verdict", p.verdict},
               {"fraud_locations", p.fraud_locations},
               {"error", p.error},
               {"millis", p.millis}};
    if (p.labeled_fraud) pj["label"] = *p.labeled_fraud ? "fraud" : "benign";
    pkgs.push_back(std::move(pj));
  }
  const auto& s = r.summary;
  json summary = {{"packages", s.packages}, {"analyzed", s.analyzed},
                  {"skipped", s.skipped},   {"timeouts", s.timeouts},
                  {"errors", s.errors},     {"sites", s.sites},
                  {"fraud_sites", s.fraud_sites}, {"fraud_packages", s.fraud_packages}};
  if (s.site_metrics) summary["site_metrics"] = metrics_json(*s.site_metrics);
  if (s.app_metrics) summary["app_metrics"] = metrics_json(*s.app_metrics);
  return {{"format", "clickguard-scan-report"},
          {"version", 1},
          {"model_digest", r.model_digest},
          {"threshold", r.threshold},
          {"packages", pkgs},
          {"summary", summary}};
}

ScanReport from_json(const json& j) {
  if (j.value("format", "") != "clickguard-scan-report")
    throw std::runtime_error("not a clickguard scan report");
  ScanReport r;
  r.model_digest = j.at("model_digest");
  r.threshold = j.at("threshold");
  for (const auto& pj : j.at("packages")) {
    PackageReport p;
    p.path = pj.at("path");
    p.package_id = pj.at("package_id");
    p.status = pj.at("status");
    p.gate_verdict = pj.at("gate").at("verdict");
    p.gate_reason = pj.at("gate").at("reason");
    p.ad_views = pj.at("gate").at("ad_views").get<std::vector<std::string>>();
    for (const auto& sj : pj.at("sites")) {
      SiteReport s;
      s.id = sj.at("id");
      s.location = sj.at("location");
      for (std::size_t k = 0; k < features::kFeatureCount; ++k)
        s.raw[k] = sj.at("raw").at(std::string(features::kFeatureNames[k]));
      s.weighted = sj.at("weighted").get<features::Vec>();
      s.oversized = sj.at("oversized");
      s.score = sj.at("score");
      s.verdict = label_from(sj.at("verdict"));
      p.sites.push_back(std::move(s));
    }
    p.verdict = pj.at("verdict");
    p.fraud_locations = pj.at("fraud_locations").get<std::vector<std::string>>();
    p.error = pj.at("error");
    p.millis = pj.at("millis");
    if (pj.contains("label")) p.labeled_fraud = pj["label"] == "fraud";
    r.packages.push_back(std::move(p));
  }
  const auto& sj = j.at("summary");
  auto& s = r.summary;
  s.packages = sj.at("packages");
  s.analyzed = sj.at("analyzed");
  s.skipped = sj.at("skipped");
  s.timeouts = sj.at("timeouts");
  s.errors = sj.at("errors");
  s.sites = sj.at("sites");
  s.fraud_sites = sj.at("fraud_sites");
  s.fraud_packages = sj.at("fraud_packages");
  if (sj.contains("site_metrics")) s.site_metrics = metrics_from(sj["site_metrics"]);
  if (sj.contains("app_metrics")) s.app_metrics = metrics_from(sj["app_metrics"]);
  return r;
}

std::string canonical_json(ScanReport r) {
  for (auto& p : r.packages) p.millis = 0.0;
  return to_json(r).dump(2) + "\n";
}

std::string to_table(const ScanReport& r) {
  std::string out;
  char buf[512];
  std::snprintf(buf, sizeof buf, "%-36s %-9s %-8s %5s  %s\n", "PACKAGE", "STATUS", "VERDICT",
                "SITES", "DETAIL");
  out += buf;
  for (const auto& p : r.packages) {
    std::string detail;
    if (p.verdict == "fraud") {
      for (const auto& l : p.fraud_locations) detail += (detail.empty() ? "" : ", ") + l;
    } else if (p.status == "skipped") {
      detail = p.gate_reason;
    } else if (!p.error.empty()) {
      detail = p.error;
    }
    std::snprintf(buf, sizeof buf, "%-36s %-9s %-8s %5zu  %s\n",
                  (p.package_id.empty() ? p.path : p.package_id).c_str(), p.status.c_str(),
                  p.verdict.c_str(), p.sites.size(), detail.c_str());
    out += buf;
    for (const auto& s : p.sites) {
      std::snprintf(buf, sizeof buf, "    %-44s score=%-12.6g %s\n", s.location.c_str(),
                    s.score, std::string(detector::to_string(s.verdict)).c_str());
      out += buf;
    }
  }
  const auto& s = r.summary;
  std::snprintf(buf, sizeof buf,
                "\n%zu packages: %zu analyzed, %zu skipped, %zu timeout, %zu error; "
                "%zu sites, %zu flagged; %zu fraudulent packages (threshold %.6g)\n",
                s.packages, s.analyzed, s.skipped, s.timeouts, s.errors, s.sites, s.fraud_sites,
                s.fraud_packages, r.threshold);
  out += buf;
  auto line = [&](const char* name, const detector::Metrics& m) {
    std::snprintf(buf, sizeof buf,
                  "%s: precision %.4f recall %.4f F %.4f (tp %zu fp %zu tn %zu fn %zu)\n", name,
                  m.precision, m.recall, m.f_score, m.tp, m.fp, m.tn, m.fn);
    out += buf;
  };
  if (s.site_metrics) line("site-level", *s.site_metrics);
  if (s.app_metrics) line("app-level", *s.app_metrics);
  return out;
}

}  // namespace clickguard::report
