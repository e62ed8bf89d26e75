#include "clickguard/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <sstream>
#include <thread>

#include "clickguard/dataflow.hpp"
#include "clickguard/ir.hpp"

namespace clickguard::pipeline {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Analyzed: return "analyzed";
    case Status::Skipped: return "skipped";
    case Status::Timeout: return "timeout";
    case Status::Error: return "error";
  }
  return "?";
}

PackageResult analyze_text(std::string_view text, std::string path, const Options& opts) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  PackageResult r;
  r.path = std::move(path);
  auto finish = [&] {
    r.millis = std::chrono::duration<double, std::milli>(clock::now() - start).count();
    return std::move(r);
  };
  try {
    const auto pkg = ir::parse_package(text);
    r.package_id = pkg.package_id;
    r.gate = gate::apply_gate(pkg, opts.gate);
    if (r.gate.verdict == gate::Verdict::Skip) {
      r.status = Status::Skipped;
      return finish();
    }
    auto limits = opts.limits;
    limits.deadline = start + opts.timeout;
    const auto icfg = dataflow::build_icfg(pkg);
    const auto chains = dataflow::compute_chains(icfg);
    for (auto& site : slicer::locate_click_sites(icfg, chains, opts.catalog, r.gate.ad_views)) {
      SiteResult s;
      s.axis_ddg = slicer::build_ddg(icfg, chains, site.axis_roots, limits);
      s.cond_ddg = slicer::build_ddg(icfg, chains, site.condition_roots, limits);
      s.features = features::extract_features(site, s.axis_ddg, s.cond_ddg, opts.catalog);
      s.location = pkg.location(site.dispatch.method);
      if (!opts.keep_ddgs) s.axis_ddg = s.cond_ddg = {};
      s.site = std::move(site);
      r.sites.push_back(std::move(s));
      if (clock::now() > *limits.deadline) throw slicer::SliceTimeout();
    }
    r.status = Status::Analyzed;
  } catch (const slicer::SliceTimeout&) {
    r.status = Status::Timeout;
    r.sites.clear();
    r.error = "timed out after " + std::to_string(opts.timeout.count()) + " ms";
  } catch (const ir::ParseError& e) {
    r.status = Status::Error;
    r.error = e.what();
  } catch (const std::exception& e) {
    r.status = Status::Error;
    r.error = e.what();
  }
  return finish();
}

PackageResult analyze_file(const std::filesystem::path& path, const Options& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    PackageResult r;
    r.path = path.string();
    r.status = Status::Error;
    r.error = "cannot read file";
    return r;
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return analyze_text(buf.str(), path.string(), opts);
}

std::vector<PackageResult> analyze_files(const std::vector<std::filesystem::path>& paths,
                                         const Options& opts, unsigned jobs) {
  std::vector<PackageResult> out(paths.size());
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(paths.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (auto i = next++; i < paths.size(); i = next++) out[i] = analyze_file(paths[i], opts);
  };
  if (jobs <= 1) {
    worker();
    return out;
  }
  std::vector<std::jthread> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  pool.clear();  // joins
  return out;
}

std::vector<std::filesystem::path> collect_ir_files(
    const std::vector<std::filesystem::path>& inputs) {
  std::vector<std::filesystem::path> out;
  for (const auto& p : inputs) {
    if (std::filesystem::is_directory(p)) {
      std::vector<std::filesystem::path> found;
      for (const auto& e : std::filesystem::recursive_directory_iterator(p))
        if (e.is_regular_file() && e.path().extension() == ".ir") found.push_back(e.path());
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else if (std::filesystem::exists(p)) {
      out.push_back(p);
    } else {
      throw std::runtime_error("no such file or directory: " + p.string());
    }
  }
  return out;
}

std::vector<features::Vec> raw_vectors(const std::vector<PackageResult>& results) {
  std::vector<features::Vec> out;
  for (const auto& r : results)
    for (const auto& s : r.sites) out.push_back(s.features.raw());
  return out;
}

}  // namespace clickguard::pipeline
