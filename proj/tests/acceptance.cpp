// Acceptance checks, one PASS/FAIL line per criterion.
//   acceptance [work_dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "clickguard/corpus.hpp"
#include "clickguard/dataflow.hpp"
#include "clickguard/detector.hpp"
#include "clickguard/experiment.hpp"
#include "clickguard/features.hpp"
#include "clickguard/gate.hpp"
#include "clickguard/pipeline.hpp"
#include "clickguard/report.hpp"
#include "clickguard/slicer.hpp"
#include "clickguard/vae_kernels.hpp"
#include "support/oracles.hpp"
#include "support/random_program.hpp"

using namespace clickguard;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::uint64_t kTrainSeed = 1;
constexpr std::uint64_t kSeedCorpusSeed = 2;
constexpr std::uint64_t kValidationSeed = 3;
constexpr unsigned kJobs = 4;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report_line(int n, const std::string& name, const Outcome& o) {
  std::printf("%s criterion %d: %s (%s)\n", o.pass ? "PASS" : "FAIL", n, name.c_str(),
              o.detail.c_str());
  std::fflush(stdout);
  failures += !o.pass;
}

Outcome guarded(const std::function<Outcome()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---------------------------------------------------------------- corpora

struct Experiment {
  fs::path train_dir, seed_dir, val_dir;
  experiment::LabeledSet seed, val;
  std::vector<features::Vec> benign;
  std::size_t timeouts = 0;
  detector::VaeModel model;
  experiment::Evaluation eval;
  double seconds = 0.0;
};

corpus::GenSpec spec(std::uint64_t seed, std::size_t benign, std::size_t fraud) {
  corpus::GenSpec s;
  s.seed = seed;
  s.n_benign = benign;
  s.n_fraud = fraud;
  return s;
}

std::size_t count_timeouts(const fs::path& dir, const pipeline::Options& opts) {
  std::size_t n = 0;
  for (const auto& r : pipeline::analyze_files(pipeline::collect_ir_files({dir}), opts, kJobs))
    n += r.status == pipeline::Status::Timeout;
  return n;
}

// gen -> train -> calibrate -> eval, everything below `root`.
Experiment run_experiment(const fs::path& root) {
  const auto start = Clock::now();
  Experiment ex;
  ex.train_dir = root / "train";
  ex.seed_dir = root / "seed";
  ex.val_dir = root / "validation";
  fs::remove_all(root);
  corpus::write_corpus(corpus::generate(spec(kTrainSeed, 500, 0)), ex.train_dir);
  corpus::write_corpus(corpus::generate(spec(kSeedCorpusSeed, 50, 50)), ex.seed_dir);
  corpus::write_corpus(corpus::generate(spec(kValidationSeed, 50, 50)), ex.val_dir);

  const pipeline::Options opts;
  ex.benign = experiment::load_unlabeled(ex.train_dir, opts, kJobs);
  ex.model = detector::train(ex.benign, detector::TrainConfig{});
  ex.val = experiment::load_labeled(ex.val_dir, opts, kJobs);
  ex.model.threshold = experiment::calibrate(ex.model, ex.val);
  ex.seed = experiment::load_labeled(ex.seed_dir, opts, kJobs);
  ex.eval = experiment::evaluate(ex.model, ex.seed, *ex.model.threshold);
  ex.seconds = seconds_since(start);
  ex.timeouts = ex.seed.failed_packages + ex.val.failed_packages;
  return ex;
}

// Canonical report of a run: model file plus the scan report over the seed
// corpus, with paths relative to the run directory.
std::string run_fingerprint(const fs::path& root, const Experiment& ex) {
  const auto files = pipeline::collect_ir_files({ex.seed_dir});
  auto results = pipeline::analyze_files(files, {}, kJobs);
  std::vector<std::pair<std::string, bool>> labels;
  for (const auto& l : corpus::read_labels(ex.seed_dir))
    labels.emplace_back(fs::relative(ex.seed_dir / l.path, root).string(), l.fraud);
  for (auto& r : results) r.path = fs::relative(r.path, root).string();
  const auto rep = report::build_report(results, ex.model, *ex.model.threshold, labels);
  return detector::serialize_model(ex.model) + report::canonical_json(rep);
}

// ---------------------------------------------------------------- criteria

Outcome criterion1(const Experiment& ex) {
  const double f = ex.eval.site.f_score;
  return {f >= 0.90 && ex.seconds < 180.0,
          "site F " + fmt("%.4f", f) + " >= 0.90, tp " + std::to_string(ex.eval.site.tp) +
              " fp " + std::to_string(ex.eval.site.fp) + " fn " +
              std::to_string(ex.eval.site.fn) + ", threshold " +
              fmt("%.5g", *ex.model.threshold) + ", " + fmt("%.1f", ex.seconds) +
              " s end to end < 180 s"};
}

Outcome criterion2() {
  std::mt19937_64 rng(20240601);
  int equal = 0;
  for (int i = 0; i < 200; ++i) {
    testsupport::RandomProgramOptions o;
    o.methods = 1 + i % 4;
    const auto pkg = ir::parse_package(testsupport::random_program(rng, o));
    const dataflow::Icfg icfg(pkg);
    const auto chains = dataflow::compute_chains(icfg);
    std::vector<slicer::OperandRef> refs;
    for (ir::MethodId m = 0; m < pkg.method_count(); ++m)
      for (std::uint32_t s = 0; s < pkg.method(m).body.size(); ++s)
        for (const auto& so : ir::operands(pkg.method(m).body[s])) refs.push_back({{m, s}, so.slot});
    std::vector<slicer::OperandRef> roots;
    const int n = std::uniform_int_distribution<int>(1, 4)(rng);
    for (int k = 0; k < n; ++k)
      roots.push_back(refs[std::uniform_int_distribution<std::size_t>(0, refs.size() - 1)(rng)]);
    const auto ddg = slicer::build_ddg(icfg, chains, roots);
    equal += !ddg.oversized() &&
             ddg.node_keys() == testsupport::closure_oracle(pkg, testsupport::ud_oracle(pkg), roots);
  }
  return {equal == 200, std::to_string(equal) + "/200 DDG node sets equal the closure oracle"};
}

bool duality_holds(const ir::Package& pkg, const dataflow::DefUseChains& c) {
  for (ir::MethodId m = 0; m < pkg.method_count(); ++m) {
    const auto& body = pkg.method(m).body;
    for (std::uint32_t i = 0; i < body.size(); ++i) {
      for (const auto& vd : c.uses_at({m, i}))
        for (const auto& d : vd.defs) {
          const auto u = c.uses(d);
          if (std::find(u.begin(), u.end(), ir::StmtId{m, i}) == u.end()) return false;
        }
      if (const auto* v = ir::defined_var(body[i]))
        for (const auto& u : c.uses(dataflow::DefSite::stmt({m, i}))) {
          const auto r = c.reaching(u, *v);
          if (std::find(r.begin(), r.end(), dataflow::DefSite::stmt({m, i})) == r.end())
            return false;
        }
    }
  }
  return true;
}

Outcome criterion3() {
  std::mt19937_64 rng(31337);
  int equal = 0;
  for (int i = 0; i < 100; ++i) {
    testsupport::RandomProgramOptions o;
    o.methods = 1 + i % 3;
    const auto pkg = ir::parse_package(testsupport::random_program(rng, o));
    const auto chains = dataflow::compute_chains(dataflow::Icfg(pkg));
    const auto oracle = testsupport::ud_oracle(pkg);
    bool same = true;
    for (ir::MethodId m = 0; m < pkg.method_count(); ++m)
      for (std::uint32_t s = 0; s < pkg.method(m).body.size(); ++s)
        for (const auto& so : ir::operands(pkg.method(m).body[s])) {
          if (!so.operand->is_var()) continue;
          const auto got = chains.reaching({m, s}, so.operand->text);
          auto it = oracle.find({m, s, so.operand->text});
          const std::set<dataflow::DefSite> want =
              it == oracle.end() ? std::set<dataflow::DefSite>{} : it->second;
          same = same && std::set<dataflow::DefSite>(got.begin(), got.end()) == want;
        }
    equal += same;
  }
  int dual = 0;
  for (int i = 0; i < 200; ++i) {
    testsupport::RandomProgramOptions o;
    o.loops = i % 2 == 0;
    o.max_branches = 10;
    const auto pkg = ir::parse_package(testsupport::random_program(rng, o));
    dual += duality_holds(pkg, dataflow::compute_chains(dataflow::Icfg(pkg)));
  }
  return {equal == 100 && dual == 200,
          std::to_string(equal) + "/100 UD chains equal path enumeration, " +
              std::to_string(dual) + "/200 programs (100 with loops) UD/DU dual"};
}

// Independent entropy-weight formulation in long double.
features::Vec entropy_oracle(const std::vector<features::Vec>& rows) {
  const long double ln_n = std::log(static_cast<long double>(rows.size()));
  std::array<long double, features::kFeatureCount> d{};
  long double total = 0;
  for (std::size_t j = 0; j < features::kFeatureCount; ++j) {
    long double s = 0, xlx = 0;
    for (const auto& r : rows) {
      s += r[j];
      if (r[j] > 0) xlx += r[j] * std::log(static_cast<long double>(r[j]));
    }
    const long double e = s > 0 ? (std::log(s) - xlx / s) / ln_n : 1.0L;
    d[j] = e < 1 ? 1 - e : 0;
    total += d[j];
  }
  features::Vec w{};
  for (std::size_t j = 0; j < features::kFeatureCount; ++j)
    w[j] = total > 0 ? static_cast<double>(d[j] / total) : 1.0 / features::kFeatureCount;
  return w;
}

Outcome criterion4() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0), factor(0.05, 50.0);
  double max_sum_err = 0, max_oracle_err = 0, max_scale_err = 0;
  bool constant_zero = true;
  for (int iter = 0; iter < 50; ++iter) {
    std::vector<features::Vec> rows(2 + rng() % 150);
    const std::size_t constant_col = rng() % features::kFeatureCount;
    const double c = std::floor(u(rng) * 3);
    for (auto& r : rows)
      for (std::size_t j = 0; j < features::kFeatureCount; ++j)
        r[j] = j == constant_col ? c : (j % 2 && u(rng) < 0.7 ? 0.0 : u(rng));
    const auto w = features::entropy_weights(rows);
    const auto o = entropy_oracle(rows);
    double sum = 0;
    for (std::size_t j = 0; j < features::kFeatureCount; ++j) {
      sum += w[j];
      max_oracle_err = std::max(max_oracle_err, std::abs(w[j] - o[j]));
    }
    max_sum_err = std::max(max_sum_err, std::abs(sum - 1.0));
    constant_zero = constant_zero && w[constant_col] == 0.0;
    auto scaled = rows;
    for (std::size_t j = 0; j < features::kFeatureCount; ++j) {
      const double f = factor(rng);
      for (auto& r : scaled) r[j] *= f;
    }
    const auto ws = features::entropy_weights(scaled);
    for (std::size_t j = 0; j < features::kFeatureCount; ++j)
      max_scale_err = std::max(max_scale_err, std::abs(ws[j] - w[j]));
  }
  return {max_sum_err <= 1e-9 && constant_zero && max_scale_err <= 1e-9 && max_oracle_err <= 1e-9,
          "max |sum-1| " + fmt("%.2e", max_sum_err) + ", constant columns zero: " +
              (constant_zero ? "yes" : "no") + ", max scaling drift " +
              fmt("%.2e", max_scale_err) + ", max oracle diff " + fmt("%.2e", max_oracle_err) +
              " on 50 matrices"};
}

Outcome criterion5(const Experiment& ex) {
  const vae::Layout layout{vae::Dims{}};
  double worst = 0;
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 0.4), n01;
    std::uniform_real_distribution<double> u(0.0, 0.3);
    std::vector<double> params(layout.total);
    for (auto& p : params) p = g(rng);
    std::vector<features::Vec> xs(8);
    for (auto& x : xs)
      for (auto& v : x) v = u(rng);
    std::vector<double> eps(xs.size() * layout.dims.latent);
    for (auto& e : eps) e = n01(rng);
    const vae::Batch batch{xs, eps};
    std::vector<double> grad(layout.total), scratch(layout.total);
    vae::loss_and_gradient_serial(layout, params, batch, 0.5, grad);
    std::uniform_int_distribution<std::size_t> coord(0, layout.total - 1);
    for (int k = 0; k < 20; ++k) {
      const auto i = coord(rng);
      auto plus = params, minus = params;
      plus[i] += 1e-5;
      minus[i] -= 1e-5;
      const double numeric =
          (vae::loss_and_gradient_serial(layout, plus, batch, 0.5, scratch).total -
           vae::loss_and_gradient_serial(layout, minus, batch, 0.5, scratch).total) /
          2e-5;
      const double denom = std::max({std::abs(numeric), std::abs(grad[i]), 1e-6});
      worst = std::max(worst, std::abs(numeric - grad[i]) / denom);
    }
  }
  bool decreased = true, identical = true;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    detector::TrainConfig cfg;
    cfg.seed = seed;
    const auto a = detector::train(ex.benign, cfg);
    const auto b = detector::train(ex.benign, cfg);
    decreased = decreased && a.final_loss < a.initial_loss;
    identical = identical && detector::serialize_model(a) == detector::serialize_model(b);
  }
  return {worst < 1e-4 && decreased && identical,
          "max relative gradient error " + fmt("%.2e", worst) +
              " over 60 coordinates, loss decreased on 3/3 seeds: " +
              (decreased ? "yes" : "no") + ", bit-identical model files: " +
              (identical ? "yes" : "no")};
}

struct Ablation {
  double full_auc = 0;
  std::vector<experiment::AblationEntry> singles, pairs;
  double five_auc = 0;
};

Ablation run_ablation(const Experiment& ex) {
  Ablation a;
  const detector::TrainConfig cfg;
  a.full_auc = ex.eval.auc;
  a.singles = experiment::ablate(ex.benign, ex.seed, cfg, experiment::masks_of_size(1));
  a.pairs = experiment::ablate(ex.benign, ex.seed, cfg, experiment::masks_of_size(2));
  a.five_auc = experiment::ablate(ex.benign, ex.seed, cfg, {experiment::five_feature_subset()})[0].auc;
  return a;
}

Outcome criterion6(const Ablation& a) {
  double best_pair = 0;
  std::string best_name;
  for (const auto& e : a.pairs)
    if (e.auc > best_pair) {
      best_pair = e.auc;
      best_name = features::mask_names(e.mask);
    }
  const bool ok = a.full_auc >= best_pair && a.five_auc >= a.full_auc - 0.02;
  return {ok, "full AUC " + fmt("%.4f", a.full_auc) + " >= best 2-feature AUC " +
                  fmt("%.4f", best_pair) + " (" + best_name + "), 5-feature AUC " +
                  fmt("%.4f", a.five_auc) + " within 0.02"};
}

Outcome criterion7(const Experiment& ex, const Ablation& a) {
  const double full_f = ex.eval.site.f_score;
  double best = 0;
  std::string name;
  for (const auto& e : a.singles)
    if (e.best_f > best) {
      best = e.best_f;
      name = features::mask_names(e.mask);
    }
  return {best < full_f, "best single-feature F " + fmt("%.4f", best) + " (" + name +
                             ") < full model F " + fmt("%.4f", full_f)};
}

// A package with one click site whose coordinates are fed by long
// arithmetic chains, plus unrelated code, about 1000 statements in total.
std::string thousand_statement_package() {
  std::string out =
      "package perf.big\npermission INTERNET\nlibrary com.facebook.ads\n"
      "view adView class=com.google.android.gms.ads.AdView w=320 h=50\nclass Main\n";
  int stmts = 0;
  for (int h = 0; h < 8; ++h) {
    out += "  method helper" + std::to_string(h) + "(a, b)\n";
    for (int i = 0; i < 40; ++i, ++stmts)
      out += "    t" + std::to_string(i) + " = " + (i == 0 ? "add a b" : "mul t" + std::to_string(i - 1) + " b") + "\n";
    out += "    return t39\n  endmethod\n";
    stmts += 1;
  }
  out += "  method onTouch(ev)\n";
  out += "    v = call Activity.findViewById(\"adView\")\n    w = call v View.getWidth()\n";
  out += "    x0 = call ev MotionEvent.getX()\n    y0 = call ev MotionEvent.getY()\n";
  stmts += 4;
  for (int i = 1; i <= 300; ++i, ++stmts) {
    const auto prev = std::to_string(i - 1), cur = std::to_string(i);
    if (i % 50 == 0)
      out += "    x" + cur + " = call Main.helper" + std::to_string(i / 50 % 8) + "(x" + prev + ", w)\n";
    else
      out += "    x" + cur + " = add x" + prev + " " + cur + "\n";
  }
  for (int i = 1; i <= 300; ++i, ++stmts)
    out += "    y" + std::to_string(i) + " = sub y" + std::to_string(i - 1) + " 1\n";
  while (stmts < 1000) {
    out += "    n" + std::to_string(stmts) + " = call System.currentTimeMillis()\n";
    ++stmts;
  }
  out += "    r = call Random.nextInt(100)\n    if r > 50 goto done\n";
  out += "    e = call MotionEvent.obtain(0, 0, 0, x300, y300, 0)\n";
  out += "    call v View.dispatchTouchEvent(e)\n    label done\n    return\n";
  out += "  endmethod\nendclass\nendpackage\n";
  return out;
}

Outcome criterion8(const Experiment& ex) {
  const auto text = thousand_statement_package();
  std::size_t statements = 0;
  const auto pkg = ir::parse_package(text);
  for (ir::MethodId m = 0; m < pkg.method_count(); ++m) statements += pkg.method(m).body.size();

  // Single-threaded end-to-end: parse, gate, slice, features, score.
  const auto start = Clock::now();
  const auto result = pipeline::analyze_text(text, "big.ir", {});
  double score = 0;
  for (const auto& s : result.sites) score += detector::score_raw(ex.model, s.features.raw());
  const double secs = seconds_since(start);

  const pipeline::Options opts;
  const auto train_timeouts = count_timeouts(ex.train_dir, opts);
  const std::size_t timeouts = train_timeouts + ex.timeouts;
  const bool ok = result.status == pipeline::Status::Analyzed && result.sites.size() == 1 &&
                  statements >= 1000 && secs < 1.0 && timeouts == 0 && std::isfinite(score);
  return {ok, std::to_string(statements) + "-statement package scanned in " +
                  fmt("%.3f", secs) + " s < 1 s (DDG " +
                  std::to_string(result.sites.empty() ? 0 : result.sites[0].features.counts[4]) +
                  " nodes), " + std::to_string(timeouts) +
                  " acceptance packages hit the timeout"};
}

Outcome criterion9() {
  corpus::GenSpec s = spec(91, 20, 20);
  std::size_t violations = 0, checked = 0;
  for (const auto& sample : corpus::generate(s)) {
    const auto base = ir::parse_package(sample.text);
    auto count = [](const ir::Package& p) {
      return pipeline::analyze_text(ir::serialize(p), "g.ir", {}).sites.size();
    };
    if (count(base) == 0) ++violations;
    auto a = base;
    a.manifest.permissions = {"CAMERA"};
    auto b = base;
    b.manifest.libraries = {"org.example.util"};
    auto c = base;
    for (std::size_t i = 0; i < c.views.size(); ++i)
      c.views[i] = {"panel" + std::to_string(i), "android.widget.LinearLayout", 100, 400, {}};
    for (const auto* p : {&a, &b, &c}) {
      ++checked;
      violations += count(*p) != 0;
    }
  }
  // Monotonicity: adding manifest entries, views or relaxing the rules
  // never turns Analyze into Skip nor removes an ad view.
  std::mt19937_64 rng(92);
  std::size_t mono_checked = 0, mono_bad = 0;
  const std::vector<std::string> perms{"INTERNET", "ACCESS_NETWORK_STATE", "CAMERA"};
  const std::vector<std::string> libs{"com.mopub", "org.json", "com.applovin"};
  const std::vector<ir::ViewDecl> views{{"adView", "FrameLayout", 10, 10, {}},
                                        {"okButton", "Button", 80, 40, {}},
                                        {"strip", "View", 320, 50, {}},
                                        {"x", "com.facebook.ads.AdView", 1, 1, {}}};
  for (int iter = 0; iter < 500; ++iter) {
    ir::Package p;
    p.package_id = "m";
    if (rng() % 2) p.manifest.permissions.insert(perms[rng() % perms.size()]);
    if (rng() % 2) p.manifest.libraries.insert(libs[rng() % libs.size()]);
    for (int k = 0; k < 2; ++k)
      if (rng() % 2) {
        auto v = views[rng() % views.size()];
        v.name += std::to_string(k);
        p.views.push_back(v);
      }
    gate::GateConfig cfg;
    const auto before = gate::apply_gate(p, cfg);
    auto q = p;
    q.manifest.permissions.insert(perms[rng() % perms.size()]);
    q.manifest.libraries.insert(libs[rng() % libs.size()]);
    auto v = views[rng() % views.size()];
    v.name += "_more";
    q.views.push_back(v);
    auto relaxed = cfg;
    relaxed.ad_library_allowlist.insert("org.json");
    relaxed.rules.ad_classes.insert("Button");
    for (const auto& after : {gate::apply_gate(q, cfg), gate::apply_gate(p, relaxed)}) {
      ++mono_checked;
      if (before.verdict != gate::Verdict::Analyze) continue;
      mono_bad += after.verdict != gate::Verdict::Analyze ||
                  !std::includes(after.ad_views.begin(), after.ad_views.end(),
                                 before.ad_views.begin(), before.ad_views.end());
    }
  }
  return {violations == 0 && mono_bad == 0,
          std::to_string(checked) + " gate-failing variants with zero vectors (" +
              std::to_string(violations) + " violations), " + std::to_string(mono_checked) +
              " monotonicity checks (" + std::to_string(mono_bad) + " violations)"};
}

Outcome criterion10(const fs::path& work, const std::string& first) {
  const auto root = work / "run2";
  const auto ex = run_experiment(root);
  const auto second = run_fingerprint(root, ex);
  return {first == second, std::to_string(first.size()) + " bytes of model and report, " +
                               (first == second ? "identical" : "different") + " across two runs"};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "clickguard_acceptance";
  fs::create_directories(work);

  Experiment ex;
  std::string fingerprint;
  bool have_experiment = false;
  try {
    ex = run_experiment(work / "run1");
    fingerprint = run_fingerprint(work / "run1", ex);
    have_experiment = true;
  } catch (const std::exception& e) {
    std::printf("experiment failed: %s\n", e.what());
  }
  auto needs_experiment = [&](const std::function<Outcome()>& f) {
    return have_experiment ? guarded(f) : Outcome{false, "experiment did not run"};
  };

  report_line(1, "seed-corpus accuracy", needs_experiment([&] { return criterion1(ex); }));
  report_line(2, "slicer oracle equivalence", guarded(criterion2));
  report_line(3, "dataflow oracle", guarded(criterion3));
  report_line(4, "entropy-weight algebra", guarded(criterion4));
  report_line(5, "VAE numerics", needs_experiment([&] { return criterion5(ex); }));
  Ablation ab;
  bool have_ablation = false;
  if (have_experiment) {
    try {
      ab = run_ablation(ex);
      have_ablation = true;
    } catch (const std::exception& e) {
      std::printf("ablation failed: %s\n", e.what());
    }
  }
  report_line(6, "ablation shape", have_ablation ? guarded([&] { return criterion6(ab); })
                                                 : Outcome{false, "ablation did not run"});
  report_line(7, "single-feature dominance",
              have_ablation ? guarded([&] { return criterion7(ex, ab); })
                            : Outcome{false, "ablation did not run"});
  report_line(8, "throughput", needs_experiment([&] { return criterion8(ex); }));
  report_line(9, "gate contract", guarded(criterion9));
  report_line(10, "pipeline determinism",
              needs_experiment([&] { return criterion10(work, fingerprint); }));
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
