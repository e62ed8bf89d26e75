#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "clickguard/corpus.hpp"
#include "clickguard/dataflow.hpp"
#include "clickguard/experiment.hpp"
#include "clickguard/report.hpp"

namespace fs = std::filesystem;
using namespace clickguard;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitFraud = 2;

// Tool config: {"catalog": path, "gate": path-or-object, "timeout_ms": n}.
// Relative paths are resolved against the config file's directory.
pipeline::Options load_options(const std::string& config_path) {
  pipeline::Options opts;
  std::string path = config_path;
  if (path.empty())
    if (const char* env = std::getenv("CLICKGUARD_CONFIG")) path = env;
  if (path.empty()) return opts;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config '" + path + "'");
  const auto j = nlohmann::json::parse(in);
  const auto base = fs::path(path).parent_path();
  auto resolve = [&](const std::string& p) {
    return fs::path(p).is_absolute() ? fs::path(p) : base / p;
  };
  for (const auto& [k, v] : j.items()) {
    if (k == "catalog") opts.catalog = ApiCatalog::from_file(resolve(v.get<std::string>()).string());
    else if (k == "gate")
      opts.gate = v.is_string() ? gate::GateConfig::from_file(resolve(v.get<std::string>()).string())
                                : gate::GateConfig::from_json(v);
    else if (k == "timeout_ms") opts.timeout = std::chrono::milliseconds(v.get<long long>());
    else throw std::runtime_error("unknown config key '" + k + "'");
  }
  return opts;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + p.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  out << text;
}

struct Common {
  std::string config;
  unsigned jobs = 1;
  long long timeout_ms = -1;

  pipeline::Options options() const {
    auto o = load_options(config);
    if (timeout_ms >= 0) o.timeout = std::chrono::milliseconds(timeout_ms);
    return o;
  }
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "tool config JSON (default: $CLICKGUARD_CONFIG)");
  cmd->add_option("--jobs,-j", c.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--timeout-ms", c.timeout_ms, "per-package analysis timeout (default 300000)");
}

int cmd_scan(const std::vector<std::string>& inputs, const std::string& model_path,
             std::optional<double> threshold, bool as_json, const Common& common) {
  const auto model = detector::load_model(model_path);
  if (!threshold && !model.threshold)
    throw std::runtime_error("model has no calibrated threshold; pass --threshold or run eval --calibrate");
  const double t = threshold ? *threshold : *model.threshold;
  std::vector<fs::path> paths(inputs.begin(), inputs.end());
  const auto files = pipeline::collect_ir_files(paths);
  const auto results = pipeline::analyze_files(files, common.options(), common.jobs);
  const auto rep = report::build_report(results, model, t);
  std::cout << (as_json ? report::to_json(rep).dump(2) + "\n" : report::to_table(rep));
  if (report::has_fraud(rep)) return kExitFraud;
  return rep.summary.errors ? kExitError : kExitOk;
}

int cmd_train(const std::string& benign, const std::string& out, const std::string& train_cfg,
              const std::string& mask, const Common& common) {
  auto cfg = train_cfg.empty() ? detector::TrainConfig{} : detector::TrainConfig::from_file(train_cfg);
  const auto vectors = experiment::load_unlabeled(benign, common.options(), common.jobs);
  std::cerr << "training on " << vectors.size() << " benign site vectors\n";
  const auto model = detector::train(vectors, cfg, features::parse_mask(mask));
  detector::save_model(model, out);
  std::cerr << "loss " << model.initial_loss << " -> " << model.final_loss << "; wrote " << out
            << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& labeled, const std::string& model_path, bool calibrate,
             const std::string& out, bool ablate, const std::string& benign,
             const std::string& train_cfg, std::optional<double> threshold, bool as_json,
             const Common& common) {
  auto model = detector::load_model(model_path);
  const auto opts = common.options();
  const auto set = experiment::load_labeled(labeled, opts, common.jobs);
  if (std::count(set.fraud.begin(), set.fraud.end(), true) == 0 ||
      std::count(set.fraud.begin(), set.fraud.end(), false) == 0)
    throw std::runtime_error("labeled set must contain both benign and fraud sites");

  nlohmann::json j;
  if (calibrate) {
    model.threshold = experiment::calibrate(model, set);
    const auto dest = out.empty() ? model_path + ".calibrated" : out;
    detector::save_model(model, dest);
    j["calibrated_threshold"] = *model.threshold;
    j["calibrated_model"] = dest;
  }
  const auto t = threshold ? *threshold : model.threshold.value_or(model.reference_threshold);
  const auto ev = experiment::evaluate(model, set, t);
  auto mj = [](const detector::Metrics& m) {
    return nlohmann::json{{"tp", m.tp}, {"fp", m.fp}, {"tn", m.tn}, {"fn", m.fn},
                          {"precision", m.precision}, {"recall", m.recall},
                          {"f_score", m.f_score}};
  };
  j["threshold"] = t;
  j["sites"] = set.raw.size();
  j["packages"] = set.packages.size();
  j["failed_packages"] = set.failed_packages;
  j["site_metrics"] = mj(ev.site);
  j["app_metrics"] = mj(ev.app);
  j["auc"] = ev.auc;
  j["best_f"] = ev.best_f;

  if (ablate) {
    if (benign.empty()) throw std::runtime_error("--ablate needs --benign <training dir>");
    auto cfg = train_cfg.empty() ? model.config : detector::TrainConfig::from_file(train_cfg);
    const auto benign_raw = experiment::load_unlabeled(benign, opts, common.jobs);
    nlohmann::json by_size = nlohmann::json::array();
    for (std::size_t k = 1; k <= features::kFeatureCount; ++k) {
      const auto entries = experiment::ablate(benign_raw, set, cfg, experiment::masks_of_size(k));
      nlohmann::json subsets = nlohmann::json::array();
      double best = 0.0, mean = 0.0;
      for (const auto& e : entries) {
        subsets.push_back({{"features", features::mask_names(e.mask)},
                           {"auc", e.auc},
                           {"best_f", e.best_f}});
        best = std::max(best, e.auc);
        mean += e.auc / static_cast<double>(entries.size());
      }
      by_size.push_back({{"size", k}, {"best_auc", best}, {"mean_auc", mean}, {"subsets", subsets}});
    }
    j["ablation"] = by_size;
  }

  if (as_json) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::printf("sites %zu (packages %zu, failed %zu), threshold %.6g\n", set.raw.size(),
                set.packages.size(), set.failed_packages, t);
    std::printf("site-level: precision %.4f recall %.4f F %.4f\n", ev.site.precision,
                ev.site.recall, ev.site.f_score);
    std::printf("app-level:  precision %.4f recall %.4f F %.4f\n", ev.app.precision,
                ev.app.recall, ev.app.f_score);
    std::printf("AUC %.4f, best F over thresholds %.4f\n", ev.auc, ev.best_f);
    if (calibrate)
      std::printf("calibrated threshold %.6g written to %s\n", j["calibrated_threshold"].get<double>(),
                  j["calibrated_model"].get<std::string>().c_str());
    if (ablate)
      for (const auto& s : j["ablation"])
        std::printf("%zu features: best AUC %.4f mean AUC %.4f\n", s["size"].get<std::size_t>(),
                    s["best_auc"].get<double>(), s["mean_auc"].get<double>());
  }
  return kExitOk;
}

int cmd_dump(const std::string& file, const std::string& what, const std::string& model_path,
             const Common& common) {
  const auto text = read_file(file);
  const auto pkg = ir::parse_package(text);
  if (what == "ir") {
    std::cout << ir::serialize(pkg);
    return kExitOk;
  }
  const auto icfg = dataflow::build_icfg(pkg);
  const auto chains = dataflow::compute_chains(icfg);
  if (what == "dataflow") {
    std::cout << dataflow::dump(icfg, chains);
    return kExitOk;
  }
  auto opts = common.options();
  opts.keep_ddgs = true;
  const auto r = pipeline::analyze_text(text, file, opts);
  if (r.status != pipeline::Status::Analyzed) {
    std::cerr << file << ": " << pipeline::to_string(r.status) << " ("
              << (r.error.empty() ? std::string(gate::to_string(r.gate.reason)) : r.error)
              << ")\n";
    return r.status == pipeline::Status::Skipped ? kExitOk : kExitError;
  }
  if (what == "features") {
    std::optional<detector::VaeModel> model;
    if (!model_path.empty()) model = detector::load_model(model_path);
    std::cout << features::csv_header() << "\n";
    for (const auto& s : r.sites)
      std::cout << features::csv_row(s.features, model ? model->prepare(s.features.raw())
                                                       : features::Vec{})
                << "\n";
    return kExitOk;
  }
  for (const auto& s : r.sites) {
    if (what == "ddg") {
      std::cout << "# site " << s.site.id << " axis\n" << slicer::to_text(s.axis_ddg, pkg);
      std::cout << "# site " << s.site.id << " condition\n" << slicer::to_text(s.cond_ddg, pkg);
    } else {
      std::cout << slicer::to_dot(s.axis_ddg, pkg, "axis") << slicer::to_dot(s.cond_ddg, pkg, "condition");
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"clickguard: static detector for humanoid ad-click fraud"};
  app.require_subcommand(1);
  Common common;

  auto* scan = app.add_subcommand("scan", "scan IR packages with a trained model");
  std::vector<std::string> scan_inputs;
  std::string model_path;
  std::optional<double> threshold;
  bool as_json = false;
  scan->add_option("paths", scan_inputs, ".ir files or directories")->required();
  scan->add_option("--model,-m", model_path, "model file")->required();
  scan->add_option("--threshold,-t", threshold, "override the model threshold");
  scan->add_flag("--json", as_json, "JSON report instead of a table");
  add_common(scan, common);

  auto* train = app.add_subcommand("train", "train the VAE on benign packages");
  std::string benign, out, train_cfg, mask = "all";
  train->add_option("--benign", benign, "directory of benign .ir packages")->required();
  train->add_option("--out,-o", out, "model file to write")->required();
  train->add_option("--train-config", train_cfg, "training hyperparameters JSON");
  train->add_option("--features", mask, "feature subset, comma separated, or 'all'");
  add_common(train, common);

  auto* eval = app.add_subcommand("eval", "evaluate on a labeled corpus");
  std::string labeled;
  bool calibrate = false, ablate = false;
  eval->add_option("--labeled", labeled, "corpus directory with labels.txt")->required();
  eval->add_option("--model,-m", model_path, "model file")->required();
  eval->add_flag("--calibrate", calibrate, "write Youden-optimal threshold into a model copy");
  eval->add_option("--out,-o", out, "calibrated model path (default <model>.calibrated)");
  eval->add_flag("--ablate", ablate, "retrain per feature subset and report AUC");
  eval->add_option("--benign", benign, "benign training corpus for --ablate");
  eval->add_option("--train-config", train_cfg, "training hyperparameters for --ablate");
  eval->add_option("--threshold,-t", threshold, "evaluate at this threshold");
  eval->add_flag("--json", as_json, "JSON output");
  add_common(eval, common);

  auto* gen = app.add_subcommand("gen", "generate a labeled synthetic corpus");
  corpus::GenSpec spec;
  std::string mix;
  gen->add_option("--seed", spec.seed, "generator seed");
  gen->add_option("--benign", spec.n_benign, "benign package count");
  gen->add_option("--fraud", spec.n_fraud, "fraudulent package count");
  gen->add_option("--mix", mix, "RandomCoords,RandomTiming,FollowUserClick,ServerConfigured proportions");
  gen->add_option("--sites", spec.sites_per_package, "click sites per package");
  gen->add_option("--max-dead", spec.noise.max_dead_statements, "dead statements per handler (max)");
  gen->add_option("--max-wrappers", spec.noise.max_wrapper_depth, "wrapper call depth (max, <= 3)");
  gen->add_option("--max-decoys", spec.noise.max_decoy_views, "decoy non-ad views (max)");
  gen->add_option("--out,-o", out, "output directory")->required();

  auto* dump = app.add_subcommand("dump", "dump intermediate artifacts of one package");
  std::string dump_file, what = "ddg";
  dump->add_option("file", dump_file, ".ir file")->required();
  dump->add_option("--what", what, "ir | dataflow | ddg | dot | features")
      ->check(CLI::IsMember({"ir", "dataflow", "ddg", "dot", "features"}));
  dump->add_option("--model,-m", model_path, "model for weighted feature columns");
  add_common(dump, common);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*scan) return cmd_scan(scan_inputs, model_path, threshold, as_json, common);
    if (*train) return cmd_train(benign, out, train_cfg, mask, common);
    if (*eval)
      return cmd_eval(labeled, model_path, calibrate, out, ablate, benign, train_cfg, threshold,
                      as_json, common);
    if (*gen) {
      if (!mix.empty()) spec.mix = corpus::parse_mix(mix);
      const auto samples = corpus::generate(spec);
      corpus::write_corpus(samples, out);
      std::cerr << "wrote " << samples.size() << " packages to " << out << "\n";
      return kExitOk;
    }
    if (*dump) return cmd_dump(dump_file, what, model_path, common);
  } catch (const std::exception& e) {
    std::cerr << "clickguard: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
