#include <doctest.h>

#include <filesystem>
#include <map>
#include <random>

#include "clickguard/corpus.hpp"
#include "clickguard/ir.hpp"
#include "clickguard/pipeline.hpp"

using namespace clickguard;
using corpus::Strategy;
using features::Feature;

namespace {

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("clickguard_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::vector<features::FeatureVector> site_features(const std::string& text) {
  const auto r = pipeline::analyze_text(text, "x.ir", {});
  REQUIRE(r.status == pipeline::Status::Analyzed);
  std::vector<features::FeatureVector> out;
  for (const auto& s : r.sites) out.push_back(s.features);
  return out;
}

std::vector<std::array<std::uint32_t, features::kFeatureCount>> counts_of(
    const std::vector<features::FeatureVector>& fvs) {
  std::vector<std::array<std::uint32_t, features::kFeatureCount>> out;
  for (const auto& f : fvs) out.push_back(f.counts);
  return out;
}

}  // namespace

TEST_CASE("generation is deterministic") {
  corpus::GenSpec spec;
  spec.seed = 9;
  spec.n_benign = 10;
  spec.n_fraud = 10;
  const auto a = corpus::generate(spec);
  const auto b = corpus::generate(spec);
  REQUIRE(a.size() == 20);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].text == b[i].text);
    CHECK(a[i].file_name == b[i].file_name);
  }
  spec.seed = 10;
  const auto c = corpus::generate(spec);
  CHECK(c[0].text != a[0].text);
  CHECK(a[0].file_name == "benign_0000.ir");
  CHECK(a[10].file_name == "fraud_0000.ir");
  CHECK(corpus::generate_package(5, "p.q", Strategy::RandomTiming, {}) ==
        corpus::generate_package(5, "p.q", Strategy::RandomTiming, {}));
}

TEST_CASE("strategy allocation follows the mix") {
  corpus::GenSpec spec;
  spec.n_fraud = 50;
  std::map<Strategy, int> n;
  for (const auto& s : corpus::generate(spec)) ++n[*s.strategy];
  for (auto st : corpus::kStrategies) CHECK((n[st] == 12 || n[st] == 13));
  CHECK(n[Strategy::RandomCoords] + n[Strategy::RandomTiming] + n[Strategy::FollowUserClick] +
            n[Strategy::ServerConfigured] == 50);

  spec.mix = corpus::parse_mix("1,0,0,0");
  for (const auto& s : corpus::generate(spec)) CHECK(s.strategy == Strategy::RandomCoords);
  CHECK_THROWS(corpus::parse_mix("0.5,0.5"));
  CHECK_THROWS(corpus::parse_mix("0.5,x,0,0"));
  spec.mix = corpus::parse_mix("0.5,0.5,0.5,0.5");
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec.mix = corpus::parse_mix("-1,1,0.5,0.5");
  CHECK_THROWS_AS(corpus::generate(spec), std::invalid_argument);
  spec.mix = corpus::parse_mix("0,0,0.5,0.5");
  spec.sites_per_package = 0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("every generated package parses and passes the gate") {
  corpus::GenSpec spec;
  spec.seed = 21;
  spec.n_benign = 60;
  spec.n_fraud = 60;
  for (const auto& s : corpus::generate(spec)) {
    const auto r = pipeline::analyze_text(s.text, s.file_name, {});
    CHECK_MESSAGE(r.status == pipeline::Status::Analyzed, s.file_name << " " << r.error);
    CHECK(r.sites.size() == 1);
    for (const auto& site : r.sites) CHECK_FALSE(site.features.oversized);
  }
}

TEST_CASE("strategy signatures") {
  corpus::GenSpec spec;
  spec.seed = 33;
  spec.n_fraud = 80;
  for (const auto& s : corpus::generate(spec)) {
    const auto r = pipeline::analyze_text(s.text, s.file_name, {});
    REQUIRE(r.sites.size() == 1);
    const auto& f = r.sites[0].features;
    switch (*s.strategy) {
      case Strategy::RandomCoords:
        CHECK(f[Feature::RandAxis] >= 1);
        CHECK(f[Feature::ViewSizeApi] >= 1);
        break;
      case Strategy::RandomTiming:
        CHECK(f[Feature::RandCondition] >= 1);
        CHECK(f[Feature::AxisApi] == 0);
        CHECK(f[Feature::RandAxis] == 0);
        break;
      case Strategy::FollowUserClick:
        CHECK(f[Feature::RandCondition] >= 1);
        CHECK(f[Feature::RandAxis] >= 1);
        CHECK(s.text.find("method onClick(") != std::string::npos);
        break;
      case Strategy::ServerConfigured:
        CHECK(f[Feature::SysApi] >= 1);
        CHECK(f[Feature::ViewSizeApi] >= 1);
        CHECK(s.text.find("RemoteConfig.getFloat") != std::string::npos);
        break;
    }
  }
}

TEST_CASE("unrelated code and decoy views do not change features") {
  corpus::GenSpec spec;
  spec.seed = 44;
  spec.n_benign = 20;
  spec.n_fraud = 20;
  std::mt19937_64 rng(1);
  for (const auto& s : corpus::generate(spec)) {
    auto pkg = ir::parse_package(s.text);
    const auto before = counts_of(site_features(ir::serialize(pkg)));

    int fresh = 0;
    for (auto& cls : pkg.classes)
      for (auto& m : cls.methods) {
        for (int k = 0; k < 6; ++k) {
          const auto pos = static_cast<std::ptrdiff_t>(rng() % (m.body.size() + 1));
          const auto v = "zz" + std::to_string(fresh++);
          std::vector<ir::Statement> unit;
          unit.push_back(ir::Call{v, std::nullopt, "Random.nextInt", {ir::Operand::lit("9")}});
          unit.push_back(ir::BinOp{v + "b", ir::BinaryOp::Mul, ir::Operand::var(v),
                                   ir::Operand::lit("2")});
          unit.push_back(ir::Call{std::nullopt, std::nullopt, "Log.d", {ir::Operand::var(v + "b")}});
          m.body.insert(m.body.begin() + pos, unit.begin(), unit.end());
        }
      }
    pkg.views.push_back({"helpButton", "android.widget.Button", 60, 200, {"Help"}});
    const auto after = counts_of(site_features(ir::serialize(pkg)));
    CHECK(before == after);
  }
}

TEST_CASE("noise knobs off yields lean packages") {
  corpus::NoiseKnobs none{0, 0, 0};
  const auto text = corpus::generate_package(3, "lean.app", Strategy::RandomCoords, none);
  const auto pkg = ir::parse_package(text);
  CHECK(pkg.views.size() == 1);
  CHECK(text.find("method fire") == std::string::npos);
  CHECK(site_features(text).size() == 1);
}

TEST_CASE("corpus directory and labels manifest") {
  const auto dir = temp_dir("corpus");
  corpus::GenSpec spec;
  spec.n_benign = 3;
  spec.n_fraud = 4;
  const auto samples = corpus::generate(spec);
  corpus::write_corpus(samples, dir);
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) files += e.path().extension() == ".ir";
  CHECK(files == 7);
  const auto labels = corpus::read_labels(dir);
  REQUIRE(labels.size() == 7);
  CHECK(labels[0] == corpus::LabeledFile{"benign_0000.ir", false, std::nullopt});
  CHECK(labels[3].fraud);
  CHECK(labels[3].strategy.has_value());

  const auto empty = temp_dir("empty");
  corpus::write_corpus(corpus::generate(corpus::GenSpec{}), empty);
  CHECK(corpus::read_labels(empty).empty());
  CHECK(std::filesystem::exists(empty / corpus::kLabelsFile));
  std::filesystem::remove_all(dir);
  std::filesystem::remove_all(empty);
}
