#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace clickguard::corpus {

enum class Strategy : std::uint8_t {
  RandomCoords,      // coordinates = random number x ad-view size
  RandomTiming,      // dispatch guarded by a random draw
  FollowUserClick,   // re-dispatch inside onClick with random perturbation
  ServerConfigured   // coordinates and trigger limit from a remote config API
};

inline constexpr std::size_t kStrategyCount = 4;
inline constexpr std::array<Strategy, kStrategyCount> kStrategies{
    Strategy::RandomCoords, Strategy::RandomTiming, Strategy::FollowUserClick,
    Strategy::ServerConfigured};

std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view s);

struct NoiseKnobs {
  std::uint32_t max_dead_statements = 30;
  std::uint32_t max_wrapper_depth = 3;
  std::uint32_t max_decoy_views = 2;
};

struct GenSpec {
  std::uint64_t seed = 1;
  std::size_t n_benign = 0;
  std::size_t n_fraud = 0;
  std::array<double, kStrategyCount> mix{0.25, 0.25, 0.25, 0.25};
  NoiseKnobs noise;
  std::uint32_t sites_per_package = 1;

  // Throws std::invalid_argument on a mix that is negative or does not sum
  // to 1, or zero sites per package.
  void validate() const;
};

// Parses "a,b,c,d" proportions in kStrategies order.
std::array<double, kStrategyCount> parse_mix(std::string_view text);

struct Sample {
  std::string file_name;  // relative, e.g. "benign_0003.ir"
  std::string text;       // IR package text
  bool fraud = false;
  std::optional<Strategy> strategy;
};

// Deterministic in spec: benign samples first, then fraud samples with
// strategies allocated by largest remainder over the mix.
std::vector<Sample> generate(const GenSpec& spec);

// One package. `strategy` empty means benign.
std::string generate_package(std::uint64_t seed, std::string_view package_id,
                             std::optional<Strategy> strategy,
                             const NoiseKnobs& noise, std::uint32_t sites = 1);

inline constexpr std::string_view kLabelsFile = "labels.txt";

struct LabeledFile {
  std::string path;  // relative to the corpus directory
  bool fraud = false;
  std::optional<Strategy> strategy;
  bool operator==(const LabeledFile&) const = default;
};

// Writes every sample plus the labels manifest, one line per file:
//   <path> <benign|fraud> <strategy|->
void write_corpus(const std::vector<Sample>& samples,
                  const std::filesystem::path& dir);
std::vector<LabeledFile> read_labels(const std::filesystem::path& dir);
std::string labels_text(const std::vector<Sample>& samples);

}  // namespace clickguard::corpus
