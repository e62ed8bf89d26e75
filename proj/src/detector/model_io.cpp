#include <charconv>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "clickguard/detector.hpp"

namespace clickguard::detector {

namespace {

constexpr std::string_view kMagic = "clickguard-vae-model";
constexpr int kVersion = 1;

// Shortest round-trip decimal form.
std::string num(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

double parse_num(const std::string& s) {
  double x = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ModelError("model file: malformed number '" + s + "'");
  return x;
}

std::string vec_line(std::string_view key, const features::Vec& v) {
  std::string out(key);
  for (double x : v) out += " " + num(x);
  return out + "\n";
}

}  // namespace

std::string serialize_model(const VaeModel& model) {
  std::string out;
  out += std::string(kMagic) + " " + std::to_string(kVersion) + "\n";
  out += "dims " + std::to_string(model.dims.input) + " " +
         std::to_string(model.dims.hidden) + " " + std::to_string(model.dims.latent) +
         "\n";
  out += "reference_threshold " + num(model.reference_threshold) + "\n";
  out += "threshold " + (model.threshold ? num(*model.threshold) : std::string("none")) +
         "\n";
  out += "seed " + std::to_string(model.config.seed) + "\n";
  auto config = model.config.to_json();
  config.erase("parallel");
  out += "config " + config.dump() + "\n";
  out += "config_digest " + model.config.digest() + "\n";
  out += "mask " + (model.mask.none() ? std::string("-") : features::mask_names(model.mask)) + "\n";
  out += vec_line("norm_min", model.norm.min);
  out += vec_line("norm_max", model.norm.max);
  out += vec_line("weights", model.norm.weights);
  out += "initial_loss " + num(model.initial_loss) + "\n";
  out += "final_loss " + num(model.final_loss) + "\n";
  out += "params " + std::to_string(model.params.size()) + "\n";
  for (std::size_t i = 0; i < model.params.size(); ++i) {
    out += num(model.params[i]);
    out += (i % 8 == 7 || i + 1 == model.params.size()) ? "\n" : " ";
  }
  out += "end\n";
  return out;
}

std::string model_digest(const VaeModel& model) { return fnv1a_hex(serialize_model(model)); }

VaeModel parse_model(const std::string& text) {
  std::istringstream in(text);
  std::string magic;
  int version = 0;
  if (!(in >> magic) || magic != kMagic)
    throw ModelError("not a clickguard model file");
  if (!(in >> version) || version != kVersion)
    throw ModelError("unsupported model file version " + std::to_string(version) +
                     " (expected " + std::to_string(kVersion) + ")");

  VaeModel model;
  std::string key, tok;
  bool have_params = false, have_dims = false, have_end = false;
  auto read_vec = [&](features::Vec& v) {
    for (auto& x : v) {
      if (!(in >> tok)) throw ModelError("model file: truncated " + key);
      x = parse_num(tok);
    }
  };
  std::string digest;
  while (in >> key) {
    if (key == "dims") {
      in >> model.dims.input >> model.dims.hidden >> model.dims.latent;
      if (!in || model.dims.input != features::kFeatureCount)
        throw ModelError("model file: bad dims");
      have_dims = true;
    } else if (key == "reference_threshold") {
      in >> tok;
      model.reference_threshold = parse_num(tok);
    } else if (key == "threshold") {
      in >> tok;
      if (tok != "none") model.threshold = parse_num(tok);
    } else if (key == "seed") {
      in >> tok;  // duplicated inside config
    } else if (key == "config") {
      std::string line;
      std::getline(in, line);
      try {
        model.config = TrainConfig::from_json(nlohmann::json::parse(line));
      } catch (const std::exception& e) {
        throw ModelError(std::string("model file: bad config: ") + e.what());
      }
    } else if (key == "config_digest") {
      in >> digest;
    } else if (key == "mask") {
      in >> tok;
      model.mask = tok == "-" ? features::FeatureMask{} : features::parse_mask(tok);
    } else if (key == "norm_min") {
      read_vec(model.norm.min);
    } else if (key == "norm_max") {
      read_vec(model.norm.max);
    } else if (key == "weights") {
      read_vec(model.norm.weights);
    } else if (key == "initial_loss") {
      in >> tok;
      model.initial_loss = parse_num(tok);
    } else if (key == "final_loss") {
      in >> tok;
      model.final_loss = parse_num(tok);
    } else if (key == "params") {
      std::size_t n = 0;
      in >> n;
      model.params.resize(n);
      for (auto& p : model.params) {
        if (!(in >> tok)) throw ModelError("model file: truncated params");
        p = parse_num(tok);
      }
      have_params = true;
    } else if (key == "end") {
      have_end = true;
      break;
    } else {
      throw ModelError("model file: unknown key '" + key + "'");
    }
  }
  if (!have_dims || !have_params || !have_end)
    throw ModelError("model file: missing dims, params or end marker");
  if (model.params.size() != model.layout().total)
    throw ModelError("model file: parameter count does not match dims");
  if (model.config.hidden != model.dims.hidden || model.config.latent != model.dims.latent)
    throw ModelError("model file: config does not match dims");
  if (!digest.empty() && digest != model.config.digest())
    throw ModelError("model file: config digest mismatch");
  return model;
}

void save_model(const VaeModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError("cannot write model file '" + path + "'");
  out << serialize_model(model);
  if (!out) throw ModelError("failed writing model file '" + path + "'");
}

VaeModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("cannot read model file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

}  // namespace clickguard::detector
