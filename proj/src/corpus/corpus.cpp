#include "clickguard/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

namespace clickguard::corpus {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::RandomCoords: return "RandomCoords";
    case Strategy::RandomTiming: return "RandomTiming";
    case Strategy::FollowUserClick: return "FollowUserClick";
    case Strategy::ServerConfigured: return "ServerConfigured";
  }
  return "?";
}

std::optional<Strategy> parse_strategy(std::string_view s) {
  for (auto st : kStrategies)
    if (to_string(st) == s) return st;
  return std::nullopt;
}

void GenSpec::validate() const {
  double sum = 0.0;
  for (double m : mix) {
    if (!(m >= 0.0)) throw std::invalid_argument("strategy mix entries must be >= 0");
    sum += m;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw std::invalid_argument("strategy mix must sum to 1");
  if (sites_per_package == 0)
    throw std::invalid_argument("sites per package must be >= 1");
  if (noise.max_wrapper_depth > 3)
    throw std::invalid_argument("wrapper depth is limited to 3");
}

std::array<double, kStrategyCount> parse_mix(std::string_view text) {
  std::array<double, kStrategyCount> mix{};
  std::size_t i = 0, start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    if (i == kStrategyCount)
      throw std::invalid_argument("mix needs exactly 4 comma-separated values");
    const auto tok = text.substr(start, end - start);
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), mix[i]);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || tok.empty())
      throw std::invalid_argument("bad mix value '" + std::string(tok) + "'");
    ++i;
    start = end + 1;
  }
  if (i != kStrategyCount)
    throw std::invalid_argument("mix needs exactly 4 comma-separated values");
  return mix;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

using Unit = std::vector<std::string>;

struct MethodText {
  std::string name;
  std::vector<std::string> params;
  std::vector<Unit> units;
};

class Gen {
 public:
  Gen(std::uint64_t seed, const NoiseKnobs& noise) : rng_(seed), noise_(noise) {}

  std::string package(std::string_view id, std::optional<Strategy> strategy,
                      std::uint32_t sites) {
    ad_view_ = pick<std::string>({"adView", "bannerAdView", "adContainer",
                                  "interstitialAd", "nativeAdSlot", "bannerSlot"});
    const auto ad_class = pick<std::string>(
        {"com.google.android.gms.ads.AdView", "com.ads.Banner",
         "com.facebook.ads.AdView", "android.widget.FrameLayout"});
    const auto lib = pick<std::string>({"com.google.android.gms.ads", "com.facebook.ads",
                                        "com.unity3d.ads", "com.applovin"});

    std::string out = "package " + std::string(id) + "\n";
    out += chance(0.8) ? "permission android.permission.INTERNET\n"
                       : "permission ACCESS_NETWORK_STATE\n";
    if (chance(0.3)) out += "permission android.permission.VIBRATE\n";
    out += "library " + lib + "\n";
    if (chance(0.4)) out += "library com.squareup.okhttp\n";
    out += "view " + ad_view_ + " class=" + ad_class + " w=" +
           std::to_string(pick<int>({320, 300, 468, 728})) + " h=" +
           std::to_string(pick<int>({50, 60, 90, 100})) + "\n";

    const auto decoys = uniform(0, static_cast<int>(noise_.max_decoy_views));
    std::vector<std::string> decoy_names{"settingsButton", "profileImage", "menuList",
                                         "titleText", "scoreLabel", "playButton"};
    std::shuffle(decoy_names.begin(), decoy_names.end(), rng_);
    decoy_names.resize(static_cast<std::size_t>(decoys));
    for (const auto& d : decoy_names)
      out += "view " + d + " class=android.widget.Button w=" +
             std::to_string(uniform(40, 200)) + " h=" + std::to_string(uniform(20, 160)) +
             "\n";

    methods_.clear();
    methods_.push_back(on_create());
    for (std::uint32_t s = 0; s < sites; ++s) site(strategy, s);
    if (!decoy_names.empty() && chance(0.5)) methods_.push_back(decoy_forward(decoy_names[0]));

    out += "class Main\n";
    for (const auto& m : methods_) {
      out += "  method " + m.name + "(";
      for (std::size_t i = 0; i < m.params.size(); ++i) out += (i ? "," : "") + m.params[i];
      out += ")\n";
      for (const auto& u : m.units)
        for (const auto& line : u) out += "    " + line + "\n";
      out += "  endmethod\n";
    }
    out += "endclass\nendpackage\n";
    return out;
  }

 private:
  std::mt19937_64 rng_;
  NoiseKnobs noise_;
  std::string ad_view_;
  std::vector<MethodText> methods_;
  int counter_ = 0;

  std::string fresh(std::string_view prefix) {
    return std::string(prefix) + std::to_string(++counter_);
  }
  bool chance(double p) { return std::uniform_real_distribution<double>(0, 1)(rng_) < p; }
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  template <class T>
  T pick(std::initializer_list<T> xs) {
    auto it = xs.begin();
    std::advance(it, uniform(0, static_cast<int>(xs.size()) - 1));
    return *it;
  }
  // Index drawn from relative weights.
  std::size_t weighted(std::initializer_list<double> w) {
    std::discrete_distribution<std::size_t> d(w);
    return d(rng_);
  }

  MethodText on_create() {
    MethodText m{"onCreate", {}, {}};
    const auto c = fresh("n");
    m.units.push_back({c + " = call Prefs.getInt(\"launches\")",
                       fresh("n") + " = add " + c + " 1"});
    m.units.push_back({"call Ads.loadBanner(\"" + ad_view_ + "\")"});
    m.units.push_back({"return"});
    return m;
  }

  // Forwards a touch to a non-ad view; the gate keeps it out of the sites.
  MethodText decoy_forward(const std::string& view) {
    MethodText m{"onDecoyTouch", {"ev"}, {}};
    const auto v = fresh("dv"), x = fresh("dx"), y = fresh("dy"), e = fresh("de");
    m.units.push_back({v + " = call Activity.findViewById(\"" + view + "\")",
                       x + " = call ev MotionEvent.getX()",
                       y + " = call ev MotionEvent.getY()",
                       e + " = call MotionEvent.obtain(0, 0, 0, " + x + ", " + y + ", 0)",
                       "call " + v + " View.dispatchTouchEvent(" + e + ")", "return"});
    return m;
  }

  // Unused computation: must never enter a slice.
  Unit dead_unit(bool has_ev) {
    const auto d = fresh("d");
    switch (uniform(0, has_ev ? 5 : 4)) {
      case 0: return {d + " = const " + std::to_string(uniform(1, 500))};
      case 1: return {d + " = call Random.nextInt(100)", "call Log.d(\"trace\", " + d + ")"};
      case 2: {
        const auto d2 = fresh("d");
        return {d + " = call System.currentTimeMillis()", d2 + " = sub " + d + " 1000"};
      }
      case 3: {
        const auto l = fresh("skip");
        return {d + " = call Random.nextInt(10)", "if " + d + " > 5 goto " + l,
                "call Log.d(\"tick\", " + d + ")", "label " + l};
      }
      case 4: {
        const auto d2 = fresh("d");
        return {d + " = call Build.getModel()", d2 + " = copy " + d};
      }
      default:
        return {d + " = call ev MotionEvent.getX()", "call Log.d(\"x\", " + d + ")"};
    }
  }

  void add_noise(MethodText& m, bool has_ev) {
    if (noise_.max_dead_statements == 0) return;
    const auto target = uniform(0, static_cast<int>(noise_.max_dead_statements));
    int added = 0;
    while (added < target) {
      auto u = dead_unit(has_ev);
      added += static_cast<int>(u.size());
      // Never after the final return.
      const auto pos = uniform(0, static_cast<int>(m.units.size()) - 1);
      m.units.insert(m.units.begin() + pos, std::move(u));
    }
  }

  struct Coords {
    std::string x, y;
  };

  std::string view_lookup(Unit& u) {
    const auto v = fresh("v");
    u.push_back(v + " = call Activity.findViewById(\"" + ad_view_ + "\")");
    return v;
  }

  // Coordinates computed in a handler with MotionEvent parameter `ev`.
  // Benign app archetypes: coordinate handling plus the guard style that
  // goes with it.
  enum Archetype : std::size_t {
    kDirect, kRawOffset, kScaled, kCentered, kSlider, kHelper, kKeyboard, kJitter, kSampled
  };

  Coords benign_coords(Unit& u, std::size_t kind) {
    const auto gx = fresh("gx"), gy = fresh("gy");
    switch (kind) {
      case kDirect:
      case kSampled:
        u.push_back(gx + " = call ev MotionEvent.getX()");
        u.push_back(gy + " = call ev MotionEvent.getY()");
        return {gx, gy};
      case kRawOffset: {
        const auto v = view_lookup(u), l = fresh("l"), t = fresh("t");
        const auto x = fresh("x"), y = fresh("y");
        u.push_back(gx + " = call ev MotionEvent.getRawX()");
        u.push_back(gy + " = call ev MotionEvent.getRawY()");
        u.push_back(l + " = call " + v + " View.getLeft()");
        u.push_back(t + " = call " + v + " View.getTop()");
        u.push_back(x + " = sub " + gx + " " + l);
        u.push_back(y + " = sub " + gy + " " + t);
        return {x, y};
      }
      case kScaled: {
        const auto s = fresh("s"), x = fresh("x"), y = fresh("y");
        u.push_back(gx + " = call ev MotionEvent.getX()");
        u.push_back(gy + " = call ev MotionEvent.getY()");
        if (chance(0.5))
          u.push_back(s + " = const " + pick<std::string>({"2", "1.5", "3"}));
        else
          u.push_back(s + " = call Display.getDensity()");
        u.push_back(x + " = div " + gx + " " + s);
        u.push_back(y + " = div " + gy + " " + s);
        return {x, y};
      }
      case kCentered: {
        // Centered coordinates relative to the ad view.
        const auto v = view_lookup(u), w = fresh("w"), half = fresh("hw"), x = fresh("x");
        u.push_back(gx + " = call ev MotionEvent.getX()");
        u.push_back(gy + " = call ev MotionEvent.getY()");
        u.push_back(w + " = call " + v + " View.getWidth()");
        u.push_back(half + " = div " + w + " 2");
        u.push_back(x + " = sub " + gx + " " + half);
        return {x, gy};
      }
      case kSlider: {
        // Horizontal slider: y pinned to the vertical middle.
        const auto v = view_lookup(u), h = fresh("h"), y = fresh("y");
        u.push_back(gx + " = call ev MotionEvent.getX()");
        u.push_back(h + " = call " + v + " View.getHeight()");
        u.push_back(y + " = div " + h + " 2");
        return {gx, y};
      }
      case kHelper: {
        const auto x = fresh("x"), y = fresh("y");
        u.push_back(gx + " = call ev MotionEvent.getX()");
        u.push_back(gy + " = call ev MotionEvent.getY()");
        u.push_back(x + " = call Main.toLocal(" + gx + ")");
        u.push_back(y + " = call Main.toLocal(" + gy + ")");
        helper_to_local();
        return {x, y};
      }
      case kJitter: {
        // Touch-slop jitter on the real position.
        const auto j = fresh("slop"), x = fresh("x");
        u.push_back(gx + " = call ev MotionEvent.getX()");
        u.push_back(gy + " = call ev MotionEvent.getY()");
        u.push_back(j + " = call Random.nextInt(3)");
        u.push_back(x + " = add " + gx + " " + j);
        return {x, gy};
      }
      default: {
        // Keyboard-style tap: x from the event, y fixed row.
        const auto y = fresh("y");
        u.push_back(gx + " = call ev MotionEvent.getX()");
        u.push_back(y + " = const " + std::to_string(uniform(10, 40)));
        return {gx, y};
      }
    }
  }

  void helper_to_local() {
    for (const auto& m : methods_)
      if (m.name == "toLocal") return;
    MethodText m{"toLocal", {"p"}, {}};
    const auto o = fresh("o"), r = fresh("r");
    m.units.push_back({o + " = call Prefs.getInt(\"offset\")", r + " = sub p " + o,
                       "return " + r});
    methods_.push_back(std::move(m));
  }

  std::string rng_call() {
    return pick<std::string>({"Random.nextFloat()", "Random.nextDouble()", "Math.random()"});
  }

  Coords random_coords(Unit& u) {
    const auto v = view_lookup(u), w = fresh("w"), h = fresh("h");
    const auto rx = fresh("rx"), x = fresh("x"), y = fresh("y");
    u.push_back(w + " = call " + v + " View.getWidth()");
    u.push_back(h + " = call " + v + " View.getHeight()");
    u.push_back(rx + " = call " + rng_call());
    u.push_back(x + " = mul " + rx + " " + w);
    if (chance(0.5)) {
      const auto ry = fresh("ry");
      u.push_back(ry + " = call " + rng_call());
      u.push_back(y + " = mul " + ry + " " + h);
    } else {
      u.push_back(y + " = mul " + rx + " " + h);
    }
    if (chance(0.4)) {
      // Keep away from the border.
      const auto x2 = fresh("x");
      u.push_back(x2 + " = add " + x + " " + std::to_string(uniform(2, 12)));
      return {x2, y};
    }
    return {x, y};
  }

  // Fixed-looking target point used when the timing is what is randomized.
  Coords fixed_coords(Unit& u) {
    switch (weighted({45, 30, 25})) {
      case 0: {
        const auto v = view_lookup(u), w = fresh("w"), h = fresh("h");
        const auto x = fresh("x"), y = fresh("y");
        u.push_back(w + " = call " + v + " View.getWidth()");
        u.push_back(h + " = call " + v + " View.getHeight()");
        u.push_back(x + " = div " + w + " 2");
        u.push_back(y + " = div " + h + " 2");
        return {x, y};
      }
      case 1: {
        // Fixed margin from the bottom-right corner.
        const auto v = view_lookup(u), w = fresh("w"), h = fresh("h");
        const auto x = fresh("x"), y = fresh("y");
        u.push_back(w + " = call " + v + " View.getWidth()");
        u.push_back(h + " = call " + v + " View.getHeight()");
        u.push_back(x + " = sub " + w + " " + std::to_string(uniform(10, 40)));
        u.push_back(y + " = sub " + h + " " + std::to_string(uniform(5, 15)));
        return {x, y};
      }
      default: {
        const auto v = view_lookup(u), w = fresh("w"), x = fresh("x"), y = fresh("y");
        u.push_back(w + " = call " + v + " View.getWidth()");
        u.push_back(x + " = mul " + w + " 0.8");
        u.push_back(y + " = const " + std::to_string(uniform(10, 45)));
        return {x, y};
      }
    }
  }

  // Real click position plus random jitter (or fully random position).
  Coords follow_coords(Unit& u) {
    if (chance(0.5)) return random_coords(u);
    const auto gx = fresh("gx"), gy = fresh("gy"), jx = fresh("j"), jy = fresh("j");
    const auto sx = fresh("sx"), sy = fresh("sy"), x = fresh("x"), y = fresh("y");
    u.push_back(gx + " = call ev MotionEvent.getX()");
    u.push_back(gy + " = call ev MotionEvent.getY()");
    u.push_back(jx + " = call Random.nextGaussian()");
    u.push_back(jy + " = call Random.nextGaussian()");
    u.push_back(sx + " = mul " + jx + " 5");
    u.push_back(sy + " = mul " + jy + " 5");
    u.push_back(x + " = add " + gx + " " + sx);
    u.push_back(y + " = add " + gy + " " + sy);
    return {x, y};
  }

  Coords server_coords(Unit& u) {
    const auto v = view_lookup(u), w = fresh("w"), h = fresh("h");
    const auto cx = fresh("cx"), cy = fresh("cy"), x = fresh("x"), y = fresh("y");
    u.push_back(cx + " = call RemoteConfig.getFloat(\"click_x\")");
    u.push_back(cy + " = call RemoteConfig.getFloat(\"click_y\")");
    u.push_back(w + " = call " + v + " View.getWidth()");
    u.push_back(h + " = call " + v + " View.getHeight()");
    u.push_back(x + " = mul " + cx + " " + w);
    u.push_back(y + " = mul " + cy + " " + h);
    return {x, y};
  }

  struct Guard {
    Unit setup;
    std::string cond;  // "a > b"
  };

  Guard rng_guard() {
    const auto r = fresh("r");
    if (chance(0.6))
      return {{r + " = call Random.nextInt(100)"},
              r + " >= " + std::to_string(uniform(10, 40))};
    const auto d = fresh("delay"), now = fresh("now"), due = fresh("due"), last = fresh("last");
    return {{last + " = call Prefs.getLong(\"last_click\")", d + " = call Random.nextInt(5000)",
             due + " = add " + last + " " + d, now + " = call System.currentTimeMillis()"},
            now + " < " + due};
  }

  // Server-chosen click-through rate against a local draw.
  Guard server_guard() {
    const auto rate = fresh("rate"), r = fresh("r");
    const auto key = pick<std::string>({"click_rate", "ctr", "trigger_p"});
    return {{rate + " = call RemoteConfig.getFloat(\"" + key + "\")", r + " = call " + rng_call()},
            r + " > " + rate};
  }

  std::optional<Guard> benign_guard(std::size_t kind) {
    std::size_t g = 0;
    switch (kind) {
      case kDirect: g = weighted({40, 20, 40, 0, 0}); break;
      case kRawOffset: g = weighted({50, 0, 50, 0, 0}); break;
      case kScaled: g = weighted({50, 50, 0, 0, 0}); break;
      case kCentered: g = weighted({50, 0, 0, 0, 50}); break;
      case kHelper: g = weighted({50, 0, 50, 0, 0}); break;
      case kSampled: g = 3; break;
      default: g = 0;
    }
    switch (g) {
      case 0: return std::nullopt;
      case 1: {
        const auto f = fresh("enabled");
        return Guard{{f + " = call Prefs.getBoolean(\"forward_touch\")"}, f + " == 0"};
      }
      case 2: {
        const auto now = fresh("now"), last = fresh("last"), dt = fresh("dt");
        return Guard{{now + " = call System.currentTimeMillis()",
                      last + " = call Prefs.getLong(\"last_touch\")",
                      dt + " = sub " + now + " " + last},
                     dt + " < 300"};
      }
      case 3: {
        // Sampled analytics of forwarded touches.
        const auto r = fresh("r");
        return Guard{{r + " = call Random.nextInt(100)"}, r + " >= 95"};
      }
      default: {
        const auto lvl = fresh("battery");
        return Guard{{lvl + " = call Battery.getLevel()"}, lvl + " < 5"};
      }
    }
  }

  void site(std::optional<Strategy> strategy, std::uint32_t index) {
    const bool on_click = strategy == Strategy::FollowUserClick;
    const std::string suffix = index ? std::to_string(index + 1) : "";
    MethodText handler{(on_click ? "onClick" : pick<std::string>({"onTouch", "onTouchEvent",
                                                                  "handleTouch"})) +
                           suffix,
                       {"ev"},
                       {}};
    if (!on_click && strategy && chance(0.5)) handler.name = "onClick" + suffix;

    Unit coords_unit;
    Coords c;
    std::optional<Guard> guard;
    if (!strategy) {
      const auto kind = weighted({30, 16, 14, 12, 8, 14, 6, 4, 5});
      c = benign_coords(coords_unit, kind);
      guard = benign_guard(kind);
    } else {
      switch (*strategy) {
        case Strategy::RandomCoords:
          c = random_coords(coords_unit);
          if (chance(0.3)) guard = benign_guard(kDirect);
          break;
        case Strategy::RandomTiming:
          c = fixed_coords(coords_unit);
          guard = rng_guard();
          break;
        case Strategy::FollowUserClick:
          c = follow_coords(coords_unit);
          guard = rng_guard();
          break;
        case Strategy::ServerConfigured:
          c = server_coords(coords_unit);
          guard = server_guard();
          break;
      }
    }

    const auto depth = uniform(0, static_cast<int>(noise_.max_wrapper_depth));
    // Guard lives in the dispatching method or in its immediate caller.
    const bool guard_in_caller = guard && depth > 0 && chance(0.5);
    std::vector<MethodText> chain;
    chain.push_back(std::move(handler));
    for (int d = 1; d <= depth; ++d)
      chain.push_back({"fire" + suffix + "_" + std::to_string(d), {"px", "py"}, {}});

    chain[0].units.push_back(coords_unit);
    for (std::size_t i = 0; i < chain.size(); ++i) {
      auto& m = chain[i];
      const auto x = i == 0 ? c.x : std::string("px");
      const auto y = i == 0 ? c.y : std::string("py");
      const bool last = i + 1 == chain.size();
      const bool guarded_here =
          guard && ((last && !guard_in_caller) || (guard_in_caller && i + 2 == chain.size()));
      const auto skip = fresh("skip");
      if (guarded_here) {
        m.units.push_back(guard->setup);
        m.units.push_back({"if " + guard->cond + " goto " + skip});
      }
      if (last) {
        Unit u;
        const auto v = view_lookup(u), e = fresh("e");
        if (chance(0.5)) {
          const auto t = fresh("t");
          u.push_back(t + " = call SystemClock.uptimeMillis()");
          u.push_back(e + " = call MotionEvent.obtain(" + t + ", " + t + ", 0, " + x + ", " +
                      y + ", 0)");
        } else {
          u.push_back(e + " = call MotionEvent.obtain(0, 0, 0, " + x + ", " + y + ", 0)");
        }
        if (chance(0.3)) {
          const auto e2 = fresh("e");
          u.push_back(e2 + " = copy " + e);
          u.push_back("call " + v + " View.dispatchTouchEvent(" + e2 + ")");
        } else {
          u.push_back("call " + v + " View.dispatchTouchEvent(" + e + ")");
        }
        m.units.push_back(u);
      } else {
        m.units.push_back({"call Main." + chain[i + 1].name + "(" + x + ", " + y + ")"});
      }
      if (guarded_here) m.units.push_back({"label " + skip});
      m.units.push_back({"return"});
    }
    add_noise(chain[0], true);
    for (auto& m : chain) methods_.push_back(std::move(m));
  }
};

}  // namespace

std::string generate_package(std::uint64_t seed, std::string_view package_id,
                             std::optional<Strategy> strategy, const NoiseKnobs& noise,
                             std::uint32_t sites) {
  if (sites == 0) throw std::invalid_argument("sites per package must be >= 1");
  Gen gen(seed, noise);
  return gen.package(package_id, strategy, sites);
}

namespace {

// Largest-remainder apportionment of n over the mix, ties to lower index.
std::array<std::size_t, kStrategyCount> apportion(std::size_t n,
                                                  const std::array<double, kStrategyCount>& mix) {
  std::array<std::size_t, kStrategyCount> counts{};
  std::array<double, kStrategyCount> rem{};
  std::size_t used = 0;
  for (std::size_t i = 0; i < kStrategyCount; ++i) {
    const double exact = mix[i] * static_cast<double>(n);
    counts[i] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    rem[i] = exact - static_cast<double>(counts[i]);
    used += counts[i];
  }
  std::array<std::size_t, kStrategyCount> order{0, 1, 2, 3};
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; used < n; ++k, ++used) ++counts[order[k % kStrategyCount]];
  return counts;
}

std::string numbered(std::string_view prefix, std::size_t i) {
  auto s = std::to_string(i);
  if (s.size() < 4) s.insert(0, 4 - s.size(), '0');
  return std::string(prefix) + s;
}

}  // namespace

std::vector<Sample> generate(const GenSpec& spec) {
  spec.validate();
  std::vector<Sample> out;
  out.reserve(spec.n_benign + spec.n_fraud);
  std::uint64_t index = 0;
  auto next_seed = [&] { return splitmix(spec.seed ^ splitmix(++index)); };

  for (std::size_t i = 0; i < spec.n_benign; ++i) {
    const auto id = numbered("benign_", i);
    out.push_back({id + ".ir",
                   generate_package(next_seed(), "app.benign.b" + numbered("", i), std::nullopt,
                                    spec.noise, spec.sites_per_package),
                   false, std::nullopt});
  }
  // Round-robin over strategies until each quota is used up.
  auto quota = apportion(spec.n_fraud, spec.mix);
  std::size_t i = 0;
  while (i < spec.n_fraud) {
    for (std::size_t s = 0; s < kStrategyCount && i < spec.n_fraud; ++s) {
      if (quota[s] == 0) continue;
      --quota[s];
      const auto st = kStrategies[s];
      const auto id = numbered("fraud_", i);
      out.push_back({id + ".ir",
                     generate_package(next_seed(), "app.fraud.f" + numbered("", i), st,
                                      spec.noise, spec.sites_per_package),
                     true, st});
      ++i;
    }
  }
  return out;
}

std::string labels_text(const std::vector<Sample>& samples) {
  std::string out;
  for (const auto& s : samples)
    out += s.file_name + (s.fraud ? " fraud " : " benign ") +
           (s.strategy ? std::string(to_string(*s.strategy)) : "-") + "\n";
  return out;
}

void write_corpus(const std::vector<Sample>& samples, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& s : samples) {
    std::ofstream f(dir / s.file_name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (dir / s.file_name).string());
    f << s.text;
  }
  std::ofstream f(dir / kLabelsFile, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + (dir / kLabelsFile).string());
  f << labels_text(samples);
}

std::vector<LabeledFile> read_labels(const std::filesystem::path& dir) {
  const auto path = dir / kLabelsFile;
  std::ifstream in(path);
  if (!in) throw std::runtime_error("missing labels manifest " + path.string());
  std::vector<LabeledFile> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream words(line);
    std::string file, label, strategy, extra;
    if (!(words >> file)) continue;
    auto fail = [&](const std::string& why) {
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": " + why);
    };
    if (!(words >> label >> strategy) || (words >> extra))
      fail("expected '<path> <benign|fraud> <strategy|->'");
    LabeledFile lf{file, false, std::nullopt};
    if (label == "fraud") lf.fraud = true;
    else if (label != "benign") fail("unknown label '" + label + "'");
    if (strategy != "-") {
      lf.strategy = parse_strategy(strategy);
      if (!lf.strategy) fail("unknown strategy '" + strategy + "'");
    }
    out.push_back(std::move(lf));
  }
  return out;
}

}  // namespace clickguard::corpus
