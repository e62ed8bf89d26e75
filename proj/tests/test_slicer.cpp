#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "clickguard/catalog.hpp"
#include "clickguard/dataflow.hpp"
#include "clickguard/ir.hpp"
#include "clickguard/slicer.hpp"
#include "support/oracles.hpp"
#include "support/random_program.hpp"

using namespace clickguard;
using slicer::NodeKey;
using slicer::NodeKind;
using slicer::OperandRef;

namespace {

struct Analyzed {
  ir::Package pkg;
  dataflow::Icfg icfg;
  dataflow::DefUseChains chains;

  explicit Analyzed(const std::string& text)
      : pkg(ir::parse_package(text)), icfg(pkg), chains(dataflow::compute_chains(icfg)) {}
  Analyzed(const Analyzed&) = delete;
};

std::vector<OperandRef> all_operand_refs(const ir::Package& pkg) {
  std::vector<OperandRef> refs;
  for (ir::MethodId m = 0; m < pkg.method_count(); ++m) {
    const auto& body = pkg.method(m).body;
    for (std::uint32_t i = 0; i < body.size(); ++i)
      for (const auto& so : ir::operands(body[i])) refs.push_back({{m, i}, so.slot});
  }
  return refs;
}

std::string chain_program(int methods, int stmts_per_method) {
  std::string out = "package deep.app\nclass C\n";
  for (int m = 0; m < methods; ++m) {
    out += "  method m" + std::to_string(m) + "()\n    v0 = const 1\n";
    for (int i = 1; i < stmts_per_method; ++i)
      out += "    v" + std::to_string(i) + " = add v" + std::to_string(i - 1) + " " +
             std::to_string(i) + "\n";
    std::string last = "v" + std::to_string(stmts_per_method - 1);
    if (m + 1 < methods) {
      out += "    w = call C.m" + std::to_string(m + 1) + "()\n";
      out += "    r = add w " + last + "\n    return r\n";
    } else {
      out += "    return " + last + "\n";
    }
    out += "  endmethod\n";
  }
  return out + "endclass\nendpackage\n";
}

}  // namespace

TEST_CASE("slice of a small interprocedural program") {
  Analyzed a(R"(package a
class C
  method m(ev)
    w = call ev View.getWidth()
    s = call C.scale(w, 2)
    x = add s 5
    return x
  endmethod
  method scale(a, b)
    t = mul a b
    return t
  endmethod
endclass
endpackage
)");
  const std::vector<OperandRef> roots{{{0, 3}, 0}};
  const auto ddg = slicer::build_ddg(a.icfg, a.chains, roots);
  const std::set<NodeKey> expected{
      NodeKey::var_def({0, 2}),   NodeKey::var_def({0, 1}), NodeKey::constant({0, 2}, 1),
      NodeKey::var_def({1, 0}),   NodeKey::param(1, 0),     NodeKey::param(1, 1),
      NodeKey::api({0, 0}),       NodeKey::constant({0, 1}, 2)};
  CHECK(ddg.node_keys() == expected);
  REQUIRE(ddg.roots.size() == 1);
  CHECK(ddg.nodes[ddg.roots[0]].key == NodeKey::var_def({0, 2}));
  CHECK(ddg.nodes[*ddg.find(NodeKey::api({0, 0}))].label == "View.getWidth");
  CHECK(ddg.nodes[*ddg.find(NodeKey::param(1, 1))].label == "b");
  CHECK_FALSE(ddg.oversized());
  // The receiver of the platform call is not part of the slice.
  CHECK_FALSE(ddg.find(NodeKey::param(0, 0)));

  const auto text = slicer::to_text(ddg, a.pkg);
  CHECK(text.find("api C::m @0 View.getWidth") != std::string::npos);
  CHECK(text.find("root 0") != std::string::npos);
  const auto dot = slicer::to_dot(ddg, a.pkg, "axis");
  CHECK(dot.rfind("digraph axis {", 0) == 0);
  CHECK(dot.find("doublecircle") != std::string::npos);
  std::size_t arrows = 0;
  for (auto pos = dot.find("->"); pos != std::string::npos; pos = dot.find("->", pos + 1)) ++arrows;
  CHECK(arrows == ddg.edges.size());
}

TEST_CASE("slicer matches the closure oracle on 200 random programs") {
  std::mt19937_64 rng(99);
  int equal = 0;
  for (int iter = 0; iter < 200; ++iter) {
    testsupport::RandomProgramOptions o;
    o.methods = 1 + iter % 4;
    Analyzed a(testsupport::random_program(rng, o));
    const auto ud = testsupport::ud_oracle(a.pkg);
    const auto refs = all_operand_refs(a.pkg);
    REQUIRE_FALSE(refs.empty());
    std::vector<OperandRef> roots;
    const int n = std::uniform_int_distribution<int>(1, 4)(rng);
    for (int k = 0; k < n; ++k)
      roots.push_back(refs[std::uniform_int_distribution<std::size_t>(0, refs.size() - 1)(rng)]);
    const auto ddg = slicer::build_ddg(a.icfg, a.chains, roots);
    const auto oracle = testsupport::closure_oracle(a.pkg, ud, roots);
    const bool same = ddg.node_keys() == oracle && !ddg.oversized();
    CHECK_MESSAGE(same, "program " << iter);
    equal += same;
  }
  CHECK(equal == 200);
}

TEST_CASE("slicing is idempotent") {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 50; ++iter) {
    testsupport::RandomProgramOptions o;
    o.loops = iter % 2 == 0;
    Analyzed a(testsupport::random_program(rng, o));
    const auto refs = all_operand_refs(a.pkg);
    const std::vector<OperandRef> roots{refs.back(), refs.front()};
    const auto first = slicer::build_ddg(a.icfg, a.chains, roots);
    const auto keys = first.node_keys();
    const std::vector<NodeKey> seeds(keys.begin(), keys.end());
    const auto second = slicer::expand_nodes(a.icfg, a.chains, seeds);
    CHECK(second.node_keys() == keys);
  }
}

TEST_CASE("node budget") {
  Analyzed a(chain_program(1, 300));
  const std::vector<OperandRef> roots{{{0, 300}, 0}};
  slicer::SliceLimits small;
  small.max_nodes = 50;
  const auto cut = slicer::build_ddg(a.icfg, a.chains, roots, small);
  CHECK(cut.node_budget_exceeded);
  CHECK(cut.size() <= 50);
  const auto full = slicer::build_ddg(a.icfg, a.chains, roots);
  CHECK_FALSE(full.oversized());
  CHECK(full.size() == 300 + 300);  // definitions plus one literal each
}

TEST_CASE("call depth budget") {
  Analyzed a(chain_program(15, 2));
  // Root: the return of m0, which pulls in every callee's return.
  const auto& body = a.pkg.method(0).body;
  const std::vector<OperandRef> roots{{{0, static_cast<std::uint32_t>(body.size() - 1)}, 0}};
  const auto deep = slicer::build_ddg(a.icfg, a.chains, roots);
  CHECK(deep.depth_exceeded);
  CHECK(deep.find(NodeKey::var_def({10, 1})));
  CHECK_FALSE(deep.find(NodeKey::var_def({11, 1})));
  slicer::SliceLimits wide;
  wide.max_call_depth = 20;
  const auto all = slicer::build_ddg(a.icfg, a.chains, roots, wide);
  CHECK_FALSE(all.oversized());
  CHECK(all.find(NodeKey::var_def({14, 1})));
}

TEST_CASE("deadline raises a timeout") {
  Analyzed a(chain_program(1, 2000));
  const std::vector<OperandRef> roots{{{0, 2000}, 0}};
  slicer::SliceLimits limits;
  limits.deadline = std::chrono::steady_clock::now() - std::chrono::seconds(1);
  CHECK_THROWS_AS(slicer::build_ddg(a.icfg, a.chains, roots, limits), slicer::SliceTimeout);
}

TEST_CASE("click sites of the motivating example") {
  std::ifstream in(std::filesystem::path(CLICKGUARD_SOURCE_DIR) / "corpus/motivating_example.ir");
  std::stringstream text;
  text << in.rdbuf();
  Analyzed a(text.str());
  const auto sites =
      slicer::locate_click_sites(a.icfg, a.chains, ApiCatalog::defaults(), {"adView"});
  REQUIRE(sites.size() == 1);
  const auto& s = sites[0];
  CHECK(s.id == "Main::onClick#7:9");
  CHECK(s.target_view == "adView");
  CHECK(s.axis_roots == std::vector<OperandRef>{{{0, 7}, 4}, {{0, 7}, 5}});
  CHECK(s.condition_roots == std::vector<OperandRef>{{{0, 8}, 0}, {{0, 8}, 1}});
  CHECK(slicer::locate_click_sites(a.icfg, a.chains, ApiCatalog::defaults(), {"other"}).empty());
}

TEST_CASE("click site through a wrapper and a copied event") {
  Analyzed a(R"(package a
class C
  method fire(px, py)
    e = call MotionEvent.obtain(0, 0, 0, px, py, 0)
    e2 = copy e
    v = call Activity.findViewById("ad")
    call v View.dispatchTouchEvent(e2)
    return
  endmethod
  method tick()
    r = call Random.nextInt(100)
    if r < 90 goto skip
    call C.fire(10, 20)
    label skip
    return
  endmethod
endclass
endpackage
)");
  const auto sites =
      slicer::locate_click_sites(a.icfg, a.chains, ApiCatalog::defaults(), {"ad"});
  REQUIRE(sites.size() == 1);
  // The guard around the caller is part of the condition roots.
  CHECK(sites[0].condition_roots == std::vector<OperandRef>{{{1, 1}, 0}, {{1, 1}, 1}});
  const auto axis = slicer::build_ddg(a.icfg, a.chains, sites[0].axis_roots);
  CHECK(axis.find(NodeKey::constant({1, 2}, 1)));
  CHECK(axis.find(NodeKey::constant({1, 2}, 2)));
  const auto cond = slicer::build_ddg(a.icfg, a.chains, sites[0].condition_roots);
  CHECK(cond.find(NodeKey::api({1, 0})));
}
