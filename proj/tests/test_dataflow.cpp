#include <doctest.h>

#include <algorithm>
#include <random>

#include "clickguard/dataflow.hpp"
#include "clickguard/ir.hpp"
#include "support/oracles.hpp"
#include "support/random_program.hpp"

using namespace clickguard;
using dataflow::DefSite;

namespace {

std::set<DefSite> reaching_set(const dataflow::DefUseChains& c, ir::StmtId s, const std::string& v) {
  const auto r = c.reaching(s, v);
  return {r.begin(), r.end()};
}

std::string def_var(const ir::Package& pkg, const DefSite& d) {
  if (d.is_param) return pkg.method(d.method).params[d.index];
  return *ir::defined_var(pkg.statement({d.method, d.index}));
}

void check_duality(const ir::Package& pkg, const dataflow::DefUseChains& c) {
  for (ir::MethodId m = 0; m < pkg.method_count(); ++m) {
    const auto& body = pkg.method(m).body;
    for (std::uint32_t i = 0; i < body.size(); ++i) {
      for (const auto& vd : c.uses_at({m, i}))
        for (const auto& d : vd.defs) {
          const auto u = c.uses(d);
          CHECK(std::find(u.begin(), u.end(), ir::StmtId{m, i}) != u.end());
          CHECK(def_var(pkg, d) == vd.var);
        }
      if (ir::defined_var(body[i]))
        for (const auto& u : c.uses({m, false, i})) {
          const auto r = c.reaching(u, *ir::defined_var(body[i]));
          CHECK(std::find(r.begin(), r.end(), DefSite::stmt({m, i})) != r.end());
        }
    }
    for (std::uint32_t p = 0; p < pkg.method(m).params.size(); ++p)
      for (const auto& u : c.uses(DefSite::param(m, p))) {
        const auto r = c.reaching(u, pkg.method(m).params[p]);
        CHECK(std::find(r.begin(), r.end(), DefSite::param(m, p)) != r.end());
      }
  }
}

}  // namespace

TEST_CASE("cfg edges and control dependence on a diamond") {
  const auto pkg = ir::parse_package(R"(package a
class C
  method m(p)
    x = const 1
    if p > 3 goto else
    x = const 2
    goto join
    label else
    x = const 3
    label join
    y = add x 1
    return y
  endmethod
endclass
endpackage
)");
  const auto icfg = dataflow::build_icfg(pkg);
  const auto& cfg = icfg.cfg(0);
  CHECK(cfg.succ[1] == std::vector<std::uint32_t>{4, 2});
  CHECK(cfg.succ[3] == std::vector<std::uint32_t>{6});
  CHECK(cfg.succ[8].empty());
  CHECK(cfg.pred[6] == std::vector<std::uint32_t>{3, 5});
  CHECK(cfg.control_deps[2] == std::vector<std::uint32_t>{1});
  CHECK(cfg.control_deps[5] == std::vector<std::uint32_t>{1});
  CHECK(cfg.control_deps[7].empty());
  CHECK(testsupport::oracle_succ(pkg.method(0)) == cfg.succ);

  const auto chains = dataflow::compute_chains(icfg);
  CHECK(reaching_set(chains, {0, 7}, "x") ==
        std::set<DefSite>{DefSite::stmt({0, 2}), DefSite::stmt({0, 5})});
  CHECK(reaching_set(chains, {0, 1}, "p") == std::set<DefSite>{DefSite::param(0, 0)});
  CHECK(chains.uses(DefSite::stmt({0, 0})).empty());
  const auto text = dataflow::dump(icfg, chains);
  CHECK(text.find("ud x <- 2 5") != std::string::npos);
}

TEST_CASE("loop carried definitions") {
  const auto pkg = ir::parse_package(R"(package a
class C
  method m()
    i = const 0
    label top
    i = add i 1
    if i < 10 goto top
    return i
  endmethod
endclass
endpackage
)");
  const auto icfg = dataflow::build_icfg(pkg);
  const auto chains = dataflow::compute_chains(icfg);
  CHECK(reaching_set(chains, {0, 2}, "i") ==
        std::set<DefSite>{DefSite::stmt({0, 0}), DefSite::stmt({0, 2})});
  CHECK(reaching_set(chains, {0, 4}, "i") == std::set<DefSite>{DefSite::stmt({0, 2})});
  CHECK(icfg.cfg(0).control_deps[2] == std::vector<std::uint32_t>{3});
  check_duality(pkg, chains);
}

TEST_CASE("call edges") {
  const auto pkg = ir::parse_package(R"(package a
class C
  method m()
    a = call C.h(1)
    b = call Random.nextInt(a)
    return b
  endmethod
  method h(q)
    return q
  endmethod
endclass
class D
  method k()
    call C.h(2)
    call C.h(3)
    return
  endmethod
endclass
endpackage
)");
  const auto icfg = dataflow::build_icfg(pkg);
  CHECK(icfg.callee({0, 0}) == ir::MethodId{1});
  CHECK_FALSE(icfg.callee({0, 1}));
  const auto callers = icfg.callers(1);
  CHECK(std::vector<ir::StmtId>(callers.begin(), callers.end()) ==
        std::vector<ir::StmtId>{{0, 0}, {2, 0}, {2, 1}});
  CHECK(icfg.call_edge_count() == 3);
}

TEST_CASE("unreachable statements have no reaching definitions") {
  const auto pkg = ir::parse_package(R"(package a
class C
  method m()
    x = const 1
    return x
    y = add x 1
  endmethod
endclass
endpackage
)");
  const auto chains = dataflow::compute_chains(dataflow::build_icfg(pkg));
  CHECK(chains.reaching({0, 2}, "x").empty());
  CHECK(reaching_set(chains, {0, 1}, "x") == std::set<DefSite>{DefSite::stmt({0, 0})});
}

TEST_CASE("reaching definitions match path enumeration on loop-free programs") {
  std::mt19937_64 rng(2024);
  int compared = 0;
  for (int iter = 0; iter < 100; ++iter) {
    testsupport::RandomProgramOptions o;
    o.methods = 1 + iter % 3;
    const auto pkg = ir::parse_package(testsupport::random_program(rng, o));
    const auto icfg = dataflow::build_icfg(pkg);
    const auto chains = dataflow::compute_chains(icfg);
    const auto oracle = testsupport::ud_oracle(pkg);
    bool all = true;
    for (ir::MethodId m = 0; m < pkg.method_count(); ++m) {
      all = all && testsupport::oracle_succ(pkg.method(m)) == icfg.cfg(m).succ;
      const auto& body = pkg.method(m).body;
      for (std::uint32_t i = 0; i < body.size(); ++i)
        for (const auto& so : ir::operands(body[i])) {
          if (!so.operand->is_var()) continue;
          auto it = oracle.find({m, i, so.operand->text});
          const std::set<DefSite> expected = it == oracle.end() ? std::set<DefSite>{} : it->second;
          all = all && reaching_set(chains, {m, i}, so.operand->text) == expected;
        }
    }
    CHECK_MESSAGE(all, "program " << iter);
    compared += all;
  }
  CHECK(compared == 100);
}

TEST_CASE("ud and du chains are dual on programs with loops") {
  std::mt19937_64 rng(77);
  for (int iter = 0; iter < 100; ++iter) {
    testsupport::RandomProgramOptions o;
    o.loops = true;
    o.max_branches = 10;
    const auto pkg = ir::parse_package(testsupport::random_program(rng, o));
    check_duality(pkg, dataflow::compute_chains(dataflow::build_icfg(pkg)));
  }
}
