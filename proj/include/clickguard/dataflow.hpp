#pragma once

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "clickguard/ir.hpp"

namespace clickguard::dataflow {

// Intra-method control-flow graph over statement indices. Return statements
// and statements that fall off the end of the body have no successors.
// An IfGoto has its taken target first, then the fallthrough.
struct MethodCfg {
  std::vector<std::vector<std::uint32_t>> succ;
  std::vector<std::vector<std::uint32_t>> pred;
  // For each statement, the IfGoto statements it is control dependent on
  // (post-dominance based, sorted ascending).
  std::vector<std::vector<std::uint32_t>> control_deps;

  std::size_t size() const { return succ.size(); }
};

class Icfg {
 public:
  explicit Icfg(const ir::Package& pkg);

  const ir::Package& package() const { return *pkg_; }
  const MethodCfg& cfg(ir::MethodId m) const { return cfgs_.at(m); }
  std::size_t method_count() const { return cfgs_.size(); }

  // Developer method invoked by a call statement; nullopt for platform APIs.
  std::optional<ir::MethodId> callee(ir::StmtId site) const;
  // Call statements (in any method) that invoke `m`, in statement order.
  std::span<const ir::StmtId> callers(ir::MethodId m) const;
  std::size_t call_edge_count() const { return call_edges_.size(); }

 private:
  const ir::Package* pkg_;
  std::vector<MethodCfg> cfgs_;
  std::unordered_map<std::uint64_t, ir::MethodId> call_edges_;
  std::vector<std::vector<ir::StmtId>> callers_;
};

Icfg build_icfg(const ir::Package& pkg);

// A definition: either a statement that writes a variable or a method
// parameter, which is treated as defined on entry.
struct DefSite {
  ir::MethodId method = 0;
  bool is_param = false;
  std::uint32_t index = 0;  // statement index, or parameter position
  auto operator<=>(const DefSite&) const = default;

  static DefSite stmt(ir::StmtId id) { return {id.method, false, id.index}; }
  static DefSite param(ir::MethodId m, std::uint32_t pos) { return {m, true, pos}; }
};

struct VarDefs {
  std::string var;
  std::vector<DefSite> defs;  // sorted
};

class DefUseChains {
 public:
  // UD: definitions of `var` reaching the use at `use`. Empty if `use` does
  // not read `var` or is unreachable.
  std::span<const DefSite> reaching(ir::StmtId use, std::string_view var) const;
  // All (variable, reaching definitions) pairs read by a statement.
  std::span<const VarDefs> uses_at(ir::StmtId use) const;
  // DU: statements reading the value written by `def` (sorted).
  std::span<const ir::StmtId> uses(DefSite def) const;

 private:
  friend DefUseChains compute_chains(const Icfg& icfg);

  std::vector<std::vector<std::vector<VarDefs>>> ud_;          // [m][stmt]
  std::vector<std::vector<std::vector<ir::StmtId>>> du_stmt_;  // [m][stmt]
  std::vector<std::vector<std::vector<ir::StmtId>>> du_param_; // [m][param]
};

// Flow-sensitive reaching definitions per method, iterated to a fixed point.
DefUseChains compute_chains(const Icfg& icfg);

// Text adjacency listing of CFG edges, call edges and UD chains.
std::string dump(const Icfg& icfg, const DefUseChains& chains);

}  // namespace clickguard::dataflow
