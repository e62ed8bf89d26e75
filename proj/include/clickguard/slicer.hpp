#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "clickguard/catalog.hpp"
#include "clickguard/dataflow.hpp"
#include "clickguard/ir.hpp"

namespace clickguard::slicer {

// A use of an operand: the statement reading it and its operand slot.
struct OperandRef {
  ir::StmtId stmt;
  std::uint32_t slot = 0;
  auto operator<=>(const OperandRef&) const = default;
};

// A synthetic click: the constructor call, the dispatch it feeds, and the
// operands that form its properties (axis) and trigger conditions.
struct ClickSite {
  std::string id;
  ir::StmtId obtain;
  ir::StmtId dispatch;
  std::string target_view;
  std::vector<OperandRef> axis_roots;
  std::vector<OperandRef> condition_roots;
};

enum class NodeKind : std::uint8_t { Const, Api, VarDef, Param };

std::string_view to_string(NodeKind k);

// Node identity. Const: literal operand (method, statement, slot);
// Api / VarDef: defining statement (method, statement); Param: (method,
// parameter position).
struct NodeKey {
  NodeKind kind = NodeKind::VarDef;
  ir::MethodId method = 0;
  std::uint32_t index = 0;
  std::uint32_t slot = 0;
  auto operator<=>(const NodeKey&) const = default;

  static NodeKey constant(ir::StmtId s, std::uint32_t slot) {
    return {NodeKind::Const, s.method, s.index, slot};
  }
  static NodeKey api(ir::StmtId s) { return {NodeKind::Api, s.method, s.index, 0}; }
  static NodeKey var_def(ir::StmtId s) {
    return {NodeKind::VarDef, s.method, s.index, 0};
  }
  static NodeKey param(ir::MethodId m, std::uint32_t pos) {
    return {NodeKind::Param, m, pos, 0};
  }
};

struct DdgNode {
  NodeKey key;
  std::string label;  // literal text, API name, variable or parameter name
};

struct SliceLimits {
  std::uint32_t max_call_depth = 10;
  std::size_t max_nodes = 10'000;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

class SliceTimeout : public std::runtime_error {
 public:
  SliceTimeout() : std::runtime_error("slice deadline exceeded") {}
};

// Data-dependency graph. Edges run from a node to each node its value
// depends on (backward-slice direction).
struct Ddg {
  std::vector<DdgNode> nodes;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::vector<std::uint32_t> roots;
  bool node_budget_exceeded = false;
  bool depth_exceeded = false;

  bool oversized() const { return node_budget_exceeded || depth_exceeded; }
  std::size_t size() const { return nodes.size(); }
  std::set<NodeKey> node_keys() const;
  std::optional<std::uint32_t> find(const NodeKey& key) const;
};

std::vector<ClickSite> locate_click_sites(const dataflow::Icfg& icfg,
                                          const dataflow::DefUseChains& chains,
                                          const ApiCatalog& catalog,
                                          const std::set<std::string>& ad_views);

// Backward slice from root operands to a fixed point of the four expansion
// rules: literals become Const nodes; platform calls become Api leaves;
// developer calls inline the callee's returned values; variables expand to
// their reaching definitions; parameters expand to every caller's argument.
Ddg build_ddg(const dataflow::Icfg& icfg, const dataflow::DefUseChains& chains,
              std::span<const OperandRef> roots, const SliceLimits& limits = {});

// Same fixed point, seeded directly with nodes instead of operands.
Ddg expand_nodes(const dataflow::Icfg& icfg,
                 const dataflow::DefUseChains& chains,
                 std::span<const NodeKey> seeds, const SliceLimits& limits = {});

std::string to_text(const Ddg& ddg, const ir::Package& pkg);
std::string to_dot(const Ddg& ddg, const ir::Package& pkg,
                   std::string_view name = "ddg");

}  // namespace clickguard::slicer
