#include "clickguard/slicer.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace clickguard::slicer {

std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Const: return "const";
    case NodeKind::Api: return "api";
    case NodeKind::VarDef: return "vardef";
    case NodeKind::Param: return "param";
  }
  return "?";
}

std::set<NodeKey> Ddg::node_keys() const {
  std::set<NodeKey> keys;
  for (const auto& n : nodes) keys.insert(n.key);
  return keys;
}

std::optional<std::uint32_t> Ddg::find(const NodeKey& key) const {
  for (std::uint32_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].key == key) return i;
  return std::nullopt;
}

namespace {

using dataflow::DefSite;

class Slicer {
 public:
  Slicer(const dataflow::Icfg& icfg, const dataflow::DefUseChains& chains,
         const SliceLimits& limits)
      : icfg_(icfg), pkg_(icfg.package()), chains_(chains), limits_(limits) {}

  Ddg run_operands(std::span<const OperandRef> roots) {
    std::vector<NodeKey> seeds;
    for (const auto& r : roots) operand_deps(r, seeds);
    return run(seeds);
  }

  Ddg run(std::span<const NodeKey> seeds) {
    for (const auto& k : seeds) {
      auto idx = intern(k);
      if (!idx) break;
      if (std::find(ddg_.roots.begin(), ddg_.roots.end(), *idx) == ddg_.roots.end())
        ddg_.roots.push_back(*idx);
      push(*idx, 0, true);
    }
    std::size_t steps = 0;
    std::vector<NodeKey> deps;
    while (!queue_.empty() && !ddg_.node_budget_exceeded) {
      const auto [idx, depth] = queue_.front();
      queue_.pop_front();
      if (expanded_[idx]) continue;
      expanded_[idx] = 1;
      if (limits_.deadline && (++steps & 0xff) == 0 &&
          std::chrono::steady_clock::now() > *limits_.deadline)
        throw SliceTimeout();
      expand(ddg_.nodes[idx].key, depth, idx);
    }
    std::sort(ddg_.edges.begin(), ddg_.edges.end());
    ddg_.edges.erase(std::unique(ddg_.edges.begin(), ddg_.edges.end()),
                     ddg_.edges.end());
    return std::move(ddg_);
  }

 private:
  // Dependencies of an operand use: a Const node for literals, otherwise
  // the node of every reaching definition.
  void operand_deps(const OperandRef& ref, std::vector<NodeKey>& out) const {
    const auto* op = ir::operand_at(pkg_.statement(ref.stmt), ref.slot);
    if (!op) return;
    if (op->is_lit()) {
      out.push_back(NodeKey::constant(ref.stmt, ref.slot));
      return;
    }
    for (const auto& def : chains_.reaching(ref.stmt, op->text))
      out.push_back(def_node(def));
  }

  NodeKey def_node(const DefSite& def) const {
    if (def.is_param) return NodeKey::param(def.method, def.index);
    const ir::StmtId s{def.method, def.index};
    if (std::holds_alternative<ir::Call>(pkg_.statement(s)) && !icfg_.callee(s))
      return NodeKey::api(s);
    return NodeKey::var_def(s);
  }

  void expand(const NodeKey& key, std::uint32_t depth, std::uint32_t from) {
    std::vector<NodeKey> same_level;
    std::vector<NodeKey> next_level;
    switch (key.kind) {
      case NodeKind::Const:
      case NodeKind::Api:
        return;
      case NodeKind::Param:
        for (const auto& site : icfg_.callers(key.method)) {
          const auto& call = std::get<ir::Call>(pkg_.statement(site));
          if (key.index < call.args.size())
            operand_deps({site, ir::call_arg_slot(key.index)}, next_level);
        }
        break;
      case NodeKind::VarDef: {
        const ir::StmtId s{key.method, key.index};
        const auto& stmt = pkg_.statement(s);
        if (std::holds_alternative<ir::ConstAssign>(stmt)) {
          same_level.push_back(NodeKey::constant(s, 0));
        } else if (std::holds_alternative<ir::Call>(stmt)) {
          const auto callee = *icfg_.callee(s);
          const auto& body = pkg_.method(callee).body;
          for (std::uint32_t r = 0; r < body.size(); ++r) {
            const auto* ret = std::get_if<ir::Return>(&body[r]);
            if (ret && ret->value) operand_deps({{callee, r}, 0}, next_level);
          }
        } else {
          for (const auto& so : ir::operands(stmt))
            operand_deps({s, so.slot}, same_level);
        }
        break;
      }
    }
    for (const auto& k : same_level) link(from, k, depth, true);
    if (next_level.empty()) return;
    const bool too_deep = depth + 1 > limits_.max_call_depth;
    for (const auto& k : next_level) {
      // Past the depth budget only nodes already reached elsewhere are kept.
      if (too_deep && !index_.count(k)) {
        ddg_.depth_exceeded = true;
        continue;
      }
      link(from, k, depth + 1, false);
    }
  }

  void link(std::uint32_t from, const NodeKey& key, std::uint32_t depth,
            bool same_level) {
    auto idx = intern(key);
    if (!idx) return;
    ddg_.edges.emplace_back(from, *idx);
    push(*idx, depth, same_level);
  }

  // 0-1 BFS: crossing a call boundary costs one level, so every node is
  // expanded first at its minimal call depth.
  void push(std::uint32_t idx, std::uint32_t depth, bool front) {
    if (expanded_[idx]) return;
    if (front)
      queue_.emplace_front(idx, depth);
    else
      queue_.emplace_back(idx, depth);
  }

  std::optional<std::uint32_t> intern(const NodeKey& key) {
    if (auto it = index_.find(key); it != index_.end()) return it->second;
    if (ddg_.nodes.size() >= limits_.max_nodes) {
      ddg_.node_budget_exceeded = true;
      return std::nullopt;
    }
    const auto idx = static_cast<std::uint32_t>(ddg_.nodes.size());
    ddg_.nodes.push_back({key, label_of(key)});
    index_.emplace(key, idx);
    expanded_.push_back(0);
    return idx;
  }

  std::string label_of(const NodeKey& key) const {
    const auto& m = pkg_.method(key.method);
    switch (key.kind) {
      case NodeKind::Const:
        return ir::operand_at(m.body[key.index], key.slot)->text;
      case NodeKind::Api:
        return std::get<ir::Call>(m.body[key.index]).api;
      case NodeKind::VarDef:
        return *ir::defined_var(m.body[key.index]);
      case NodeKind::Param:
        return m.params[key.index];
    }
    return {};
  }

  const dataflow::Icfg& icfg_;
  const ir::Package& pkg_;
  const dataflow::DefUseChains& chains_;
  SliceLimits limits_;
  Ddg ddg_;
  std::map<NodeKey, std::uint32_t> index_;
  std::vector<char> expanded_;
  std::deque<std::pair<std::uint32_t, std::uint32_t>> queue_;
};

constexpr std::uint32_t kViewResolveDepth = 3;

// Views a receiver operand can refer to: follows copies intra-method and
// parameters to their callers, ending at the view-lookup API with a string
// literal argument.
void resolve_views(const dataflow::Icfg& icfg,
                   const dataflow::DefUseChains& chains,
                   const ApiCatalog& catalog, const OperandRef& ref,
                   std::uint32_t depth, std::set<OperandRef>& seen,
                   std::set<std::string>& out) {
  if (!seen.insert(ref).second) return;
  const auto& pkg = icfg.package();
  const auto* op = ir::operand_at(pkg.statement(ref.stmt), ref.slot);
  if (!op || !op->is_var()) return;
  for (const auto& def : chains.reaching(ref.stmt, op->text)) {
    if (def.is_param) {
      if (depth >= kViewResolveDepth) continue;
      for (const auto& site : icfg.callers(def.method)) {
        const auto& call = std::get<ir::Call>(pkg.statement(site));
        if (def.index < call.args.size())
          resolve_views(icfg, chains, catalog,
                        {site, ir::call_arg_slot(def.index)}, depth + 1, seen, out);
      }
      continue;
    }
    const ir::StmtId s{def.method, def.index};
    const auto& stmt = pkg.statement(s);
    if (std::holds_alternative<ir::Copy>(stmt)) {
      resolve_views(icfg, chains, catalog, {s, 0}, depth, seen, out);
    } else if (const auto* call = std::get_if<ir::Call>(&stmt)) {
      if (call->api == catalog.view_lookup() && !call->args.empty()) {
        const auto& lit = call->args[0].text;
        if (call->args[0].is_lit() && lit.size() >= 2 && lit.front() == '"')
          out.insert(lit.substr(1, lit.size() - 2));
      }
    }
  }
}

// Obtain calls whose result reaches an operand, following copies.
void trace_obtains(const ir::Package& pkg, const dataflow::DefUseChains& chains,
                   const ApiCatalog& catalog, const OperandRef& ref,
                   std::set<OperandRef>& seen, std::set<ir::StmtId>& out) {
  if (!seen.insert(ref).second) return;
  const auto* op = ir::operand_at(pkg.statement(ref.stmt), ref.slot);
  if (!op || !op->is_var()) return;
  for (const auto& def : chains.reaching(ref.stmt, op->text)) {
    if (def.is_param) continue;
    const ir::StmtId s{def.method, def.index};
    const auto& stmt = pkg.statement(s);
    if (std::holds_alternative<ir::Copy>(stmt))
      trace_obtains(pkg, chains, catalog, {s, 0}, seen, out);
    else if (const auto* call = std::get_if<ir::Call>(&stmt);
             call && catalog.is_obtain(call->api))
      out.insert(s);
  }
}

void add_guards(const dataflow::Icfg& icfg, ir::StmtId at,
                std::vector<OperandRef>& out) {
  for (auto b : icfg.cfg(at.method).control_deps[at.index]) {
    out.push_back({{at.method, b}, 0});
    out.push_back({{at.method, b}, 1});
  }
}

}  // namespace

std::vector<ClickSite> locate_click_sites(const dataflow::Icfg& icfg,
                                          const dataflow::DefUseChains& chains,
                                          const ApiCatalog& catalog,
                                          const std::set<std::string>& ad_views) {
  const auto& pkg = icfg.package();
  std::vector<ClickSite> sites;
  for (ir::MethodId m = 0; m < pkg.method_count(); ++m) {
    const auto& body = pkg.method(m).body;
    for (std::uint32_t i = 0; i < body.size(); ++i) {
      const auto* call = std::get_if<ir::Call>(&body[i]);
      if (!call || !catalog.is_dispatch(call->api) || !call->receiver ||
          call->args.empty())
        continue;
      const ir::StmtId dispatch{m, i};

      std::set<std::string> views;
      std::set<OperandRef> seen;
      resolve_views(icfg, chains, catalog, {dispatch, 0}, 0, seen, views);
      const auto target = std::find_if(views.begin(), views.end(),
                                       [&](const auto& v) { return ad_views.count(v); });
      if (target == views.end()) continue;

      std::set<ir::StmtId> obtains;
      seen.clear();
      trace_obtains(pkg, chains, catalog, {dispatch, ir::call_arg_slot(0)}, seen,
                    obtains);

      std::vector<OperandRef> conditions;
      add_guards(icfg, dispatch, conditions);
      for (const auto& site : icfg.callers(m)) add_guards(icfg, site, conditions);
      std::sort(conditions.begin(), conditions.end());
      conditions.erase(std::unique(conditions.begin(), conditions.end()),
                       conditions.end());

      for (const auto& o : obtains) {
        const auto& ctor = std::get<ir::Call>(pkg.statement(o));
        ClickSite site;
        site.id = pkg.location(m) + "#" + std::to_string(o.index) + ":" +
                  std::to_string(i);
        if (o.method != m)
          site.id = pkg.location(o.method) + "#" + std::to_string(o.index) +
                    "->" + site.id;
        site.obtain = o;
        site.dispatch = dispatch;
        site.target_view = *target;
        for (auto pos : {kObtainArgX, kObtainArgY})
          if (pos < ctor.args.size())
            site.axis_roots.push_back({o, ir::call_arg_slot(pos)});
        site.condition_roots = conditions;
        sites.push_back(std::move(site));
      }
    }
  }
  return sites;
}

Ddg build_ddg(const dataflow::Icfg& icfg, const dataflow::DefUseChains& chains,
              std::span<const OperandRef> roots, const SliceLimits& limits) {
  return Slicer(icfg, chains, limits).run_operands(roots);
}

Ddg expand_nodes(const dataflow::Icfg& icfg,
                 const dataflow::DefUseChains& chains,
                 std::span<const NodeKey> seeds, const SliceLimits& limits) {
  return Slicer(icfg, chains, limits).run(seeds);
}

namespace {

std::string describe(const DdgNode& n, const ir::Package& pkg) {
  std::string out(to_string(n.key.kind));
  out += " " + pkg.location(n.key.method);
  if (n.key.kind == NodeKind::Param)
    out += " param" + std::to_string(n.key.index);
  else
    out += " @" + std::to_string(n.key.index);
  if (n.key.kind == NodeKind::Const) out += "." + std::to_string(n.key.slot);
  out += " " + n.label;
  return out;
}

std::string escape_dot(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_text(const Ddg& ddg, const ir::Package& pkg) {
  std::string out;
  for (std::size_t i = 0; i < ddg.nodes.size(); ++i)
    out += "node " + std::to_string(i) + " " + describe(ddg.nodes[i], pkg) + "\n";
  for (const auto& [a, b] : ddg.edges)
    out += "edge " + std::to_string(a) + " " + std::to_string(b) + "\n";
  for (auto r : ddg.roots) out += "root " + std::to_string(r) + "\n";
  if (ddg.node_budget_exceeded) out += "flag node_budget_exceeded\n";
  if (ddg.depth_exceeded) out += "flag depth_exceeded\n";
  return out;
}

std::string to_dot(const Ddg& ddg, const ir::Package& pkg, std::string_view name) {
  std::string out = "digraph " + std::string(name) + " {\n";
  for (std::size_t i = 0; i < ddg.nodes.size(); ++i) {
    const bool root =
        std::find(ddg.roots.begin(), ddg.roots.end(), i) != ddg.roots.end();
    out += "  n" + std::to_string(i) + " [label=\"" +
           escape_dot(describe(ddg.nodes[i], pkg)) + "\"" +
           (root ? ", shape=doublecircle" : "") + "];\n";
  }
  for (const auto& [a, b] : ddg.edges)
    out += "  n" + std::to_string(a) + " -> n" + std::to_string(b) + ";\n";
  out += "}\n";
  return out;
}

}  // namespace clickguard::slicer
