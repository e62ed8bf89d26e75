#include "clickguard/dataflow.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include <boost/dynamic_bitset.hpp>

namespace clickguard::dataflow {

namespace {

using Bits = boost::dynamic_bitset<std::uint64_t>;

std::uint64_t key(ir::StmtId id) {
  return (static_cast<std::uint64_t>(id.method) << 32) | id.index;
}

MethodCfg build_method_cfg(const ir::MethodDecl& m) {
  const auto n = static_cast<std::uint32_t>(m.body.size());
  std::map<std::string, std::uint32_t, std::less<>> labels;
  for (std::uint32_t i = 0; i < n; ++i)
    if (const auto* l = std::get_if<ir::Label>(&m.body[i])) labels[l->name] = i;

  MethodCfg cfg;
  cfg.succ.resize(n);
  cfg.pred.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto& s = m.body[i];
    auto& out = cfg.succ[i];
    if (std::holds_alternative<ir::Return>(s)) continue;
    if (const auto* g = std::get_if<ir::Goto>(&s)) {
      out.push_back(labels.at(g->label));
    } else if (const auto* b = std::get_if<ir::IfGoto>(&s)) {
      out.push_back(labels.at(b->label));
      if (i + 1 < n && out.front() != i + 1) out.push_back(i + 1);
    } else if (i + 1 < n) {
      out.push_back(i + 1);
    }
    for (auto t : out) cfg.pred[t].push_back(i);
  }
  return cfg;
}

// Post-dominator sets with a virtual exit at index n. Nodes with no path to
// the exit keep the full set, the usual maximal fixed point.
std::vector<Bits> post_dominators(const MethodCfg& cfg) {
  const auto n = cfg.size();
  std::vector<Bits> pdom(n + 1, Bits(n + 1));
  for (std::size_t i = 0; i < n; ++i) pdom[i].set();
  pdom[n].set(n);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = n; k-- > 0;) {
      Bits next(n + 1);
      next.set();
      if (cfg.succ[k].empty()) {
        next = pdom[n];
      } else {
        for (auto s : cfg.succ[k]) next &= pdom[s];
      }
      next.set(k);
      if (next != pdom[k]) {
        pdom[k] = std::move(next);
        changed = true;
      }
    }
  }
  return pdom;
}

void fill_control_deps(const ir::MethodDecl& m, MethodCfg& cfg) {
  const auto n = cfg.size();
  cfg.control_deps.assign(n, {});
  if (n == 0) return;
  const auto pdom = post_dominators(cfg);
  for (std::uint32_t b = 0; b < n; ++b) {
    if (!std::holds_alternative<ir::IfGoto>(m.body[b])) continue;
    for (auto succ : cfg.succ[b]) {
      for (std::uint32_t s = 0; s < n; ++s) {
        // s post-dominates the successor but not (strictly) the branch.
        if (!pdom[succ].test(s)) continue;
        if (s != b && pdom[b].test(s)) continue;
        auto& deps = cfg.control_deps[s];
        if (std::find(deps.begin(), deps.end(), b) == deps.end())
          deps.push_back(b);
      }
    }
  }
  for (auto& deps : cfg.control_deps) std::sort(deps.begin(), deps.end());
}

}  // namespace

Icfg::Icfg(const ir::Package& pkg) : pkg_(&pkg) {
  std::unordered_map<std::string, ir::MethodId> by_name;
  for (ir::MethodId m = 0; m < pkg.method_count(); ++m)
    by_name.emplace(pkg.owner(m).name + "." + pkg.method(m).name, m);

  cfgs_.reserve(pkg.method_count());
  callers_.resize(pkg.method_count());
  for (ir::MethodId m = 0; m < pkg.method_count(); ++m) {
    const auto& decl = pkg.method(m);
    cfgs_.push_back(build_method_cfg(decl));
    fill_control_deps(decl, cfgs_.back());
    for (std::uint32_t i = 0; i < decl.body.size(); ++i) {
      const auto* call = std::get_if<ir::Call>(&decl.body[i]);
      if (!call) continue;
      if (auto it = by_name.find(call->api); it != by_name.end()) {
        call_edges_.emplace(key({m, i}), it->second);
        callers_[it->second].push_back({m, i});
      }
    }
  }
}

std::optional<ir::MethodId> Icfg::callee(ir::StmtId site) const {
  if (auto it = call_edges_.find(key(site)); it != call_edges_.end())
    return it->second;
  return std::nullopt;
}

std::span<const ir::StmtId> Icfg::callers(ir::MethodId m) const {
  return callers_.at(m);
}

Icfg build_icfg(const ir::Package& pkg) { return Icfg(pkg); }

std::span<const DefSite> DefUseChains::reaching(ir::StmtId use,
                                                std::string_view var) const {
  for (const auto& vd : ud_.at(use.method).at(use.index))
    if (vd.var == var) return vd.defs;
  return {};
}

std::span<const VarDefs> DefUseChains::uses_at(ir::StmtId use) const {
  return ud_.at(use.method).at(use.index);
}

std::span<const ir::StmtId> DefUseChains::uses(DefSite def) const {
  if (def.is_param) return du_param_.at(def.method).at(def.index);
  return du_stmt_.at(def.method).at(def.index);
}

DefUseChains compute_chains(const Icfg& icfg) {
  const auto& pkg = icfg.package();
  DefUseChains out;
  out.ud_.resize(pkg.method_count());
  out.du_stmt_.resize(pkg.method_count());
  out.du_param_.resize(pkg.method_count());

  for (ir::MethodId m = 0; m < pkg.method_count(); ++m) {
    const auto& decl = pkg.method(m);
    const auto& cfg = icfg.cfg(m);
    const auto n = decl.body.size();
    const auto np = decl.params.size();

    // Definition numbering: parameters first, then defining statements.
    std::vector<DefSite> defs;
    std::map<std::string, std::vector<std::size_t>, std::less<>> defs_of;
    std::vector<std::optional<std::size_t>> def_of_stmt(n);
    for (std::uint32_t p = 0; p < np; ++p) {
      defs_of[decl.params[p]].push_back(defs.size());
      defs.push_back(DefSite::param(m, p));
    }
    for (std::uint32_t i = 0; i < n; ++i) {
      if (const auto* v = ir::defined_var(decl.body[i])) {
        def_of_stmt[i] = defs.size();
        defs_of[*v].push_back(defs.size());
        defs.push_back(DefSite::stmt({m, i}));
      }
    }
    const auto nd = defs.size();
    std::map<std::string, Bits, std::less<>> var_mask;
    for (const auto& [var, ids] : defs_of) {
      Bits mask(nd);
      for (auto d : ids) mask.set(d);
      var_mask.emplace(var, std::move(mask));
    }

    std::vector<Bits> in(n, Bits(nd)), outb(n, Bits(nd));
    Bits entry(nd);
    for (std::size_t p = 0; p < np; ++p) entry.set(p);

    auto transfer = [&](std::size_t i, const Bits& x) {
      Bits y = x;
      if (def_of_stmt[i]) {
        y -= var_mask.at(*ir::defined_var(decl.body[i]));
        y.set(*def_of_stmt[i]);
      }
      return y;
    };

    // Statements unreachable from the entry neither receive nor pass on
    // definitions.
    std::vector<char> reachable(n, 0);
    std::vector<std::uint32_t> stack;
    if (n > 0) {
      reachable[0] = 1;
      stack.push_back(0);
    }
    while (!stack.empty()) {
      const auto i = stack.back();
      stack.pop_back();
      for (auto s : cfg.succ[i])
        if (!reachable[s]) {
          reachable[s] = 1;
          stack.push_back(s);
        }
    }

    std::deque<std::uint32_t> work;
    std::vector<char> queued(n, 0);
    for (std::uint32_t i = 0; i < n; ++i) {
      if (!reachable[i]) continue;
      work.push_back(i);
      queued[i] = 1;
    }
    while (!work.empty()) {
      const auto i = work.front();
      work.pop_front();
      queued[i] = 0;
      Bits x(nd);
      if (i == 0) x |= entry;
      for (auto p : cfg.pred[i])
        if (reachable[p]) x |= outb[p];
      in[i] = x;
      auto y = transfer(i, x);
      if (y != outb[i]) {
        outb[i] = std::move(y);
        for (auto s : cfg.succ[i])
          if (!queued[s] && reachable[s]) {
            queued[s] = 1;
            work.push_back(s);
          }
      }
    }

    auto& ud = out.ud_[m];
    ud.resize(n);
    out.du_stmt_[m].resize(n);
    out.du_param_[m].resize(np);
    for (std::uint32_t i = 0; i < n; ++i) {
      for (const auto& so : ir::operands(decl.body[i])) {
        if (!so.operand->is_var()) continue;
        const auto& var = so.operand->text;
        if (std::any_of(ud[i].begin(), ud[i].end(),
                        [&](const VarDefs& vd) { return vd.var == var; }))
          continue;
        VarDefs vd{var, {}};
        if (auto it = var_mask.find(var); it != var_mask.end()) {
          Bits hit = in[i] & it->second;
          for (auto d = hit.find_first(); d != Bits::npos; d = hit.find_next(d))
            vd.defs.push_back(defs[d]);
        }
        std::sort(vd.defs.begin(), vd.defs.end());
        for (const auto& d : vd.defs) {
          auto& bucket = d.is_param ? out.du_param_[m][d.index]
                                    : out.du_stmt_[m][d.index];
          bucket.push_back({m, i});
        }
        ud[i].push_back(std::move(vd));
      }
    }
  }
  return out;
}

std::string dump(const Icfg& icfg, const DefUseChains& chains) {
  const auto& pkg = icfg.package();
  std::string out;
  for (ir::MethodId m = 0; m < pkg.method_count(); ++m) {
    const auto& decl = pkg.method(m);
    out += "method " + pkg.location(m) + "\n";
    for (std::uint32_t i = 0; i < decl.body.size(); ++i) {
      out += "  " + std::to_string(i) + ": " + ir::render(decl.body[i]) + "\n";
      out += "    succ";
      for (auto s : icfg.cfg(m).succ[i]) out += " " + std::to_string(s);
      out += "\n";
      if (auto callee = icfg.callee({m, i}))
        out += "    calls " + pkg.location(*callee) + "\n";
      for (const auto& vd : chains.uses_at({m, i})) {
        out += "    ud " + vd.var + " <-";
        for (const auto& d : vd.defs)
          out += d.is_param ? " param" + std::to_string(d.index)
                            : " " + std::to_string(d.index);
        out += "\n";
      }
    }
  }
  return out;
}

}  // namespace clickguard::dataflow
