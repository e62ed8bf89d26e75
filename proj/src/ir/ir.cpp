#include "clickguard/ir.hpp"

#include <algorithm>
#include <unordered_map>

namespace clickguard::ir {

std::string_view to_string(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "add";
    case BinaryOp::Sub: return "sub";
    case BinaryOp::Mul: return "mul";
    case BinaryOp::Div: return "div";
    case BinaryOp::Mod: return "mod";
  }
  return "?";
}

std::string_view to_string(Comparator cmp) {
  switch (cmp) {
    case Comparator::Eq: return "==";
    case Comparator::Ne: return "!=";
    case Comparator::Lt: return "<";
    case Comparator::Le: return "<=";
    case Comparator::Gt: return ">";
    case Comparator::Ge: return ">=";
  }
  return "?";
}

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

}  // namespace

std::vector<SlotOperand> operands(const Statement& stmt) {
  std::vector<SlotOperand> out;
  std::visit(
      Overloaded{
          [&](const ConstAssign& s) { out.push_back({0, &s.value}); },
          [&](const Copy& s) { out.push_back({0, &s.source}); },
          [&](const BinOp& s) {
            out.push_back({0, &s.lhs});
            out.push_back({1, &s.rhs});
          },
          [&](const Call& s) {
            if (s.receiver) out.push_back({0, &*s.receiver});
            for (std::size_t i = 0; i < s.args.size(); ++i)
              out.push_back({call_arg_slot(i), &s.args[i]});
          },
          [&](const IfGoto& s) {
            out.push_back({0, &s.lhs});
            out.push_back({1, &s.rhs});
          },
          [&](const Goto&) {},
          [&](const Label&) {},
          [&](const Return& s) {
            if (s.value) out.push_back({0, &*s.value});
          },
      },
      stmt);
  return out;
}

const Operand* operand_at(const Statement& stmt, std::uint32_t slot) {
  for (const auto& so : operands(stmt))
    if (so.slot == slot) return so.operand;
  return nullptr;
}

const std::string* defined_var(const Statement& stmt) {
  return std::visit(
      Overloaded{
          [](const ConstAssign& s) -> const std::string* { return &s.target; },
          [](const Copy& s) -> const std::string* { return &s.target; },
          [](const BinOp& s) -> const std::string* { return &s.target; },
          [](const Call& s) -> const std::string* {
            return s.target ? &*s.target : nullptr;
          },
          [](const auto&) -> const std::string* { return nullptr; },
      },
      stmt);
}

std::optional<std::uint32_t> MethodDecl::label_index(
    std::string_view label) const {
  for (std::uint32_t i = 0; i < body.size(); ++i)
    if (const auto* l = std::get_if<Label>(&body[i]); l && l->name == label)
      return i;
  return std::nullopt;
}

const MethodDecl& Package::method(MethodId id) const {
  const auto& ref = method_refs_.at(id);
  return classes[ref.class_index].methods[ref.method_index];
}

const ClassDecl& Package::owner(MethodId id) const {
  return classes[method_refs_.at(id).class_index];
}

std::string Package::location(MethodId id) const {
  return owner(id).name + "::" + method(id).name;
}

std::optional<MethodId> Package::find_method(std::string_view dotted) const {
  const auto dot = dotted.rfind('.');
  if (dot == std::string_view::npos) return std::nullopt;
  const auto cls = dotted.substr(0, dot);
  const auto name = dotted.substr(dot + 1);
  for (MethodId id = 0; id < method_refs_.size(); ++id) {
    const auto& ref = method_refs_[id];
    if (classes[ref.class_index].name == cls &&
        classes[ref.class_index].methods[ref.method_index].name == name)
      return id;
  }
  return std::nullopt;
}

const ViewDecl* Package::find_view(std::string_view name) const {
  for (const auto& v : views)
    if (v.name == name) return &v;
  return nullptr;
}

void Package::index_methods() {
  method_refs_.clear();
  for (std::uint32_t c = 0; c < classes.size(); ++c)
    for (std::uint32_t m = 0; m < classes[c].methods.size(); ++m)
      method_refs_.push_back({c, m});
}

ParseError::ParseError(std::size_t line, const std::string& reason)
    : std::runtime_error("line " + std::to_string(line) + ": " + reason),
      line_(line) {}

namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string join_operands(const std::vector<Operand>& ops) {
  std::string out;
  for (std::size_t i = 0; i < ops.size(); ++i) {
    if (i) out += ',';
    out += ops[i].text;
  }
  return out;
}

}  // namespace

std::string render(const Statement& stmt) {
  return std::visit(
      Overloaded{
          [](const ConstAssign& s) {
            return s.target + " = const " + s.value.text;
          },
          [](const Copy& s) { return s.target + " = copy " + s.source.text; },
          [](const BinOp& s) {
            return s.target + " = " + std::string(to_string(s.op)) + " " +
                   s.lhs.text + " " + s.rhs.text;
          },
          [](const Call& s) {
            std::string out;
            if (s.target) out += *s.target + " = ";
            out += "call ";
            if (s.receiver) out += s.receiver->text + " ";
            out += s.api + "(" + join_operands(s.args) + ")";
            return out;
          },
          [](const IfGoto& s) {
            return "if " + s.lhs.text + " " + std::string(to_string(s.cmp)) +
                   " " + s.rhs.text + " goto " + s.label;
          },
          [](const Goto& s) { return "goto " + s.label; },
          [](const Label& s) { return "label " + s.name; },
          [](const Return& s) {
            return s.value ? "return " + s.value->text : std::string("return");
          },
      },
      stmt);
}

std::string serialize(const Package& pkg) {
  std::string out = "package " + pkg.package_id + "\n";
  for (const auto& p : pkg.manifest.permissions) out += "permission " + p + "\n";
  for (const auto& l : pkg.manifest.libraries) out += "library " + l + "\n";
  for (const auto& v : pkg.views) {
    out += "view " + v.name + " class=" + v.class_type +
           " w=" + std::to_string(v.width_dp) +
           " h=" + std::to_string(v.height_dp);
    for (const auto& t : v.text_labels) out += " text=" + quote(t);
    out += "\n";
  }
  for (const auto& c : pkg.classes) {
    out += "class " + c.name + "\n";
    for (const auto& m : c.methods) {
      out += "  method " + m.name + "(";
      for (std::size_t i = 0; i < m.params.size(); ++i) {
        if (i) out += ',';
        out += m.params[i];
      }
      out += ")\n";
      for (const auto& s : m.body) out += "    " + render(s) + "\n";
      out += "  endmethod\n";
    }
    out += "endclass\n";
  }
  out += "endpackage\n";
  return out;
}

}  // namespace clickguard::ir
