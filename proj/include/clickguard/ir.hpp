#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace clickguard::ir {

// An operand is either a method-local variable or a literal token
// (number, quoted string, true/false/null). Literal text is kept verbatim.
struct Operand {
  enum class Kind : std::uint8_t { Var, Lit };
  Kind kind = Kind::Var;
  std::string text;

  static Operand var(std::string name) { return {Kind::Var, std::move(name)}; }
  static Operand lit(std::string text) { return {Kind::Lit, std::move(text)}; }
  bool is_var() const { return kind == Kind::Var; }
  bool is_lit() const { return kind == Kind::Lit; }
  bool operator==(const Operand&) const = default;
};

enum class BinaryOp : std::uint8_t { Add, Sub, Mul, Div, Mod };
enum class Comparator : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

std::string_view to_string(BinaryOp op);
std::string_view to_string(Comparator cmp);

struct ConstAssign {
  std::string target;
  Operand value;  // always a literal
  bool operator==(const ConstAssign&) const = default;
};

struct Copy {
  std::string target;
  Operand source;
  bool operator==(const Copy&) const = default;
};

struct BinOp {
  std::string target;
  BinaryOp op = BinaryOp::Add;
  Operand lhs;
  Operand rhs;
  bool operator==(const BinOp&) const = default;
};

struct Call {
  std::optional<std::string> target;
  std::optional<Operand> receiver;
  std::string api;  // dotted identifier, e.g. MotionEvent.obtain
  std::vector<Operand> args;
  bool operator==(const Call&) const = default;
};

struct IfGoto {
  Operand lhs;
  Comparator cmp = Comparator::Eq;
  Operand rhs;
  std::string label;
  bool operator==(const IfGoto&) const = default;
};

struct Goto {
  std::string label;
  bool operator==(const Goto&) const = default;
};

struct Label {
  std::string name;
  bool operator==(const Label&) const = default;
};

struct Return {
  std::optional<Operand> value;
  bool operator==(const Return&) const = default;
};

using Statement =
    std::variant<ConstAssign, Copy, BinOp, Call, IfGoto, Goto, Label, Return>;

// Operand slots give every use inside a statement a stable position:
//   ConstAssign/Copy/Return: 0; BinOp: lhs 0, rhs 1; IfGoto: lhs 0, rhs 1;
//   Call: receiver 0, argument i at i + 1.
constexpr std::uint32_t call_arg_slot(std::size_t arg_index) {
  return static_cast<std::uint32_t>(arg_index + 1);
}

struct SlotOperand {
  std::uint32_t slot;
  const Operand* operand;
};

// All operands read by a statement (variables and literals), in slot order.
std::vector<SlotOperand> operands(const Statement& stmt);
const Operand* operand_at(const Statement& stmt, std::uint32_t slot);
// Variable written by the statement, if any.
const std::string* defined_var(const Statement& stmt);

struct MethodDecl {
  std::string name;
  std::vector<std::string> params;
  std::vector<Statement> body;
  bool operator==(const MethodDecl&) const = default;

  // Index of the Label statement carrying `label`, if present.
  std::optional<std::uint32_t> label_index(std::string_view label) const;
};

struct ClassDecl {
  std::string name;
  std::vector<MethodDecl> methods;
  bool operator==(const ClassDecl&) const = default;
};

struct ViewDecl {
  std::string name;
  std::string class_type;
  std::int64_t width_dp = 0;
  std::int64_t height_dp = 0;
  std::vector<std::string> text_labels;
  bool operator==(const ViewDecl&) const = default;
};

struct Manifest {
  std::set<std::string> permissions;
  std::set<std::string> libraries;
  bool operator==(const Manifest&) const = default;
};

using MethodId = std::uint32_t;

// (method, index) identity of a statement. Methods are numbered in
// declaration order across all classes of the package.
struct StmtId {
  MethodId method = 0;
  std::uint32_t index = 0;
  auto operator<=>(const StmtId&) const = default;
};

struct MethodRef {
  std::uint32_t class_index;
  std::uint32_t method_index;
};

class Package {
 public:
  std::string package_id;
  Manifest manifest;
  std::vector<ClassDecl> classes;
  std::vector<ViewDecl> views;

  bool operator==(const Package& other) const {
    return package_id == other.package_id && manifest == other.manifest &&
           classes == other.classes && views == other.views;
  }

  // Flattened method table; rebuilt by index_methods().
  std::size_t method_count() const { return method_refs_.size(); }
  const MethodDecl& method(MethodId id) const;
  const ClassDecl& owner(MethodId id) const;
  // "Class::method", the fraud-location format.
  std::string location(MethodId id) const;
  // Resolves a dotted call name "Class.method" to a developer method.
  std::optional<MethodId> find_method(std::string_view dotted) const;
  const Statement& statement(StmtId id) const {
    return method(id.method).body.at(id.index);
  }
  const ViewDecl* find_view(std::string_view name) const;

  void index_methods();

 private:
  std::vector<MethodRef> method_refs_;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& reason);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Parses and validates the line-based IR text format.
Package parse_package(std::string_view text);
// Canonical text form; parse_package(serialize(p)) == p.
std::string serialize(const Package& pkg);
std::string render(const Statement& stmt);

}  // namespace clickguard::ir
