#include <cctype>
#include <charconv>
#include <set>
#include <unordered_set>

#include "clickguard/ir.hpp"

namespace clickguard::ir {

namespace {

enum class TokKind { Ident, Number, String, Punct };

struct Token {
  TokKind kind;
  std::string text;
};

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$' ||
         c == '.';
}

std::vector<Token> lex(std::string_view line, std::size_t lineno) {
  std::vector<Token> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '"') {
      std::string s = "\"";
      ++i;
      bool closed = false;
      while (i < line.size()) {
        if (line[i] == '\\' && i + 1 < line.size()) {
          s += line[i];
          s += line[i + 1];
          i += 2;
          continue;
        }
        s += line[i];
        if (line[i++] == '"') {
          closed = true;
          break;
        }
      }
      if (!closed) throw ParseError(lineno, "unterminated string literal");
      toks.push_back({TokKind::String, std::move(s)});
      continue;
    }
    const bool sign_num = (c == '-' || c == '+') && i + 1 < line.size() &&
                          std::isdigit(static_cast<unsigned char>(line[i + 1]));
    if (std::isdigit(static_cast<unsigned char>(c)) || sign_num) {
      std::size_t j = i + 1;
      while (j < line.size() &&
             (std::isalnum(static_cast<unsigned char>(line[j])) ||
              line[j] == '.' ||
              ((line[j] == '-' || line[j] == '+') &&
               (line[j - 1] == 'e' || line[j - 1] == 'E'))))
        ++j;
      std::string num(line.substr(i, j - i));
      double value = 0;
      const char* first = num.data() + (num[0] == '+' ? 1 : 0);
      auto [ptr, ec] = std::from_chars(first, num.data() + num.size(), value);
      if (ec != std::errc{} || ptr != num.data() + num.size())
        throw ParseError(lineno, "malformed number '" + num + "'");
      toks.push_back({TokKind::Number, std::move(num)});
      i = j;
      continue;
    }
    if (ident_start(c)) {
      std::size_t j = i + 1;
      while (j < line.size() && ident_char(line[j])) ++j;
      toks.push_back({TokKind::Ident, std::string(line.substr(i, j - i))});
      i = j;
      continue;
    }
    if ((c == '<' || c == '>' || c == '=' || c == '!') && i + 1 < line.size() &&
        line[i + 1] == '=') {
      toks.push_back({TokKind::Punct, std::string(line.substr(i, 2))});
      i += 2;
      continue;
    }
    if (c == '(' || c == ')' || c == ',' || c == '=' || c == '<' || c == '>') {
      toks.push_back({TokKind::Punct, std::string(1, c)});
      ++i;
      continue;
    }
    throw ParseError(lineno, std::string("unexpected character '") + c + "'");
  }
  return toks;
}

const std::unordered_set<std::string>& reserved_words() {
  static const std::unordered_set<std::string> words = {
      "package", "endpackage", "permission", "library", "view", "class",
      "endclass", "method", "endmethod", "if", "goto", "label", "return",
      "call", "const", "copy", "add", "sub", "mul", "div", "mod"};
  return words;
}

bool is_plain_ident(const std::string& s) {
  return !s.empty() && ident_start(s[0]) &&
         s.find('.') == std::string::npos;
}

class Cursor {
 public:
  Cursor(std::vector<Token> toks, std::size_t lineno)
      : toks_(std::move(toks)), lineno_(lineno) {}

  bool done() const { return pos_ >= toks_.size(); }
  const Token* peek(std::size_t ahead = 0) const {
    return pos_ + ahead < toks_.size() ? &toks_[pos_ + ahead] : nullptr;
  }
  bool peek_punct(std::string_view p, std::size_t ahead = 0) const {
    const auto* t = peek(ahead);
    return t && t->kind == TokKind::Punct && t->text == p;
  }
  Token next(std::string_view what) {
    if (done()) fail("expected " + std::string(what));
    return toks_[pos_++];
  }
  void expect_punct(std::string_view p) {
    auto t = next(std::string("'") + std::string(p) + "'");
    if (t.kind != TokKind::Punct || t.text != p)
      fail("expected '" + std::string(p) + "', found '" + t.text + "'");
  }
  std::string ident(std::string_view what) {
    auto t = next(what);
    if (t.kind != TokKind::Ident) fail("expected " + std::string(what));
    return t.text;
  }
  std::string var_name(std::string_view what) {
    auto name = ident(what);
    if (!is_plain_ident(name) || reserved_words().count(name))
      fail("invalid variable name '" + name + "'");
    return name;
  }
  Operand operand() {
    auto t = next("operand");
    switch (t.kind) {
      case TokKind::Number:
      case TokKind::String:
        return Operand::lit(t.text);
      case TokKind::Ident:
        if (t.text == "true" || t.text == "false" || t.text == "null")
          return Operand::lit(t.text);
        if (!is_plain_ident(t.text) || reserved_words().count(t.text))
          fail("invalid operand '" + t.text + "'");
        return Operand::var(t.text);
      case TokKind::Punct:
        break;
    }
    fail("expected operand, found '" + t.text + "'");
  }
  void end() {
    if (!done()) fail("unexpected trailing token '" + peek()->text + "'");
  }
  [[noreturn]] void fail(const std::string& reason) const {
    throw ParseError(lineno_, reason);
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::size_t lineno_;
};

std::optional<BinaryOp> binary_op(std::string_view s) {
  if (s == "add") return BinaryOp::Add;
  if (s == "sub") return BinaryOp::Sub;
  if (s == "mul") return BinaryOp::Mul;
  if (s == "div") return BinaryOp::Div;
  if (s == "mod") return BinaryOp::Mod;
  return std::nullopt;
}

std::optional<Comparator> comparator(std::string_view s) {
  if (s == "==" || s == "eq") return Comparator::Eq;
  if (s == "!=" || s == "ne") return Comparator::Ne;
  if (s == "<" || s == "lt") return Comparator::Lt;
  if (s == "<=" || s == "le") return Comparator::Le;
  if (s == ">" || s == "gt") return Comparator::Gt;
  if (s == ">=" || s == "ge") return Comparator::Ge;
  return std::nullopt;
}

Call parse_call(Cursor& cur, std::optional<std::string> target) {
  Call call;
  call.target = std::move(target);
  auto first = cur.ident("api name");
  if (!cur.peek_punct("(")) {
    if (!is_plain_ident(first) || reserved_words().count(first))
      cur.fail("invalid receiver '" + first + "'");
    call.receiver = Operand::var(first);
    first = cur.ident("api name");
  }
  if (first.find('.') == std::string::npos || first.front() == '.' ||
      first.back() == '.' || first.find("..") != std::string::npos)
    cur.fail("api name '" + first + "' is not a dotted identifier");
  call.api = first;
  cur.expect_punct("(");
  if (!cur.peek_punct(")")) {
    call.args.push_back(cur.operand());
    while (cur.peek_punct(",")) {
      cur.expect_punct(",");
      call.args.push_back(cur.operand());
    }
  }
  cur.expect_punct(")");
  cur.end();
  return call;
}

Statement parse_statement(Cursor& cur) {
  const auto head = cur.ident("statement");
  if (head == "if") {
    IfGoto s;
    s.lhs = cur.operand();
    auto cmp_tok = cur.next("comparator");
    auto cmp = comparator(cmp_tok.text);
    if (!cmp) cur.fail("unknown comparator '" + cmp_tok.text + "'");
    s.cmp = *cmp;
    s.rhs = cur.operand();
    if (cur.ident("'goto'") != "goto") cur.fail("expected 'goto'");
    s.label = cur.var_name("label");
    cur.end();
    return s;
  }
  if (head == "goto") {
    Goto s{cur.var_name("label")};
    cur.end();
    return s;
  }
  if (head == "label") {
    Label s{cur.var_name("label")};
    cur.end();
    return s;
  }
  if (head == "return") {
    Return s;
    if (!cur.done()) s.value = cur.operand();
    cur.end();
    return s;
  }
  if (head == "call") return parse_call(cur, std::nullopt);

  if (!is_plain_ident(head) || reserved_words().count(head))
    cur.fail("unknown statement '" + head + "'");
  cur.expect_punct("=");
  const auto kw = cur.ident("statement kind");
  if (kw == "const") {
    auto v = cur.operand();
    if (!v.is_lit()) cur.fail("const requires a literal");
    cur.end();
    return ConstAssign{head, std::move(v)};
  }
  if (kw == "copy") {
    auto v = cur.operand();
    cur.end();
    return Copy{head, std::move(v)};
  }
  if (kw == "call") return parse_call(cur, head);
  if (auto op = binary_op(kw)) {
    BinOp s;
    s.target = head;
    s.op = *op;
    s.lhs = cur.operand();
    s.rhs = cur.operand();
    cur.end();
    return s;
  }
  cur.fail("unknown statement kind '" + kw + "'");
}

std::vector<std::string> parse_params(Cursor& cur) {
  std::vector<std::string> params;
  cur.expect_punct("(");
  if (!cur.peek_punct(")")) {
    params.push_back(cur.var_name("parameter"));
    while (cur.peek_punct(",")) {
      cur.expect_punct(",");
      params.push_back(cur.var_name("parameter"));
    }
  }
  cur.expect_punct(")");
  cur.end();
  return params;
}

std::int64_t parse_int(const Token& t, Cursor& cur) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
  if (t.kind != TokKind::Number || ec != std::errc{} ||
      ptr != t.text.data() + t.text.size())
    cur.fail("expected integer, found '" + t.text + "'");
  return v;
}

std::string unquote(const std::string& s) {
  std::string out;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    if (s[i] == '\\' && i + 2 < s.size()) ++i;
    out += s[i];
  }
  return out;
}

ViewDecl parse_view(Cursor& cur) {
  ViewDecl v;
  v.name = cur.var_name("view name");
  bool have_class = false, have_w = false, have_h = false;
  while (!cur.done()) {
    const auto key = cur.ident("view attribute");
    cur.expect_punct("=");
    auto val = cur.next("attribute value");
    if (key == "class") {
      if (val.kind != TokKind::Ident) cur.fail("class= expects a type name");
      v.class_type = val.text;
      have_class = true;
    } else if (key == "w") {
      v.width_dp = parse_int(val, cur);
      have_w = true;
    } else if (key == "h") {
      v.height_dp = parse_int(val, cur);
      have_h = true;
    } else if (key == "text") {
      if (val.kind != TokKind::String) cur.fail("text= expects a string");
      v.text_labels.push_back(unquote(val.text));
    } else {
      cur.fail("unknown view attribute '" + key + "'");
    }
  }
  if (!have_class || !have_w || !have_h)
    cur.fail("view requires class=, w= and h=");
  if (v.width_dp < 0 || v.height_dp < 0)
    cur.fail("view dimensions must be non-negative");
  return v;
}

struct MethodLines {
  std::vector<std::size_t> stmt_lines;
  std::size_t header_line = 0;
};

void validate_method(const MethodDecl& m, const MethodLines& lines) {
  std::set<std::string> labels;
  std::set<std::string> defined(m.params.begin(), m.params.end());
  if (defined.size() != m.params.size())
    throw ParseError(lines.header_line,
                     "duplicate parameter in method '" + m.name + "'");
  for (std::size_t i = 0; i < m.body.size(); ++i) {
    if (const auto* l = std::get_if<Label>(&m.body[i])) {
      if (!labels.insert(l->name).second)
        throw ParseError(lines.stmt_lines[i], "duplicate label '" + l->name + "'");
    }
    if (const auto* d = defined_var(m.body[i])) defined.insert(*d);
  }
  for (std::size_t i = 0; i < m.body.size(); ++i) {
    const auto& s = m.body[i];
    const std::string* target = nullptr;
    if (const auto* g = std::get_if<Goto>(&s)) target = &g->label;
    if (const auto* g = std::get_if<IfGoto>(&s)) target = &g->label;
    if (target && !labels.count(*target))
      throw ParseError(lines.stmt_lines[i], "undefined label '" + *target + "'");
    for (const auto& so : operands(s))
      if (so.operand->is_var() && !defined.count(so.operand->text))
        throw ParseError(lines.stmt_lines[i],
                         "use of undefined variable '" + so.operand->text + "'");
  }
}

}  // namespace

Package parse_package(std::string_view text) {
  enum class Scope { Top, Package, Class, Method, Done };
  Scope scope = Scope::Top;
  Package pkg;
  MethodLines mlines;
  std::set<std::string> class_names, view_names, method_names;
  std::size_t lineno = 0;

  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    auto toks = lex(line, lineno);
    if (toks.empty()) {
      if (end == text.size()) break;
      continue;
    }
    Cursor cur(std::move(toks), lineno);
    const auto* first = cur.peek();
    const std::string head = first->kind == TokKind::Ident ? first->text : "";

    switch (scope) {
      case Scope::Top:
        if (head != "package") cur.fail("expected 'package'");
        cur.next("package");
        pkg.package_id = cur.ident("package id");
        cur.end();
        scope = Scope::Package;
        break;
      case Scope::Package:
        cur.next("directive");
        if (head == "endpackage") {
          cur.end();
          scope = Scope::Done;
        } else if (head == "permission") {
          pkg.manifest.permissions.insert(cur.ident("permission name"));
          cur.end();
        } else if (head == "library") {
          pkg.manifest.libraries.insert(cur.ident("library id"));
          cur.end();
        } else if (head == "view") {
          auto v = parse_view(cur);
          if (!view_names.insert(v.name).second)
            cur.fail("duplicate view '" + v.name + "'");
          pkg.views.push_back(std::move(v));
        } else if (head == "class") {
          auto name = cur.ident("class name");
          cur.end();
          if (!class_names.insert(name).second)
            cur.fail("duplicate class '" + name + "'");
          pkg.classes.push_back(ClassDecl{std::move(name), {}});
          method_names.clear();
          scope = Scope::Class;
        } else {
          cur.fail("unexpected directive '" + (head.empty() ? first->text : head) + "'");
        }
        break;
      case Scope::Class:
        cur.next("directive");
        if (head == "endclass") {
          cur.end();
          scope = Scope::Package;
        } else if (head == "method") {
          MethodDecl m;
          m.name = cur.var_name("method name");
          m.params = parse_params(cur);
          if (!method_names.insert(m.name).second)
            cur.fail("duplicate method '" + m.name + "'");
          pkg.classes.back().methods.push_back(std::move(m));
          mlines = MethodLines{{}, lineno};
          scope = Scope::Method;
        } else {
          cur.fail("expected 'method' or 'endclass'");
        }
        break;
      case Scope::Method:
        if (head == "endmethod") {
          cur.next("endmethod");
          cur.end();
          validate_method(pkg.classes.back().methods.back(), mlines);
          scope = Scope::Class;
        } else {
          pkg.classes.back().methods.back().body.push_back(parse_statement(cur));
          mlines.stmt_lines.push_back(lineno);
        }
        break;
      case Scope::Done:
        cur.fail("content after 'endpackage'");
    }
    if (end == text.size()) break;
  }
  if (scope != Scope::Done)
    throw ParseError(lineno, scope == Scope::Top ? "missing 'package'"
                                                 : "unexpected end of input");
  if (pkg.package_id.empty()) throw ParseError(1, "empty package id");
  pkg.index_methods();
  return pkg;
}

}  // namespace clickguard::ir
