#include "dmod/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <set>
#include <sstream>

namespace dmod {

ParseError::ParseError(unsigned line, unsigned column, const std::string& msg)
    : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

namespace {

enum class Tok { Name, Int, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  unsigned line;
  unsigned col;
};

const std::set<std::string> kKeywords{"system", "vars", "params", "unknowns", "eq", "order", "by", "const"};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  unsigned line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t k) {
    for (std::size_t j = 0; j < k; ++j, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    unsigned char c = static_cast<unsigned char>(src[i]);
    if (std::isspace(c)) {
      advance(1);
    } else if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
    } else if (std::isalpha(c) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      out.push_back({Tok::Name, src.substr(i, j - i), line, col});
      advance(j - i);
    } else if (std::isdigit(c)) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Int, src.substr(i, j - i), line, col});
      advance(j - i);
    } else if (std::string("[](),:=+-*/^").find(static_cast<char>(c)) != std::string::npos) {
      out.push_back({Tok::Punct, std::string(1, static_cast<char>(c)), line, col});
      advance(1);
    } else {
      throw ParseError(line, col, std::string("unexpected character '") + static_cast<char>(c) + "'");
    }
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

// Linear form in the unknowns plus a scalar part.
struct Value {
  Scalar s;
  Row ops;
  bool linear = false;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : toks_(lex(src)) {}

  SystemDecl run() {
    SystemDecl d;
    keyword("system");
    d.name = name("system name");
    keyword("vars");
    d.vars = name_list("variable name");
    if (is_keyword("params")) {
      next();
      do d.params.push_back(param(d.vars));
      while (peek().kind == Tok::Name && !kKeywords.count(peek().text));
    }
    keyword("unknowns");
    d.unknowns = name_list("unknown name");
    check_unique(d);

    std::vector<ParameterSpec> specs;
    for (const auto& p : d.params) {
      unsigned base = 1;
      if (!p.constant) base = static_cast<unsigned>(std::find(d.vars.begin(), d.vars.end(), p.by) - d.vars.begin()) + 1;
      specs.push_back({p.name, p.constant ? 0u : p.order, base, p.constant});
    }
    d.ctx = std::make_shared<DiffContext>(d.vars, specs);
    ctx_ = d.ctx.get();
    for (std::size_t k = 0; k < d.unknowns.size(); ++k) unknowns_[d.unknowns[k]] = k;
    for (auto s : d.ctx->all_symbols()) symbols_[symbol_name(s)] = s;
    m_ = d.unknowns.size();

    d.op = OperatorMatrix(d.ctx, 0, m_);
    d.op.col_labels() = d.unknowns;
    if (!is_keyword("eq")) fail(peek(), "expected 'eq'");
    while (is_keyword("eq")) {
      const Token& at = next();
      std::string label;
      if (peek().kind == Tok::Name && !kKeywords.count(peek().text) && peek(1).kind == Tok::Punct &&
          peek(1).text == ":") {
        label = next().text;
        next();
      }
      Value lhs = expr();
      if (punct("=")) {
        Value rhs = expr();
        lhs = sub(lhs, rhs);
      }
      if (!lhs.s.is_zero()) fail(at, "equation has a term free of the unknowns");
      if (lhs.ops.empty()) lhs.ops.resize(m_);
      d.op.append_row(lhs.ops, label);
    }
    if (peek().kind != Tok::End) fail(peek(), "expected 'eq' or end of input");
    return d;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const DiffContext* ctx_ = nullptr;
  std::map<std::string, std::size_t> unknowns_;
  std::map<std::string, SymbolId> symbols_;
  std::size_t m_ = 0;

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] static void fail(const Token& t, const std::string& msg) { throw ParseError(t.line, t.col, msg); }

  static std::string show(const Token& t) { return t.kind == Tok::End ? "end of input" : "'" + t.text + "'"; }

  bool is_keyword(const std::string& k) const { return peek().kind == Tok::Name && peek().text == k; }

  void keyword(const std::string& k) {
    if (!is_keyword(k)) fail(peek(), "expected '" + k + "', found " + show(peek()));
    next();
  }

  bool punct(const std::string& p) {
    if (peek().kind == Tok::Punct && peek().text == p) {
      next();
      return true;
    }
    return false;
  }

  void expect(const std::string& p) {
    if (!punct(p)) fail(peek(), "expected '" + p + "', found " + show(peek()));
  }

  std::string name(const std::string& what) {
    if (peek().kind != Tok::Name || kKeywords.count(peek().text)) fail(peek(), "expected " + what + ", found " + show(peek()));
    return next().text;
  }

  std::vector<std::string> name_list(const std::string& what) {
    std::vector<std::string> out{name(what)};
    while (peek().kind == Tok::Name && !kKeywords.count(peek().text)) out.push_back(next().text);
    return out;
  }

  unsigned integer() {
    if (peek().kind != Tok::Int) fail(peek(), "expected an integer, found " + show(peek()));
    const Token& t = next();
    if (t.text.size() > 6) fail(t, "integer too large");
    return static_cast<unsigned>(std::stoul(t.text));
  }

  ParamDecl param(const std::vector<std::string>& vars) {
    ParamDecl p;
    p.name = name("parameter name");
    expect(":");
    if (is_keyword("const")) {
      next();
      p.constant = true;
      p.order = 0;
      return p;
    }
    keyword("order");
    p.order = integer();
    keyword("by");
    const Token& t = peek();
    p.by = name("variable name");
    if (std::find(vars.begin(), vars.end(), p.by) == vars.end()) fail(t, "undeclared variable '" + p.by + "'");
    return p;
  }

  void check_unique(const SystemDecl& d) {
    std::set<std::string> seen;
    auto add = [&](const std::string& s) {
      if (!seen.insert(s).second) throw ParseError(1, 1, "identifier '" + s + "' declared twice");
    };
    for (const auto& v : d.vars) add(v);
    for (const auto& p : d.params) {
      add(p.name);
      for (unsigned k = 1; k <= p.order; ++k) add(DiffContext::jet_name(p.name, k));
    }
    for (const auto& u : d.unknowns) add(u);
    if (d.vars.size() > kMaxVars) throw ParseError(1, 1, "at most " + std::to_string(kMaxVars) + " variables");
  }

  Value scalar(Scalar s) {
    Value v;
    v.s = std::move(s);
    return v;
  }

  static Value add(Value a, const Value& b) {
    a.s += b.s;
    if (b.linear) {
      if (!a.linear) a.ops.resize(b.ops.size());
      for (std::size_t k = 0; k < b.ops.size(); ++k) a.ops[k] += b.ops[k];
      a.linear = true;
    }
    return a;
  }

  static Value negate(Value a) {
    a.s = -a.s;
    for (auto& o : a.ops) o = -o;
    return a;
  }

  static Value sub(Value a, const Value& b) { return add(std::move(a), negate(b)); }

  static Value scale(Value a, const Scalar& c) {
    a.s *= c;
    for (auto& o : a.ops) o = o.scaled(c);
    return a;
  }

  Value expr() {
    Value v = term();
    for (;;) {
      if (punct("+")) {
        v = add(std::move(v), term());
      } else if (punct("-")) {
        v = sub(std::move(v), term());
      } else {
        return v;
      }
    }
  }

  Value term() {
    Value v = unary();
    for (;;) {
      const Token& at = peek();
      if (punct("*")) {
        Value w = unary();
        if (v.linear && w.linear) fail(at, "product of two expressions in the unknowns is not linear");
        v = v.linear ? scale(std::move(v), w.s) : scale(std::move(w), v.s);
      } else if (punct("/")) {
        Value w = unary();
        if (w.linear) fail(at, "division by an expression in the unknowns");
        if (w.s.is_zero()) fail(at, "division by zero");
        v = scale(std::move(v), w.s.inverse());
      } else {
        return v;
      }
    }
  }

  Value unary() {
    if (punct("-")) return negate(unary());
    if (punct("+")) return unary();
    return power();
  }

  Value power() {
    Value v = primary();
    const Token& at = peek();
    if (punct("^")) {
      if (v.linear) fail(at, "power of an expression in the unknowns");
      unsigned e = integer();
      Scalar r(1);
      for (unsigned k = 0; k < e; ++k) r *= v.s;
      v.s = r;
    }
    return v;
  }

  Value primary() {
    const Token& t = peek();
    if (t.kind == Tok::Int) {
      next();
      return scalar(Scalar(Rational(t.text)));
    }
    if (punct("(")) {
      Value v = expr();
      expect(")");
      return v;
    }
    if (t.kind == Tok::Name && t.text == "d" && peek(1).kind == Tok::Punct && peek(1).text == "[") {
      next();
      next();
      MultiIndex mu;
      do {
        const Token& it = peek();
        unsigned i = integer();
        if (i < 1 || i > ctx_->n())
          fail(it, "derivative index out of range 1.." + std::to_string(ctx_->n()));
        mu = mu.plus(i);
      } while (punct(","));
      expect("]");
      expect("(");
      Value inner = expr();
      expect(")");
      Value out;
      out.s = ctx_->derive_multi(inner.s, mu.c);
      if (inner.linear) {
        out.linear = true;
        out.ops.resize(m_);
        ScalarOperator dmu = ScalarOperator::d(mu);
        for (std::size_t k = 0; k < m_; ++k)
          if (!inner.ops[k].is_zero()) out.ops[k] = compose(dmu, inner.ops[k], *ctx_);
      }
      return out;
    }
    if (t.kind == Tok::Name && !kKeywords.count(t.text)) {
      next();
      auto u = unknowns_.find(t.text);
      if (u != unknowns_.end()) {
        Value v;
        v.linear = true;
        v.ops.resize(m_);
        v.ops[u->second] = ScalarOperator(1);
        return v;
      }
      auto s = symbols_.find(t.text);
      if (s != symbols_.end()) return scalar(Scalar(Polynomial::variable(s->second)));
      fail(t, "undeclared identifier '" + t.text + "'");
    }
    fail(t, "expected an expression, found " + show(t));
  }
};

}  // namespace

SystemDecl parse_system(const std::string& text) { return Parser(text).run(); }

std::string render_system(const SystemDecl& decl) {
  std::ostringstream os;
  os << "system " << decl.name << "\n";
  os << "vars";
  for (const auto& v : decl.vars) os << " " << v;
  os << "\n";
  if (!decl.params.empty()) {
    os << "params\n";
    for (const auto& p : decl.params) {
      os << "  " << p.name << ": ";
      if (p.constant) {
        os << "const\n";
      } else {
        os << "order " << p.order << " by " << p.by << "\n";
      }
    }
  }
  os << "unknowns";
  for (const auto& u : decl.unknowns) os << " " << u;
  os << "\n";
  auto eqs = decl.op.equations();
  for (std::size_t r = 0; r < eqs.size(); ++r) {
    os << "eq ";
    const std::string& label = r < decl.op.row_labels().size() ? decl.op.row_labels()[r] : std::string();
    if (!label.empty()) os << label << ": ";
    os << eqs[r] << " = 0\n";
  }
  return os.str();
}

namespace {

bool identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_') || kKeywords.count(s)) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

}  // namespace

SystemDecl decl_from_operator(const std::string& name, const OperatorMatrix& op) {
  SystemDecl d;
  d.name = name;
  d.ctx = op.context();
  d.vars = d.ctx->var_names();
  for (const auto& p : d.ctx->params())
    d.params.push_back({p.name, p.constant ? 0u : p.order, p.constant ? std::string() : d.vars.at(p.base - 1), p.constant});
  d.op = op;
  d.op.col_labels().resize(op.cols());
  for (std::size_t c = 0; c < op.cols(); ++c) {
    std::string u = identifier(op.col_label(c)) ? op.col_label(c) : "y" + std::to_string(c + 1);
    d.unknowns.push_back(u);
    d.op.col_labels()[c] = u;
  }
  d.op.row_labels().resize(op.rows());
  for (auto& l : d.op.row_labels())
    if (!identifier(l)) l.clear();
  return d;
}

bool equivalent(const SystemDecl& a, const SystemDecl& b) {
  if (a.name != b.name || a.vars != b.vars || a.params != b.params || a.unknowns != b.unknowns) return false;
  if (!(a.op == b.op)) return false;
  for (std::size_t r = 0; r < a.op.rows(); ++r) {
    auto la = r < a.op.row_labels().size() ? a.op.row_labels()[r] : std::string();
    auto lb = r < b.op.row_labels().size() ? b.op.row_labels()[r] : std::string();
    if (la != lb) return false;
  }
  return true;
}

}  // namespace dmod
