#include "tsroa/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

#include "tsroa/errors.hpp"

namespace tsroa {

namespace {

enum class TokenKind { kIdent, kNumber, kPunct, kEnd };

struct Token {
  TokenKind kind;
  std::string text;
  double value = 0.0;
  std::size_t line = 1;
  std::size_t column = 1;
};

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> tokens;
  std::size_t line = 1;
  std::size_t col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t count) {
    for (std::size_t k = 0; k < count; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; };

  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token tok{TokenKind::kPunct, {}, 0.0, line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      tok.kind = TokenKind::kIdent;
      tok.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (is_digit(c) || (c == '.' && i + 1 < src.size() && is_digit(src[i + 1]))) {
      std::size_t j = i;
      while (j < src.size() && is_digit(src[j])) ++j;
      if (j < src.size() && src[j] == '.') {
        ++j;
        while (j < src.size() && is_digit(src[j])) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && is_digit(src[k])) {
          j = k;
          while (j < src.size() && is_digit(src[j])) ++j;
        }
      }
      tok.kind = TokenKind::kNumber;
      tok.text = std::string(src.substr(i, j - i));
      const auto [ptr, ec] =
          std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), tok.value);
      if (ec != std::errc() || ptr != tok.text.data() + tok.text.size()) {
        throw ParseError("malformed number '" + tok.text + "'", line, col);
      }
      advance(j - i);
    } else if (std::string_view("+-*^()[],;=").find(c) != std::string_view::npos) {
      tok.text = std::string(1, c);
      advance(1);
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    tokens.push_back(std::move(tok));
  }
  tokens.push_back(Token{TokenKind::kEnd, "<end of input>", 0.0, line, col});
  return tokens;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {}

  Polynomial parse_single_polynomial(const std::vector<std::string>& vars) {
    vars_ = vars;
    Polynomial p = parse_expr();
    expect_end();
    return p;
  }

  SystemSpec parse_system() {
    SystemSpec spec;
    std::vector<std::optional<Polynomial>> rhs;
    std::vector<bool> bounded;
    bool have_domain = false;

    while (peek().kind != TokenKind::kEnd) {
      const Token& head = peek();
      if (head.kind != TokenKind::kIdent) {
        fail("expected a statement keyword", head);
      }
      if (head.text == "states") {
        if (!vars_.empty()) fail("states declared twice", head);
        next();
        while (peek().kind == TokenKind::kIdent) {
          const Token& name = next();
          if (std::find(vars_.begin(), vars_.end(), name.text) != vars_.end()) {
            fail("duplicate state '" + name.text + "'", name);
          }
          vars_.push_back(name.text);
        }
        if (vars_.empty()) fail("expected at least one state name", peek());
        expect_punct(";");
        rhs.assign(vars_.size(), std::nullopt);
        bounded.assign(vars_.size(), false);
        spec.domain.lower.assign(vars_.size(), 0.0);
        spec.domain.upper.assign(vars_.size(), 0.0);
      } else if (head.text == "domain") {
        require_states(head);
        if (have_domain) fail("domain declared twice", head);
        next();
        Box box = parse_ranges(head);
        spec.domain = box;
        have_domain = true;
        std::fill(bounded.begin(), bounded.end(), true);
        expect_punct(";");
      } else if (head.text == "transform") {
        require_states(head);
        const Token start = next();
        TransformSpec ts;
        ts.T = parse_matrix();
        if (static_cast<std::size_t>(ts.T.rows()) != vars_.size()) {
          fail("transform must be " + std::to_string(vars_.size()) + "x" +
                   std::to_string(vars_.size()),
               start);
        }
        if (Eigen::PartialPivLU<Eigen::MatrixXd> lu(ts.T);
            !(std::abs(lu.determinant()) > 1e-12)) {
          fail("singular transform matrix", start);
        }
        if (peek().kind == TokenKind::kIdent && peek().text == "domain") {
          const Token& dom = next();
          ts.analysis_box = parse_ranges(dom);
        }
        expect_punct(";");
        spec.transforms.push_back(std::move(ts));
      } else if (head.text == "option") {
        next();
        const Token& name = expect_ident();
        expect_punct("=");
        const double value = parse_signed_number();
        expect_punct(";");
        set_option(spec.options, name, value);
      } else if (head.text.size() > 1 && head.text[0] == 'd' &&
                 peek(1).kind == TokenKind::kPunct && peek(1).text == "=") {
        require_states(head);
        const std::string state = head.text.substr(1);
        const auto it = std::find(vars_.begin(), vars_.end(), state);
        if (it == vars_.end()) fail("unknown state '" + state + "'", head);
        const auto idx = static_cast<std::size_t>(it - vars_.begin());
        if (rhs[idx]) fail("duplicate equation for '" + state + "'", head);
        next();
        next();
        Polynomial p = parse_expr();
        expect_punct(";");
        if (p.constant_term() != 0.0) {
          fail("nonzero constant term in d" + state +
                   ": origin is not an equilibrium",
               head);
        }
        rhs[idx] = std::move(p);
      } else {
        fail("unknown statement '" + head.text + "'", head);
      }
    }

    const Token& end = peek();
    if (vars_.empty()) fail("missing states declaration", end);
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (!rhs[i]) fail("missing equation for state '" + vars_[i] + "'", end);
    }
    if (!have_domain) fail("missing domain declaration", end);

    spec.state_names = vars_;
    for (auto& p : rhs) spec.rhs.push_back(std::move(*p));
    return spec;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }

  [[noreturn]] static void fail(const std::string& msg, const Token& at) {
    throw ParseError(msg, at.line, at.column);
  }

  bool accept_punct(std::string_view p) {
    if (peek().kind == TokenKind::kPunct && peek().text == p) {
      next();
      return true;
    }
    return false;
  }

  void expect_punct(std::string_view p) {
    if (!accept_punct(p)) {
      fail("expected '" + std::string(p) + "' but found '" + peek().text + "'", peek());
    }
  }

  const Token& expect_ident() {
    if (peek().kind != TokenKind::kIdent) {
      fail("expected identifier but found '" + peek().text + "'", peek());
    }
    return next();
  }

  void expect_end() {
    if (peek().kind != TokenKind::kEnd) {
      fail("unexpected '" + peek().text + "'", peek());
    }
  }

  void require_states(const Token& at) const {
    if (vars_.empty()) fail("states must be declared first", at);
  }

  double parse_signed_number() {
    double sign = 1.0;
    while (peek().kind == TokenKind::kPunct && (peek().text == "-" || peek().text == "+")) {
      if (next().text == "-") sign = -sign;
    }
    if (peek().kind != TokenKind::kNumber) {
      fail("expected a number but found '" + peek().text + "'", peek());
    }
    return sign * next().value;
  }

  std::size_t state_index(const Token& name) const {
    const auto it = std::find(vars_.begin(), vars_.end(), name.text);
    if (it == vars_.end()) fail("unknown identifier '" + name.text + "'", name);
    return static_cast<std::size_t>(it - vars_.begin());
  }

  Box parse_ranges(const Token& keyword) {
    Box box;
    box.lower.assign(vars_.size(), 0.0);
    box.upper.assign(vars_.size(), 0.0);
    std::vector<bool> seen(vars_.size(), false);
    do {
      const Token& name = expect_ident();
      const std::size_t idx = state_index(name);
      if (seen[idx]) fail("duplicate range for '" + name.text + "'", name);
      seen[idx] = true;
      const Token& kw = expect_ident();
      if (kw.text != "in") fail("expected 'in'", kw);
      expect_punct("[");
      box.lower[idx] = parse_signed_number();
      expect_punct(",");
      box.upper[idx] = parse_signed_number();
      expect_punct("]");
    } while (accept_punct(","));
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (!seen[i]) fail("domain has no range for '" + vars_[i] + "'", keyword);
    }
    try {
      box.validate();
    } catch (const InvalidBox& e) {
      fail(std::string("degenerate domain: ") + e.what(), keyword);
    }
    return box;
  }

  Eigen::MatrixXd parse_matrix() {
    const Token& open = peek();
    expect_punct("[");
    std::vector<std::vector<double>> rows(1);
    rows.back().push_back(parse_signed_number());
    while (true) {
      if (accept_punct(",")) {
        rows.back().push_back(parse_signed_number());
      } else if (accept_punct(";")) {
        rows.emplace_back();
        rows.back().push_back(parse_signed_number());
      } else {
        break;
      }
    }
    expect_punct("]");
    for (const auto& r : rows) {
      if (r.size() != rows.size()) fail("transform matrix must be square", open);
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd M(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        M(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      }
    }
    return M;
  }

  static void set_option(SpecOptions& opts, const Token& name, double value) {
    static const std::map<std::string, std::optional<double> SpecOptions::*> kFields = {
        {"eps", &SpecOptions::eps},
        {"step", &SpecOptions::step},
        {"tmax", &SpecOptions::tmax},
        {"mc", &SpecOptions::mc},
        {"seed", &SpecOptions::seed},
        {"boundary_points", &SpecOptions::boundary_points},
        {"samples", &SpecOptions::samples},
    };
    const auto it = kFields.find(name.text);
    if (it == kFields.end()) fail("unknown option '" + name.text + "'", name);
    if (!(value > 0.0) && name.text != "seed") {
      fail("option '" + name.text + "' must be positive", name);
    }
    opts.*(it->second) = value;
  }

  // expr := term (('+' | '-') term)*
  Polynomial parse_expr() {
    Polynomial acc = parse_term();
    while (true) {
      if (accept_punct("+")) {
        acc += parse_term();
      } else if (accept_punct("-")) {
        acc -= parse_term();
      } else {
        return acc;
      }
    }
  }

  // term := unary ('*' unary)*
  Polynomial parse_term() {
    Polynomial acc = parse_unary();
    while (peek().kind == TokenKind::kPunct && peek().text == "*") {
      const Token& op = next();
      Polynomial rhs = parse_unary();
      try {
        acc = acc * rhs;
      } catch (const DegreeOverflow& e) {
        fail(e.what(), op);
      }
    }
    return acc;
  }

  // unary := ('-' | '+') unary | power
  Polynomial parse_unary() {
    if (accept_punct("-")) return -parse_unary();
    if (accept_punct("+")) return parse_unary();
    return parse_power();
  }

  // power := primary ('^' exponent)?
  Polynomial parse_power() {
    Polynomial base = parse_primary();
    if (peek().kind == TokenKind::kPunct && peek().text == "^") {
      const Token& op = next();
      if (peek().kind == TokenKind::kPunct && peek().text == "-") {
        fail("negative exponent", peek());
      }
      if (peek().kind != TokenKind::kNumber) {
        fail("exponent must be a nonnegative integer literal", peek());
      }
      const Token& ex = next();
      if (ex.value != std::floor(ex.value) ||
          ex.text.find_first_of(".eE") != std::string::npos) {
        fail("fractional exponent '" + ex.text + "'", ex);
      }
      if (ex.value > kMaxDegree) {
        fail("exponent exceeds the degree cap of " + std::to_string(kMaxDegree), ex);
      }
      try {
        return pow(base, static_cast<int>(ex.value));
      } catch (const DegreeOverflow& e) {
        fail(e.what(), op);
      }
    }
    return base;
  }

  // primary := number | ident | '(' expr ')'
  Polynomial parse_primary() {
    const Token& t = peek();
    if (t.kind == TokenKind::kNumber) {
      next();
      return Polynomial::constant(vars_.size(), t.value);
    }
    if (t.kind == TokenKind::kIdent) {
      next();
      return Polynomial::variable(vars_.size(), state_index(t));
    }
    if (accept_punct("(")) {
      Polynomial inner = parse_expr();
      expect_punct(")");
      return inner;
    }
    fail("expected a number, variable or '(' but found '" + t.text + "'", t);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::vector<std::string> vars_;
};

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_ranges(std::ostream& os, const Box& box,
                  const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i > 0) os << ", ";
    os << names[i] << " in [" << format_number(box.lower[i]) << ", "
       << format_number(box.upper[i]) << "]";
  }
}

}  // namespace

SystemSpec parse_system(std::string_view text) {
  return Parser(text).parse_system();
}

Polynomial parse_polynomial(std::string_view text,
                            const std::vector<std::string>& vars) {
  return Parser(text).parse_single_polynomial(vars);
}

std::string to_string(const SystemSpec& spec) {
  std::ostringstream os;
  os << "states";
  for (const auto& name : spec.state_names) os << ' ' << name;
  os << ";\n";
  for (std::size_t i = 0; i < spec.rhs.size(); ++i) {
    os << 'd' << spec.state_names[i] << " = "
       << to_string(spec.rhs[i], spec.state_names) << ";\n";
  }
  os << "domain ";
  write_ranges(os, spec.domain, spec.state_names);
  os << ";\n";
  for (const auto& t : spec.transforms) {
    os << "transform [";
    for (Eigen::Index i = 0; i < t.T.rows(); ++i) {
      if (i > 0) os << "; ";
      for (Eigen::Index j = 0; j < t.T.cols(); ++j) {
        if (j > 0) os << ", ";
        os << format_number(t.T(i, j));
      }
    }
    os << "]";
    if (t.analysis_box) {
      os << " domain ";
      write_ranges(os, *t.analysis_box, spec.state_names);
    }
    os << ";\n";
  }
  const std::pair<const char*, const std::optional<double>*> options[] = {
      {"eps", &spec.options.eps},     {"step", &spec.options.step},
      {"tmax", &spec.options.tmax},   {"mc", &spec.options.mc},
      {"seed", &spec.options.seed},   {"boundary_points", &spec.options.boundary_points},
      {"samples", &spec.options.samples},
  };
  for (const auto& [name, value] : options) {
    if (*value) os << "option " << name << " = " << format_number(**value) << ";\n";
  }
  return os.str();
}

}  // namespace tsroa
