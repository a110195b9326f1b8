// Recursive-descent parser for function spec strings.
//
//   spec    := NAME param*                 (atoms: zero ball step gauss power witness)
//            | NAME '(' param* spec ')'    (wrappers: shift scale abs neg trunc)
//            | 'sum' '(' spec spec ')'
//   param   := KEY '=' NUMBER (',' NUMBER)*

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>

#include "levelset/errors.hpp"
#include "levelset/functions.hpp"

namespace levelset {

namespace {

enum class Tok { Ident, Number, Equals, Comma, LParen, RParen, End };

struct Token {
  Tok type;
  std::string text;
  double value = 0.0;
  std::size_t pos = 0;
};

std::string describe(const Token& t) {
  if (t.type == Tok::End) return "end of input";
  return "'" + t.text + "'";
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(s.substr(i, j - i)), 0.0, i});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.') {
      const std::string rest(s.substr(i));
      char* end = nullptr;
      const double v = std::strtod(rest.c_str(), &end);
      const std::size_t len = static_cast<std::size_t>(end - rest.c_str());
      if (len == 0) throw ParseError(i, "a number", "'" + std::string(1, c) + "'");
      out.push_back({Tok::Number, rest.substr(0, len), v, i});
      i += len;
      continue;
    }
    switch (c) {
      case '=': out.push_back({Tok::Equals, "=", 0.0, i}); break;
      case ',': out.push_back({Tok::Comma, ",", 0.0, i}); break;
      case '(': out.push_back({Tok::LParen, "(", 0.0, i}); break;
      case ')': out.push_back({Tok::RParen, ")", 0.0, i}); break;
      default: throw ParseError(i, "a name, number, '=', ',', '(' or ')'", "'" + std::string(1, c) + "'");
    }
    ++i;
  }
  out.push_back({Tok::End, "", 0.0, s.size()});
  return out;
}

struct Param {
  std::vector<double> values;
  std::size_t pos;
};

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"zero", {"n"}},
      {"ball", {"a", "r", "n"}},
      {"step", {"r", "a", "n"}},
      {"gauss", {"a", "n"}},
      {"power", {"alpha", "r", "a", "n"}},
      {"witness", {"p", "a", "n"}},
      {"shift", {"by"}},
      {"scale", {"c", "d"}},
      {"abs", {}},
      {"neg", {}},
      {"trunc", {"r"}},
      {"sum", {}},
  };
  return keys;
}

bool is_wrapper(const std::string& name) {
  return name == "shift" || name == "scale" || name == "abs" || name == "neg" || name == "trunc" || name == "sum";
}

std::string key_list(const std::set<std::string>& keys) {
  if (keys.empty()) return "no parameters";
  std::string s = "one of";
  for (const auto& k : keys) s += " '" + k + "'";
  return s;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(tokenize(src)) {}

  TestFunction parse() {
    auto f = spec();
    if (peek().type != Tok::End) throw ParseError(peek().pos, "end of input", describe(peek()));
    return f;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(i_ + ahead, toks_.size() - 1)];
  }
  const Token& next() { return toks_[std::min(i_++, toks_.size() - 1)]; }

  const Token& expect(Tok type, const std::string& what) {
    if (peek().type != type) throw ParseError(peek().pos, what, describe(peek()));
    return next();
  }

  std::map<std::string, Param> params(const std::string& name) {
    std::map<std::string, Param> out;
    const auto& keys = allowed_keys().at(name);
    while (peek().type == Tok::Ident && peek(1).type == Tok::Equals) {
      const Token key = next();
      if (!keys.count(key.text)) throw ParseError(key.pos, key_list(keys) + " for '" + name + "'", describe(key));
      if (out.count(key.text)) throw ParseError(key.pos, "each parameter at most once", describe(key));
      next();  // '='
      Param p{{}, key.pos};
      p.values.push_back(expect(Tok::Number, "a number").value);
      while (peek().type == Tok::Comma) {
        next();
        p.values.push_back(expect(Tok::Number, "a number after ','").value);
      }
      out[key.text] = std::move(p);
    }
    return out;
  }

  static double scalar(const std::map<std::string, Param>& ps, const std::string& key, double fallback) {
    auto it = ps.find(key);
    if (it == ps.end()) return fallback;
    if (it->second.values.size() != 1)
      throw ParseError(it->second.pos, "a single number for '" + key + "'", "a list");
    return it->second.values[0];
  }

  static std::vector<double> list(const std::map<std::string, Param>& ps, const std::string& key, std::size_t pos) {
    auto it = ps.find(key);
    if (it == ps.end()) throw ParseError(pos, "parameter '" + key + "'", "none");
    return it->second.values;
  }

  static int dimension(const std::map<std::string, Param>& ps) {
    const double n = scalar(ps, "n", 1.0);
    if (n != std::floor(n) || n < 1 || n > kMaxDimension) {
      throw ParseError(ps.at("n").pos, "an integer dimension n in [1, " + std::to_string(kMaxDimension) + "]",
                       std::to_string(n));
    }
    return static_cast<int>(n);
  }

  TestFunction spec() {
    const Token name = expect(Tok::Ident, "a function name (zero, ball, step, gauss, power, witness, shift, "
                                          "scale, abs, neg, trunc, sum)");
    if (!allowed_keys().count(name.text))
      throw ParseError(name.pos, "a function name (zero, ball, step, gauss, power, witness, shift, scale, abs, "
                                 "neg, trunc, sum)",
                       describe(name));
    // Semantic failures from the constructors are reported at the name's position.
    try {
      if (is_wrapper(name.text)) return wrapper(name);
      return atom(name);
    } catch (const ParseError&) {
      throw;
    } catch (const UsageError& e) {
      throw ParseError(name.pos, "valid parameters for '" + name.text + "'", e.what());
    }
  }

  TestFunction atom(const Token& name) {
    const auto ps = params(name.text);
    const int n = dimension(ps);
    if (name.text == "zero") return TestFunction::zero(n);
    if (name.text == "ball") return TestFunction::ball(n, scalar(ps, "a", 1.0), scalar(ps, "r", 1.0));
    if (name.text == "step") return TestFunction::radial_step(n, list(ps, "r", name.pos), list(ps, "a", name.pos));
    if (name.text == "gauss") return TestFunction::gaussian(n, scalar(ps, "a", 1.0));
    if (name.text == "power")
      return TestFunction::truncated_power(n, scalar(ps, "alpha", 0.5), scalar(ps, "r", 1.0), scalar(ps, "a", 1.0));
    if (!ps.count("p")) throw ParseError(name.pos, "parameter 'p' for 'witness'", "none");
    return TestFunction::weak_lp_witness(n, scalar(ps, "p", 1.0), scalar(ps, "a", 1.0));
  }

  TestFunction wrapper(const Token& name) {
    expect(Tok::LParen, "'(' after '" + name.text + "'");
    const auto ps = params(name.text);
    TestFunction inner = spec();
    if (name.text == "sum") {
      TestFunction second = spec();
      expect(Tok::RParen, "')' closing 'sum('");
      return TestFunction::sum(std::move(inner), std::move(second));
    }
    expect(Tok::RParen, "')' closing '" + name.text + "('");
    if (name.text == "shift") return TestFunction::shifted(list(ps, "by", name.pos), std::move(inner));
    if (name.text == "scale") return TestFunction::scaled(scalar(ps, "c", 1.0), std::move(inner), scalar(ps, "d", 1.0));
    if (name.text == "abs") return TestFunction::abs_value(std::move(inner));
    if (name.text == "neg") return TestFunction::negated(std::move(inner));
    if (!ps.count("r")) throw ParseError(name.pos, "parameter 'r' for 'trunc'", "none");
    return TestFunction::truncated(scalar(ps, "r", 1.0), std::move(inner));
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

}  // namespace

TestFunction parse_function(std::string_view spec) { return Parser(spec).parse(); }

}  // namespace levelset
