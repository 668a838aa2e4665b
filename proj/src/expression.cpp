#include <cctype>
#include <charconv>
#include <cmath>
#include <string>

#include "plc/cli.hpp"
#include "plc/error.hpp"

namespace plc::cli {
namespace {

// expr   := term (('+' | '-') term)*
// term   := unary (('*' | '/') unary)*
// unary  := '-' unary | primary
// primary:= number | 'sqrt' '(' expr ')' | '(' expr ')'
class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  double parse() {
    const double v = expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("bad expression '" + std::string(text_) + "': " + what + " at offset " +
                      std::to_string(pos_));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  double expr() {
    double v = term();
    for (;;) {
      if (accept('+')) {
        v += term();
      } else if (accept('-')) {
        v -= term();
      } else {
        return v;
      }
    }
  }

  double term() {
    double v = unary();
    for (;;) {
      if (accept('*')) {
        v *= unary();
      } else if (accept('/')) {
        const double d = unary();
        if (d == 0.0) fail("division by zero");
        v /= d;
      } else {
        return v;
      }
    }
  }

  double unary() {
    if (accept('-')) return -unary();
    return primary();
  }

  double primary() {
    skip_space();
    if (accept('(')) {
      const double v = expr();
      if (!accept(')')) fail("missing ')'");
      return v;
    }
    if (text_.substr(pos_, 4) == "sqrt") {
      pos_ += 4;
      if (!accept('(')) fail("expected '(' after sqrt");
      const double v = expr();
      if (!accept(')')) fail("missing ')'");
      if (v < 0.0) fail("sqrt of a negative number");
      return std::sqrt(v);
    }
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr == begin) fail("expected a number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return v;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

double evaluate_expression(std::string_view text) {
  if (trim(text).empty()) throw ConfigError("empty expression");
  return Parser(text).parse();
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || (text[i] == ',' && depth == 0)) {
      const auto item = trim(text.substr(start, i - start));
      if (item.empty()) throw ConfigError("empty entry in list '" + std::string(text) + "'");
      out.emplace_back(item);
      start = i + 1;
    } else if (text[i] == '(') {
      ++depth;
    } else if (text[i] == ')') {
      --depth;
    }
  }
  return out;
}

double parse_kappa(std::string_view text, std::optional<double> kappa_bar) {
  const auto t = trim(text);
  if (t == "bar") {
    if (!kappa_bar) throw ConfigError("kappa 'bar' needs a solved eigenvalue");
    return *kappa_bar;
  }
  const double v = evaluate_expression(t);
  if (!(v > 0.0 && v <= 1.0)) {
    throw ConfigError("kappa '" + std::string(t) + "' = " + std::to_string(v) + " outside (0, 1]");
  }
  return v;
}

}  // namespace plc::cli
