#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace minivl {

enum class TokenKind {
  Identifier,
  SystemIdentifier,  // $display, $time, ...
  Number,
  String,
  Directive,  // `timescale, `define, ... ; text holds the directive name
  Operator,
  EndOfFile,
};

struct Token {
  TokenKind kind = TokenKind::EndOfFile;
  std::string text;
  int line = 0;
  // For directives: the remainder of the source line after the name.
  std::string rest;

  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool is_op(std::string_view t) const { return kind == TokenKind::Operator && text == t; }
  bool is_ident(std::string_view t) const { return kind == TokenKind::Identifier && text == t; }
};

class TokenizeError : public std::runtime_error {
 public:
  TokenizeError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line), message_(msg) {}
  int line() const { return line_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  std::string message_;
};

// Splits Verilog source into tokens. Comments are dropped; compiler
// directives are kept as Directive tokens so callers decide whether to
// preprocess or ignore them. Throws TokenizeError on characters that cannot
// start any token, unterminated strings and unterminated block comments.
std::vector<Token> tokenize(std::string_view source);

// Applies `define / `undef / `ifdef / `ifndef / `else / `elsif / `endif and
// object-like macro expansion. `timescale, `default_nettype, `resetall and
// `celldefine family are dropped. `include is rejected.
std::vector<Token> preprocess(const std::vector<Token>& tokens);

bool is_keyword(std::string_view word);

}  // namespace minivl
