#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "minivl/ast.hpp"
#include "minivl/lexer.hpp"

namespace minivl {

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line), message_(msg) {}
  int line() const { return line_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  std::string message_;
};

// Parses a preprocessed token stream into modules. Throws SyntaxError.
ast::SourceFile parse(const std::vector<Token>& tokens);

// tokenize + preprocess + parse. TokenizeError is rethrown as SyntaxError.
ast::SourceFile parse_source(std::string_view source);

}  // namespace minivl
