#include "minivl/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <unordered_set>

namespace minivl {

namespace {

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool based_digit(char c) {
  return std::isxdigit(static_cast<unsigned char>(c)) || c == 'x' || c == 'X' || c == 'z' ||
         c == 'Z' || c == '?' || c == '_';
}

// Longest first.
constexpr std::array kOperators = {
    "<<<", ">>>", "===", "!==", "==", "!=", "<=", ">=", "&&", "||", "<<", ">>", "~&", "~|",
    "~^",  "^~",  "->",  "+:",  "-:", "**", "(",  ")",  "[",  "]",
    "{",   "}",   ";",   ",",   ".",  ":",  "?",  "#",  "@",  "=",  "+",  "-",  "*",  "/",
    "%",   "&",   "|",   "^",   "~",  "!",  "<",  ">",
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space_and_comments();
      if (pos_ >= src_.size()) break;
      out.push_back(next());
    }
    Token eof;
    eof.kind = TokenKind::EndOfFile;
    eof.line = line_;
    out.push_back(eof);
    return out;
  }

 private:
  char peek(size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '\n') {
        ++line_;
        ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
        ++pos_;
      } else if (c == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else if (c == '/' && peek(1) == '*') {
        int start = line_;
        pos_ += 2;
        while (true) {
          if (pos_ + 1 >= src_.size()) throw TokenizeError(start, "unterminated block comment");
          if (src_[pos_] == '*' && src_[pos_ + 1] == '/') {
            pos_ += 2;
            break;
          }
          if (src_[pos_] == '\n') ++line_;
          ++pos_;
        }
      } else if (c == '(' && peek(1) == '*' && peek(2) != ')') {
        // attribute instance (* ... *)
        int start = line_;
        pos_ += 2;
        while (true) {
          if (pos_ + 1 >= src_.size()) throw TokenizeError(start, "unterminated attribute");
          if (src_[pos_] == '*' && src_[pos_ + 1] == ')') {
            pos_ += 2;
            break;
          }
          if (src_[pos_] == '\n') ++line_;
          ++pos_;
        }
      } else {
        break;
      }
    }
  }

  Token make(TokenKind kind, size_t start) {
    Token t;
    t.kind = kind;
    t.text = std::string(src_.substr(start, pos_ - start));
    t.line = line_;
    return t;
  }

  Token next() {
    size_t start = pos_;
    char c = src_[pos_];

    if (ident_start(c)) {
      while (ident_char(peek())) ++pos_;
      return make(TokenKind::Identifier, start);
    }
    if (c == '\\') {
      ++pos_;
      while (pos_ < src_.size() && !std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      Token t = make(TokenKind::Identifier, start + 1);
      if (t.text.empty()) throw TokenizeError(line_, "empty escaped identifier");
      return t;
    }
    if (c == '$') {
      ++pos_;
      if (!ident_start(peek())) throw TokenizeError(line_, "stray '$'");
      while (ident_char(peek())) ++pos_;
      return make(TokenKind::SystemIdentifier, start);
    }
    if (c == '`') {
      ++pos_;
      if (!ident_start(peek())) throw TokenizeError(line_, "stray '`'");
      size_t name_start = pos_;
      while (ident_char(peek())) ++pos_;
      Token t;
      t.kind = TokenKind::Directive;
      t.text = std::string(src_.substr(name_start, pos_ - name_start));
      t.line = line_;
      static const std::unordered_set<std::string> kLineDirectives = {
          "define", "timescale", "include", "default_nettype", "ifdef", "ifndef",
          "elsif", "undef", "line", "resetall", "celldefine", "endcelldefine"};
      if (kLineDirectives.count(t.text)) {
        size_t rest_start = pos_;
        // `define bodies may continue over backslash-newline.
        while (pos_ < src_.size() && src_[pos_] != '\n') {
          if (src_[pos_] == '\\' && peek(1) == '\n') {
            pos_ += 2;
            ++line_;
            continue;
          }
          if (src_[pos_] == '/' && peek(1) == '/') break;
          ++pos_;
        }
        t.rest = std::string(src_.substr(rest_start, pos_ - rest_start));
        std::replace(t.rest.begin(), t.rest.end(), '\n', ' ');
        std::erase(t.rest, '\\');
      }
      return t;
    }
    if (c == '"') {
      ++pos_;
      std::string value;
      while (true) {
        if (pos_ >= src_.size() || src_[pos_] == '\n') throw TokenizeError(line_, "unterminated string");
        char d = src_[pos_++];
        if (d == '"') break;
        if (d == '\\' && pos_ < src_.size()) {
          char e = src_[pos_++];
          switch (e) {
            case 'n': value += '\n'; break;
            case 't': value += '\t'; break;
            case '\\': value += '\\'; break;
            case '"': value += '"'; break;
            default: value += e; break;
          }
          continue;
        }
        value += d;
      }
      Token t;
      t.kind = TokenKind::String;
      t.text = value;
      t.line = line_;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '\'' && std::string_view("bBoOdDhHsS").find(peek(1)) != std::string_view::npos)) {
      return number(start);
    }
    for (std::string_view op : kOperators) {
      if (src_.substr(pos_, op.size()) == op) {
        pos_ += op.size();
        return make(TokenKind::Operator, start);
      }
    }
    if (c == '\'') {
      // '0 '1 'x 'z fill literals
      char d = peek(1);
      if (d == '0' || d == '1' || d == 'x' || d == 'X' || d == 'z' || d == 'Z') {
        pos_ += 2;
        return make(TokenKind::Number, start);
      }
    }
    throw TokenizeError(line_, std::string("unexpected character '") +
                                   (std::isprint(static_cast<unsigned char>(c)) ? std::string(1, c)
                                                                                : "\\x" + hex(c)) +
                                   "'");
  }

  static std::string hex(char c) {
    static const char* digits = "0123456789abcdef";
    auto u = static_cast<unsigned char>(c);
    return {digits[u >> 4], digits[u & 15]};
  }

  Token number(size_t start) {
    std::string text;
    while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_') text += src_[pos_++];
    // real literal
    if (!text.empty() && peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
      text += src_[pos_++];
      while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_') text += src_[pos_++];
      Token t = make(TokenKind::Number, start);
      t.text = text;
      return t;
    }
    // optional whitespace between size and base
    size_t save = pos_;
    int save_line = line_;
    while (peek() == ' ' || peek() == '\t') ++pos_;
    if (peek() == '\'' && std::string_view("bBoOdDhHsS").find(peek(1)) != std::string_view::npos) {
      text += src_[pos_++];
      if (peek() == 's' || peek() == 'S') text += src_[pos_++];
      if (std::string_view("bBoOdDhH").find(peek()) == std::string_view::npos)
        throw TokenizeError(line_, "malformed based literal");
      text += src_[pos_++];
      while (peek() == ' ' || peek() == '\t') ++pos_;
      if (!based_digit(peek())) throw TokenizeError(line_, "based literal without digits");
      while (based_digit(peek())) text += src_[pos_++];
    } else {
      pos_ = save;
      line_ = save_line;
    }
    Token t;
    t.kind = TokenKind::Number;
    t.text = text;
    t.line = line_;
    return t;
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

std::vector<Token> preprocess(const std::vector<Token>& tokens) {
  std::map<std::string, std::vector<Token>, std::less<>> macros;
  // Each entry: (this branch active, some branch already taken)
  std::vector<std::pair<bool, bool>> cond;
  auto active = [&] {
    return std::all_of(cond.begin(), cond.end(), [](auto& c) { return c.first; });
  };
  auto first_word = [](const std::string& rest) {
    size_t b = rest.find_first_not_of(" \t");
    if (b == std::string::npos) return std::string();
    size_t e = b;
    while (e < rest.size() && ident_char(rest[e])) ++e;
    return rest.substr(b, e - b);
  };

  std::vector<Token> out;
  std::vector<Token> pending(tokens.rbegin(), tokens.rend());
  int expansion_guard = 0;
  while (!pending.empty()) {
    Token t = std::move(pending.back());
    pending.pop_back();
    if (t.kind != TokenKind::Directive) {
      if (active()) out.push_back(std::move(t));
      continue;
    }
    const std::string& name = t.text;
    if (name == "ifdef" || name == "ifndef") {
      bool defined = macros.count(first_word(t.rest)) > 0;
      bool take = name == "ifdef" ? defined : !defined;
      cond.emplace_back(take, take);
    } else if (name == "elsif") {
      if (cond.empty()) throw TokenizeError(t.line, "`elsif without `ifdef");
      bool take = !cond.back().second && macros.count(first_word(t.rest)) > 0;
      cond.back() = {take, cond.back().second || take};
    } else if (name == "else") {
      if (cond.empty()) throw TokenizeError(t.line, "`else without `ifdef");
      cond.back() = {!cond.back().second, true};
    } else if (name == "endif") {
      if (cond.empty()) throw TokenizeError(t.line, "`endif without `ifdef");
      cond.pop_back();
    } else if (!active()) {
      continue;
    } else if (name == "define") {
      std::string macro = first_word(t.rest);
      if (macro.empty()) throw TokenizeError(t.line, "`define without a name");
      size_t after = t.rest.find(macro) + macro.size();
      if (after < t.rest.size() && t.rest[after] == '(')
        throw TokenizeError(t.line, "function-like macros are not supported");
      auto body = tokenize(t.rest.substr(after));
      body.pop_back();  // EOF
      for (auto& b : body) b.line = t.line;
      macros[macro] = std::move(body);
    } else if (name == "undef") {
      macros.erase(first_word(t.rest));
    } else if (name == "include") {
      throw TokenizeError(t.line, "`include is not supported");
    } else if (name == "timescale" || name == "default_nettype" || name == "resetall" ||
               name == "celldefine" || name == "endcelldefine" || name == "line") {
      continue;
    } else {
      auto it = macros.find(name);
      if (it == macros.end()) throw TokenizeError(t.line, "undefined macro `" + name);
      if (++expansion_guard > 100000) throw TokenizeError(t.line, "macro expansion too deep");
      for (auto rit = it->second.rbegin(); rit != it->second.rend(); ++rit) {
        Token copy = *rit;
        copy.line = t.line;
        pending.push_back(std::move(copy));
      }
    }
  }
  if (!cond.empty()) throw TokenizeError(out.empty() ? 0 : out.back().line, "missing `endif");
  if (out.empty() || out.back().kind != TokenKind::EndOfFile) {
    Token eof;
    eof.kind = TokenKind::EndOfFile;
    eof.line = out.empty() ? 1 : out.back().line;
    out.push_back(eof);
  }
  return out;
}

bool is_keyword(std::string_view word) {
  static const std::unordered_set<std::string_view> kKeywords = {
      "always",    "always_comb", "always_ff", "always_latch", "and",       "assign",
      "begin",     "buf",         "case",      "casex",        "casez",     "default",
      "defparam",  "disable",     "else",      "end",          "endcase",   "endfunction",
      "endgenerate", "endmodule", "endtask",   "for",          "forever",   "function",
      "generate",  "genvar",      "if",        "initial",      "inout",     "input",
      "integer",   "localparam",  "logic",     "module",       "nand",      "negedge",
      "nor",       "not",         "or",        "output",       "parameter", "posedge",
      "real",      "reg",         "repeat",    "signed",       "task",      "time",
      "tri",       "unsigned",    "wait",      "while",        "wire",      "xnor",
      "xor",       "bit",
  };
  return kKeywords.count(word) > 0;
}

}  // namespace minivl
