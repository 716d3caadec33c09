#pragma once

#include <cctype>
#include <charconv>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "msa/ppl/errors.hpp"

namespace msa::ppl {

enum class DiagnosticKind { Lex, Syntax };

struct ParseDiagnostic {
  DiagnosticKind kind = DiagnosticKind::Syntax;
  std::string message;
  std::uint32_t line = 1;
  std::uint32_t column = 1;

  std::string to_string() const {
    return std::string(kind == DiagnosticKind::Lex ? "lex" : "syntax") + " error at " +
           std::to_string(line) + ":" + std::to_string(column) + ": " + message;
  }
};

enum class TokenKind {
  Ident, Number, String,
  KwVar, KwFunction, KwReturn, KwIf, KwElse, KwTrue, KwFalse,
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Comma, Colon, Semicolon, Question, Assign,
  Plus, Minus, Star, Slash, Percent,
  Lt, Le, Gt, Ge, EqEq, NotEq, AndAnd, OrOr, Not,
  Eof,
};

struct Token {
  TokenKind kind = TokenKind::Eof;
  std::string_view text;
  double number = 0;      // Number tokens
  std::string string;     // String tokens, unescaped
  Span span;
};

// Thrown internally by lexer/parser; converted to ParseDiagnostic at the API
// boundary.
struct ParseAbort {
  ParseDiagnostic diagnostic;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> tokenize() {
    std::vector<Token> out;
    for (;;) {
      Token t = next();
      bool eof = t.kind == TokenKind::Eof;
      out.push_back(std::move(t));
      if (eof) break;
    }
    return out;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;

  [[noreturn]] void fail(const std::string& msg, std::uint32_t line, std::uint32_t col) {
    throw ParseAbort{{DiagnosticKind::Lex, msg, line, col}};
  }

  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_trivia() {
    for (;;) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (peek() != '\n' && peek() != '\0') advance();
      } else {
        break;
      }
    }
  }

  Token make(TokenKind kind, std::size_t begin, std::uint32_t line, std::uint32_t col) {
    Token t;
    t.kind = kind;
    t.text = src_.substr(begin, pos_ - begin);
    t.span = {static_cast<std::uint32_t>(begin), static_cast<std::uint32_t>(pos_), line, col};
    return t;
  }

  Token next() {
    skip_trivia();
    std::size_t begin = pos_;
    std::uint32_t line = line_, col = col_;
    if (pos_ >= src_.size()) return make(TokenKind::Eof, begin, line, col);

    char c = advance();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') advance();
      Token t = make(TokenKind::Ident, begin, line, col);
      if (t.text == "var") t.kind = TokenKind::KwVar;
      else if (t.text == "function") t.kind = TokenKind::KwFunction;
      else if (t.text == "return") t.kind = TokenKind::KwReturn;
      else if (t.text == "if") t.kind = TokenKind::KwIf;
      else if (t.text == "else") t.kind = TokenKind::KwElse;
      else if (t.text == "true") t.kind = TokenKind::KwTrue;
      else if (t.text == "false") t.kind = TokenKind::KwFalse;
      return t;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
        advance();
        while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
      }
      if (peek() == 'e' || peek() == 'E') {
        std::size_t mark = pos_;
        advance();
        if (peek() == '+' || peek() == '-') advance();
        if (!std::isdigit(static_cast<unsigned char>(peek()))) {
          pos_ = mark;  // not an exponent; leave 'e' for the next token
        } else {
          while (std::isdigit(static_cast<unsigned char>(peek()))) advance();
        }
      }
      Token t = make(TokenKind::Number, begin, line, col);
      double value = 0;
      auto text = t.text;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc() || p != text.data() + text.size())
        fail("malformed number literal '" + std::string(text) + "'", line, col);
      t.number = value;
      return t;
    }
    if (c == '\'') {
      std::string value;
      for (;;) {
        if (pos_ >= src_.size()) fail("unterminated string literal", line, col);
        char d = advance();
        if (d == '\'') break;
        if (d == '\n') fail("newline inside string literal", line, col);
        if (d == '\\') {
          if (pos_ >= src_.size()) fail("unterminated string literal", line, col);
          char e = advance();
          switch (e) {
            case '\'': value.push_back('\''); break;
            case '\\': value.push_back('\\'); break;
            case 'n': value.push_back('\n'); break;
            case 't': value.push_back('\t'); break;
            default: fail(std::string("unknown escape '\\") + e + "'", line, col);
          }
        } else {
          value.push_back(d);
        }
      }
      Token t = make(TokenKind::String, begin, line, col);
      t.string = std::move(value);
      return t;
    }

    auto two = [&](char second, TokenKind kind) -> std::optional<Token> {
      if (peek() == second) {
        advance();
        return make(kind, begin, line, col);
      }
      return std::nullopt;
    };

    switch (c) {
      case '(': return make(TokenKind::LParen, begin, line, col);
      case ')': return make(TokenKind::RParen, begin, line, col);
      case '{': return make(TokenKind::LBrace, begin, line, col);
      case '}': return make(TokenKind::RBrace, begin, line, col);
      case '[': return make(TokenKind::LBracket, begin, line, col);
      case ']': return make(TokenKind::RBracket, begin, line, col);
      case ',': return make(TokenKind::Comma, begin, line, col);
      case ':': return make(TokenKind::Colon, begin, line, col);
      case ';': return make(TokenKind::Semicolon, begin, line, col);
      case '?': return make(TokenKind::Question, begin, line, col);
      case '+': return make(TokenKind::Plus, begin, line, col);
      case '-': return make(TokenKind::Minus, begin, line, col);
      case '*': return make(TokenKind::Star, begin, line, col);
      case '/': return make(TokenKind::Slash, begin, line, col);
      case '%': return make(TokenKind::Percent, begin, line, col);
      case '<': if (auto t = two('=', TokenKind::Le)) return *t; return make(TokenKind::Lt, begin, line, col);
      case '>': if (auto t = two('=', TokenKind::Ge)) return *t; return make(TokenKind::Gt, begin, line, col);
      case '=':
        if (auto t = two('=', TokenKind::EqEq)) return *t;
        return make(TokenKind::Assign, begin, line, col);
      case '!':
        if (auto t = two('=', TokenKind::NotEq)) return *t;
        return make(TokenKind::Not, begin, line, col);
      case '&':
        if (auto t = two('&', TokenKind::AndAnd)) return *t;
        fail("stray '&' (did you mean '&&'?)", line, col);
      case '|':
        if (auto t = two('|', TokenKind::OrOr)) return *t;
        fail("stray '|' (did you mean '||'?)", line, col);
      default:
        fail("unexpected character '" + std::string(1, c) + "'", line, col);
    }
  }
};

}  // namespace msa::ppl
