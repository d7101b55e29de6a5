#pragma once

// Tokenizer shared by the model, scenario, payload and automaton readers.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cloudadl::detail {

enum class Tok { Ident, Integer, String, Punct, Arrow, Op, End, Error };

struct Token {
  Tok kind = Tok::End;
  std::string text;  // identifier, punctuation, operator, unescaped string, or error message
  std::int64_t integer = 0;
  int line = 1;
  int column = 1;

  bool is(Tok k, std::string_view t) const { return kind == k && text == t; }
  bool punct(char c) const { return kind == Tok::Punct && text.size() == 1 && text[0] == c; }
};

struct LexOptions {
  bool hashComments = false;  // `#` starts a comment in addition to `//`
  int firstLine = 1;
  int firstColumn = 1;
};

// Always ends with an End token; stops at the first Error token.
std::vector<Token> tokenize(std::string_view text, LexOptions options = {});

std::string describe(const Token& t);
std::string quote(std::string_view text);

// Cursor over a token vector with small helpers for recursive descent.
class TokenCursor {
 public:
  explicit TokenCursor(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == Tok::End; }
  bool accept_punct(char c) {
    if (!peek().punct(c)) return false;
    next();
    return true;
  }
  bool accept_ident(std::string_view word) {
    if (!peek().is(Tok::Ident, word)) return false;
    next();
    return true;
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace cloudadl::detail
