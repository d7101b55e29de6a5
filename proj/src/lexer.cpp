#include "lexer.hpp"

#include <cctype>
#include <charconv>

namespace cloudadl::detail {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::vector<Token> tokenize(std::string_view text, LexOptions options) {
  std::vector<Token> out;
  int line = options.firstLine;
  int col = options.firstColumn;
  std::size_t i = 0;

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto error = [&](std::string message) {
    Token t;
    t.kind = Tok::Error;
    t.text = std::move(message);
    t.line = line;
    t.column = col;
    out.push_back(std::move(t));
    Token end;
    end.line = line;
    end.column = col;
    out.push_back(end);
    return out;
  };

  while (i < text.size()) {
    char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    if (c == '#' && options.hashComments) {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }

    Token t;
    t.line = line;
    t.column = col;

    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(text.substr(i, j - i));
      advance(j - i);
    } else if (digit(c) || (c == '-' && i + 1 < text.size() && digit(text[i + 1]))) {
      std::size_t j = i + 1;
      while (j < text.size() && digit(text[j])) ++j;
      std::string_view lexeme = text.substr(i, j - i);
      auto [ptr, ec] = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), t.integer);
      if (ec != std::errc{} || ptr != lexeme.data() + lexeme.size())
        return error("integer literal out of range");
      t.kind = Tok::Integer;
      t.text = std::string(lexeme);
      advance(j - i);
    } else if (c == '"') {
      std::string value;
      std::size_t j = i + 1;
      bool closed = false;
      while (j < text.size()) {
        char d = text[j];
        if (d == '"') {
          closed = true;
          break;
        }
        if (d == '\n') break;
        if (d == '\\') {
          if (j + 1 >= text.size()) break;
          char e = text[j + 1];
          switch (e) {
            case 'n': value.push_back('\n'); break;
            case 't': value.push_back('\t'); break;
            case '"': value.push_back('"'); break;
            case '\\': value.push_back('\\'); break;
            default: return error(std::string("unknown escape \\") + e);
          }
          j += 2;
          continue;
        }
        value.push_back(d);
        ++j;
      }
      if (!closed) return error("unterminated string literal");
      t.kind = Tok::String;
      t.text = std::move(value);
      advance(j + 1 - i);
    } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
      t.kind = Tok::Arrow;
      t.text = "->";
      advance(2);
    } else if (c == '=' || c == '!' || c == '<' || c == '>') {
      bool twoChar = i + 1 < text.size() && text[i + 1] == '=';
      if (c == '!' && !twoChar) return error("unexpected character '!'");
      if (c == '=' && !twoChar) {
        t.kind = Tok::Punct;
        t.text = "=";
        advance(1);
      } else {
        t.kind = Tok::Op;
        t.text = std::string(text.substr(i, twoChar ? 2 : 1));
        advance(twoChar ? 2 : 1);
      }
    } else if (std::string_view("{}()[];:,.*$/").find(c) != std::string_view::npos) {
      t.kind = Tok::Punct;
      t.text = std::string(1, c);
      advance(1);
    } else {
      return error(std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(t));
  }

  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

std::string quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::Ident: return "identifier '" + t.text + "'";
    case Tok::Integer: return "integer " + t.text;
    case Tok::String: return "string " + quote(t.text);
    case Tok::Punct:
    case Tok::Arrow:
    case Tok::Op: return "'" + t.text + "'";
    case Tok::End: return "end of input";
    case Tok::Error: return t.text;
  }
  return "token";
}

}  // namespace cloudadl::detail
