#include "toml_lite.hpp"

#include <cctype>
#include <charconv>
#include <vector>

namespace metallab::cli {

namespace {

class Reader {
public:
  explicit Reader(std::string_view text) : src_(text) {}

  Document run() {
    Document root = Document::object();
    Document* table = &root;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        table = &open_table(root);
      } else {
        read_pair(*table);
      }
      end_of_line();
    }
    return root;
  }

private:
  bool eof() const { return pos_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }

  char get() {
    const char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      line_start_ = pos_;
    }
    return c;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, pos_ - line_start_ + 1); }

  void skip_spaces() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) get();
  }

  void skip_comment() {
    if (peek() == '#') {
      while (!eof() && peek() != '\n') get();
    }
  }

  void skip_blank_lines() {
    while (!eof()) {
      skip_spaces();
      skip_comment();
      if (peek() == '\r') get();
      if (peek() == '\n') {
        get();
        continue;
      }
      break;
    }
  }

  /// Whitespace, comments and newlines inside arrays and inline tables.
  void skip_layout() {
    while (!eof()) {
      skip_spaces();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        get();
        continue;
      }
      break;
    }
  }

  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (peek() == '\r') get();
    if (eof()) return;
    if (peek() != '\n') fail(std::string("unexpected character '") + peek() + "' after value");
    get();
  }

  static bool bare_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }

  std::string read_key_part() {
    skip_spaces();
    if (peek() == '"') return read_string();
    std::string key;
    while (!eof() && bare_char(peek())) key.push_back(get());
    if (key.empty()) fail("expected a key");
    return key;
  }

  std::vector<std::string> read_dotted_key() {
    std::vector<std::string> parts{read_key_part()};
    skip_spaces();
    while (peek() == '.') {
      get();
      parts.push_back(read_key_part());
      skip_spaces();
    }
    return parts;
  }

  Document& open_table(Document& root) {
    get();  // '['
    if (peek() == '[') fail("arrays of tables are not supported");
    const std::vector<std::string> path = read_dotted_key();
    skip_spaces();
    if (peek() != ']') fail("expected ']' to close table header");
    get();
    Document* cur = &root;
    for (std::size_t i = 0; i < path.size(); ++i) {
      auto it = cur->find(path[i]);
      if (it == cur->end()) {
        (*cur)[path[i]] = Document::object();
        cur = &(*cur)[path[i]];
      } else {
        if (!it->is_object()) fail("key '" + path[i] + "' is not a table");
        cur = &*it;
      }
    }
    std::string joined;
    for (const auto& p : path) joined += (joined.empty() ? "" : ".") + p;
    for (const auto& t : opened_) {
      if (t == joined) fail("table [" + joined + "] defined twice");
    }
    opened_.push_back(joined);
    return *cur;
  }

  void read_pair(Document& table) {
    const std::vector<std::string> path = read_dotted_key();
    skip_spaces();
    if (peek() != '=') fail("expected '=' after key");
    get();
    skip_spaces();
    Document* cur = &table;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      auto it = cur->find(path[i]);
      if (it == cur->end()) {
        (*cur)[path[i]] = Document::object();
        cur = &(*cur)[path[i]];
      } else {
        if (!it->is_object()) fail("key '" + path[i] + "' is not a table");
        cur = &*it;
      }
    }
    if (cur->contains(path.back())) fail("duplicate key '" + path.back() + "'");
    (*cur)[path.back()] = read_value();
  }

  Document read_value() {
    const char c = peek();
    if (c == '"') return read_string();
    if (c == '[') return read_array();
    if (c == '{') return read_inline_table();
    if (src_.substr(pos_).starts_with("true")) {
      pos_ += 4;
      return true;
    }
    if (src_.substr(pos_).starts_with("false")) {
      pos_ += 5;
      return false;
    }
    if (c == '+' || c == '-' || c == '.' || std::isdigit(static_cast<unsigned char>(c))) return read_number();
    if (eof() || c == '\n') fail("missing value");
    fail(std::string("unexpected character '") + c + "' at start of value");
  }

  std::string read_string() {
    get();  // opening quote
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = get();
      if (c == '"') break;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (eof()) fail("unterminated string");
      const char e = get();
      switch (e) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        default: fail(std::string("unsupported escape '\\") + e + "'");
      }
    }
    return out;
  }

  Document read_number() {
    const std::size_t start = pos_;
    while (!eof()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.' || c == '_') {
        get();
      } else {
        break;
      }
    }
    std::string tok;
    for (char c : src_.substr(start, pos_ - start)) {
      if (c != '_') tok.push_back(c);
    }
    const bool is_float = tok.find_first_of(".eE") != std::string::npos;
    const char* first = tok.data() + (tok.front() == '+' ? 1 : 0);
    const char* last = tok.data() + tok.size();
    if (!is_float) {
      long long v = 0;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec == std::errc() && ptr == last) return v;
    } else {
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec == std::errc() && ptr == last) return v;
    }
    pos_ = start;
    fail("malformed number '" + tok + "'");
  }

  Document read_array() {
    get();  // '['
    Document arr = Document::array();
    skip_layout();
    while (peek() != ']') {
      if (eof()) fail("unterminated array");
      arr.push_back(read_value());
      skip_layout();
      if (peek() == ',') {
        get();
        skip_layout();
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
    get();
    return arr;
  }

  Document read_inline_table() {
    get();  // '{'
    Document tbl = Document::object();
    skip_spaces();
    while (peek() != '}') {
      if (eof() || peek() == '\n') fail("unterminated inline table");
      read_pair(tbl);
      skip_spaces();
      if (peek() == ',') {
        get();
        skip_spaces();
      } else if (peek() != '}') {
        fail("expected ',' or '}' in inline table");
      }
    }
    get();
    return tbl;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t line_start_ = 0;
  std::vector<std::string> opened_;
};

}  // namespace

Document parse_toml(std::string_view text) { return Reader(text).run(); }

}  // namespace metallab::cli
