#include "ilin/value.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

#include "ilin/error.hpp"

namespace ilin {

Value Value::integer(std::int64_t v) {
  Value out;
  out.kind_ = Kind::Int;
  out.num_ = v;
  return out;
}

Value Value::symbol(std::string name) {
  Value out;
  out.kind_ = Kind::Symbol;
  out.sym_ = std::move(name);
  return out;
}

Value Value::set(std::vector<Value> elems) {
  std::sort(elems.begin(), elems.end());
  elems.erase(std::unique(elems.begin(), elems.end()), elems.end());
  Value out;
  out.kind_ = Kind::Set;
  out.elems_ = std::move(elems);
  return out;
}

Value Value::tuple(std::vector<Value> elems) {
  Value out;
  out.kind_ = Kind::Tuple;
  out.elems_ = std::move(elems);
  return out;
}

Value Value::pair(std::int64_t a, std::int64_t b) { return tuple({integer(a), integer(b)}); }

Value Value::int_set(std::initializer_list<std::int64_t> elems) {
  std::vector<Value> out;
  for (auto e : elems) out.push_back(integer(e));
  return set(std::move(out));
}

std::int64_t Value::as_int() const {
  if (kind_ != Kind::Int) throw Error(ErrorKind::BadParams, "value " + to_string() + " is not an integer");
  return num_;
}

const std::string& Value::as_symbol() const {
  if (kind_ != Kind::Symbol) throw Error(ErrorKind::BadParams, "value " + to_string() + " is not a symbol");
  return sym_;
}

const std::vector<Value>& Value::elems() const {
  if (kind_ != Kind::Set && kind_ != Kind::Tuple) {
    throw Error(ErrorKind::BadParams, "value " + to_string() + " has no elements");
  }
  return elems_;
}

const Value& Value::at(std::size_t i) const {
  const auto& e = elems();
  if (i >= e.size()) throw Error(ErrorKind::BadParams, "index out of range in " + to_string());
  return e[i];
}

bool Value::contains(const Value& v) const {
  const auto& e = elems();
  if (kind_ == Kind::Set) return std::binary_search(e.begin(), e.end(), v);
  return std::find(e.begin(), e.end(), v) != e.end();
}

bool Value::subset_of(const Value& other) const {
  return std::includes(other.elems().begin(), other.elems().end(), elems().begin(), elems().end());
}

Value Value::set_union(const Value& other) const {
  std::vector<Value> out;
  std::set_union(elems().begin(), elems().end(), other.elems().begin(), other.elems().end(),
                 std::back_inserter(out));
  Value v;
  v.kind_ = Kind::Set;
  v.elems_ = std::move(out);
  return v;
}

Value Value::set_difference(const Value& other) const {
  std::vector<Value> out;
  std::set_difference(elems().begin(), elems().end(), other.elems().begin(), other.elems().end(),
                      std::back_inserter(out));
  Value v;
  v.kind_ = Kind::Set;
  v.elems_ = std::move(out);
  return v;
}

Value Value::with(const Value& elem) const { return set_union(set({elem})); }

Value Value::without(const Value& elem) const { return set_difference(set({elem})); }

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
  switch (a.kind_) {
    case Value::Kind::None: return std::strong_ordering::equal;
    case Value::Kind::Int: return a.num_ <=> b.num_;
    case Value::Kind::Symbol: return a.sym_.compare(b.sym_) <=> 0;
    case Value::Kind::Set:
    case Value::Kind::Tuple: {
      std::size_t n = std::min(a.elems_.size(), b.elems_.size());
      for (std::size_t i = 0; i < n; ++i) {
        auto c = a.elems_[i] <=> b.elems_[i];
        if (c != 0) return c;
      }
      return a.elems_.size() <=> b.elems_.size();
    }
  }
  return std::strong_ordering::equal;
}

std::string Value::to_string() const {
  switch (kind_) {
    case Kind::None: return "";
    case Kind::Int: return std::to_string(num_);
    case Kind::Symbol: return sym_;
    case Kind::Set:
    case Kind::Tuple: {
      std::string out(1, kind_ == Kind::Set ? '{' : '(');
      for (std::size_t i = 0; i < elems_.size(); ++i) {
        if (i) out += ',';
        out += elems_[i].to_string();
      }
      out += kind_ == Kind::Set ? '}' : ')';
      return out;
    }
  }
  return "";
}

std::size_t Value::hash() const noexcept {
  std::size_t h = static_cast<std::size_t>(kind_) * 0x9e3779b97f4a7c15ULL;
  auto mix = [&h](std::size_t x) { h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  switch (kind_) {
    case Kind::None: break;
    case Kind::Int: mix(std::hash<std::int64_t>{}(num_)); break;
    case Kind::Symbol: mix(std::hash<std::string>{}(sym_)); break;
    case Kind::Set:
    case Kind::Tuple:
      for (const auto& e : elems_) mix(e.hash());
      break;
  }
  return h;
}

void ValueReader::fail(const std::string& msg) const {
  std::ostringstream os;
  os << msg << " at column " << (pos_ + 1) << " in '" << text_ << "'";
  throw Error(ErrorKind::MalformedEvent, os.str());
}

void ValueReader::skip_space() {
  while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
}

bool ValueReader::at_end() {
  skip_space();
  return pos_ >= text_.size();
}

bool ValueReader::peek(char c) {
  skip_space();
  return pos_ < text_.size() && text_[pos_] == c;
}

bool ValueReader::consume(char c) {
  if (!peek(c)) return false;
  ++pos_;
  return true;
}

void ValueReader::expect(char c) {
  if (!consume(c)) fail(std::string("expected '") + c + "'");
}

std::string ValueReader::read_identifier() {
  skip_space();
  std::size_t start = pos_;
  if (pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
    ++pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
  }
  if (start == pos_) fail("expected identifier");
  return std::string(text_.substr(start, pos_ - start));
}

std::int64_t ValueReader::read_int() {
  skip_space();
  std::size_t start = pos_;
  if (pos_ < text_.size() && text_[pos_] == '-') ++pos_;
  std::size_t digits = pos_;
  while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  if (digits == pos_) {
    pos_ = start;
    fail("expected integer");
  }
  try {
    return std::stoll(std::string(text_.substr(start, pos_ - start)));
  } catch (const std::out_of_range&) {
    pos_ = start;
    fail("integer out of range");
  }
}

Value ValueReader::read() {
  skip_space();
  if (pos_ >= text_.size()) fail("expected value");
  char c = text_[pos_];
  if (c == '{' || c == '(') {
    ++pos_;
    char close = c == '{' ? '}' : ')';
    std::vector<Value> elems;
    if (!consume(close)) {
      do {
        elems.push_back(read());
      } while (consume(','));
      expect(close);
    }
    return c == '{' ? Value::set(std::move(elems)) : Value::tuple(std::move(elems));
  }
  if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) return Value::integer(read_int());
  if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return Value::symbol(read_identifier());
  fail("unexpected character");
}

Value parse_value(std::string_view text) {
  ValueReader reader(text);
  if (reader.at_end()) return Value::none();
  Value v = reader.read();
  if (!reader.at_end()) throw Error(ErrorKind::MalformedEvent, "trailing input after value in '" + std::string(text) + "'");
  return v;
}

}  // namespace ilin
