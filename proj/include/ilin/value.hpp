#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace ilin {

/// Opaque tagged payload carried by events, vertices and spec states.
///
/// A value is one of: nothing, an integer, a symbol, a finite set of values or
/// a tuple of values. Sets are kept sorted and duplicate-free so equality is
/// structural. The textual form is `42`, `ok`, `{1,2}`, `(0,{1,2})`, and the
/// empty string for nothing.
class Value {
 public:
  enum class Kind : std::uint8_t { None, Int, Symbol, Set, Tuple };

  Value() = default;

  static Value none() { return {}; }
  static Value integer(std::int64_t v);
  static Value symbol(std::string name);
  static Value set(std::vector<Value> elems);
  static Value tuple(std::vector<Value> elems);
  static Value pair(std::int64_t a, std::int64_t b);
  static Value int_set(std::initializer_list<std::int64_t> elems);

  Kind kind() const noexcept { return kind_; }
  bool is_none() const noexcept { return kind_ == Kind::None; }
  bool is_int() const noexcept { return kind_ == Kind::Int; }
  bool is_symbol() const noexcept { return kind_ == Kind::Symbol; }
  bool is_set() const noexcept { return kind_ == Kind::Set; }
  bool is_tuple() const noexcept { return kind_ == Kind::Tuple; }

  std::int64_t as_int() const;
  const std::string& as_symbol() const;
  /// Elements of a set (sorted) or a tuple (in order).
  const std::vector<Value>& elems() const;
  const Value& at(std::size_t i) const;

  bool contains(const Value& v) const;
  bool subset_of(const Value& other) const;
  Value set_union(const Value& other) const;
  Value set_difference(const Value& other) const;
  Value with(const Value& elem) const;
  Value without(const Value& elem) const;
  std::size_t size() const { return elems().size(); }

  std::string to_string() const;
  std::size_t hash() const noexcept;

  friend std::strong_ordering operator<=>(const Value& a, const Value& b);
  friend bool operator==(const Value& a, const Value& b) { return (a <=> b) == 0; }

 private:
  Kind kind_ = Kind::None;
  std::int64_t num_ = 0;
  std::string sym_;
  std::vector<Value> elems_;
};

/// Parses the textual form of a value. Throws Error(MalformedEvent) on bad input.
Value parse_value(std::string_view text);

/// Incremental parser shared by the history and task readers.
class ValueReader {
 public:
  explicit ValueReader(std::string_view text) : text_(text) {}

  Value read();
  void skip_space();
  bool at_end();
  bool peek(char c);
  bool consume(char c);
  void expect(char c);
  std::string read_identifier();
  std::int64_t read_int();
  std::size_t position() const { return pos_; }
  std::string_view rest() const { return text_.substr(pos_); }

 private:
  [[noreturn]] void fail(const std::string& msg) const;

  std::string_view text_;
  std::size_t pos_ = 0;
};

struct ValueHash {
  std::size_t operator()(const Value& v) const noexcept { return v.hash(); }
};

}  // namespace ilin
