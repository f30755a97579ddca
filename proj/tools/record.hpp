#pragma once

#include <cmath>
#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace aloha::cli {

/// Fixed 12-significant-digit float formatting; the reproducibility contract
/// of every command rests on this plus insertion-ordered keys.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
    }
  }
  out += "\"";
  return out;
}

/// Insertion-ordered JSON value tree.
class Record {
 public:
  Record() : kind_(Kind::Object) {}

  static Record null() { return Record(Kind::Null); }
  static Record boolean(bool b) {
    Record r(Kind::Bool);
    r.scalar_ = b ? "true" : "false";
    return r;
  }
  static Record integer(long long i) {
    Record r(Kind::Scalar);
    r.scalar_ = std::to_string(i);
    return r;
  }
  static Record number(double d) {
    Record r(Kind::Scalar);
    r.scalar_ = format_double(d);
    return r;
  }
  static Record text(std::string s) {
    Record r(Kind::Scalar);
    r.scalar_ = quote(s);
    return r;
  }
  static Record array() { return Record(Kind::Array); }
  static Record array_of(const std::vector<double>& v) {
    Record r(Kind::Array);
    for (double d : v) r.push(number(d));
    return r;
  }

  Record& set(const std::string& key, Record value) {
    fields_.emplace_back(key, std::move(value));
    return *this;
  }
  Record& set(const std::string& key, double v) { return set(key, number(v)); }
  Record& set(const std::string& key, long long v) { return set(key, integer(v)); }
  Record& set(const std::string& key, long v) { return set(key, integer(v)); }
  Record& set(const std::string& key, unsigned long long v) {
    Record r(Kind::Scalar);
    r.scalar_ = std::to_string(v);
    return set(key, std::move(r));
  }
  Record& set(const std::string& key, int v) { return set(key, integer(v)); }
  Record& set(const std::string& key, bool v) { return set(key, boolean(v)); }
  Record& set(const std::string& key, const std::string& v) { return set(key, text(v)); }
  Record& set(const std::string& key, const char* v) { return set(key, text(v)); }

  Record& push(Record value) {
    items_.push_back(std::move(value));
    return *this;
  }

  std::string dump() const {
    std::string out;
    write(out);
    return out;
  }

 private:
  enum class Kind { Null, Bool, Scalar, Array, Object };

  explicit Record(Kind k) : kind_(k) {}

  void write(std::string& out) const {
    switch (kind_) {
      case Kind::Null: out += "null"; return;
      case Kind::Bool:
      case Kind::Scalar: out += scalar_; return;
      case Kind::Array: {
        out += '[';
        for (std::size_t i = 0; i < items_.size(); ++i) {
          if (i) out += ',';
          items_[i].write(out);
        }
        out += ']';
        return;
      }
      case Kind::Object: {
        out += '{';
        for (std::size_t i = 0; i < fields_.size(); ++i) {
          if (i) out += ',';
          out += quote(fields_[i].first);
          out += ':';
          fields_[i].second.write(out);
        }
        out += '}';
        return;
      }
    }
  }

  Kind kind_;
  std::string scalar_;
  std::vector<Record> items_;
  std::vector<std::pair<std::string, Record>> fields_;
};

}  // namespace aloha::cli
