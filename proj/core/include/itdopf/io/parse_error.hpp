#pragma once

#include <stdexcept>
#include <string>

namespace itdopf::io {

/// Structured parse failure with 1-based line/column when known.
class ParseError : public std::runtime_error {
 public:
  enum class Kind {
    Syntax,
    MissingSection,
    MissingField,
    UnsupportedCostModel,
    SingularImpedanceBlock,
    UnknownBusReference,
    BadValue,
  };

  ParseError(Kind kind, const std::string& message, int line = 0, int col = 0)
      : std::runtime_error(format(kind, message, line, col)),
        kind_(kind),
        line_(line),
        col_(col) {}

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  static std::string format(Kind kind, const std::string& message, int line, int col) {
    std::string out;
    switch (kind) {
      case Kind::Syntax: out = "syntax error"; break;
      case Kind::MissingSection: out = "missing section"; break;
      case Kind::MissingField: out = "missing field"; break;
      case Kind::UnsupportedCostModel: out = "unsupported cost model"; break;
      case Kind::SingularImpedanceBlock: out = "singular impedance block"; break;
      case Kind::UnknownBusReference: out = "unknown bus reference"; break;
      case Kind::BadValue: out = "bad value"; break;
    }
    if (line > 0) {
      out += " at line " + std::to_string(line);
      if (col > 0) out += ", column " + std::to_string(col);
    }
    out += ": " + message;
    return out;
  }

  Kind kind_;
  int line_;
  int col_;
};

}  // namespace itdopf::io
