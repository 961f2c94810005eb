#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <optional>

#include "itdopf/io/formats.hpp"
#include "itdopf/net/per_unit.hpp"

namespace itdopf::io {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kDefaultAngleBound = 60.0 * kPi / 180.0;

struct Scanner {
  std::string_view text;
  size_t pos = 0;
  int line = 1;
  int col = 1;

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  void advance() {
    if (text[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  // Whitespace, '%' line comments and MATLAB '...' continuations.
  void skip_space() {
    while (!eof()) {
      char c = peek();
      if (c == '%') {
        while (!eof() && peek() != '\n') advance();
      } else if (c == '.' && pos + 2 < text.size() && text[pos + 1] == '.' &&
                 text[pos + 2] == '.') {
        while (!eof() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  // Same, but newlines are significant (matrix rows may end at end of line).
  void skip_inline() {
    while (!eof()) {
      char c = peek();
      if (c == '%') {
        while (!eof() && peek() != '\n') advance();
      } else if (c == '.' && pos + 2 < text.size() && text[pos + 1] == '.' &&
                 text[pos + 2] == '.') {
        while (!eof() && peek() != '\n') advance();
        if (!eof()) advance();  // continuation swallows the newline
      } else if (c == ' ' || c == '\t' || c == '\r' || c == ',') {
        advance();
      } else {
        return;
      }
    }
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(ParseError::Kind::Syntax, message, line, col);
  }

  bool try_consume(char c) {
    skip_space();
    if (eof() || peek() != c) return false;
    advance();
    return true;
  }

  void expect(char c, const std::string& what) {
    if (!try_consume(c)) fail("expected '" + std::string(1, c) + "' " + what);
  }

  std::string identifier() {
    skip_space();
    std::string out;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                      peek() == '.')) {
      out += peek();
      advance();
    }
    return out;
  }

  double number() {
    skip_space();
    if (eof()) fail("expected a number, found end of input");
    const size_t start = pos;
    const int l = line, c = col;
    if (peek() == '+' || peek() == '-') advance();
    bool digits = false;
    while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
      advance();
      digits = true;
    }
    if (!eof() && peek() == '.') {
      advance();
      while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
        advance();
        digits = true;
      }
    }
    if (digits && !eof() && (peek() == 'e' || peek() == 'E')) {
      advance();
      if (!eof() && (peek() == '+' || peek() == '-')) advance();
      bool exp_digits = false;
      while (!eof() && std::isdigit(static_cast<unsigned char>(peek()))) {
        advance();
        exp_digits = true;
      }
      if (!exp_digits)
        throw ParseError(ParseError::Kind::Syntax, "malformed exponent", l, c);
    }
    if (!digits)
      throw ParseError(ParseError::Kind::Syntax,
                       std::string("expected a number, found '") +
                           (eof() ? std::string("<eof>") : std::string(1, peek())) + "'",
                       l, c);
    return std::stod(std::string(text.substr(start, pos - start)));
  }
};

struct Matrix {
  std::vector<std::vector<double>> rows;
  int line = 0;  ///< line of the opening bracket
};

struct CaseFile {
  std::string name = "case";
  std::optional<double> base_mva;
  std::map<std::string, Matrix> matrices;
};

// Scans the whole file accepting only `function mpc = <name>;`,
// `mpc.<field> = <number>;` and `mpc.<field> = [ rows ];` statements.
CaseFile scan_case(std::string_view text) {
  Scanner s{text};
  CaseFile out;
  while (true) {
    s.skip_space();
    if (s.eof()) break;
    std::string word = s.identifier();
    if (word.empty()) s.fail("unexpected character");
    if (word == "function") {
      s.identifier();  // mpc
      s.expect('=', "after 'function mpc'");
      out.name = s.identifier();
      s.try_consume(';');
      continue;
    }
    if (word.rfind("mpc.", 0) != 0) s.fail("unsupported statement '" + word + "'");
    const std::string field = word.substr(4);
    s.expect('=', "after '" + word + "'");
    s.skip_space();
    if (s.eof()) s.fail("unexpected end of input after '='");
    if (s.peek() == '[') {
      Matrix m;
      m.line = s.line;
      s.advance();
      std::vector<double> row;
      while (true) {
        s.skip_inline();
        if (s.eof()) s.fail("unterminated matrix 'mpc." + field + "'");
        char c = s.peek();
        if (c == ']') {
          s.advance();
          if (!row.empty()) m.rows.push_back(std::move(row));
          break;
        }
        if (c == ';' || c == '\n') {
          s.advance();
          if (!row.empty()) {
            m.rows.push_back(std::move(row));
            row.clear();
          }
          continue;
        }
        row.push_back(s.number());
      }
      s.try_consume(';');
      out.matrices[field] = std::move(m);
    } else if (s.peek() == '\'' || s.peek() == '"') {
      // string fields (e.g. mpc.version) are accepted and ignored
      const char quote = s.peek();
      s.advance();
      while (!s.eof() && s.peek() != quote) s.advance();
      if (s.eof()) s.fail("unterminated string");
      s.advance();
      s.try_consume(';');
    } else {
      const double v = s.number();
      s.try_consume(';');
      if (field == "baseMVA") out.base_mva = v;
    }
  }
  return out;
}

const Matrix& require(const CaseFile& cf, const std::string& field) {
  auto it = cf.matrices.find(field);
  if (it == cf.matrices.end())
    throw ParseError(ParseError::Kind::MissingSection, "mpc." + field + " not found");
  return it->second;
}

void require_cols(const Matrix& m, size_t min_cols, const std::string& field) {
  for (size_t i = 0; i < m.rows.size(); ++i)
    if (m.rows[i].size() < min_cols)
      throw ParseError(ParseError::Kind::Syntax,
                       "mpc." + field + " row " + std::to_string(i + 1) + " has " +
                           std::to_string(m.rows[i].size()) + " columns, expected at least " +
                           std::to_string(min_cols),
                       m.line);
}

}  // namespace

net::TransmissionNetwork parse_matpower(std::string_view text) {
  const CaseFile cf = scan_case(text);
  if (!cf.base_mva)
    throw ParseError(ParseError::Kind::MissingSection, "mpc.baseMVA not found");

  net::TransmissionNetwork raw;
  raw.name = cf.name;
  raw.base_mva = *cf.base_mva;
  if (!(raw.base_mva > 0))
    throw ParseError(ParseError::Kind::BadValue, "baseMVA must be positive");

  const Matrix& bus = require(cf, "bus");
  const Matrix& gen = require(cf, "gen");
  const Matrix& branch = require(cf, "branch");
  const Matrix& gencost = require(cf, "gencost");
  require_cols(bus, 13, "bus");
  require_cols(gen, 10, "gen");
  require_cols(branch, 13, "branch");
  require_cols(gencost, 4, "gencost");

  for (const auto& r : bus.rows) {
    net::TransBus b;
    b.id = static_cast<int>(r[0]);
    const int type = static_cast<int>(r[1]);
    b.is_reference = (type == 3);
    b.in_service = (type != 4);
    b.pd = r[2];
    b.qd = r[3];
    b.gs = r[4];
    b.bs = r[5];
    b.v_max = r[11];
    b.v_min = r[12];
    raw.buses.push_back(b);
  }

  for (const auto& r : gen.rows) {
    net::TransGen g;
    g.bus = static_cast<int>(r[0]);
    g.q_max = r[3];
    g.q_min = r[4];
    g.status = r[7] > 0;
    g.p_max = r[8];
    g.p_min = r[9];
    raw.generators.push_back(g);
  }

  for (const auto& r : branch.rows) {
    if (r[10] <= 0) continue;  // out of service
    net::TransBranch br;
    br.from = static_cast<int>(r[0]);
    br.to = static_cast<int>(r[1]);
    br.r = r[2];
    br.x = r[3];
    br.b_charge = r[4];
    br.s_max = r[5] > 0 ? r[5] : std::numeric_limits<double>::infinity();
    br.tau = r[8] > 0 ? r[8] : 1.0;
    br.shift = r[9] * kPi / 180.0;
    const double angmin = r[11], angmax = r[12];
    if ((angmin == 0 && angmax == 0) || angmin <= -360 || angmax >= 360) {
      br.angmin = -kDefaultAngleBound;
      br.angmax = kDefaultAngleBound;
    } else {
      br.angmin = angmin * kPi / 180.0;
      br.angmax = angmax * kPi / 180.0;
    }
    raw.branches.push_back(br);
  }

  if (gencost.rows.size() < raw.generators.size())
    throw ParseError(ParseError::Kind::MissingSection,
                     "mpc.gencost has fewer rows than mpc.gen");
  for (size_t i = 0; i < raw.generators.size(); ++i) {
    const auto& r = gencost.rows[i];
    const int model = static_cast<int>(r[0]);
    if (model == 1)
      throw ParseError(ParseError::Kind::UnsupportedCostModel,
                       "piecewise-linear generator cost (model 1) in gencost row " +
                           std::to_string(i + 1),
                       gencost.line);
    if (model != 2)
      throw ParseError(ParseError::Kind::UnsupportedCostModel,
                       "unknown cost model " + std::to_string(model) + " in gencost row " +
                           std::to_string(i + 1),
                       gencost.line);
    const int n = static_cast<int>(r[3]);
    if (static_cast<int>(r.size()) < 4 + n)
      throw ParseError(ParseError::Kind::Syntax,
                       "gencost row " + std::to_string(i + 1) + " declares " +
                           std::to_string(n) + " coefficients but has fewer",
                       gencost.line);
    // polynomial degree <= 2: higher-order coefficients must be zero
    net::GenCost cost;
    for (int k = 0; k < n; ++k) {
      const double coeff = r[4 + k];
      const int degree = n - 1 - k;
      if (degree > 2) {
        if (coeff != 0.0)
          throw ParseError(ParseError::Kind::UnsupportedCostModel,
                           "polynomial cost of degree " + std::to_string(degree) +
                               " in gencost row " + std::to_string(i + 1),
                           gencost.line);
      } else if (degree == 2) {
        cost.c2 = coeff;
      } else if (degree == 1) {
        cost.c1 = coeff;
      } else {
        cost.c0 = coeff;
      }
    }
    raw.generators[i].cost = cost;
  }

  net::TransmissionNetwork out = net::to_per_unit(raw);
  net::derive_admittances(out);
  return out;
}

}  // namespace itdopf::io
