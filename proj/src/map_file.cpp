#include "seplab/map_file.hpp"

#include <cctype>
#include <fstream>
#include <regex>
#include <sstream>

namespace seplab {

MapFileError::MapFileError(int line, int col, const std::string& msg)
    : MapError(std::to_string(line) + ":" + std::to_string(col) + ": " + msg), line_(line), col_(col) {}

namespace {

struct Token {
  std::string text;
  int col;
};

std::vector<Token> split_tokens(const std::string& line) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    out.push_back({line.substr(i, j - i), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

int parse_exponent(const Token& t, int line) {
  static const std::regex re("[0-9]{1,3}");
  if (!std::regex_match(t.text, re)) throw MapFileError(line, t.col, "expected a non-negative exponent, got '" + t.text + "'");
  return std::stoi(t.text);
}

void parse_coeff(const Token& t, int line, MapTerm& term) {
  static const std::regex integer("[+-]?[0-9]+");
  static const std::regex rational("([+-]?[0-9]+)/([0-9]+)");
  static const std::regex decimal("[+-]?([0-9]+\\.?[0-9]*|\\.[0-9]+)([eE][+-]?[0-9]+)?");
  std::smatch m;
  if (std::regex_match(t.text, integer)) {
    term.num = t.text;
    term.den = "1";
  } else if (std::regex_match(t.text, m, rational)) {
    if (std::regex_match(m[2].str(), std::regex("0+")))
      throw MapFileError(line, t.col + static_cast<int>(m.position(2)), "zero denominator");
    term.num = m[1].str();
    term.den = m[2].str();
  } else if (std::regex_match(t.text, decimal)) {
    term.num = t.text;
    term.den = "1";
  } else {
    throw MapFileError(line, t.col, "invalid coefficient '" + t.text + "' (use p, p/q or a decimal)");
  }
}

}  // namespace

PolyMapFamily parse_map_text(const std::string& text, const std::string& source_name) {
  std::array<std::vector<MapTerm>, 2> terms;
  std::array<std::vector<MapTerm>, 2> inv;
  bool have_inverse = false;
  std::array<bool, 4> seen{};
  std::string name = source_name, description = "user-defined polynomial family";
  std::vector<MapTerm>* current = nullptr;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw.substr(0, raw.find('#'));
    auto toks = split_tokens(line);
    if (toks.empty()) continue;
    const std::string& kw = toks[0].text;
    if (kw == "name") {
      if (toks.size() != 2) throw MapFileError(lineno, toks[0].col, "'name' takes one word");
      name = toks[1].text;
      continue;
    }
    if (kw == "description") {
      size_t p = line.find("description") + 11;
      while (p < line.size() && std::isspace(static_cast<unsigned char>(line[p]))) ++p;
      description = line.substr(p);
      while (!description.empty() && std::isspace(static_cast<unsigned char>(description.back())))
        description.pop_back();
      continue;
    }
    if (kw == "component" || kw == "inverse") {
      if (toks.size() != 2 || (toks[1].text != "1" && toks[1].text != "2"))
        throw MapFileError(lineno, toks[0].col, "expected '" + kw + " 1' or '" + kw + " 2'");
      int c = toks[1].text == "1" ? 0 : 1;
      int slot = (kw == "inverse" ? 2 : 0) + c;
      if (seen[slot]) throw MapFileError(lineno, toks[0].col, "section '" + kw + " " + toks[1].text + "' repeated");
      seen[slot] = true;
      if (kw == "inverse") {
        have_inverse = true;
        current = &inv[c];
      } else {
        current = &terms[c];
      }
      continue;
    }
    if (!current) throw MapFileError(lineno, toks[0].col, "term outside a 'component' section");
    if (toks.size() != 4)
      throw MapFileError(lineno, toks.size() > 4 ? toks[4].col : static_cast<int>(line.size()) + 1,
                         "expected 'i j k coeff'");
    MapTerm t;
    t.i = parse_exponent(toks[0], lineno);
    t.j = parse_exponent(toks[1], lineno);
    t.k = parse_exponent(toks[2], lineno);
    parse_coeff(toks[3], lineno, t);
    if (t.i == 0 && t.j == 0)
      throw MapFileError(lineno, toks[0].col, "constant term in x,y: the origin must stay fixed for all mu");
    current->push_back(t);
  }
  if (!seen[0] || !seen[1]) throw MapFileError(lineno + 1, 1, "both 'component 1' and 'component 2' are required");
  if (have_inverse && !(seen[2] && seen[3]))
    throw MapFileError(lineno + 1, 1, "inverse needs both 'inverse 1' and 'inverse 2'");
  std::optional<std::array<std::vector<MapTerm>, 2>> inv_opt;
  if (have_inverse) inv_opt = inv;
  return family_from_terms(name, description, terms, inv_opt);
}

PolyMapFamily load_map_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MapError("cannot open map file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_map_text(ss.str(), path);
  } catch (const MapFileError& e) {
    throw MapFileError(e.line(), e.column(), path + ": " + std::string(e.what()).substr(std::string(e.what()).find(' ') + 1));
  }
}

std::string format_map_text(const PolyMapFamily& f) {
  std::ostringstream os;
  os << "name " << f.name << "\n";
  os << "description " << f.description << "\n";
  auto emit = [&](const char* kw, const std::array<std::vector<MapTerm>, 2>& t) {
    for (int c = 0; c < 2; ++c) {
      os << kw << ' ' << (c + 1) << "\n";
      for (const auto& m : t[c]) {
        os << m.i << ' ' << m.j << ' ' << m.k << ' ' << m.num;
        if (m.den != "1") os << '/' << m.den;
        os << "\n";
      }
    }
  };
  emit("component", f.exact_terms);
  if (f.exact_inverse_terms) emit("inverse", *f.exact_inverse_terms);
  return os.str();
}

std::vector<std::string> check_family_invariants(const PolyMapFamily& f, const PrecisionContext& ctx) {
  std::vector<std::string> issues;
  const Real tol = ctx.residual_tol();
  for (int c = 0; c < 2; ++c) {
    const RSeries& s = f.comps[c];
    for (int i = 0; i < s.size(); ++i) {
      const Exponents& e = s.table().exps(i);
      if (e[0] == 0 && e[1] == 0 && !s[i].is_zero())
        issues.push_back("component " + std::to_string(c + 1) + " does not vanish at the origin");
    }
  }
  const int d = std::max(1, f.degree());
  std::array<RSeries, 2> wide = {f.comps[0].with_order(2 * d), f.comps[1].with_order(2 * d)};
  RSeries jd = jacobian_determinant(wide);
  jd[0] -= Real(1);
  if (jd.max_abs() >= tol) issues.push_back("Jacobian determinant differs from 1 by " + jd.max_abs().str(6));
  // Linear part at mu = 0.
  auto lin = [&](int c, int v) {
    Exponents e{};
    e[v] = 1;
    return f.comps[c].coeff(e);
  };
  Real tr = lin(0, 0) + lin(1, 1);
  Real dt = lin(0, 0) * lin(1, 1) - lin(0, 1) * lin(1, 0);
  if (abs(tr + Real(1)) >= tol) issues.push_back("trace of the linear part at mu=0 is " + tr.str(12) + ", not -1");
  if (abs(dt - Real(1)) >= tol) issues.push_back("determinant of the linear part at mu=0 is " + dt.str(12));
  return issues;
}

}  // namespace seplab
