#pragma once

// Polynomial files (whitespace text and JSON) and JSON encodings of
// representations and root sets. Complex numbers are [re, im] pairs.

#include <json.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "detrep/detrep.hpp"
#include "detrep/error.hpp"
#include "detrep/polycore.hpp"
#include "detrep/twopar.hpp"

namespace detrep::io {

using nlohmann::json;

namespace detail {

inline void set_coeff(AffinePoly& p, long i, long j, cplx v, int line) {
  if (i < 0 || j < 0 || i + j > p.degree())
    throw Error(Errc::ParseError, "line " + std::to_string(line) + ": monomial x^" +
                                      std::to_string(i) + " y^" + std::to_string(j) +
                                      " exceeds the declared degree");
  p(static_cast<int>(i), static_cast<int>(j)) += v;
}

inline int checked_degree(long n) {
  if (n < 0 || n > 64) throw Error(Errc::ParseError, "degree out of range");
  return static_cast<int>(n);
}

}  // namespace detail

/// Text format: `degree n`, then lines `i j re [im]` for the coefficient of
/// x^i y^j. Blank lines and text after '#' are ignored; repeated monomials add.
inline AffinePoly parse_text(std::istream& in) {
  std::string line;
  int lineno = 0;
  std::optional<AffinePoly> p;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (!p) {
      long n = 0;
      if (first != "degree" || !(ls >> n))
        throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": expected `degree n`");
      p.emplace(detail::checked_degree(n));
      continue;
    }
    std::vector<std::string> tok{first};
    for (std::string t; ls >> t;) tok.push_back(t);
    long i = 0, j = 0;
    double re = 0.0, im = 0.0;
    try {
      if (tok.size() < 3 || tok.size() > 4) throw std::invalid_argument("count");
      std::size_t used = 0;
      auto whole = [&](const std::string& t) {
        if (used != t.size()) throw std::invalid_argument(t);
      };
      i = std::stol(tok[0], &used); whole(tok[0]);
      j = std::stol(tok[1], &used); whole(tok[1]);
      re = std::stod(tok[2], &used); whole(tok[2]);
      if (tok.size() == 4) { im = std::stod(tok[3], &used); whole(tok[3]); }
    } catch (const std::logic_error&) {
      throw Error(Errc::ParseError, "line " + std::to_string(lineno) + ": expected `i j re [im]`");
    }
    detail::set_coeff(*p, i, j, cplx(re, im), lineno);
  }
  if (!p) throw Error(Errc::ParseError, "empty polynomial file");
  return *p;
}

inline std::string to_text(const AffinePoly& p) {
  std::ostringstream os;
  os.precision(17);
  os << "degree " << p.degree() << "\n";
  for (int i = p.degree(); i >= 0; --i)
    for (int j = 0; i + j <= p.degree(); ++j) {
      const cplx c = p(i, j);
      if (c == cplx{0.0}) continue;
      os << i << " " << j << " " << c.real();
      if (c.imag() != 0.0) os << " " << c.imag();
      os << "\n";
    }
  return os.str();
}

/// {"degree": n, "coeffs": [[i, j, re, im], ...]}; im may be omitted.
inline AffinePoly poly_from_json(const json& j) {
  try {
    AffinePoly p(detail::checked_degree(j.at("degree").get<long>()));
    int k = 0;
    for (const auto& c : j.at("coeffs")) {
      ++k;
      if (!c.is_array() || c.size() < 3 || c.size() > 4)
        throw Error(Errc::ParseError, "coefficient entry " + std::to_string(k) + " must be [i, j, re, im]");
      const double im = c.size() == 4 ? c[3].get<double>() : 0.0;
      detail::set_coeff(p, c[0].get<long>(), c[1].get<long>(), cplx(c[2].get<double>(), im), k);
    }
    return p;
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("malformed polynomial JSON: ") + e.what());
  }
}

inline json poly_to_json(const AffinePoly& p) {
  json coeffs = json::array();
  for (int i = p.degree(); i >= 0; --i)
    for (int j = 0; i + j <= p.degree(); ++j)
      if (p(i, j) != cplx{0.0}) coeffs.push_back({i, j, p(i, j).real(), p(i, j).imag()});
  return {{"degree", p.degree()}, {"coeffs", coeffs}};
}

/// Reads either format; JSON is recognised by a leading '{'.
inline AffinePoly parse_poly(const std::string& content) {
  const auto pos = content.find_first_not_of(" \t\r\n");
  if (pos != std::string::npos && content[pos] == '{') {
    json j;
    try {
      j = json::parse(content);
    } catch (const json::exception& e) {
      throw Error(Errc::ParseError, std::string("invalid JSON: ") + e.what());
    }
    return poly_from_json(j);
  }
  std::istringstream in(content);
  return parse_text(in);
}

inline std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::ParseError, "cannot open " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

inline AffinePoly read_poly(const std::string& path) { return parse_poly(read_file(path)); }

inline json complex_to_json(cplx c) { return json::array({c.real(), c.imag()}); }

inline cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) throw Error(Errc::ParseError, "complex value must be [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json matrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(complex_to_json(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

inline Eigen::MatrixXcd matrix_from_json(const json& j) {
  const auto n = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXcd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(j[i].size()) != n)
      throw Error(Errc::ParseError, "matrix must be square");
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = complex_from_json(j[i][k]);
  }
  return m;
}

inline json rep_to_json(const DetRep& rep) {
  const auto aff = rep.affine();
  return {{"n", rep.n},
          {"structure", std::string(to_string(rep.structure))},
          {"transforms", rep.transform_trail.size()},
          {"homogeneous", {{"A", matrix_to_json(rep.A)}, {"B", matrix_to_json(rep.B)}, {"C", matrix_to_json(rep.C)}}},
          {"affine", {{"A1", matrix_to_json(aff.A1)}, {"B1", matrix_to_json(aff.B1)}, {"C1", matrix_to_json(aff.C1)}}}};
}

/// Reads the homogeneous triple of a representation written by rep_to_json.
inline DetRep rep_from_json(const json& j) {
  try {
    DetRep rep;
    const auto& h = j.at("homogeneous");
    rep.A = matrix_from_json(h.at("A"));
    rep.B = matrix_from_json(h.at("B"));
    rep.C = matrix_from_json(h.at("C"));
    rep.n = static_cast<int>(rep.A.rows());
    if (rep.B.rows() != rep.n || rep.C.rows() != rep.n)
      throw Error(Errc::ParseError, "A, B, C differ in size");
    return rep;
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("malformed representation JSON: ") + e.what());
  }
}

inline json roots_to_json(const RootSet& rs) {
  json roots = json::array();
  for (const Root& r : rs.roots) {
    roots.push_back({{"x", complex_to_json(r.x)},
                     {"y", complex_to_json(r.y)},
                     {"residual_p", r.res_p},
                     {"residual_q", r.res_q},
                     {"relative_residual", r.rel_res},
                     {"cond", std::isfinite(r.cond) ? json(r.cond) : json(nullptr)},
                     {"flag", std::string(to_string(r.flag))}});
  }
  return {{"roots", roots}, {"dropped", rs.dropped}};
}

}  // namespace detrep::io
