#pragma once

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "toepricc/errors.hpp"
#include "toepricc/factorization.hpp"
#include "toepricc/matrix.hpp"
#include "toepricc/realization.hpp"

namespace toepricc {

using json = nlohmann::ordered_json;

inline json matrix_to_json(const CMatrix& m) {
  json rows = json::array();
  if (m.empty()) return rows;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j)
      row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline CMatrix matrix_from_json(const json& v, std::size_t rows,
                                std::size_t cols, const std::string& field) {
  auto fail = [&](const std::string& why) -> void {
    throw InputError("field \"" + field + "\": " + why);
  };
  if (!v.is_array()) fail("expected an array of rows");
  if (rows == 0 || cols == 0) {
    if (!v.empty()) fail("expected [] for an empty matrix");
    return CMatrix(rows, cols);
  }
  if (v.size() != rows)
    fail("expected " + std::to_string(rows) + " rows, got " +
         std::to_string(v.size()));
  CMatrix out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const json& row = v[i];
    if (!row.is_array() || row.size() != cols)
      fail("row " + std::to_string(i) + " must be an array of " +
           std::to_string(cols) + " entries");
    for (std::size_t j = 0; j < cols; ++j) {
      const json& e = row[j];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() ||
          !e[1].is_number())
        fail("entry (" + std::to_string(i) + ", " + std::to_string(j) +
             ") must be [re, im]");
      out(i, j) = Complex(e[0].get<double>(), e[1].get<double>());
      if (!std::isfinite(out(i, j).real()) || !std::isfinite(out(i, j).imag()))
        fail("entry (" + std::to_string(i) + ", " + std::to_string(j) +
             ") is not finite");
    }
  }
  return out;
}

inline json realization_to_json(const Realization& r) {
  json v;
  v["m"] = r.m;
  v["s"] = r.s;
  v["t"] = r.t;
  v["R0"] = matrix_to_json(r.R0);
  v["C"] = matrix_to_json(r.C);
  v["A"] = matrix_to_json(r.A);
  v["B"] = matrix_to_json(r.B);
  v["gamma"] = matrix_to_json(r.gamma);
  v["alpha"] = matrix_to_json(r.alpha);
  v["beta"] = matrix_to_json(r.beta);
  return v;
}

inline Realization realization_from_json(const json& v) {
  if (!v.is_object()) throw InputError("realization must be a JSON object");
  auto dim = [&](const char* name) -> std::size_t {
    if (!v.contains(name))
      throw InputError(std::string("missing field \"") + name + "\"");
    const json& d = v[name];
    if (!d.is_number_unsigned())
      throw InputError(std::string("field \"") + name +
                       "\" must be a nonnegative integer");
    return d.get<std::size_t>();
  };
  const std::size_t m = dim("m");
  const std::size_t s = dim("s");
  const std::size_t t = dim("t");
  if (m == 0) throw InputError("field \"m\": symbol dimension must be positive");
  auto mat = [&](const char* name, std::size_t r,
                 std::size_t c) -> CMatrix {
    if (!v.contains(name))
      throw InputError(std::string("missing field \"") + name + "\"");
    return matrix_from_json(v[name], r, c, name);
  };
  try {
    return Realization(mat("R0", m, m), mat("C", m, s), mat("A", s, s),
                       mat("B", s, m), mat("gamma", m, t), mat("alpha", t, t),
                       mat("beta", t, m));
  } catch (const InvalidRealization& e) {
    throw InputError(e.what());
  }
}

namespace detail {

inline std::string line_and_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

inline Realization load_realization(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open \"" + path + "\"");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json v;
  try {
    v = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("\"" + path + "\" is not valid JSON (" +
                     detail::line_and_column(text, e.byte) + "): " + e.what());
  }
  return realization_from_json(v);
}

inline json factor_pair_to_json(const FactorPair& f) {
  json v;
  v["split"] =
      f.split == Split::identity_delta ? "identity_delta" : "identity_D";
  v["delta"] = matrix_to_json(f.delta);
  v["D"] = matrix_to_json(f.D);
  v["theta"] = realization_to_json(f.theta);
  v["psi"] = realization_to_json(f.psi);
  v["theta_inv"] = realization_to_json(f.theta_inv);
  v["psi_inv"] = realization_to_json(f.psi_inv);
  return v;
}

/// One complex entry as "re+imj" with 17 significant digits, the shortest
/// form that round-trips a double.
inline std::string complex_to_csv(Complex z) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gj", z.real(), z.imag());
  return buf;
}

inline std::string matrix_to_csv(const CMatrix& m) {
  std::string out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += complex_to_csv(m(i, j));
    }
    out += '\n';
  }
  return out;
}

inline CMatrix matrix_from_csv(const std::string& text) {
  std::vector<Complex> entries;
  std::size_t rows = 0, cols = 0;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty()) continue;
    std::size_t row_cols = 0;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      double re = 0.0, im = 0.0;
      if (std::sscanf(cell.c_str(), "%lg%lgj", &re, &im) != 2)
        throw InputError("malformed CSV entry \"" + cell + "\"");
      entries.emplace_back(re, im);
      ++row_cols;
    }
    if (rows == 0)
      cols = row_cols;
    else if (row_cols != cols)
      throw InputError("CSV rows of unequal length");
    ++rows;
  }
  return CMatrix(rows, cols, std::move(entries));
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write \"" + path + "\"");
  out << content;
}

}  // namespace toepricc
