#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace ctg {

/// Reader for Matrix Market files: coordinate or array format, real or
/// integer fields, general / symmetric / skew-symmetric symmetry. Returns a
/// dense matrix.
inline Eigen::MatrixXd read_matrix_market(std::istream& in, const std::string& name = "<stream>") {
  auto fail = [&](const std::string& msg) -> void {
    throw std::runtime_error("matrix market '" + name + "': " + msg);
  };

  std::string line;
  if (!std::getline(in, line)) fail("empty file");
  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (tag != "%%MatrixMarket" || object != "matrix") fail("missing %%MatrixMarket matrix banner");
  if (format != "coordinate" && format != "array") fail("unsupported format '" + format + "'");
  if (field != "real" && field != "integer") fail("unsupported field '" + field + "'");
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "skew-symmetric")
    fail("unsupported symmetry '" + symmetry + "'");

  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  std::istringstream header(line);
  long rows = 0, cols = 0, nnz = 0;
  if (!(header >> rows >> cols)) fail("bad size header");
  if (format == "coordinate" && !(header >> nnz)) fail("bad size header");
  if (rows <= 0 || cols <= 0) fail("bad dimensions");

  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
  if (format == "coordinate") {
    long count = 0;
    while (count < nnz && std::getline(in, line)) {
      if (line.empty() || line[0] == '%') continue;
      std::istringstream entry(line);
      long i = 0, j = 0;
      double v = 0;
      if (!(entry >> i >> j >> v)) fail("bad coordinate entry");
      if (i < 1 || i > rows || j < 1 || j > cols) fail("entry index out of range");
      m(i - 1, j - 1) = v;
      if (symmetry == "symmetric" && i != j) m(j - 1, i - 1) = v;
      if (symmetry == "skew-symmetric" && i != j) m(j - 1, i - 1) = -v;
      ++count;
    }
    if (count != nnz) fail("unexpected end of entries");
  } else {
    // Column-major dense listing; symmetric variants store the lower triangle.
    for (long j = 0; j < cols; ++j) {
      long i0 = (symmetry == "general") ? 0 : (symmetry == "symmetric" ? j : j + 1);
      for (long i = i0; i < rows; ++i) {
        double v = 0;
        if (!(in >> v)) fail("unexpected end of array data");
        m(i, j) = v;
        if (symmetry == "symmetric" && i != j) m(j, i) = v;
        if (symmetry == "skew-symmetric") m(j, i) = -v;
      }
    }
  }
  return m;
}

inline Eigen::MatrixXd read_matrix_market_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open matrix file '" + path + "'");
  return read_matrix_market(in, path);
}

}  // namespace ctg
