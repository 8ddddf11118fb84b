#pragma once

// Dense Matrix Market ("array real general") text I/O. Values are written with
// 17 significant digits, so a write/read cycle reproduces every double exactly.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "errors.hpp"
#include "linalg.hpp"

namespace mmsrom {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str()) throw ContractError("cannot parse number '" + s + "'");
    return v;
}

inline void write_matrix_market(const std::string& path, const Matrix& a) {
    std::ofstream out(path);
    if (!out) throw ContractError("cannot write " + path);
    out << "%%MatrixMarket matrix array real general\n";
    out << a.rows() << ' ' << a.cols() << '\n';
    // column-major, as the format prescribes
    for (Index j = 0; j < a.cols(); ++j)
        for (Index i = 0; i < a.rows(); ++i) out << format_double(a(i, j)) << '\n';
    if (!out) throw ContractError("write failed: " + path);
}

inline Matrix read_matrix_market(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ContractError("cannot read " + path);
    std::string line;
    std::getline(in, line);
    if (line.rfind("%%MatrixMarket matrix array real general", 0) != 0)
        throw ContractError(path + ": unsupported Matrix Market header");
    while (std::getline(in, line) && !line.empty() && line[0] == '%') {
    }
    std::istringstream dims(line);
    Index rows = 0, cols = 0;
    if (!(dims >> rows >> cols)) throw ContractError(path + ": missing dimensions");
    Matrix a(rows, cols);
    std::string tok;
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) {
            if (!(in >> tok)) throw ContractError(path + ": truncated data");
            a(i, j) = parse_double(tok);
        }
    return a;
}

inline void write_vector_market(const std::string& path, const Vector& v) { write_matrix_market(path, Matrix(v)); }

inline Vector read_vector_market(const std::string& path) {
    Matrix a = read_matrix_market(path);
    if (a.cols() != 1) throw ContractError(path + ": expected a single column");
    return a.col(0);
}

}  // namespace mmsrom
