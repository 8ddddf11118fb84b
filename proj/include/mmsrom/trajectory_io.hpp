#pragma once

// Trajectory persistence (bit-exact, Matrix Market) and plot-ready CSV output.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "matrix_market.hpp"
#include "newmark.hpp"

namespace mmsrom {

inline void save_trajectory(const Trajectory& tr, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    const fs::path d(dir);
    write_vector_market((d / "times.mtx").string(),
                        Eigen::Map<const Vector>(tr.times.data(), static_cast<Index>(tr.times.size())));
    write_matrix_market((d / "u.mtx").string(), tr.u);
    write_matrix_market((d / "v.mtx").string(), tr.v);
    write_matrix_market((d / "a.mtx").string(), tr.a);
}

inline Trajectory load_trajectory(const std::string& dir) {
    namespace fs = std::filesystem;
    const fs::path d(dir);
    Trajectory tr;
    const Vector t = read_vector_market((d / "times.mtx").string());
    tr.times.assign(t.data(), t.data() + t.size());
    tr.u = read_matrix_market((d / "u.mtx").string());
    tr.v = read_matrix_market((d / "v.mtx").string());
    tr.a = read_matrix_market((d / "a.mtx").string());
    if (tr.u.cols() != t.size() || tr.v.cols() != t.size() || tr.a.cols() != t.size())
        throw ContractError("trajectory in " + dir + " has inconsistent sample counts");
    return tr;
}

/// One row per sample: the first column is `time`, the rest are the named series.
inline void write_csv(const std::string& path, const std::vector<double>& time, const std::vector<std::string>& names,
                      const std::vector<Vector>& series, const std::string& time_name = "t_scaled") {
    if (names.size() != series.size()) throw ContractError("write_csv: names/series mismatch");
    for (const auto& s : series)
        if (s.size() != static_cast<Index>(time.size())) throw ContractError("write_csv: series length mismatch");
    std::ofstream out(path);
    if (!out) throw ContractError("cannot write " + path);
    out << time_name;
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    for (size_t i = 0; i < time.size(); ++i) {
        out << format_double(time[i]);
        for (const auto& s : series) out << ',' << format_double(s(static_cast<Index>(i)));
        out << '\n';
    }
}

}  // namespace mmsrom
