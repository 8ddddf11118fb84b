#pragma once

/**
 * @file basis_db.hpp
 * @brief Database of local bases over a grid of temperature configurations:
 *        congruence alignment, piecewise-linear interpolation, persistence,
 *        and the constant-basis baselines built by stacking (Modal, Modal-POD).
 */

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "log.hpp"
#include "matrix_market.hpp"
#include "spectral.hpp"

namespace mmsrom {

/// Basis and equilibrium at one point of the parameter path (or their slopes).
struct BasisSample {
    Matrix basis;
    Vector u_eq;
};

struct BasisDatabase {
    std::vector<double> grid;
    std::vector<LocalBasis> entries;
    Index reference_index = 0;
    BasisKind kind = BasisKind::vm_only;
    bool aligned = false;
    std::vector<double> alignment_residuals;  ///< asymmetry of V_j^T V_0 after alignment
    std::vector<double> adjacent_angles;      ///< largest principal angle between neighbours [rad]

    Index size() const { return static_cast<Index>(entries.size()); }
    Index dof_count() const { return entries.empty() ? 0 : entries.front().basis.rows(); }
    Index basis_size() const { return entries.empty() ? 0 : entries.front().basis.cols(); }
};

/// x_c^(j) = j L / (count + 1), j = 1..count.
inline std::vector<double> default_grid(double length, int count = 19) {
    std::vector<double> g;
    for (int j = 1; j <= count; ++j) g.push_back(j * length / (count + 1));
    return g;
}

// ---------------------------------------------------------------------------
// Congruence alignment
// ---------------------------------------------------------------------------

/// Rotates raw so its columns match the reference as closely as possible:
/// P = raw^T ref = L S R^T, Q = L R^T, result raw Q. The subspace is unchanged.
inline Matrix congruent_align(const Matrix& reference, const Matrix& raw, Matrix* rotation = nullptr) {
    if (reference.rows() != raw.rows() || reference.cols() != raw.cols())
        throw ContractError("congruent_align: bases must have identical shape");
    const Matrix p = raw.transpose() * reference;
    Eigen::JacobiSVD<Matrix> svd(p, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Vector& s = svd.singularValues();
    if (s(s.size() - 1) <= 1e-12)
        throw ContractError("congruent_align: no congruence direction (subspaces are orthogonal in some direction)");
    const Matrix q = svd.matrixU() * svd.matrixV().transpose();
    if (rotation) *rotation = q;
    return raw * q;
}

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

struct DatabaseOptions {
    LocalBasisOptions basis{};
    std::optional<Index> reference_index;  ///< default: middle grid entry
    bool align = true;
};

namespace detail {

inline void compute_adjacent_angles(BasisDatabase& db) {
    db.adjacent_angles.clear();
    for (Index j = 0; j + 1 < db.size(); ++j)
        db.adjacent_angles.push_back(
            principal_angles(db.entries[static_cast<size_t>(j)].basis, db.entries[static_cast<size_t>(j + 1)].basis).maxCoeff());
}

}  // namespace detail

/// Aligns every entry to the reference entry (in place).
inline void align_database(BasisDatabase& db) {
    if (db.entries.empty()) throw ContractError("align_database: empty database");
    const Matrix ref = db.entries[static_cast<size_t>(db.reference_index)].basis;
    db.alignment_residuals.assign(db.entries.size(), 0.0);
    // outward from the reference, in grid order
    std::vector<Index> order{db.reference_index};
    for (Index d = 1; d < db.size(); ++d) {
        if (db.reference_index - d >= 0) order.push_back(db.reference_index - d);
        if (db.reference_index + d < db.size()) order.push_back(db.reference_index + d);
    }
    for (Index j : order) {
        auto& e = db.entries[static_cast<size_t>(j)];
        try {
            e.basis = congruent_align(ref, e.basis);
        } catch (const ContractError& err) {
            throw ContractError("aligning entry at x_c=" + std::to_string(e.param) + ": " + err.what());
        }
        db.alignment_residuals[static_cast<size_t>(j)] = symmetry_deviation(e.basis.transpose() * ref);
    }
    db.aligned = true;
    detail::compute_adjacent_angles(db);
}

/// Builds the local bases in grid order (Newton warm-started from the previous
/// equilibrium) and aligns them to the reference entry.
inline BasisDatabase build_database(const SecondOrderModel& model, const std::vector<double>& grid,
                                    const DatabaseOptions& opt = {}) {
    if (grid.empty()) throw ContractError("build_database: empty grid");
    for (size_t j = 1; j < grid.size(); ++j)
        if (!(grid[j] > grid[j - 1])) throw ContractError("build_database: grid must be strictly increasing");
    BasisDatabase db;
    db.grid = grid;
    db.kind = opt.basis.with_md ? BasisKind::vm_md : BasisKind::vm_only;
    db.reference_index = opt.reference_index.value_or(static_cast<Index>(grid.size() / 2));
    if (db.reference_index < 0 || db.reference_index >= static_cast<Index>(grid.size()))
        throw ContractError("build_database: reference index out of range");
    Vector guess = Vector::Zero(model.dof_count());
    for (double x : grid) {
        try {
            db.entries.push_back(build_local_basis(model, x, opt.basis, guess));
        } catch (const Error& e) {
            throw SolverError("database entry at x_c=" + std::to_string(x) + ": " + e.what());
        }
        guess = db.entries.back().u_eq;
    }
    if (opt.align) {
        align_database(db);
    } else {
        detail::compute_adjacent_angles(db);
    }
    log::info("built database: " + std::to_string(db.size()) + " entries of " + std::to_string(db.basis_size()) + " columns");
    return db;
}

// ---------------------------------------------------------------------------
// Interpolation
// ---------------------------------------------------------------------------

namespace detail {

inline void require_interpolable(const BasisDatabase& db) {
    if (db.entries.empty()) throw ContractError("interpolate_basis: empty database");
    if (!db.aligned) throw ContractError("interpolate_basis: database is not congruence-aligned");
}

/// Bracketing cell [j, j+1] and weight s for x inside the grid span.
inline std::pair<Index, double> locate(const BasisDatabase& db, double x) {
    const auto& g = db.grid;
    auto it = std::upper_bound(g.begin(), g.end(), x);
    Index j = std::clamp<Index>(static_cast<Index>(it - g.begin()) - 1, 0, static_cast<Index>(g.size()) - 2);
    const double s = (x - g[static_cast<size_t>(j)]) / (g[static_cast<size_t>(j + 1)] - g[static_cast<size_t>(j)]);
    return {j, s};
}

inline double clamp_to_grid(const BasisDatabase& db, double x) {
    const double lo = db.grid.front(), hi = db.grid.back();
    if (x < lo || x > hi) {
        static std::atomic<int> warned{0};
        if (warned.fetch_add(1) < 5)
            log::warn("interpolate_basis: x_c=" + std::to_string(x) + " outside grid span, clamped");
        return std::clamp(x, lo, hi);
    }
    return x;
}

}  // namespace detail

/// Entrywise piecewise-linear interpolation of the aligned bases and equilibria.
inline BasisSample interpolate_basis(const BasisDatabase& db, double x, bool reorthonormalize = false) {
    detail::require_interpolable(db);
    if (db.size() == 1) return {db.entries.front().basis, db.entries.front().u_eq};
    x = detail::clamp_to_grid(db, x);
    const auto [j, s] = detail::locate(db, x);
    const auto& a = db.entries[static_cast<size_t>(j)];
    const auto& b = db.entries[static_cast<size_t>(j + 1)];
    BasisSample out;
    if (s == 0.0) {
        out = {a.basis, a.u_eq};
    } else if (s == 1.0) {
        out = {b.basis, b.u_eq};
    } else {
        out.basis = (1.0 - s) * a.basis + s * b.basis;
        out.u_eq = (1.0 - s) * a.u_eq + s * b.u_eq;
    }
    if (reorthonormalize) out.basis = orthonormalize_columns(out.basis);
    return out;
}

/// Central difference of interpolate_basis in x_c with step delta (default: half
/// the local grid spacing), one-sided at the ends of the grid span.
inline BasisSample slow_basis_derivative(const BasisDatabase& db, double x, std::optional<double> delta = std::nullopt) {
    detail::require_interpolable(db);
    if (db.size() == 1)
        return {Matrix::Zero(db.dof_count(), db.basis_size()), Vector::Zero(db.dof_count())};
    x = detail::clamp_to_grid(db, x);
    const auto [j, s] = detail::locate(db, x);
    (void)s;
    const double h = delta.value_or(0.5 * (db.grid[static_cast<size_t>(j + 1)] - db.grid[static_cast<size_t>(j)]));
    if (!(h > 0)) throw ContractError("slow_basis_derivative: step must be positive");
    const double lo = std::max(x - h, db.grid.front());
    const double hi = std::min(x + h, db.grid.back());
    const auto a = interpolate_basis(db, lo);
    const auto b = interpolate_basis(db, hi);
    return {(b.basis - a.basis) / (hi - lo), (b.u_eq - a.u_eq) / (hi - lo)};
}

// ---------------------------------------------------------------------------
// Stacking baselines
// ---------------------------------------------------------------------------

struct StackedBasisMatrix {
    Matrix matrix;
    std::vector<Index> provenance;  ///< contributing grid indices
    Index block_size = 0;
};

inline StackedBasisMatrix stack_bases(const BasisDatabase& db, const std::vector<Index>& indices) {
    if (indices.empty()) throw ContractError("stack_bases: no indices");
    StackedBasisMatrix st;
    st.block_size = db.basis_size();
    st.matrix.resize(db.dof_count(), st.block_size * static_cast<Index>(indices.size()));
    Index c = 0;
    for (Index j : indices) {
        if (j < 0 || j >= db.size()) throw ContractError("stack_bases: index out of range");
        st.matrix.middleCols(c, st.block_size) = db.entries[static_cast<size_t>(j)].basis;
        st.provenance.push_back(j);
        c += st.block_size;
    }
    return st;
}

inline StackedBasisMatrix stack_all(const BasisDatabase& db) {
    std::vector<Index> idx(static_cast<size_t>(db.size()));
    std::iota(idx.begin(), idx.end(), Index{0});
    return stack_bases(db, idx);
}

/// Left singular vectors with sigma_i > sigma_tol * sigma_1 (the "Modal" baseline).
inline Matrix stack_orthonormalize(const StackedBasisMatrix& st, double sigma_tol = 1e-8) {
    Eigen::BDCSVD<Matrix> svd(st.matrix, Eigen::ComputeThinU);
    const Vector& s = svd.singularValues();
    Index rank = 0;
    while (rank < s.size() && s(rank) > sigma_tol * s(0)) ++rank;
    return svd.matrixU().leftCols(rank);
}

inline Matrix stack_orthonormalize(const std::vector<LocalBasis>& bases, double sigma_tol = 1e-8) {
    if (bases.empty()) throw ContractError("stack_orthonormalize: empty list");
    StackedBasisMatrix st;
    st.block_size = bases.front().basis.cols();
    Index cols = 0;
    for (const auto& b : bases) {
        if (b.basis.rows() != bases.front().basis.rows()) throw ContractError("stack_orthonormalize: dimension mismatch");
        cols += b.basis.cols();
    }
    st.matrix.resize(bases.front().basis.rows(), cols);
    Index c = 0;
    for (const auto& b : bases) {
        st.matrix.middleCols(c, b.basis.cols()) = b.basis;
        c += b.basis.cols();
    }
    return stack_orthonormalize(st, sigma_tol);
}

/// The m dominant left singular vectors of the stacked matrix ("Modal-POD").
inline Matrix modal_pod(const StackedBasisMatrix& st, Index m, double sigma_tol = 1e-8) {
    Eigen::BDCSVD<Matrix> svd(st.matrix, Eigen::ComputeThinU);
    const Vector& s = svd.singularValues();
    Index rank = 0;
    while (rank < s.size() && s(rank) > sigma_tol * s(0)) ++rank;
    if (m < 1 || m > rank)
        throw ContractError("modal_pod: requested " + std::to_string(m) + " vectors but the stack has rank " +
                            std::to_string(rank));
    return svd.matrixU().leftCols(m);
}

inline Vector singular_value_profile(const StackedBasisMatrix& st) {
    if (st.matrix.size() == 0) throw ContractError("singular_value_profile: empty matrix");
    return singular_values(st.matrix);
}

/// Grid indices (0-based) for the Modal baseline subset. Named presets
/// select fixed grid entries; otherwise `count` distinct indices are
/// drawn with the seeded generator and sorted.
inline std::vector<Index> modal_subset(Index grid_size, const std::string& preset, unsigned seed, Index count = 3) {
    static const std::map<std::string, std::vector<Index>> presets{
        {"fixed-linear", {1, 11, 17}},    // j = 2, 12, 18
        {"fixed-nonlinear", {3, 6, 12}},  // j = 4, 7, 13
    };
    if (auto it = presets.find(preset); it != presets.end()) {
        for (Index j : it->second)
            if (j >= grid_size) throw ContractError("modal_subset: preset does not fit the grid");
        return it->second;
    }
    if (!preset.empty() && preset != "random") throw ContractError("modal_subset: unknown preset '" + preset + "'");
    if (count > grid_size) throw ContractError("modal_subset: more indices than grid points");
    std::vector<Index> all(static_cast<size_t>(grid_size));
    std::iota(all.begin(), all.end(), Index{0});
    std::mt19937_64 rng(seed);
    for (Index i = 0; i < count; ++i) {
        std::uniform_int_distribution<Index> pick(i, grid_size - 1);
        std::swap(all[static_cast<size_t>(i)], all[static_cast<size_t>(pick(rng))]);
    }
    std::vector<Index> out(all.begin(), all.begin() + count);
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Persistence
// ---------------------------------------------------------------------------

namespace detail {

inline std::string join_doubles(const std::vector<double>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + format_double(v[i]);
    return s;
}

inline std::vector<double> split_doubles(const std::string& s) {
    std::istringstream in(s);
    std::vector<double> v;
    std::string tok;
    while (in >> tok) v.push_back(parse_double(tok));
    return v;
}

inline std::string entry_stem(size_t j) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "entry_%03zu", j);
    return buf;
}

}  // namespace detail

/// Reads a flat "key = value" text file; '#' starts a comment.
inline std::map<std::string, std::string> read_key_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ContractError("cannot read " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

/// Directory layout: metadata.txt plus entry_NNN_V.mtx, entry_NNN_ueq.mtx,
/// entry_NNN_freq.txt per grid point.
inline void save_database(const BasisDatabase& db, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    std::ofstream meta(fs::path(dir) / "metadata.txt");
    if (!meta) throw ContractError("cannot write database metadata in " + dir);
    meta << "# reduction basis database\n";
    meta << "format = 1\n";
    meta << "count = " << db.size() << '\n';
    meta << "dofs = " << db.dof_count() << '\n';
    meta << "m = " << db.basis_size() << '\n';
    meta << "kind = " << to_string(db.kind) << '\n';
    meta << "reference_index = " << db.reference_index << '\n';
    meta << "aligned = " << (db.aligned ? 1 : 0) << '\n';
    meta << "grid = " << detail::join_doubles(db.grid) << '\n';
    meta << "params = ";
    std::vector<double> params;
    for (const auto& e : db.entries) params.push_back(e.param);
    meta << detail::join_doubles(params) << '\n';
    meta << "alignment_residuals = " << detail::join_doubles(db.alignment_residuals) << '\n';
    meta << "adjacent_angles = " << detail::join_doubles(db.adjacent_angles) << '\n';
    for (size_t j = 0; j < db.entries.size(); ++j) {
        const auto stem = (fs::path(dir) / detail::entry_stem(j)).string();
        const auto& e = db.entries[j];
        write_matrix_market(stem + "_V.mtx", e.basis);
        write_vector_market(stem + "_ueq.mtx", e.u_eq);
        std::ofstream fr(stem + "_freq.txt");
        for (Index i = 0; i < e.frequencies.size(); ++i) fr << format_double(e.frequencies(i)) << '\n';
    }
}

inline BasisDatabase load_database(const std::string& dir) {
    namespace fs = std::filesystem;
    const auto kv = read_key_values((fs::path(dir) / "metadata.txt").string());
    auto get = [&](const std::string& k) {
        auto it = kv.find(k);
        if (it == kv.end()) throw ContractError("database metadata lacks '" + k + "'");
        return it->second;
    };
    BasisDatabase db;
    const auto count = static_cast<size_t>(std::stoul(get("count")));
    db.kind = basis_kind_from_string(get("kind"));
    db.reference_index = std::stol(get("reference_index"));
    db.aligned = get("aligned") == "1";
    db.grid = detail::split_doubles(get("grid"));
    const auto params = detail::split_doubles(get("params"));
    db.alignment_residuals = detail::split_doubles(get("alignment_residuals"));
    db.adjacent_angles = detail::split_doubles(get("adjacent_angles"));
    if (db.grid.size() != count || params.size() != count) throw ContractError("database metadata is inconsistent");
    for (size_t j = 0; j < count; ++j) {
        const auto stem = (fs::path(dir) / detail::entry_stem(j)).string();
        LocalBasis e;
        e.param = params[j];
        e.kind = db.kind;
        e.basis = read_matrix_market(stem + "_V.mtx");
        e.u_eq = read_vector_market(stem + "_ueq.mtx");
        std::ifstream fr(stem + "_freq.txt");
        std::vector<double> f;
        std::string tok;
        while (fr >> tok) f.push_back(parse_double(tok));
        e.frequencies = Eigen::Map<Vector>(f.data(), static_cast<Index>(f.size()));
        db.entries.push_back(std::move(e));
    }
    const Index m = std::stol(get("m"));
    for (const auto& e : db.entries)
        if (e.basis.cols() != m) throw ContractError("database entries do not share the column count");
    return db;
}

}  // namespace mmsrom
