#pragma once

/// \file io.hpp
/// Matrix, pole and CSV files.

#include <ratkrylov/core.hpp>
#include <ratkrylov/driver.hpp>
#include <ratkrylov/functions.hpp>
#include <ratkrylov/operators.hpp>
#include <ratkrylov/poles.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace ratkrylov::io {

/// %.17g, with literal inf / -inf / nan.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline double parse_extended(const std::string& token, const std::string& what) {
    std::string t;
    for (char c : token) t.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (t == "inf" || t == "+inf" || t == "infinity" || t == "+infinity") return kInf;
    if (t == "-inf" || t == "-infinity") return -kInf;
    return detail::parse_double(token, what);
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// ---------------------------------------------------------------------------
// Matrices.

/// tridiag(-1, 2, -1) of order n.
inline HermitianOperator laplacian_1d(Index n) { return HermitianOperator::toeplitz_tridiagonal(n, 2.0, -1.0); }

/// (eps dt / h^2) tridiag(-1, 2, -1), h = 1/(n+1): one exponential Euler step
/// of the 1D heat equation with eps = 1e-2, dt = 0.1.
inline HermitianOperator diffusion_1d(Index n, double eps = 1e-2, double dt = 0.1) {
    const double h = 1.0 / static_cast<double>(n + 1);
    const double s = eps * dt / (h * h);
    return HermitianOperator::toeplitz_tridiagonal(n, 2.0 * s, -s);
}

/// Reads MatrixMarket coordinate or array files (real, symmetric or
/// general). Matrices of bandwidth <= 1 become diagonal or tridiagonal
/// operators; anything wider is stored dense and refused above dense_limit.
inline HermitianOperator read_matrix_market(const std::string& path, Index dense_limit = kDefaultDenseLimit) {
    std::ifstream in(path);
    if (!in) throw Error(detail::concat("cannot open matrix file '", path, "'"));
    std::string line;
    std::getline(in, line);
    std::istringstream hdr(line);
    std::string banner, object, format, field, symmetry;
    hdr >> banner >> object >> format >> field >> symmetry;
    auto lower = [](std::string s) {
        std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
        return s;
    };
    if (banner != "%%MatrixMarket" || lower(object) != "matrix")
        throw Error(detail::concat(path, ":1: not a MatrixMarket matrix header"));
    format = lower(format);
    field = lower(field);
    symmetry = lower(symmetry);
    if (field != "real" && field != "integer" && field != "double")
        throw Error(detail::concat(path, ":1: only real matrices are supported, got '", field, "'"));
    const bool sym = symmetry == "symmetric";
    if (!sym && symmetry != "general")
        throw Error(detail::concat(path, ":1: unsupported symmetry '", symmetry, "'"));
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!trim(line).empty() && line[0] != '%') break;
    }
    std::istringstream sz(line);
    Index rows = 0, cols = 0, nnz = 0;
    sz >> rows >> cols;
    if (format == "coordinate") sz >> nnz;
    if (rows <= 0 || rows != cols) throw Error(detail::concat(path, ":", lineno, ": matrix must be square"));
    const Index n = rows;
    std::vector<std::tuple<Index, Index, double>> entries;
    if (format == "coordinate") {
        for (Index k = 0; k < nnz; ++k) {
            Index i, j;
            double v;
            if (!(in >> i >> j >> v)) throw Error(detail::concat(path, ": truncated entry list"));
            if (i < 1 || j < 1 || i > n || j > n) throw Error(detail::concat(path, ": entry index out of range"));
            entries.emplace_back(i - 1, j - 1, v);
            if (sym && i != j) entries.emplace_back(j - 1, i - 1, v);
        }
    } else if (format == "array") {
        for (Index j = 0; j < n; ++j)
            for (Index i = sym ? j : 0; i < n; ++i) {
                double v;
                if (!(in >> v)) throw Error(detail::concat(path, ": truncated array data"));
                if (v == 0.0) continue;
                entries.emplace_back(i, j, v);
                if (sym && i != j) entries.emplace_back(j, i, v);
            }
    } else {
        throw Error(detail::concat(path, ":1: unknown format '", format, "'"));
    }
    Index band = 0;
    for (const auto& [i, j, v] : entries)
        if (v != 0.0) band = std::max(band, std::abs(i - j));
    if (band <= 1) {
        Vector main = Vector::Zero(n);
        Vector lo = Vector::Zero(std::max<Index>(n - 1, 0));
        Vector up = Vector::Zero(std::max<Index>(n - 1, 0));
        for (const auto& [i, j, v] : entries) {
            if (i == j) main(i) += v;
            else if (i == j + 1) lo(j) += v;
            else up(i) += v;
        }
        if ((lo - up).cwiseAbs().maxCoeff() > 0.0 && n > 1)
            throw Error(detail::concat(path, ": matrix is not symmetric"));
        if (band == 0) return HermitianOperator::diagonal(main);
        return HermitianOperator::tridiagonal(main, lo);
    }
    if (n > dense_limit)
        throw Error(detail::concat(path, ": order ", n, " exceeds the dense limit ", dense_limit,
                                   " for a matrix of bandwidth ", band));
    Matrix a = Matrix::Zero(n, n);
    for (const auto& [i, j, v] : entries) a(i, j) += v;
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 0.0)
        throw Error(detail::concat(path, ": matrix is not symmetric"));
    return HermitianOperator::dense(a);
}

/// One diagonal entry per line.
inline HermitianOperator read_diagonal(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(detail::concat("cannot open diagonal file '", path, "'"));
    std::vector<double> d;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == '%') continue;
        d.push_back(detail::parse_double(t, detail::concat(path, ":", lineno, " diagonal value")));
    }
    if (d.empty()) throw Error(detail::concat(path, ": no diagonal entries"));
    return HermitianOperator::diagonal(Eigen::Map<Vector>(d.data(), static_cast<Index>(d.size())));
}

/// `tridiag:N`, `diffusion:N`, a `.mtx` MatrixMarket file, or a plain
/// diagonal file.
inline HermitianOperator load_matrix(const std::string& spec, Index dense_limit = kDefaultDenseLimit) {
    const auto colon = spec.find(':');
    if (colon != std::string::npos) {
        const std::string kind = spec.substr(0, colon);
        if (kind == "tridiag" || kind == "diffusion") {
            const double n = detail::parse_double(spec.substr(colon + 1), "matrix order");
            detail::require(n >= 1 && n == std::floor(n), "matrix order must be a positive integer");
            return kind == "tridiag" ? laplacian_1d(static_cast<Index>(n)) : diffusion_1d(static_cast<Index>(n));
        }
    }
    const auto ext = std::filesystem::path(spec).extension().string();
    if (ext == ".mtx") return read_matrix_market(spec, dense_limit);
    return read_diagonal(spec);
}

/// Reads an n x k factor: whitespace-separated rows, one row per line.
inline Matrix read_factor(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(detail::concat("cannot open factor file '", path, "'"));
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::istringstream ss(t);
        std::vector<double> row;
        std::string tok;
        while (ss >> tok) row.push_back(detail::parse_double(tok, detail::concat(path, ":", lineno)));
        if (!rows.empty() && row.size() != rows.front().size())
            throw Error(detail::concat(path, ":", lineno, ": ragged row"));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(detail::concat(path, ": empty factor"));
    Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

// ---------------------------------------------------------------------------
// Poles.

inline void write_poles(std::ostream& os, const PoleSequence& p) {
    for (double x : p.poles) os << format_double(x) << '\n';
}

/// One real pole per line, `inf` for infinity. Complex entries are refused:
/// the Arnoldi recurrence here is real.
inline PoleSequence read_poles(std::istream& in, const std::string& name = "<poles>") {
    PoleSequence p;
    p.provenance = PoleProvenance::custom;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.find_first_of("ij(") != std::string::npos && t.find("inf") == std::string::npos)
            throw DomainError(detail::concat(name, ":", lineno, ": complex poles are not supported"));
        p.poles.push_back(parse_extended(t, detail::concat(name, ":", lineno, " pole")));
    }
    if (p.poles.empty()) throw DomainError(detail::concat(name, ": no poles"));
    return p;
}

inline PoleSequence read_poles_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(detail::concat("cannot open pole file '", path, "'"));
    return read_poles(in, path);
}

// ---------------------------------------------------------------------------
// CSV.

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add(std::vector<std::string> row) {
        if (row.size() != header_.size()) throw Error("CsvTable: row width does not match header");
        rows_.push_back(std::move(row));
    }

    void add_numbers(const std::vector<double>& row) {
        std::vector<std::string> r;
        r.reserve(row.size());
        for (double x : row) r.push_back(format_double(x));
        add(std::move(r));
    }

    std::size_t size() const { return rows_.size(); }

    void write(std::ostream& os) const {
        auto line = [&](const std::vector<std::string>& r) {
            for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "," : "") << r[i];
            os << '\n';
        };
        line(header_);
        for (const auto& r : rows_) line(r);
    }

    /// Writes to a sibling temporary and renames it into place.
    void save(const std::string& path) const {
        const std::filesystem::path target(path);
        if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
        const std::string tmp = path + ".tmp";
        {
            std::ofstream out(tmp);
            if (!out) throw Error(detail::concat("cannot write '", tmp, "'"));
            write(out);
        }
        std::filesystem::rename(tmp, target);
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// ell, est_error[, true_error], bound.
inline CsvTable trace_table(const std::vector<TraceRow>& trace, bool with_true) {
    CsvTable t(with_true ? std::vector<std::string>{"ell", "est_error", "true_error", "bound"}
                         : std::vector<std::string>{"ell", "est_error", "bound"});
    for (const auto& r : trace) {
        if (with_true)
            t.add_numbers({static_cast<double>(r.ell), r.est_error, r.true_error, r.bound});
        else
            t.add_numbers({static_cast<double>(r.ell), r.est_error, r.bound});
    }
    return t;
}

}  // namespace ratkrylov::io
