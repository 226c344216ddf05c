#pragma once

/// \file experiments.hpp
/// Reproducible convergence experiments: fixtures, strategy sweeps, CSV
/// traces, a-priori bound curves and optional gnuplot scripts.

#include <ratkrylov/bounds.hpp>
#include <ratkrylov/core.hpp>
#include <ratkrylov/driver.hpp>
#include <ratkrylov/functions.hpp>
#include <ratkrylov/io.hpp>
#include <ratkrylov/kronfun.hpp>
#include <ratkrylov/operators.hpp>
#include <ratkrylov/poles.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <istream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace ratkrylov {

inline const std::vector<std::string>& experiment_ids() {
    static const std::vector<std::string> ids{"fig-lapl-1d", "fig-cauchy-1d", "fig-cauchy-1d-eig",
                                              "fig-cauchy-1d-funcs", "table-times", "fig-lapl-2d",
                                              "fig-cauchy-2d"};
    return ids;
}

inline bool is_kronecker_experiment(const std::string& id) { return id == "fig-lapl-2d" || id == "fig-cauchy-2d"; }

struct ExperimentConfig {
    std::string id;
    Index n = 0;
    /// Catalog spec; empty selects the experiment's default function(s).
    std::string function;
    /// Number, or "a/2" for half the lower spectral bound.
    std::string shift = "0";
    std::vector<std::string> strategies;
    std::size_t ell_max = 0;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    bool gnuplot = false;
    unsigned threads = 1;
    Index dense_limit = kDefaultDenseLimit;
    /// table-times: relative error targets.
    std::vector<double> tolerances{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};

    void validate() const {
        const auto& ids = experiment_ids();
        if (std::find(ids.begin(), ids.end(), id) == ids.end())
            throw DomainError(detail::concat("config field 'id': unknown experiment '", id, "'"));
        const bool kron = is_kronecker_experiment(id);
        const Index max_n = kron ? std::min(dense_limit, kKronDenseLimit) : 2000000;
        const Index min_n = id == "fig-cauchy-1d-eig" ? 40 : 2;
        if (n < min_n || n > max_n)
            throw DomainError(detail::concat("config field 'n': ", n, " outside [", min_n, ", ", max_n, "] for ", id));
        if (ell_max < 1) throw DomainError("config field 'ell_max': must be at least 1");
        if (strategies.empty()) throw DomainError("config field 'strategies': list is empty");
        for (const auto& s : strategies) {
            if (s == "custom") throw DomainError("config field 'strategies': custom poles are not an experiment strategy");
            (void)parse_strategy(s);
        }
        if (kron && shift != "0") throw DomainError("config field 'shift': Kronecker experiments run unshifted");
        if (threads < 1) throw DomainError("config field 'threads': must be at least 1");
        for (double t : tolerances)
            if (!(t > 0.0 && t < 1.0)) throw DomainError("config field 'tolerances': entries must lie in (0, 1)");
    }
};

/// Desk-scale defaults. 1D tridiagonal and diagonal fixtures keep the
/// published sizes since their solves and oracles are O(n log n); the
/// Kronecker fixtures are limited by the dense reference solution.
inline ExperimentConfig default_config(const std::string& id) {
    ExperimentConfig c;
    c.id = id;
    if (id == "fig-lapl-1d") {
        c.n = 50000;
        c.strategies = {"extended", "zolotarev", "eds"};
        c.ell_max = 40;
    } else if (id == "fig-cauchy-1d") {
        c.n = 10000;
        c.strategies = {"extended", "cauchy", "eds"};
        c.ell_max = 40;
    } else if (id == "fig-cauchy-1d-eig" || id == "fig-cauchy-1d-funcs") {
        c.n = 50000;
        c.strategies = {"extended", "cauchy", "eds"};
        c.ell_max = 40;
    } else if (id == "table-times") {
        c.n = 100000;
        c.strategies = {"eds", "extended"};
        c.ell_max = 300;
    } else if (id == "fig-lapl-2d") {
        c.n = 300;
        c.strategies = {"extended", "polynomial", "zolotarev", "eds"};
        c.ell_max = 30;
    } else if (id == "fig-cauchy-2d") {
        c.n = 300;
        c.strategies = {"extended", "polynomial", "cauchy", "eds"};
        c.ell_max = 30;
    } else {
        throw DomainError(detail::concat("unknown experiment '", id, "'"));
    }
    return c;
}

/// `key = value` lines over default_config(id); `#` starts a comment.
inline ExperimentConfig parse_experiment_config(std::istream& in, const std::string& name = "<config>") {
    std::map<std::string, std::pair<std::string, int>> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const std::string t = io::trim(line.substr(0, hash));
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw DomainError(detail::concat(name, ":", lineno, ": expected 'key = value'"));
        kv[io::trim(t.substr(0, eq))] = {io::trim(t.substr(eq + 1)), lineno};
    }
    const auto id = kv.find("id");
    if (id == kv.end()) throw DomainError(detail::concat(name, ": missing field 'id'"));
    ExperimentConfig c;
    try {
        c = default_config(id->second.first);
    } catch (const DomainError& e) {
        throw DomainError(detail::concat(name, ":", id->second.second, ": ", e.what()));
    }
    for (const auto& [key, entry] : kv) {
        const auto& [value, ln] = entry;
        const std::string where = detail::concat(name, ":", ln, " field '", key, "'");
        auto integer = [&](double lo) {
            const double x = detail::parse_double(value, where);
            if (x != std::floor(x) || x < lo) throw DomainError(detail::concat(where, ": expected an integer >= ", lo));
            return x;
        };
        auto list = [&] {
            std::vector<std::string> out;
            for (const auto& s : detail::split(value, ',')) out.push_back(io::trim(s));
            return out;
        };
        if (key == "id") continue;
        if (key == "n") c.n = static_cast<Index>(integer(1));
        else if (key == "function") c.function = value;
        else if (key == "shift") c.shift = value;
        else if (key == "strategies") c.strategies = list();
        else if (key == "ell_max") c.ell_max = static_cast<std::size_t>(integer(1));
        else if (key == "seed") c.seed = static_cast<std::uint64_t>(integer(0));
        else if (key == "out_dir") c.out_dir = value;
        else if (key == "gnuplot") c.gnuplot = value == "true" || value == "on" || value == "1";
        else if (key == "threads") c.threads = static_cast<unsigned>(integer(1));
        else if (key == "dense_limit") c.dense_limit = static_cast<Index>(integer(1));
        else if (key == "tolerances") {
            c.tolerances.clear();
            for (const auto& s : list()) c.tolerances.push_back(detail::parse_double(s, where));
        } else {
            throw DomainError(detail::concat(where, ": unknown field"));
        }
    }
    try {
        c.validate();
    } catch (const DomainError& e) {
        throw DomainError(detail::concat(name, ": ", e.what()));
    }
    return c;
}

/// Unit-norm vector with seeded standard normal entries.
inline Vector seeded_unit_vector(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = nd(rng);
    return v / v.norm();
}

/// "0", a number, or "a/2".
inline double resolve_shift(const std::string& spec, const SpectralInterval& interval) {
    if (spec == "a/2") return 0.5 * interval.a();
    const double eta = detail::parse_double(spec, "shift");
    if (!(eta < interval.a()))
        throw DomainError(detail::concat("shift ", eta, " must stay below the lower spectral bound ", interval.a()));
    return eta;
}

struct Fixture1D {
    std::string tag;  // appended to output names; empty for single-fixture experiments
    HermitianOperator op;
    SpectralInterval interval;
    StieltjesFunction f;
};

struct Fixture2D {
    KroneckerProblem prob;
    SpectralInterval interval;
};

namespace detail {

inline std::string file_tag(std::string s) {
    for (char& c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.') c = '_';
    return s;
}

inline Vector chebyshev_points(Index m, double lo, double hi) {
    Vector x(m);
    for (Index k = 0; k < m; ++k)
        x(k) = 0.5 * (lo + hi) +
               0.5 * (hi - lo) * std::cos(kPi * (2.0 * static_cast<double>(k) + 1.0) / (2.0 * static_cast<double>(m)));
    return x;
}

inline StieltjesFunction function_or(const ExperimentConfig& c, const std::string& fallback) {
    return make_catalog_function(c.function.empty() ? fallback : c.function);
}

inline Fixture1D make_1d(std::string tag, HermitianOperator op, StieltjesFunction f, const ExperimentConfig& c) {
    const SpectralInterval i = spectral_interval(op, {IntervalMode::exact, 0.0, 0.0, 0.0, c.dense_limit});
    const double eta = resolve_shift(c.shift, i);
    if (eta != 0.0) f = f.with_shift(eta);
    return {std::move(tag), std::move(op), i, std::move(f)};
}

}  // namespace detail

inline std::vector<Fixture1D> fixtures_1d(const ExperimentConfig& c) {
    std::vector<Fixture1D> out;
    const std::string& id = c.id;
    if (id == "fig-lapl-1d") {
        out.push_back(detail::make_1d("", io::diffusion_1d(c.n), detail::function_or(c, "phi:1"), c));
    } else if (id == "fig-cauchy-1d" || id == "table-times") {
        out.push_back(detail::make_1d("", io::laplacian_1d(c.n), detail::function_or(c, "power:-0.5"), c));
    } else if (id == "fig-cauchy-1d-eig") {
        const auto f = detail::function_or(c, "power:-0.5");
        const double nd = static_cast<double>(c.n);
        out.push_back(detail::make_1d("equispaced",
                                      HermitianOperator::diagonal(Vector::LinSpaced(c.n, 1.0 / nd, 1.0)), f, c));
        out.push_back(detail::make_1d(
            "shifted-laplacian",
            HermitianOperator::diagonal(toeplitz_tridiagonal_eigenvalues(c.n, 2.0 + 1e-3, -1.0)), f, c));
        Vector two(c.n);
        two << detail::chebyshev_points(20, 1e-3, 1e-1), detail::chebyshev_points(c.n - 20, 10.0, 1e3);
        out.push_back(detail::make_1d("two-clusters", HermitianOperator::diagonal(two), f, c));
    } else if (id == "fig-cauchy-1d-funcs") {
        const std::vector<std::string> specs =
            c.function.empty() ? std::vector<std::string>{"one_minus_exp_sqrt_over_z", "power:-0.2", "power:-0.8"}
                               : std::vector<std::string>{c.function};
        for (const auto& s : specs)
            out.push_back(detail::make_1d(detail::file_tag(s), io::laplacian_1d(c.n), make_catalog_function(s), c));
    } else {
        throw DomainError(detail::concat(id, " is not a single-vector experiment"));
    }
    return out;
}

/// M = I (x) A + A (x) I, so B = -A and bneg = A; F = u v^T with seeded unit
/// normal factors.
inline Fixture2D fixture_2d(const ExperimentConfig& c) {
    if (!is_kronecker_experiment(c.id)) throw DomainError(detail::concat(c.id, " is not a Kronecker experiment"));
    const bool lapl = c.id == "fig-lapl-2d";
    const HermitianOperator a = lapl ? io::diffusion_1d(c.n) : io::laplacian_1d(c.n);
    const StieltjesFunction f = detail::function_or(c, lapl ? "phi:1" : "power:-0.5");
    const SpectralInterval i = spectral_interval(a, {IntervalMode::exact, 0.0, 0.0, 0.0, c.dense_limit});
    return {{a, a, seeded_unit_vector(c.n, c.seed), seeded_unit_vector(c.n, c.seed + 1), f}, i};
}

/// Strategy runs of one fixture.
struct StrategyRun {
    std::string tag;
    std::string strategy;
    std::vector<TraceRow> trace;
};

struct ExperimentResult {
    std::vector<StrategyRun> runs;
    std::vector<std::string> files;
};

namespace detail {

/// Runs the jobs with at most `threads` in flight, preserving order.
template <typename T>
std::vector<T> run_parallel(std::vector<std::function<T()>> jobs, unsigned threads) {
    std::vector<T> out;
    out.reserve(jobs.size());
    if (threads <= 1) {
        for (auto& j : jobs) out.push_back(j());
        return out;
    }
    for (std::size_t start = 0; start < jobs.size(); start += threads) {
        std::vector<std::future<T>> batch;
        for (std::size_t k = start; k < std::min(jobs.size(), start + threads); ++k)
            batch.push_back(std::async(std::launch::async, jobs[k]));
        for (auto& f : batch) out.push_back(f.get());
    }
    return out;
}

inline std::string output_stem(const ExperimentConfig& c, const std::string& tag) {
    return c.id + (tag.empty() ? "" : "-" + tag);
}

inline io::CsvTable experiment_table(const std::vector<TraceRow>& trace) {
    io::CsvTable t({"ell", "true_error", "bound"});
    for (const auto& r : trace) t.add_numbers({static_cast<double>(r.ell), r.true_error, r.bound});
    return t;
}

inline std::string save(const ExperimentConfig& c, const std::string& name, const io::CsvTable& t) {
    const std::string path = (std::filesystem::path(c.out_dir) / name).string();
    t.save(path);
    return path;
}
}  // namespace detail

/// Pole pairs (Psi, Xi) for a Kronecker run. Nested plans are built once at
/// full length; fixed plans are regenerated for every ell.
struct KronPolePlan {
    bool nested = true;
    std::function<std::pair<PoleSequence, PoleSequence>(std::size_t)> poles;
};

/// Laplace-type and polynomial spaces use Xi = -Psi; the Cauchy sets come
/// paired from cauchy_kron_poles. Custom Xi defaults to -Psi.
inline KronPolePlan kron_pole_plan(Strategy s, const SpectralInterval& interval, const PoleSequence& custom_psi = {},
                                   const PoleSequence& custom_xi = {}) {
    auto mirrored = [](PoleSequence psi) { return std::pair<PoleSequence, PoleSequence>{psi, psi.negated()}; };
    switch (s) {
    case Strategy::extended: return {true, [=](std::size_t n) { return mirrored(extended_poles(n)); }};
    case Strategy::polynomial: return {true, [=](std::size_t n) { return mirrored(polynomial_poles(n)); }};
    case Strategy::eds_cauchy:
        return {true, [=](std::size_t n) { return mirrored(eds_poles(interval, n, EdsVariant::cauchy_kron)); }};
    case Strategy::eds_laplace:
        return {true, [=](std::size_t n) { return mirrored(eds_poles(interval, n, EdsVariant::laplace)); }};
    case Strategy::zolotarev: return {false, [=](std::size_t n) { return mirrored(zolotarev_poles(interval, n)); }};
    case Strategy::cauchy: return {false, [=](std::size_t n) { return cauchy_kron_poles(interval, n); }};
    case Strategy::custom:
        detail::require(!custom_psi.empty(), "custom Kronecker poles need a non-empty Psi list");
        return {true, [=](std::size_t n) {
                    if (custom_psi.size() < n || (!custom_xi.empty() && custom_xi.size() < n))
                        throw DomainError(detail::concat("custom Kronecker poles: need ", n, " poles per side"));
                    return std::pair<PoleSequence, PoleSequence>{
                        custom_psi.prefix(n), custom_xi.empty() ? custom_psi.prefix(n).negated() : custom_xi.prefix(n)};
                }};
    }
    throw DomainError("kron_pole_plan: unknown strategy");
}

struct KronSweep {
    std::vector<TraceRow> trace;
    KroneckerResult last;
};

/// X_ell for ell = 1..ell_max with the class bound; true_error is the
/// 2-norm distance to ref when given, NaN otherwise.
inline KronSweep kron_sweep(const KroneckerProblem& prob, const SpectralInterval& interval, const KronPolePlan& plan,
                            std::size_t ell_max, const Matrix* ref = nullptr) {
    detail::require(ell_max >= 1, "kron_sweep: ell_max must be at least 1");
    const double fn = lowrank_norm(prob.uf, prob.vf);
    const double refn = ref ? spectral_norm(*ref) : 0.0;
    KronSweep out;
    const auto start = std::chrono::steady_clock::now();
    double excluded = 0.0;
    auto row = [&](KroneckerResult r) {
        TraceRow t{r.ell, r.u.cols(), kInf, std::numeric_limits<double>::quiet_NaN(),
                   std::numeric_limits<double>::quiet_NaN(), bounds::for_class_kron(prob.f, interval, r.ell, fn)};
        t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() - excluded;
        if (ref) {
            const auto t0 = std::chrono::steady_clock::now();
            t.true_error = spectral_norm(r.dense() - *ref);
            t.rel_true_error = t.true_error / (refn > 0.0 ? refn : 1.0);
            excluded += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
        out.trace.push_back(t);
        out.last = std::move(r);
    };
    if (plan.nested) {
        const auto [psi, xi] = plan.poles(ell_max);
        const auto sp = build_kron_spaces(prob, psi, xi, ell_max);
        for (std::size_t ell = 1; ell <= ell_max; ++ell) row(kron_eval(prob, sp, ell));
        return out;
    }
    for (std::size_t ell = 1; ell <= ell_max; ++ell) {
        const auto [psi, xi] = plan.poles(ell);
        row(kron_fun(prob, psi, xi, ell));
    }
    return out;
}

/// A-priori bound curves (ell, bound) per fixture, for ell = 1..ell_max.
/// Laplace-class bounds need a finite f(0+); a shift 0 < eta < a fixes that.
inline std::vector<std::pair<std::string, io::CsvTable>> emit_bounds(const ExperimentConfig& c) {
    c.validate();
    std::vector<std::pair<std::string, io::CsvTable>> out;
    auto curve = [&](const std::string& tag, auto bound_at) {
        io::CsvTable t({"ell", "bound"});
        for (std::size_t ell = 1; ell <= c.ell_max; ++ell) t.add_numbers({static_cast<double>(ell), bound_at(ell)});
        out.emplace_back(tag, std::move(t));
    };
    auto need_anchor = [](const StieltjesFunction& f, const SpectralInterval& wi) {
        if (!f.is_cauchy() && !std::isfinite(bound_anchor(f, Anchor::f0plus, wi)))
            throw DomainError(detail::concat(f.label(), ": f(0+) is infinite, so the Laplace-type bound is void; ",
                                             "apply it to f(z + eta) with 0 < eta < a (e.g. --shift a/2)"));
    };
    if (is_kronecker_experiment(c.id)) {
        const Fixture2D fx = fixture_2d(c);
        need_anchor(fx.prob.f, fx.interval);
        const double fn = lowrank_norm(fx.prob.uf, fx.prob.vf);
        curve("", [&](std::size_t ell) { return bounds::for_class_kron(fx.prob.f, fx.interval, ell, fn); });
        return out;
    }
    for (const auto& fx : fixtures_1d(c)) {
        const SpectralInterval wi = fx.interval.shifted(fx.f.shift());
        need_anchor(fx.f, wi);
        curve(fx.tag, [&](std::size_t ell) { return bounds::for_class_1d(fx.f, wi, ell, 1.0); });
    }
    return out;
}

inline std::string write_gnuplot(const ExperimentConfig& c, const ExperimentResult& r) {
    const std::string path = (std::filesystem::path(c.out_dir) / (c.id + ".gp")).string();
    std::ofstream gp(path);
    if (!gp) throw Error(detail::concat("cannot write '", path, "'"));
    gp << "set datafile separator ','\nset logscale y\nset key outside\nset xlabel 'l'\nset ylabel 'error'\n";
    std::map<std::string, std::vector<const StrategyRun*>> by_tag;
    for (const auto& run : r.runs) by_tag[run.tag].push_back(&run);
    int page = 0;
    for (const auto& [tag, runs] : by_tag) {
        if (page++) gp << "pause -1\n";
        gp << "set title '" << detail::output_stem(c, tag) << "'\nplot ";
        for (std::size_t k = 0; k < runs.size(); ++k) {
            const std::string file = detail::output_stem(c, tag) + "-" + runs[k]->strategy + ".csv";
            gp << (k ? ", \\\n     " : "") << "'" << file << "' every ::1 using 1:2 with linespoints title '"
               << runs[k]->strategy << "'";
        }
        const std::string first = detail::output_stem(c, tag) + "-" + runs.front()->strategy + ".csv";
        gp << ", \\\n     '" << first << "' every ::1 using 1:3 with lines dashtype 2 title 'bound'\n";
    }
    return path;
}

/// Runs every strategy on every fixture of the experiment and writes
/// <id>[-<tag>]-<strategy>.csv (ell, true_error, bound); table-times adds
/// <id>-summary.csv (tolerance, strategy, iterations, seconds) and the 2D
/// experiments add <id>-singular-values.csv (index, sigma, bound).
inline ExperimentResult run_experiment(const ExperimentConfig& c) {
    c.validate();
    std::filesystem::create_directories(c.out_dir);
    ExperimentResult res;

    if (is_kronecker_experiment(c.id)) {
        const Fixture2D fx = fixture_2d(c);
        const Matrix ref = kron_oracle(fx.prob, std::min(c.dense_limit, kKronDenseLimit));
        std::vector<std::function<StrategyRun()>> jobs;
        for (const auto& name : c.strategies) {
            const Strategy s = parse_strategy(name, fx.prob.f.function_class());
            jobs.push_back([&, name, s] {
                return StrategyRun{"", name, kron_sweep(fx.prob, fx.interval, kron_pole_plan(s, fx.interval), c.ell_max, &ref).trace};
            });
        }
        res.runs = detail::run_parallel(std::move(jobs), c.threads);
        for (const auto& run : res.runs)
            res.files.push_back(detail::save(c, c.id + "-" + run.strategy + ".csv", detail::experiment_table(run.trace)));
        const auto rep = singular_decay_report(fx.prob, ref, fx.interval, c.ell_max);
        io::CsvTable sv({"index", "sigma", "bound"});
        std::map<Index, double> bound_at;
        for (const auto& r : rep.rows) bound_at[r.index] = r.bound;
        const Index shown = std::min<Index>(rep.singular_values.size(), static_cast<Index>(c.ell_max) + 1);
        for (Index j = 1; j <= shown; ++j) {
            const auto it = bound_at.find(j);
            sv.add_numbers({static_cast<double>(j), rep.singular_values(j - 1),
                            it == bound_at.end() ? std::numeric_limits<double>::quiet_NaN() : it->second});
        }
        res.files.push_back(detail::save(c, c.id + "-singular-values.csv", sv));
        if (c.gnuplot) res.files.push_back(write_gnuplot(c, res));
        return res;
    }

    const std::vector<Fixture1D> fixtures = fixtures_1d(c);
    const Vector v = seeded_unit_vector(c.n, c.seed);
    // The fixture function g(z) = f(z + eta) stands for f; the reference is f(A) v.
    std::vector<BlockVector> refs;
    for (const auto& fx : fixtures) {
        const double eta = fx.f.shift();
        refs.push_back(oracle_funv(fx.op, [&fx, eta](double z) { return fx.f(z - eta); }, v, c.dense_limit));
    }

    const bool table = c.id == "table-times";
    std::vector<std::function<StrategyRun()>> jobs;
    for (std::size_t k = 0; k < fixtures.size(); ++k)
        for (const auto& name : c.strategies) {
            const Strategy s = parse_strategy(name, fixtures[k].f.function_class());
            jobs.push_back([&, k, name, s] {
                DriverOptions opt;
                opt.maxiter = c.ell_max;
                opt.fixed_stride = 1;
                opt.reference = refs[k];
                if (table) {
                    opt.stop = StopRule::true_error;
                    opt.tol = *std::min_element(c.tolerances.begin(), c.tolerances.end());
                } else {
                    opt.stop = StopRule::never;
                }
                auto r = funv_driver(fixtures[k].op, v, fixtures[k].f, s, fixtures[k].interval, opt);
                return StrategyRun{fixtures[k].tag, name, std::move(r.trace)};
            });
        }
    res.runs = detail::run_parallel(std::move(jobs), c.threads);
    for (const auto& run : res.runs)
        res.files.push_back(detail::save(c, detail::output_stem(c, run.tag) + "-" + run.strategy + ".csv",
                                         detail::experiment_table(run.trace)));
    if (table) {
        io::CsvTable summary({"tolerance", "strategy", "iterations", "seconds"});
        for (double tol : c.tolerances)
            for (const auto& run : res.runs) {
                const auto hit = std::find_if(run.trace.begin(), run.trace.end(),
                                              [&](const TraceRow& r) { return r.rel_true_error <= tol; });
                const bool ok = hit != run.trace.end();
                summary.add({io::format_double(tol), run.strategy,
                             ok ? std::to_string(hit->ell) : "inf", ok ? io::format_double(hit->seconds) : "inf"});
            }
        res.files.push_back(detail::save(c, c.id + "-summary.csv", summary));
    }
    if (c.gnuplot) res.files.push_back(write_gnuplot(c, res));
    return res;
}

}  // namespace ratkrylov
