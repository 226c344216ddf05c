#include <ratkrylov/acceptance.hpp>
#include <ratkrylov/driver.hpp>
#include <ratkrylov/experiments.hpp>
#include <ratkrylov/io.hpp>
#include <ratkrylov/kronfun.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace rk = ratkrylov;

namespace {

struct Globals {
    std::uint64_t seed = 1;
    unsigned threads = 1;
    rk::Index dense_limit = rk::kDefaultDenseLimit;
    bool gnuplot = false;
    // Set when the flag was given explicitly, so it may override a config file.
    bool seed_set = false;
    bool threads_set = false;
    bool dense_limit_set = false;
};

bool on_off(const std::string& s, const std::string& flag) {
    if (s == "on") return true;
    if (s == "off") return false;
    throw rk::DomainError("--" + flag + " must be 'on' or 'off', got '" + s + "'");
}

/// "auto" (exact, falling back to Gershgorin past the dense limit),
/// "gershgorin", or "a,b".
rk::SpectralInterval resolve_interval(const rk::HermitianOperator& op, const std::string& spec, rk::Index dense_limit) {
    if (spec == "gershgorin") return rk::spectral_interval(op, {rk::IntervalMode::gershgorin});
    if (spec == "auto") {
        try {
            return rk::spectral_interval(op, {rk::IntervalMode::exact, 0.0, 0.0, 0.0, dense_limit});
        } catch (const rk::DomainError& e) {
            std::cerr << "note: exact interval unavailable (" << e.what() << "); using Gershgorin\n";
            return rk::spectral_interval(op, {rk::IntervalMode::gershgorin});
        }
    }
    const auto ab = rk::detail::split(spec, ',');
    if (ab.size() != 2) throw rk::DomainError("--interval must be 'auto', 'gershgorin' or 'a,b', got '" + spec + "'");
    return {rk::detail::parse_double(ab[0], "interval a"), rk::detail::parse_double(ab[1], "interval b")};
}

rk::SpectralInterval hull(const rk::SpectralInterval& x, const rk::SpectralInterval& y) {
    return {std::min(x.a(), y.a()), std::max(x.b(), y.b())};
}

std::string fmt(double x) { return rk::io::format_double(x); }

// ---------------------------------------------------------------------------

struct FunvArgs {
    std::string matrix, function, poles = "eds", pole_file, interval = "auto", shift = "0", rhs, out, result;
    double tol = 1e-8;
    std::size_t maxiter = 50;
    std::size_t stride = 4;
    std::string oracle = "on";
};

int run_funv(const FunvArgs& a, const Globals& g) {
    const rk::HermitianOperator op = rk::io::load_matrix(a.matrix, g.dense_limit);
    rk::StieltjesFunction f = rk::make_catalog_function(a.function);
    const rk::SpectralInterval interval = resolve_interval(op, a.interval, g.dense_limit);
    const double eta = rk::resolve_shift(a.shift, interval);
    if (eta != 0.0) f = f.with_shift(eta);
    const rk::Strategy s = rk::parse_strategy(a.poles, f.function_class());

    rk::BlockVector v = a.rhs.empty() ? rk::BlockVector(rk::seeded_unit_vector(op.size(), g.seed))
                                      : rk::BlockVector(rk::io::read_factor(a.rhs));
    if (v.rows() != op.size())
        throw rk::DimensionError(rk::detail::concat("--rhs has ", v.rows(), " rows, matrix order is ", op.size()));

    rk::DriverOptions opt;
    opt.tol = a.tol;
    opt.maxiter = a.maxiter;
    opt.fixed_stride = a.stride;
    if (s == rk::Strategy::custom) {
        if (a.pole_file.empty()) throw rk::DomainError("--poles custom needs --pole-file");
        opt.custom = rk::io::read_poles_file(a.pole_file);
    }
    const bool oracle = on_off(a.oracle, "oracle");
    if (oracle)
        opt.reference = rk::oracle_funv(op, [&f, eta](double z) { return f(z - eta); }, v, g.dense_limit);

    const rk::DriverResult r = rk::funv_driver(op, v, f, s, interval, opt);
    if (!a.out.empty()) rk::io::trace_table(r.trace, oracle).save(a.out);
    if (!a.result.empty()) {
        rk::io::CsvTable x([&] {
            std::vector<std::string> h;
            for (rk::Index j = 0; j < r.x.cols(); ++j) h.push_back(rk::detail::concat("x", j));
            return h;
        }());
        for (rk::Index i = 0; i < r.x.rows(); ++i) {
            std::vector<double> row(r.x.cols());
            for (rk::Index j = 0; j < r.x.cols(); ++j) row[j] = r.x(i, j);
            x.add_numbers(row);
        }
        x.save(a.result);
    }

    const rk::TraceRow& last = r.trace.back();
    std::cout << "function    " << f.label() << (eta != 0.0 ? " shifted by " + fmt(eta) : "") << '\n'
              << "strategy    " << rk::to_string(s) << '\n'
              << "interval    [" << fmt(interval.a()) << ", " << fmt(interval.b()) << "]\n"
              << "iterations  " << r.iterations << (r.converged ? " (converged)" : " (not converged)") << '\n'
              << "dimension   " << last.dim << '\n'
              << "est_error   " << fmt(last.est_error) << '\n';
    if (oracle) std::cout << "rel_error   " << fmt(last.rel_true_error) << '\n';
    std::cout << "bound       " << fmt(last.bound) << '\n';
    return r.converged ? 0 : 3;
}

// ---------------------------------------------------------------------------

struct KronArgs {
    std::string a, b, function, poles = "eds", pole_file, xi_file, interval = "auto", ufile, vfile, out, svd_report;
    rk::Index rank = 1;
    std::size_t ell = 20;
    std::string oracle = "on";
};

int run_kronfun(const KronArgs& a, const Globals& g) {
    const rk::Index kron_limit = std::min(g.dense_limit, rk::kKronDenseLimit);
    rk::HermitianOperator aop = rk::io::load_matrix(a.a, g.dense_limit);
    rk::HermitianOperator bneg = rk::io::load_matrix(a.b, g.dense_limit);
    const rk::StieltjesFunction f = rk::make_catalog_function(a.function);

    rk::Matrix uf, vf;
    if (a.ufile.empty() != a.vfile.empty()) throw rk::DomainError("--ufile and --vfile must be given together");
    if (!a.ufile.empty()) {
        uf = rk::io::read_factor(a.ufile);
        vf = rk::io::read_factor(a.vfile);
    } else {
        if (a.rank < 1) throw rk::DomainError("--rank must be at least 1");
        uf.resize(aop.size(), a.rank);
        vf.resize(bneg.size(), a.rank);
        for (rk::Index j = 0; j < a.rank; ++j) {
            const std::uint64_t s = g.seed + 2 * static_cast<std::uint64_t>(j);
            uf.col(j) = rk::seeded_unit_vector(aop.size(), s);
            vf.col(j) = rk::seeded_unit_vector(bneg.size(), s + 1);
        }
    }
    rk::KroneckerProblem prob{std::move(aop), std::move(bneg), std::move(uf), std::move(vf), f};
    prob.validate();

    // Both spectra must lie in [a, b]: A on the Psi side, -B on the Xi side.
    const rk::SpectralInterval interval =
        a.interval == "auto" || a.interval == "gershgorin"
            ? hull(resolve_interval(prob.a, a.interval, g.dense_limit),
                   resolve_interval(prob.bneg, a.interval, g.dense_limit))
            : resolve_interval(prob.a, a.interval, g.dense_limit);

    rk::Strategy s;
    if (a.poles == "laplace")
        s = rk::Strategy::zolotarev;
    else if (a.poles == "cauchy-kron")
        s = rk::Strategy::cauchy;
    else
        s = rk::parse_strategy(a.poles, f.function_class());
    rk::PoleSequence psi, xi;
    if (s == rk::Strategy::custom) {
        if (a.pole_file.empty()) throw rk::DomainError("--poles custom needs --pole-file");
        psi = rk::io::read_poles_file(a.pole_file);
        if (!a.xi_file.empty()) xi = rk::io::read_poles_file(a.xi_file);
    }

    const bool oracle = on_off(a.oracle, "oracle");
    std::optional<rk::Matrix> ref;
    if (oracle) ref = rk::kron_oracle(prob, kron_limit);
    const rk::KronSweep sweep =
        rk::kron_sweep(prob, interval, rk::kron_pole_plan(s, interval, psi, xi), a.ell, ref ? &*ref : nullptr);

    if (!a.out.empty()) {
        rk::io::CsvTable t(oracle ? std::vector<std::string>{"ell", "true_error", "bound"}
                                  : std::vector<std::string>{"ell", "bound"});
        for (const auto& r : sweep.trace) {
            if (oracle)
                t.add_numbers({static_cast<double>(r.ell), r.true_error, r.bound});
            else
                t.add_numbers({static_cast<double>(r.ell), r.bound});
        }
        t.save(a.out);
    }
    if (!a.svd_report.empty()) {
        const rk::Matrix x = ref ? *ref : sweep.last.dense();
        const auto rep = rk::singular_decay_report(prob, x, interval, a.ell);
        rk::io::CsvTable t({"ell", "index", "sigma", "bound", "ok"});
        for (const auto& r : rep.rows)
            t.add_numbers({static_cast<double>(r.ell), static_cast<double>(r.index), r.sigma, r.bound, r.ok ? 1.0 : 0.0});
        t.save(a.svd_report);
    }

    const rk::TraceRow& last = sweep.trace.back();
    std::cout << "function    " << f.label() << '\n'
              << "poles       " << a.poles << '\n'
              << "interval    [" << fmt(interval.a()) << ", " << fmt(interval.b()) << "]\n"
              << "ell         " << last.ell << '\n'
              << "rank        " << sweep.last.u.cols() << " x " << sweep.last.v.cols() << '\n';
    // For f = 1/z, X solves A X - X B = U_F V_F^T and the residual is meaningful.
    if (f.label() == "inverse") std::cout << "residual    " << fmt(rk::sylvester_residual(prob, sweep.last)) << '\n';
    if (oracle) std::cout << "error       " << fmt(last.true_error) << " (relative " << fmt(last.rel_true_error) << ")\n";
    std::cout << "bound       " << fmt(last.bound) << '\n';
    return 0;
}

// ---------------------------------------------------------------------------

struct PolesArgs {
    std::string strategy, interval, out, side = "psi";
    std::size_t count = 10;
    double zeta = 1.0 / std::sqrt(2.0);
};

int run_poles(const PolesArgs& a) {
    auto need_interval = [&] {
        if (a.interval.empty()) throw rk::DomainError("strategy '" + a.strategy + "' needs --interval a,b");
        const auto ab = rk::detail::split(a.interval, ',');
        if (ab.size() != 2) throw rk::DomainError("--interval must be 'a,b'");
        return rk::SpectralInterval(rk::detail::parse_double(ab[0], "interval a"),
                                    rk::detail::parse_double(ab[1], "interval b"));
    };
    if (a.side != "psi" && a.side != "xi") throw rk::DomainError("--side must be 'psi' or 'xi'");
    rk::PoleSequence p;
    const std::string& s = a.strategy;
    if (s == "zolotarev")
        p = rk::zolotarev_poles(need_interval(), a.count);
    else if (s == "cauchy")
        p = rk::cauchy_poles(need_interval(), a.count);
    else if (s == "cauchy-kron") {
        auto pair = rk::cauchy_kron_poles(need_interval(), a.count);
        p = a.side == "psi" ? pair.first : pair.second;
    } else if (s == "eds-laplace")
        p = rk::eds_poles(need_interval(), a.count, rk::EdsVariant::laplace, a.zeta);
    else if (s == "eds-cauchy")
        p = rk::eds_poles(need_interval(), a.count, rk::EdsVariant::cauchy, a.zeta);
    else if (s == "eds-cauchy-kron")
        p = rk::eds_poles(need_interval(), a.count, rk::EdsVariant::cauchy_kron, a.zeta);
    else if (s == "extended")
        p = rk::extended_poles(a.count);
    else if (s == "polynomial")
        p = rk::polynomial_poles(a.count);
    else
        throw rk::DomainError("unknown pole strategy '" + s + "'");
    if (a.side == "xi" && s != "cauchy-kron") p = p.negated();

    if (a.out.empty() || a.out == "-") {
        rk::io::write_poles(std::cout, p);
    } else {
        std::ofstream os(a.out);
        if (!os) throw rk::Error("cannot write '" + a.out + "'");
        rk::io::write_poles(os, p);
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct ExperimentArgs {
    std::string id, config, function, shift, strategies, out_dir;
    rk::Index n = 0;
    std::size_t ell_max = 0;
    bool bounds_only = false;
};

int run_experiment_cmd(const ExperimentArgs& a, const Globals& g) {
    rk::ExperimentConfig c;
    if (!a.config.empty()) {
        std::ifstream in(a.config);
        if (!in) throw rk::Error("cannot open config file '" + a.config + "'");
        c = rk::parse_experiment_config(in, a.config);
        if (!a.id.empty() && a.id != c.id)
            throw rk::DomainError("experiment id '" + a.id + "' conflicts with config id '" + c.id + "'");
    } else {
        if (a.id.empty()) throw rk::DomainError("experiment needs an id or --config");
        c = rk::default_config(a.id);
    }
    if (a.n > 0) c.n = a.n;
    if (a.ell_max > 0) c.ell_max = a.ell_max;
    if (!a.function.empty()) c.function = a.function;
    if (!a.shift.empty()) c.shift = a.shift;
    if (!a.strategies.empty()) c.strategies = rk::detail::split(a.strategies, ',');
    if (!a.out_dir.empty()) c.out_dir = a.out_dir;
    if (g.seed_set || a.config.empty()) c.seed = g.seed;
    if (g.threads_set || a.config.empty()) c.threads = g.threads;
    if (g.dense_limit_set || a.config.empty()) c.dense_limit = g.dense_limit;
    if (g.gnuplot) c.gnuplot = true;

    if (a.bounds_only) {
        for (const auto& [tag, table] : rk::emit_bounds(c)) {
            const std::string name = c.id + (tag.empty() ? "" : "-" + tag) + "-bounds.csv";
            const std::string path = (std::filesystem::path(c.out_dir) / name).string();
            table.save(path);
            std::cout << path << '\n';
        }
        return 0;
    }
    const rk::ExperimentResult r = rk::run_experiment(c);
    for (const auto& run : r.runs) {
        const rk::TraceRow& last = run.trace.back();
        std::cout << (run.tag.empty() ? "" : run.tag + " ") << run.strategy << ": ell " << last.ell << ", error "
                  << fmt(last.true_error) << ", bound " << fmt(last.bound) << '\n';
    }
    for (const auto& f : r.files) std::cout << f << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rational Krylov evaluation of Stieltjes matrix functions"};
    app.require_subcommand(1);
    // Global flags may follow the subcommand name.
    app.fallthrough();
    Globals g;
    auto* seed_opt = app.add_option("--seed", g.seed, "Seed for random vectors and factors");
    auto* threads_opt = app.add_option("--threads", g.threads, "Strategies run concurrently")->check(CLI::Range(1u, 256u));
    auto* dense_opt = app.add_option("--dense-limit", g.dense_limit, "Largest order handled by dense eigensolvers")
                          ->check(CLI::PositiveNumber);
    app.add_flag("--gnuplot", g.gnuplot, "Write a gnuplot script next to experiment CSVs");

    FunvArgs fa;
    auto* funv = app.add_subcommand("funv", "Evaluate f(A) v to a tolerance");
    funv->add_option("--matrix", fa.matrix, "tridiag:N, diffusion:N, a .mtx file, or a diagonal file")->required();
    funv->add_option("--function", fa.function, "phi:J, power:-ALPHA, inverse, lambertw, ...")->required();
    funv->add_option("--poles", fa.poles, "zolotarev|cauchy|eds|eds-laplace|eds-cauchy|extended|polynomial|custom");
    funv->add_option("--pole-file", fa.pole_file, "Poles for --poles custom, one per line");
    funv->add_option("--interval", fa.interval, "auto, gershgorin, or a,b");
    funv->add_option("--shift", fa.shift, "Evaluate through f(z + eta) on A - eta I: 0, a number, or a/2");
    funv->add_option("--tol", fa.tol, "Relative tolerance on the lag-2 iterate difference")->check(CLI::PositiveNumber);
    funv->add_option("--maxiter", fa.maxiter, "Maximum number of poles")->check(CLI::PositiveNumber);
    funv->add_option("--stride", fa.stride, "Checkpoint spacing for the fixed optimal sets")->check(CLI::PositiveNumber);
    funv->add_option("--oracle", fa.oracle, "on|off: compute the reference f(A) v");
    funv->add_option("--rhs", fa.rhs, "Block right-hand side, one row per line (default: seeded unit vector)");
    funv->add_option("--out", fa.out, "Trace CSV: ell, est_error, [true_error,] bound");
    funv->add_option("--result", fa.result, "CSV of the computed f(A) v");

    KronArgs ka;
    auto* kron = app.add_subcommand("kronfun", "Evaluate f(I (x) A - B^T (x) I) vec(U V^T) in low-rank form");
    kron->add_option("--a", ka.a, "Operator A")->required();
    kron->add_option("--b", ka.b, "Operator -B (symmetric positive definite)")->required();
    kron->add_option("--function", ka.function, "Catalog function")->required();
    kron->add_option("--rank", ka.rank, "Width k of the seeded random factors");
    kron->add_option("--ufile", ka.ufile, "Left factor U_F, one row per line");
    kron->add_option("--vfile", ka.vfile, "Right factor V_F, one row per line");
    kron->add_option("--poles", ka.poles, "laplace|cauchy-kron|eds|extended|polynomial|custom");
    kron->add_option("--pole-file", ka.pole_file, "Psi for --poles custom");
    kron->add_option("--xi-file", ka.xi_file, "Xi for --poles custom (default: -Psi)");
    kron->add_option("--interval", ka.interval, "auto, gershgorin, or a,b enclosing both spectra");
    kron->add_option("--ell", ka.ell, "Number of poles per side")->check(CLI::PositiveNumber);
    kron->add_option("--oracle", ka.oracle, "on|off: dense reference solution");
    kron->add_option("--out", ka.out, "Trace CSV: ell, [true_error,] bound");
    kron->add_option("--svd-report", ka.svd_report, "CSV of sigma_{1+ell k}(X) against the decay bound");

    PolesArgs pa;
    auto* poles = app.add_subcommand("poles", "Print a pole sequence, one pole per line");
    poles->add_option("strategy", pa.strategy,
                      "zolotarev|cauchy|cauchy-kron|eds-laplace|eds-cauchy|eds-cauchy-kron|extended|polynomial")
        ->required();
    poles->add_option("--interval", pa.interval, "a,b");
    poles->add_option("--count", pa.count, "Number of poles")->check(CLI::PositiveNumber);
    poles->add_option("--side", pa.side, "psi|xi: which side of a Kronecker pair");
    poles->add_option("--zeta", pa.zeta, "Irrational seed of the equidistributed sequence")->check(CLI::PositiveNumber);
    poles->add_option("--out", pa.out, "Output file (default: stdout)");

    ExperimentArgs ea;
    auto* exp = app.add_subcommand("experiment", "Run a convergence experiment and write CSV traces");
    exp->add_option("id", ea.id, "Experiment id")->check(CLI::IsMember(rk::experiment_ids()));
    exp->add_option("--config", ea.config, "key = value config file");
    exp->add_option("--n", ea.n, "Problem size")->check(CLI::PositiveNumber);
    exp->add_option("--ell-max", ea.ell_max, "Largest number of poles")->check(CLI::PositiveNumber);
    exp->add_option("--function", ea.function, "Catalog function overriding the default");
    exp->add_option("--shift", ea.shift, "0, a number, or a/2");
    exp->add_option("--strategies", ea.strategies, "Comma-separated strategy list");
    exp->add_option("--out-dir", ea.out_dir, "Output directory");
    exp->add_flag("--bounds", ea.bounds_only, "Only write the a-priori bound curves");

    std::vector<int> accept_ids;
    auto* accept = app.add_subcommand("accept", "Run the acceptance suite");
    accept->add_option("ids", accept_ids, "Criterion numbers (default: all)")->check(CLI::Range(1, 11));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }
    g.seed_set = seed_opt->count() > 0;
    g.threads_set = threads_opt->count() > 0;
    g.dense_limit_set = dense_opt->count() > 0;

    try {
        if (*funv) return run_funv(fa, g);
        if (*kron) return run_kronfun(ka, g);
        if (*poles) return run_poles(pa);
        if (*exp) return run_experiment_cmd(ea, g);
        if (*accept) {
            rk::acceptance::Options o;
            if (g.seed_set) o.seed = g.seed;
            return rk::acceptance::run_acceptance(std::cout, o, accept_ids) == 0 ? 0 : 1;
        }
    } catch (const rk::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
