#include "ttlat/cli.hpp"

#include "ttlat/cross.hpp"
#include "ttlat/eig.hpp"
#include "ttlat/lattice.hpp"
#include "ttlat/oracle.hpp"
#include "ttlat/tt.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace ttlat::cli {

namespace {

using lattice::LatticeSet;
using lattice::ScalarFunction;

std::string fmt(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

const char* csv_bool(bool b) { return b ? "true" : "false"; }

std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

LatticeSet contiguous(Int n) {
    std::vector<Int> v(static_cast<size_t>(n));
    std::iota(v.begin(), v.end(), Int{1});
    return LatticeSet(std::move(v));
}

// Predicted eigenvalue magnitude against the double range: entries reach
// max|f| and a bound-style contraction sums n^{d-1} of them. Cells past
// the cap are reported as skipped instead of emitting infinities.
bool cell_overflows(Int n, Index d, const ScalarFunction& f) {
    double lf = 0.0;
    for (Int x = 1; x <= n; ++x) lf = std::max(lf, std::log(std::max(1.0, std::abs(static_cast<double>(f(x))))));
    double predicted = lf + static_cast<double>(d) * std::log(static_cast<double>(std::max<Int>(2, n)));
    return predicted > 0.9 * std::log(std::numeric_limits<double>::max());
}

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == ':' || c == '/' || c == '\\') c = '_';
    return s;
}

tt::TTTensor cached_lcm(Int n, Index d, const ScalarFunction& f, double eps, std::uint64_t seed,
                        const std::string& cache_dir) {
    std::string path;
    if (!cache_dir.empty()) {
        path = cache_dir + "/lcm_n" + std::to_string(n) + "_d" + std::to_string(d) + "_" +
               sanitize(f.name) + "_eps" + fmt(eps) + "_seed" + std::to_string(seed) + ".tt";
        if (std::filesystem::exists(path)) {
            try {
                return tt::load_tt(path);
            } catch (const std::exception&) {
                // stale or truncated cache entry; rebuild below
            }
        }
    }
    cross::CrossConfig cfg;
    cfg.eps = eps;
    cfg.seed = seed;
    auto res = cross::lcm_tt(n, d, f, cfg);
    if (!path.empty()) {
        std::filesystem::create_directories(cache_dir);
        tt::save_tt(path, res.tensor);
    }
    return std::move(res.tensor);
}

Vector random_start(std::mt19937_64& rng, Index n, double lo) {
    std::uniform_real_distribution<double> u(lo, 1.0);
    Vector x(n);
    do {
        for (Index i = 0; i < n; ++i) x[i] = static_cast<Scalar>(u(rng));
    } while (!(x.norm() > 0));
    x.normalize();
    return x;
}

int write_trace(const std::string& path, const eig::Trace& trace) {
    std::ofstream os(path);
    if (!os) {
        std::cerr << "error: cannot open trace file " << path << "\n";
        return 2;
    }
    os << "iter,lambda,alpha,residual,shift_floor\n";
    for (const auto& row : trace)
        os << row.iter << ',' << fmt(static_cast<double>(row.lambda)) << ','
           << fmt(static_cast<double>(row.alpha)) << ',' << fmt(static_cast<double>(row.residual))
           << ',' << fmt(static_cast<double>(row.shift_floor)) << '\n';
    return 0;
}

int grid_error(const std::string& msg) {
    std::cerr << "error: " << msg << "\n";
    return 2;
}

bool even_grid_ok(const Options& o, std::string& msg) {
    for (Int n : o.n)
        if (n < 1 || n > 1'000'000) {
            msg = "--n values must be in [1, 1e6]";
            return false;
        }
    for (Index d : o.d)
        if (d < 2 || d % 2 != 0) {
            msg = "--d values must be even and at least 2";
            return false;
        }
    return true;
}

} // namespace

std::uint64_t cell_seed(std::uint64_t seed, std::uint64_t n, std::uint64_t d) {
    return splitmix64(splitmix64(splitmix64(seed) ^ n) ^ d);
}

int cmd_storage(const Options& o, std::ostream& os) {
    const auto f = ScalarFunction::parse(o.f);
    const Index d = o.d.empty() ? 3 : o.d.front();
    if (d < 2) return grid_error("storage needs --d at least 2");
    for (Int n : o.n)
        if (n < 1 || n > 1'000'000) return grid_error("storage needs --n in [1, 1e6]");

    os << "n,nnz_per_core,bytes\n";
    for (Int n : o.n) {
        auto t = tt::meet_tt(contiguous(n), f, d);
        os << n << ',' << t.core(0).nnz() << ',' << t.storage_bytes() << '\n';
    }
    return 0;
}

int cmd_ranks(const Options& o, std::ostream& os) {
    const auto f = ScalarFunction::parse(o.f);
    if (o.eps <= 0) return grid_error("ranks needs --eps > 0");
    for (Int n : o.n)
        if (n < 1) return grid_error("ranks needs --n at least 1");
    for (Index d : o.d)
        if (d < 2) return grid_error("ranks needs --d at least 2");

    os << "n,d,theorem_rank,dmrg_rank,match\n";
    for (Int n : o.n)
        for (Index d : o.d) {
            Index theorem = lattice::coprime_product_count(n, static_cast<int>(d / 2));
            auto t = cached_lcm(n, d, f, o.eps, cell_seed(o.seed, static_cast<std::uint64_t>(n),
                                                          static_cast<std::uint64_t>(d)),
                                o.cache_dir);
            Index got = t.max_interior_rank();
            os << n << ',' << d << ',' << theorem << ',' << got << ','
               << csv_bool(got == theorem) << '\n';
        }
    return 0;
}

int cmd_dominant(const Options& o, std::ostream& os) {
    const auto f = ScalarFunction::parse(o.f);
    std::string msg;
    if (!even_grid_ok(o, msg)) return grid_error(msg);
    if (o.mode != "H" && o.mode != "Z") return grid_error("--mode must be H or Z");
    if (o.trials < 1) return grid_error("--trials must be positive");

    os << "n,d,mode,lambda,bound,ratio,iters,converged\n";
    for (Int n : o.n)
        for (Index d : o.d) {
            if (cell_overflows(n, d, f)) {
                os << n << ',' << d << ',' << o.mode << ",,,,,skipped\n";
                continue;
            }
            auto a = tt::meet_tt(contiguous(n), f, d);
            const Scalar bound = eig::eigen_bound(a);

            eig::SolverConfig cfg;
            cfg.mode = o.mode == "H" ? eig::Mode::H : eig::Mode::Z;
            cfg.tol = o.tol;
            cfg.max_iters = 20;

            std::mt19937_64 rng(cell_seed(o.seed, static_cast<std::uint64_t>(n),
                                          static_cast<std::uint64_t>(d)));
            Scalar lambda = 0;
            int iters = 0;
            bool converged = false;
            Vector reported_x0;

            if (o.mode == "H") {
                Vector x0 = random_start(rng, n, 0.0);
                auto p = eig::shopm(a, cfg, x0);
                lambda = p.lambda;
                iters = p.iterations;
                converged = p.converged;
                reported_x0 = x0;
            } else {
                // repeated starts; report the largest converged value and
                // whether every trial agreed with it
                bool all_converged = true;
                bool have = false;
                Scalar lo = 0, hi = 0;
                for (int t = 0; t < o.trials; ++t) {
                    Vector x0 = random_start(rng, n, -1.0);
                    auto p = eig::shopm(a, cfg, x0);
                    iters = std::max(iters, p.iterations);
                    all_converged = all_converged && p.converged;
                    if (p.converged) {
                        if (!have || p.lambda > hi) {
                            hi = std::max(hi, p.lambda);
                            reported_x0 = x0;
                        }
                        lo = have ? std::min(lo, p.lambda) : p.lambda;
                        hi = have ? std::max(hi, p.lambda) : p.lambda;
                        have = true;
                    } else if (!have) {
                        reported_x0 = x0;
                        lambda = std::max(lambda, p.lambda);
                    }
                }
                if (have) lambda = hi;
                converged = all_converged && have &&
                            (hi - lo) <= 1e-10 * std::max<Scalar>(1.0, std::abs(hi));
            }

            os << n << ',' << d << ',' << o.mode << ',' << fmt(static_cast<double>(lambda)) << ','
               << fmt(static_cast<double>(bound)) << ','
               << fmt(static_cast<double>(bound / lambda)) << ',' << iters << ','
               << csv_bool(converged) << '\n';

            if (!o.trace.empty()) {
                eig::Trace trace;
                eig::shopm(a, cfg, reported_x0, &trace);
                int rc = write_trace(o.trace, trace);
                if (rc != 0) return rc;
            }
        }
    return 0;
}

int cmd_minimal(const Options& o, std::ostream& os) {
    const auto f = ScalarFunction::parse(o.f);
    std::string msg;
    if (!even_grid_ok(o, msg)) return grid_error(msg);
    if (o.mode != "H" && o.mode != "Z") return grid_error("--mode must be H or Z");
    if (o.guesses < 1 || o.pre_iters < 1 || o.max_iters < 1)
        return grid_error("--guesses, --pre-iters, and --max-iters must be positive");

    os << "n,d,mode,lambda_min,iters,converged\n";
    for (Int n : o.n)
        for (Index d : o.d) {
            if (cell_overflows(n, d, f)) {
                os << n << ',' << d << ',' << o.mode << ",,,skipped\n";
                continue;
            }
            eig::TTProvider a(tt::meet_tt(contiguous(n), f, d));
            std::unique_ptr<eig::ContractionProvider> b;
            if (o.mode == "H")
                b = std::make_unique<eig::KroneckerProvider>(n, d);
            else
                b = std::make_unique<eig::IdentityProvider>(n, d);

            eig::SolverConfig cfg;
            cfg.tau = o.tau;
            cfg.beta = -1.0;
            cfg.tol = o.tol;
            cfg.max_iters = o.max_iters;

            const std::uint64_t cs = cell_seed(o.seed, static_cast<std::uint64_t>(n),
                                               static_cast<std::uint64_t>(d));
            Vector x0 = eig::prescreen(a, *b, cfg, o.guesses, o.pre_iters, cs);
            eig::Trace trace;
            auto p = eig::geap(a, *b, cfg, x0, o.trace.empty() ? nullptr : &trace);
            os << n << ',' << d << ',' << o.mode << ',' << fmt(static_cast<double>(p.lambda))
               << ',' << p.iterations << ',' << csv_bool(p.converged) << '\n';

            if (!o.trace.empty()) {
                int rc = write_trace(o.trace, trace);
                if (rc != 0) return rc;
            }
        }
    return 0;
}

int cmd_generalized(const Options& o, std::ostream& os) {
    const auto f = ScalarFunction::parse(o.f);
    std::string msg;
    if (!even_grid_ok(o, msg)) return grid_error(msg);
    if (o.guesses < 1 || o.pre_iters < 1 || o.max_iters < 1)
        return grid_error("--guesses, --pre-iters, and --max-iters must be positive");
    if (o.eps <= 0) return grid_error("generalized needs --eps > 0");

    os << "n,d,lambda_min,sign_flipped,iters,converged\n";
    for (Int n : o.n)
        for (Index d : o.d) {
            if (cell_overflows(n, d, f)) {
                os << n << ',' << d << ",,,,skipped\n";
                continue;
            }
            const std::uint64_t cs = cell_seed(o.seed, static_cast<std::uint64_t>(n),
                                               static_cast<std::uint64_t>(d));
            eig::TTProvider a(tt::meet_tt(contiguous(n), f, d));
            auto b = std::make_shared<eig::TTProvider>(
                cached_lcm(n, d, f, o.eps, cs, o.cache_dir));
            eig::NegatedProvider nb(b);

            eig::SolverConfig cfg;
            // the small cases need a gentler convexity threshold to settle
            // on the minimal eigenvalue instead of overshooting it
            cfg.tau = o.tau_given ? o.tau
                                  : ((n == 2 || (n == 3 && (d == 4 || d == 6))) ? 1.0 : 10.0);
            cfg.beta = -1.0;
            cfg.tol = o.tol;
            cfg.max_iters = o.max_iters;

            struct Branch {
                Scalar lambda = 0;
                int iters = 0;
                bool converged = false;
                bool valid = false;
                eig::Trace trace;
            };
            auto run_branch = [&](const eig::ContractionProvider& bb, std::uint64_t seed,
                                  Scalar sign) {
                Branch out;
                try {
                    Vector x0 = eig::prescreen(a, bb, cfg, o.guesses, o.pre_iters, seed);
                    auto p = eig::geap(a, bb, cfg, x0, o.trace.empty() ? nullptr : &out.trace);
                    out.lambda = sign * p.lambda;
                    out.iters = p.iterations;
                    out.converged = p.converged;
                    out.valid = true;
                } catch (const std::exception&) {
                    // no usable start or the iteration left B x^d > 0;
                    // the other branch covers the remaining sign region
                }
                return out;
            };

            Branch pos = run_branch(*b, cs, 1.0);
            Branch neg = run_branch(nb, splitmix64(cs ^ 0x517cc1b727220a95ULL), -1.0);

            // smallest magnitude wins; converged branches outrank the rest
            auto better = [](const Branch& x, const Branch& y) {
                if (x.valid != y.valid) return x.valid;
                if (x.converged != y.converged) return x.converged;
                return std::abs(x.lambda) < std::abs(y.lambda);
            };
            const bool flipped = better(neg, pos);
            const Branch& win = flipped ? neg : pos;

            if (!win.valid) {
                os << n << ',' << d << ",,,,false\n";
                continue;
            }
            os << n << ',' << d << ',' << fmt(static_cast<double>(win.lambda)) << ','
               << csv_bool(flipped) << ',' << win.iters << ',' << csv_bool(win.converged) << '\n';

            if (!o.trace.empty()) {
                int rc = write_trace(o.trace, win.trace);
                if (rc != 0) return rc;
            }
        }
    return 0;
}

int cmd_bound(const Options& o, std::ostream& os) {
    const auto f = ScalarFunction::parse(o.f);
    const Int n = o.n.empty() ? 2 : o.n.front();
    const Index d = o.d.empty() ? 3 : o.d.front();
    if (n < 1 || n > 1'000'000) return grid_error("bound needs --n in [1, 1e6]");
    if (d < 2) return grid_error("bound needs --d at least 2");

    auto s = contiguous(n);
    const Scalar bound = eig::eigen_bound(tt::meet_tt(s, f, d));

    Scalar reach = -std::numeric_limits<Scalar>::infinity();
    bool have_disks = false;
    if (n <= 100) {
        try {
            auto disks = eig::gershgorin_disks(s, f, d);
            for (size_t k = 0; k < disks.size(); ++k) {
                os << "disk " << k + 1 << ": center " << fmt(static_cast<double>(disks[k].first))
                   << " radius " << fmt(static_cast<double>(disks[k].second)) << "\n";
                reach = std::max(reach, disks[k].first + disks[k].second);
            }
            have_disks = true;
        } catch (const std::length_error&) {
            os << "disks: skipped (row enumeration too large for signed f)\n";
        }
    } else {
        os << "disks: skipped (n > 100)\n";
    }
    os << "bound " << fmt(static_cast<double>(bound)) << "\n";

    bool nonneg = true;
    for (Int x = 1; x <= n && nonneg; ++x) nonneg = f(x) >= 0;
    if (have_disks && nonneg &&
        std::abs(reach - bound) > 1e-9 * std::max<Scalar>(1.0, std::abs(bound))) {
        os << "bound mismatch: max disk reach " << fmt(static_cast<double>(reach)) << "\n";
        return 1;
    }
    return 0;
}

int cmd_selftest(const Options& o, std::ostream& os) {
    int failed = 0;
    auto check = [&](const char* label, bool ok, const std::string& detail = "") {
        os << (ok ? "ok " : "FAIL ") << label;
        if (!ok && !detail.empty()) os << " (" << detail << ")";
        os << "\n";
        if (!ok) ++failed;
    };
    const auto id = ScalarFunction::identity();

    {
        auto t10 = tt::meet_tt(contiguous(10), id, 3);
        auto t100 = tt::meet_tt(contiguous(100), id, 3);
        check("meet storage anchors", t10.core(0).nnz() == 27 && t100.core(0).nnz() == 482);
    }
    {
        auto t = tt::meet_tt(contiguous(6), id, 3);
        auto dense = oracle::dense_meet(contiguous(6), id, 3);
        double worst = 0;
        std::vector<Index> idx{0, 0, 0};
        do {
            worst = std::max(worst, std::abs(static_cast<double>(t.element(idx) - dense.at(idx))));
        } while (tt::next_index(idx, dense.dims));
        check("meet matches dense", worst <= 1e-12, fmt(worst));
    }
    {
        cross::CrossConfig cfg;
        cfg.seed = cell_seed(o.seed, 3, 4);
        auto res = cross::lcm_tt(3, 4, id, cfg);
        auto dense = oracle::dense_join(contiguous(3), id, 4);
        double worst = 0;
        std::vector<Index> idx{0, 0, 0, 0};
        do {
            worst = std::max(worst, std::abs(static_cast<double>(res.tensor.element(idx) -
                                                                 dense.at(idx))));
        } while (tt::next_index(idx, dense.dims));
        check("join matches dense", res.converged && worst <= 1e-9, fmt(worst));
    }
    {
        cross::CrossConfig cfg;
        cfg.seed = cell_seed(o.seed, 5, 4);
        auto res = cross::lcm_tt(5, 4, id, cfg);
        check("join rank anchor", res.tensor.max_interior_rank() == 10);
    }
    {
        eig::SolverConfig cfg;
        cfg.mode = eig::Mode::Z;
        cfg.max_iters = 100;
        Vector x0(2);
        x0 << 0.6, 0.8;
        auto p = eig::shopm(tt::smith_tt(2, 2), cfg, x0);
        const double want = (3.0 + std::sqrt(5.0)) / 2.0;
        check("smith matrix eigenvalue",
              p.converged && std::abs(static_cast<double>(p.lambda) - want) <= 1e-10,
              fmt(static_cast<double>(p.lambda)));
    }
    {
        auto t = tt::smith_tt(4, 4);
        auto dense = tt::to_dense(t);
        std::mt19937_64 rng(cell_seed(o.seed, 4, 4));
        double worst = 0;
        for (int rep = 0; rep < 20; ++rep) {
            Vector x = random_start(rng, 4, -1.0);
            double a = static_cast<double>(tt::contract_scalar(t, x));
            double b = static_cast<double>(oracle::dense_contract(dense, x, 4).values[0]);
            worst = std::max(worst, std::abs(a - b) / std::max(1.0, std::abs(b)));
        }
        check("contractions match dense", worst <= 1e-12, fmt(worst));
    }
    {
        eig::TTProvider a(tt::smith_tt(2, 4));
        eig::KroneckerProvider b(2, 4);
        eig::SolverConfig cfg;
        cfg.beta = -1.0;
        cfg.max_iters = 500;
        Vector x0 = eig::prescreen(a, b, cfg, 64, 20, cell_seed(o.seed, 2, 4));
        auto p = eig::geap(a, b, cfg, x0);
        check("geap minimal anchor",
              p.converged && std::abs(static_cast<double>(p.lambda) - 0.11735993) <= 1e-6,
              fmt(static_cast<double>(p.lambda)));
    }
    {
        const Scalar bound = eig::eigen_bound(tt::meet_tt(contiguous(2), id, 3));
        check("bound anchor", std::abs(static_cast<double>(bound) - 5.0) <= 1e-12,
              fmt(static_cast<double>(bound)));
    }

    os << (failed ? "selftest: FAILED\n" : "selftest: all passed\n");
    return failed ? 1 : 0;
}

int run(const std::vector<std::string>& args) {
    Options o;
    CLI::App app{"tensor-train eigenvalue benchmarks for lattice tensors"};
    app.set_config("--config");

    app.add_option("command", o.command, "one of: storage ranks dominant minimal generalized bound selftest")
        ->required()
        ->check(CLI::IsMember(
            {"storage", "ranks", "dominant", "minimal", "generalized", "bound", "selftest"}));
    app.add_option("--n", o.n, "grid dimensions (comma separated)")->delimiter(',');
    app.add_option("--d", o.d, "grid orders (comma separated)")->delimiter(',');
    app.add_option("--f", o.f, "scalar function: identity, power:<alpha>, reciprocal");
    app.add_option("--mode", o.mode, "eigenvalue type for dominant/minimal")
        ->check(CLI::IsMember({"H", "Z"}));
    auto* tau_opt = app.add_option("--tau", o.tau, "GEAP convexity threshold");
    app.add_option("--tol", o.tol, "convergence tolerance on |lambda_k - lambda_{k-1}|");
    app.add_option("--seed", o.seed, "RNG seed; grids derive per-cell streams");
    app.add_option("--guesses", o.guesses, "prescreening starts");
    app.add_option("--pre-iters", o.pre_iters, "prescreening iterations per start");
    app.add_option("--trials", o.trials, "dominant Z-mode repeated starts");
    app.add_option("--max-iters", o.max_iters, "GEAP iteration cap for minimal/generalized");
    app.add_option("--eps", o.eps, "cross truncation tolerance");
    app.add_option("--out", o.out, "output file (default stdout)");
    app.add_option("--cache-dir", o.cache_dir, "join tensor cache directory");
    app.add_option("--trace", o.trace, "per-iteration CSV of the reported solve (single cell)");

    std::vector<const char*> argv;
    argv.push_back("ttlat");
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    o.tau_given = tau_opt->count() > 0;

    if (o.tol <= 0) return grid_error("--tol must be positive");
    if (o.eps <= 0) return grid_error("--eps must be positive");

    if (o.n.empty()) {
        if (o.command == "storage") o.n = {10, 100, 1000, 10000, 100000};
        else if (o.command == "ranks") o.n = {2, 3, 4, 5, 6, 7};
        else if (o.command == "dominant") o.n = {10, 50, 100, 500, 1000};
        else if (o.command == "minimal") o.n = {2, 3, 4, 5, 6};
        else if (o.command == "generalized") o.n = {2, 3, 4, 5};
        else o.n = {2};
    }
    if (o.d.empty()) {
        if (o.command == "ranks") o.d = {3, 4, 5, 6, 7, 8};
        else if (o.command == "dominant") o.d = {4, 6, 8, 10, 12, 14, 16, 18, 20};
        else if (o.command == "minimal") o.d = {4, 6, 8, 10, 12, 14, 16};
        else if (o.command == "generalized") o.d = {4, 6, 8};
        else o.d = {3};
    }

    if (!o.trace.empty()) {
        const bool traceable = o.command == "dominant" || o.command == "minimal" ||
                               o.command == "generalized";
        if (!traceable || o.n.size() != 1 || o.d.size() != 1)
            return grid_error("--trace needs a single grid cell of dominant/minimal/generalized");
    }

    std::ofstream file;
    if (!o.out.empty()) {
        file.open(o.out);
        if (!file) return grid_error("cannot open output file " + o.out);
    }
    std::ostream& os = o.out.empty() ? std::cout : file;

    try {
        if (o.command == "storage") return cmd_storage(o, os);
        if (o.command == "ranks") return cmd_ranks(o, os);
        if (o.command == "dominant") return cmd_dominant(o, os);
        if (o.command == "minimal") return cmd_minimal(o, os);
        if (o.command == "generalized") return cmd_generalized(o, os);
        if (o.command == "bound") return cmd_bound(o, os);
        return cmd_selftest(o, os);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace ttlat::cli
