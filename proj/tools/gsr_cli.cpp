#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <gsr/oracles.hpp>
#include <gsr/verify.hpp>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Range {
    double lo = 0, hi = 3;
    int n = 61;

    std::vector<double> points() const {
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
        v.back() = hi;
        return v;
    }
};

Range parse_range(const std::string& s, const char* what) {
    Range r;
    char c1 = 0, c2 = 0;
    std::istringstream is(s);
    if (!(is >> r.lo >> c1 >> r.hi >> c2 >> r.n) || c1 != ':' || c2 != ':' || !is.eof())
        throw usage_error(std::string(what) + ": expected lo:hi:n, got '" + s + "'");
    if (!(r.lo >= 0) || !(r.hi > r.lo) || r.n < 2) throw usage_error(std::string(what) + ": need lo >= 0, hi > lo, n >= 2");
    return r;
}

std::string fmt17(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

std::string tag(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%g", v);
    return b;
}

unsigned default_threads() {
    if (const char* e = std::getenv("GSR_THREADS")) {
        int n = std::atoi(e);
        if (n > 0) return unsigned(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

json spec_json(const gsr::QuadratureSpec& q) {
    return {{"rel_tol", q.rel_tol}, {"abs_tol", q.abs_tol}, {"max_subdivisions", q.max_subdivisions}, {"truncation_slack", q.truncation_slack}};
}

void write_manifest(const fs::path& path, json m, double seconds) {
    m["artifact_version"] = kVersion;
    m["wall_clock_seconds"] = seconds;
    std::ofstream f(path);
    f << m.dump(2) << "\n";
}

template <class F>
void parallel_rows(std::size_t n, unsigned threads, F&& row) {
    threads = std::max(1u, std::min<unsigned>(threads, unsigned(n)));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += threads) row(i);
        });
    for (auto& t : pool) t.join();
}

struct Common {
    std::vector<double> mu{1.0, 1.5};
    std::vector<double> t{0.1, 0.5, 1, 2, 5, 10};
    double r = 0;
    std::string x_range = "0:3:61", r_range = "0:3:61";
    double tol = 1e-10;
    std::uint64_t seed = 20240917;
    std::string out = ".";
    bool allow_flags = false;
    unsigned threads = default_threads();

    gsr::QuadratureSpec quad() const {
        gsr::QuadratureSpec q;
        q.rel_tol = tol;
        q.abs_tol = std::min(1e-12, tol);
        try {
            q.validate();
        } catch (const std::exception& e) {
            throw usage_error(e.what());
        }
        return q;
    }
};

int cmd_pdf_grid(const Common& c, const std::string& command) {
    if (c.t.empty() || c.mu.empty()) throw usage_error("pdf-grid: --t and --mu need at least one value");
    for (double t : c.t)
        if (!(t >= 0.05)) throw usage_error("pdf-grid: t values must be >= 0.05");
    Range xr = parse_range(c.x_range, "--x-range"), rr = parse_range(c.r_range, "--r-range");
    auto q = c.quad();
    fs::create_directories(c.out);
    auto t0 = std::chrono::steady_clock::now();
    json cells = json::array();
    bool bad = false;
    auto xs = xr.points(), rs = rr.points();
    for (double mu : c.mu)
        for (double t : c.t) {
            gsr::ModelParams p(mu);
            std::vector<gsr::EvalResult> res(xs.size() * rs.size());
            parallel_rows(rs.size(), c.threads, [&](std::size_t j) {
                for (std::size_t i = 0; i < xs.size(); ++i) res[j * xs.size() + i] = gsr::transition_pdf({xs[i], t, rs[j]}, p, q);
            });
            std::string name = "pdf_mu" + tag(mu) + "_t" + tag(t) + ".csv";
            std::ofstream f(fs::path(c.out) / name);
            f << "x,r,p,err,flags\n";
            std::size_t unconverged = 0, warned = 0;
            double max_err = 0;
            for (std::size_t j = 0; j < rs.size(); ++j)
                for (std::size_t i = 0; i < xs.size(); ++i) {
                    auto& e = res[j * xs.size() + i];
                    f << fmt17(xs[i]) << ',' << fmt17(rs[j]) << ',' << fmt17(e.value) << ',' << fmt17(e.err_estimate) << ','
                      << e.flag_string() << '\n';
                    if (!e.converged()) ++unconverged;
                    if (e.has(gsr::flag_cancellation_warning)) ++warned;
                    max_err = std::max(max_err, e.err_estimate);
                }
            if (unconverged) bad = true;
            cells.push_back({{"file", name}, {"mu", mu}, {"t", t}, {"not_converged", unconverged}, {"cancellation_warning", warned},
                             {"max_err_estimate", max_err}});
        }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(fs::path(c.out) / "manifest.json",
                   {{"command", command},
                    {"parameters", {{"mu", c.mu}, {"t", c.t}, {"x_range", c.x_range}, {"r_range", c.r_range}}},
                    {"quadrature", spec_json(q)},
                    {"seed", c.seed},
                    {"threads", c.threads},
                    {"cells", cells}},
                   secs);
    if (bad && !c.allow_flags) {
        std::cerr << "pdf-grid: some cells did not converge (see flags column); rerun with --allow-flags to accept\n";
        return 1;
    }
    return 0;
}

int cmd_cdf(const Common& c, const std::string& command) {
    if (c.t.empty() || c.mu.empty()) throw usage_error("cdf: --t and --mu need at least one value");
    Range xr = parse_range(c.x_range, "--x-range");
    auto q = c.quad();
    fs::create_directories(c.out);
    auto t0 = std::chrono::steady_clock::now();
    bool bad = false;
    json files = json::array();
    for (double mu : c.mu)
        for (double t : c.t) {
            if (!(t >= 0.05)) throw usage_error("cdf: t values must be >= 0.05");
            gsr::ModelParams p(mu);
            auto xs = xr.points();
            std::vector<gsr::EvalResult> res(xs.size());
            parallel_rows(xs.size(), c.threads, [&](std::size_t i) { res[i] = gsr::transition_cdf({xs[i], t, c.r}, p, q); });
            std::string name = "cdf_mu" + tag(mu) + "_t" + tag(t) + "_r" + tag(c.r) + ".csv";
            std::ofstream f(fs::path(c.out) / name);
            f << "x,r,P,err,flags\n";
            for (std::size_t i = 0; i < xs.size(); ++i) {
                f << fmt17(xs[i]) << ',' << fmt17(c.r) << ',' << fmt17(res[i].value) << ',' << fmt17(res[i].err_estimate) << ','
                  << res[i].flag_string() << '\n';
                bad |= !res[i].converged();
            }
            files.push_back(name);
        }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(fs::path(c.out) / "manifest_cdf.json",
                   {{"command", command},
                    {"parameters", {{"mu", c.mu}, {"t", c.t}, {"r", c.r}, {"x_range", c.x_range}}},
                    {"quadrature", spec_json(q)},
                    {"files", files}},
                   secs);
    if (bad && !c.allow_flags) {
        std::cerr << "cdf: some cells did not converge; rerun with --allow-flags to accept\n";
        return 1;
    }
    return 0;
}

int cmd_stationary(const Common& c) {
    Range xr = parse_range(c.x_range, "--x-range");
    fs::create_directories(c.out);
    for (double mu : c.mu) {
        gsr::ModelParams p(mu);
        std::ofstream f(fs::path(c.out) / ("stationary_mu" + tag(mu) + ".csv"));
        f << "x,rho\n";
        for (double x : xr.points()) f << fmt17(x) << ',' << fmt17(gsr::stationary_pdf(x, p)) << '\n';
    }
    return 0;
}

int cmd_greens(const Common& c, double lambda) {
    if (!(lambda > 0)) throw usage_error("greens: --lambda must be positive");
    Range xr = parse_range(c.x_range, "--x-range");
    fs::create_directories(c.out);
    for (double mu : c.mu) {
        gsr::ModelParams p(mu);
        std::ofstream f(fs::path(c.out) / ("greens_mu" + tag(mu) + "_lambda" + tag(lambda) + "_y" + tag(c.r) + ".csv"));
        f << "x,y,G\n";
        for (double x : xr.points()) f << fmt17(x) << ',' << fmt17(c.r) << ',' << fmt17(gsr::greens_function(x, c.r, lambda, p)) << '\n';
    }
    return 0;
}

int cmd_simulate(const Common& c, const std::string& command, long long n, long long steps, const std::string& scheme, int bins) {
    if (n <= 0) throw usage_error("simulate: --n must be positive");
    if (steps <= 0) throw usage_error("simulate: --steps must be positive");
    if (c.t.size() != 1 || c.mu.size() != 1) throw usage_error("simulate: give exactly one --mu and one --t");
    const double mu = c.mu[0], t = c.t[0];
    if (!(t > 0)) throw usage_error("simulate: t must be positive");
    gsr::SimSpec s;
    s.n_paths = std::size_t(n);
    s.n_steps = std::size_t(steps);
    s.seed = c.seed;
    s.threads = c.threads;
    if (scheme == "euler") s.scheme = gsr::Scheme::euler_maruyama;
    else if (scheme == "composite") s.scheme = gsr::Scheme::log_exact_gbm_composite;
    else throw usage_error("simulate: --scheme must be euler or composite");
    s.estimate_bias = s.scheme == gsr::Scheme::euler_maruyama;
    auto q = c.quad();
    fs::create_directories(c.out);
    auto t0 = std::chrono::steady_clock::now();
    gsr::ModelParams p(mu);
    auto sim = gsr::simulate_endpoints(p, c.r, t, s);
    std::string base = "simulate_mu" + tag(mu) + "_t" + tag(t) + "_r" + tag(c.r);
    {
        std::ofstream f(fs::path(c.out) / (base + ".csv"));
        if (bins > 0) {
            double hi = *std::max_element(sim.samples.begin(), sim.samples.end());
            std::vector<std::size_t> h(bins, 0);
            for (double v : sim.samples) h[std::min<std::size_t>(std::size_t(v / hi * bins), bins - 1)]++;
            f << "lo,hi,count,density\n";
            for (int i = 0; i < bins; ++i) {
                double a = hi * i / bins, b = hi * (i + 1) / bins;
                f << fmt17(a) << ',' << fmt17(b) << ',' << h[i] << ',' << fmt17(h[i] / (double(n) * (b - a))) << '\n';
            }
        } else {
            f << "R\n";
            for (double v : sim.samples) f << fmt17(v) << '\n';
        }
    }
    json diag = {{"mean", sim.mean}, {"sd", sim.sd}, {"clamp_count", sim.clamp_count}};
    if (s.estimate_bias) diag["second_moment_bias_estimate"] = sim.bias_estimate;
    if (t >= 0.05) {
        gsr::CdfTable cdf(p, t, c.r, q);
        auto ks = gsr::ks_test(std::move(sim.samples), cdf);
        diag["ks_statistic"] = ks.statistic;
        diag["ks_p_value"] = ks.p_value;
        std::printf("KS statistic %.6g  p-value %.4g  (n = %lld)\n", ks.statistic, ks.p_value, n);
    }
    std::printf("mean %.8g  sd %.8g  clamps %zu\n", sim.mean, sim.sd, sim.clamp_count);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(fs::path(c.out) / (base + ".json"),
                   {{"command", command},
                    {"parameters", {{"mu", mu}, {"t", t}, {"r", c.r}, {"n", n}, {"steps", steps}, {"scheme", scheme}, {"bins", bins}}},
                    {"quadrature", spec_json(q)},
                    {"seed", c.seed},
                    {"diagnostics", diag}},
                   secs);
    return 0;
}

int cmd_pde(const Common& c, const std::string& command, long long nx, long long nt, double theta) {
    if (c.t.size() != 1 || c.mu.size() != 1) throw usage_error("pde: give exactly one --mu and one --t");
    if (nx < 16 || nt < 1) throw usage_error("pde: need --nx >= 16 and --nt >= 1");
    if (!(theta >= 0 && theta <= 1)) throw usage_error("pde: --theta must lie in [0, 1]");
    const double mu = c.mu[0], t = c.t[0];
    gsr::PdeSpec s;
    s.n_x = std::size_t(nx);
    s.n_t = std::size_t(nt);
    s.theta = theta;
    fs::create_directories(c.out);
    auto t0 = std::chrono::steady_clock::now();
    auto sol = gsr::solve_forward_pde(gsr::ModelParams(mu), c.r, t, s);
    std::string base = "pde_mu" + tag(mu) + "_t" + tag(t) + "_r" + tag(c.r);
    Range xr = parse_range(c.x_range, "--x-range");
    std::ofstream f(fs::path(c.out) / (base + ".csv"));
    f << "x,p\n";
    for (double x : xr.points()) f << fmt17(x) << ',' << fmt17(sol.at(x)) << '\n';
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(fs::path(c.out) / (base + ".json"),
                   {{"command", command},
                    {"parameters", {{"mu", mu}, {"t", t}, {"r", c.r}, {"nx", nx}, {"nt", nt}, {"theta", theta}}},
                    {"diagnostics",
                     {{"mass", sol.mass}, {"max_mass_drift", sol.max_mass_drift}, {"min_value", sol.min_value}, {"far_cell_density", sol.right_density}}}},
                   secs);
    std::printf("mass %.15g  max drift %.3g\n", sol.mass, sol.max_mass_drift);
    return 0;
}

gsr::QuadratureSpec load_config(const std::string& path, gsr::QuadratureSpec q) {
    std::ifstream f(path);
    if (!f) throw usage_error("verify: cannot read config " + path);
    json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw usage_error(std::string("verify: bad config: ") + e.what());
    }
    if (j.contains("rel_tol")) q.rel_tol = j["rel_tol"].get<double>();
    if (j.contains("abs_tol")) q.abs_tol = j["abs_tol"].get<double>();
    if (j.contains("max_subdivisions")) {
        long long m = j["max_subdivisions"].get<long long>();
        if (m < 1) throw usage_error("verify: max_subdivisions must be >= 1");
        q.max_subdivisions = std::size_t(m);
    }
    try {
        q.validate();
    } catch (const std::exception& e) {
        throw usage_error(e.what());
    }
    return q;
}

int cmd_verify(const Common& c, const std::string& level, const std::string& config, bool tol_given) {
    gsr::verify::Options o;
    o.threads = c.threads;
    o.seed = c.seed;
    if (tol_given) o.quad = c.quad();
    if (!config.empty()) o.quad = load_config(config, o.quad);
    std::vector<gsr::verify::Criterion> res;
    if (level == "fast") {
        res.push_back(gsr::verify::special_functions(o));
        res.push_back(gsr::verify::normalization(o, true));
    } else {
        res = gsr::verify::acceptance(o);
    }
    bool ok = true;
    for (auto& r : res) {
        gsr::verify::print(r);
        ok &= r.pass();
    }
    std::printf("%s\n", ok ? "all checks passed" : "some checks FAILED");
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GSR diffusion transition densities"};
    app.require_subcommand(1);
    Common c;
    std::string command;
    for (int i = 0; i < argc; ++i) command += (i ? " " : "") + std::string(argv[i]);

    auto add_common = [&](CLI::App* s, bool grid) {
        s->add_option("--mu", c.mu, "drift-shift magnitude(s)")->delimiter(',');
        s->add_option("--t", c.t, "time(s)")->delimiter(',');
        s->add_option("--r", c.r, "headstart (or y for greens)");
        s->add_option("--x-range", c.x_range, "lo:hi:n");
        if (grid) s->add_option("--r-range", c.r_range, "lo:hi:n");
        s->add_option("--tol", c.tol, "quadrature relative tolerance");
        s->add_option("--seed", c.seed, "RNG seed");
        s->add_option("--out", c.out, "output directory");
        s->add_flag("--allow-flags", c.allow_flags, "accept flagged cells");
        s->add_option("--threads", c.threads, "worker threads (default: GSR_THREADS or hardware)");
    };
    auto* pdf = app.add_subcommand("pdf-grid", "p(x, t | r) on an (x, r) grid, one CSV per (mu, t)");
    add_common(pdf, true);
    auto* cdf = app.add_subcommand("cdf", "P(x, t | r) on an x grid");
    add_common(cdf, false);
    auto* st = app.add_subcommand("stationary", "stationary density rho(x)");
    add_common(st, false);
    double lambda = 1;
    auto* gr = app.add_subcommand("greens", "Green's function G_lambda(x, y), y given by --r");
    add_common(gr, false);
    gr->add_option("--lambda", lambda, "Laplace variable");
    long long n = 100000, steps = 200;
    std::string scheme = "composite";
    int bins = 0;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo endpoints and KS test");
    add_common(sim, false);
    sim->add_option("--n", n, "paths");
    sim->add_option("--steps", steps, "time steps");
    sim->add_option("--scheme", scheme, "euler | composite");
    sim->add_option("--bins", bins, "write a histogram with this many bins instead of raw samples");
    long long nx = 4000, nt = 2000;
    double theta = 0.5;
    auto* pde = app.add_subcommand("pde", "forward-equation solution");
    add_common(pde, false);
    pde->add_option("--nx", nx, "cells");
    pde->add_option("--nt", nt, "time steps");
    pde->add_option("--theta", theta, "theta-scheme weight");
    std::string level = "fast", config;
    auto* ver = app.add_subcommand("verify", "run the verification suite");
    add_common(ver, false);
    ver->add_option("level", level, "fast | full")->check(CLI::IsMember({"fast", "full"}));
    ver->add_option("--config", config, "JSON file with rel_tol, abs_tol, max_subdivisions");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    try {
        if (c.threads < 1) throw usage_error("--threads must be >= 1");
        if (*pdf) return cmd_pdf_grid(c, command);
        if (*cdf) return cmd_cdf(c, command);
        if (*st) return cmd_stationary(c);
        if (*gr) return cmd_greens(c, lambda);
        if (*sim) return cmd_simulate(c, command, n, steps, scheme, bins);
        if (*pde) return cmd_pde(c, command, nx, nt, theta);
        if (*ver) return cmd_verify(c, level, config, ver->count("--tol") > 0);
    } catch (const usage_error& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
