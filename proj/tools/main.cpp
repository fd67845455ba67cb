// Command-line front end: solve the PDE surrogates of a tridiagonal master
// equation, run convergence studies, reproduce the distribution figure, and
// benchmark the spectral pipeline against the ODE solve.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "mepde/harness.hpp"
#include "mepde/io.hpp"
#include "mepde/version.hpp"

namespace {

using namespace mepde;

struct RunConfig {
    std::string subcommand;
    std::string model = "voter";
    double tau = 0.5;
    double gamma = 0.5;
    int n = 100;
    std::string method = "dynamic";
    double t_final = 1.0;
    Eigen::Index m_grid = 0;  // 0 -> 8N
    int j_modes = 40;
    std::string init = "sin2";
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    std::uint64_t seed = 12345;
    bool clamp_diffusion = false;
    bool with_ode = false;
    std::string out = "solution.csv";
    std::string out_ode = "figure1_ode.csv";
    std::string out_spectral = "figure1_spectral.csv";
    std::string n_list_arg;
};

ModelKind parse_model(const std::string& s) {
    if (s == "voter") return ModelKind::voter;
    if (s == "sis") return ModelKind::sis;
    throw std::invalid_argument("unknown --model '" + s + "' (voter|sis)");
}

Method parse_method(const std::string& s) {
    if (s == "dynamic") return Method::dynamic;
    if (s == "robin") return Method::robin;
    if (s == "spectral") return Method::spectral;
    throw std::invalid_argument("unknown --method '" + s + "' (dynamic|robin|spectral)");
}

struct InitSpec {
    bool is_delta = false;
    int k0 = 0;
    std::string name = "sin2";
};

InitSpec parse_init(const std::string& s, int n) {
    InitSpec spec;
    if (s.rfind("delta:", 0) == 0) {
        spec.is_delta = true;
        spec.k0 = std::stoi(s.substr(6));
        if (spec.k0 < 0 || spec.k0 > n)
            throw std::invalid_argument("init delta index out of range [0, N]");
    } else if (s == "sin2" || s == "gaussian" || s == "poly") {
        spec.name = s;
    } else {
        throw std::invalid_argument("unknown --init '" + s + "' (sin2|gaussian|poly|delta:K)");
    }
    return spec;
}

Manifest base_manifest(const RunConfig& c) {
    Manifest m;
    m.add("subcommand", c.subcommand);
    m.add("model", c.model);
    m.add("tau", c.tau);
    m.add("gamma", c.gamma);
    m.add("N", (long long)c.n);
    m.add("method", c.method);
    m.add("t", c.t_final);
    m.add("M", (long long)c.m_grid);
    m.add("J", (long long)c.j_modes);
    m.add("init", c.init);
    m.add("rel_tol", c.rel_tol);
    m.add("abs_tol", c.abs_tol);
    m.add("seed", (long long)c.seed);
    m.add("clamp_diffusion", std::string(c.clamp_diffusion ? "true" : "false"));
    m.add("version", std::string(version_string));
    return m;
}

/// PDE values at the N+1 comparison points k/N.
Eigen::VectorXd values_at_coarse(const GridFunction<double>& u, int n) {
    Eigen::VectorXd out(n + 1);
    for (int k = 0; k <= n; ++k) {
        const Eigen::Index j = aligned_node_index(u, double(k) / n);
        if (j < 0) throw SolverError("output grid misses the point k/N");
        out[k] = u.values[j];
    }
    return out;
}

GridFunction<double> run_pde(const RunConfig& c, const CoefficientField<double>& field,
                             const std::function<double(double)>& u0, Method method) {
    PdeSolveOptions<double> opt;
    opt.rel_tol = c.rel_tol;
    opt.abs_tol = c.abs_tol;
    opt.clamp_diffusion = c.clamp_diffusion;
    const Eigen::Index m = c.m_grid > 0 ? c.m_grid : Eigen::Index(8) * c.n;
    switch (method) {
        case Method::dynamic:
            return solve_dynamic(assemble_dynamic(field), u0, c.t_final, m, opt);
        case Method::robin:
            return solve_robin(assemble_robin(field), u0, c.t_final, m, opt);
        case Method::spectral:
            break;
    }
    if (c.model != "voter" || std::abs(c.tau - c.gamma) > 1e-14 * (c.tau + c.gamma))
        throw std::invalid_argument("spectral method supports the symmetric voter model only");
    const double h = 1.0 / c.n;
    InitSpec spec = parse_init(c.init, c.n);
    Eigen::VectorXd omegas = find_eigenfrequencies(h, c.j_modes);
    Eigen::VectorXd load;
    if (spec.is_delta) {
        DeltaInitial<double> d{spec.k0, c.n};
        load = spectral_load_point(h, omegas, d.z0(), d.continuum_mass());
    } else {
        load = spectral_load(h, omegas, u0);
    }
    auto model = build_spectral_model(h, c.tau + c.gamma, c.j_modes, load);
    return evaluate_spectral(model, c.t_final, 0.0, 1.0, Eigen::Index(c.n));
}

int cmd_solve(RunConfig c) {
    c.subcommand = "solve";
    const auto t_start = std::chrono::steady_clock::now();
    const ModelKind kind = parse_model(c.model);
    const Method method = parse_method(c.method);
    const InitSpec spec = parse_init(c.init, c.n);
    if (c.m_grid == 0) c.m_grid = Eigen::Index(8) * c.n;

    CoefficientField<double> field = kind == ModelKind::voter
                                         ? voter_field<double>({c.tau, c.gamma, c.n})
                                         : sis_field<double>({c.tau, c.gamma, c.n});
    std::function<double(double)> u0;
    StateVector<double> v;
    if (spec.is_delta) {
        auto [dv, d] = delta_initial<double>(spec.k0, c.n);
        v = dv;
        u0 = mollified_delta(d);
    } else {
        auto [fn, sv] = smooth_initial<double>(spec.name, c.n);
        u0 = fn;
        v = sv;
    }

    GridFunction<double> u = run_pde(c, field, u0, method);
    Eigen::VectorXd upde = values_at_coarse(u, c.n);

    std::optional<Eigen::VectorXd> xode;
    if (c.with_ode) {
        TridiagonalSystem<double> sys = build_matrix(field);
        StateVector<double> x = sys.n_states() <= 2000 ? expm_oracle(sys, v, c.t_final)
                                                       : integrate(sys, v, c.t_final, 1e-10, 1e-14);
        xode = x.values;
    }

    std::string csv = "z,u_pde,x_ode,abs_err\n";
    for (int k = 0; k <= c.n; ++k) {
        csv += format_g17(double(k) / c.n);
        csv += ',';
        csv += format_g17(upde[k]);
        csv += ',';
        if (xode) csv += format_g17((*xode)[k]);
        csv += ',';
        if (xode) csv += format_g17(std::abs(upde[k] - (*xode)[k]));
        csv += '\n';
    }
    write_file_atomic(c.out, csv);

    Manifest m = base_manifest(c);
    m.add("out", c.out);
    m.add("with_ode", std::string(c.with_ode ? "true" : "false"));
    m.add("wall_time_seconds",
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count());
    m.write(c.out + ".manifest");
    std::cout << "wrote " << c.out << " (" << c.n + 1 << " rows)\n";
    return 0;
}

int cmd_converge(RunConfig c) {
    c.subcommand = "converge";
    const auto t_start = std::chrono::steady_clock::now();
    const ModelKind kind = parse_model(c.model);
    const Method method = parse_method(c.method);

    std::vector<int> n_list;
    {
        std::string item;
        std::stringstream ss(c.n_list_arg);
        while (std::getline(ss, item, ',')) {
            if (!item.empty()) n_list.push_back(std::stoi(item));
        }
    }
    if (n_list.size() < 2)
        throw std::invalid_argument("converge: need at least two N values (pairs required)");

    StudySettings s;
    s.rel_tol = c.rel_tol;
    s.abs_tol = c.abs_tol;
    s.m_factor = c.m_grid > 0 ? int(c.m_grid / n_list[0]) : 8;
    s.j_modes = c.j_modes;
    s.clamp_diffusion = c.clamp_diffusion;
    s.initial = c.init;

    ConvergenceResult r = convergence_study(kind, c.tau, c.gamma, method, n_list, c.t_final, s);

    std::string csv = "N,sup_error,observed_order\n";
    for (const auto& rep : r.reports) {
        csv += std::to_string(rep.n);
        csv += ',';
        csv += format_g17(rep.sup_err);
        csv += ',';
        for (const auto& p : r.pairs)
            if (p.n_coarse == rep.n && !p.excluded) csv += format_g17(p.observed_order);
        csv += '\n';
    }
    write_file_atomic(c.out, csv);

    Manifest m = base_manifest(c);
    m.add("N_list", c.n_list_arg);
    m.add("out", c.out);
    m.add("median_order", r.median_order);
    long long excl = 0;
    for (const auto& p : r.pairs) excl += p.excluded;
    m.add("excluded_pairs", excl);
    m.add("wall_time_seconds",
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count());
    m.write(c.out + ".manifest");

    std::cout << "median observed order: " << r.median_order << "\n";
    return 0;
}

int cmd_figure1(RunConfig c) {
    c.subcommand = "figure1";
    const auto t_start = std::chrono::steady_clock::now();
    if (c.model != "voter") throw std::invalid_argument("figure1: voter model only");
    if (std::abs(c.tau - c.gamma) > 1e-14 * (c.tau + c.gamma))
        throw std::invalid_argument("figure1: symmetric voter only (tau == gamma)");
    const InitSpec spec = parse_init(c.init, c.n);
    if (!spec.is_delta) throw std::invalid_argument("figure1: init must be delta:K");

    CoefficientField<double> field = voter_field<double>({c.tau, c.gamma, c.n});
    TridiagonalSystem<double> sys = build_matrix(field);
    auto [v, d] = delta_initial<double>(spec.k0, c.n);

    const auto t0 = std::chrono::steady_clock::now();
    StateVector<double> x = sys.n_states() <= 2000 ? expm_oracle(sys, v, c.t_final)
                                                   : integrate(sys, v, c.t_final, 1e-10, 1e-14);
    const double ode_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const double h = 1.0 / c.n;
    const auto t1 = std::chrono::steady_clock::now();
    Eigen::VectorXd omegas = find_eigenfrequencies(h, c.j_modes);
    Eigen::VectorXd load = spectral_load_point(h, omegas, d.z0(), d.continuum_mass());
    auto model = build_spectral_model(h, c.tau + c.gamma, c.j_modes, load);
    GridFunction<double> u = evaluate_spectral(model, c.t_final, 0.0, 1.0, Eigen::Index(c.n));
    const double spectral_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t1).count();

    std::string ode_csv = "z,x_ode\n";
    std::string spec_csv = "z,u_pde\n";
    double sup_diff = 0;
    for (int k = 0; k <= c.n; ++k) {
        const std::string z = format_g17(double(k) / c.n);
        ode_csv += z + ',' + format_g17(x.values[k]) + '\n';
        spec_csv += z + ',' + format_g17(u.values[k]) + '\n';
        sup_diff = std::max(sup_diff, std::abs(u.values[k] - x.values[k]));
    }
    write_file_atomic(c.out_ode, ode_csv);
    write_file_atomic(c.out_spectral, spec_csv);

    Manifest m = base_manifest(c);
    m.add("out_ode", c.out_ode);
    m.add("out_spectral", c.out_spectral);
    m.add("sup_difference", sup_diff);
    m.add("ode_peak", x.values.maxCoeff());
    m.add("ode_seconds", ode_seconds);
    m.add("spectral_seconds", spectral_seconds);
    m.add("wall_time_seconds",
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count());
    m.write(c.out_spectral + ".manifest");

    std::cout << "sup_difference=" << format_g17(sup_diff) << "\n"
              << "ode_peak=" << format_g17(x.values.maxCoeff()) << "\n"
              << "ode_seconds=" << format_g17(ode_seconds) << "\n"
              << "spectral_seconds=" << format_g17(spectral_seconds) << "\n";
    return 0;
}

int cmd_bench(RunConfig c) {
    c.subcommand = "bench";
    const auto t_start = std::chrono::steady_clock::now();
    BenchmarkReport r = benchmark(c.tau, c.gamma, c.n, c.t_final, c.j_modes);
    Manifest m = base_manifest(c);
    m.add("ode_seconds", r.ode_seconds);
    m.add("spectral_seconds", r.spectral_seconds);
    m.add("speedup", r.speedup);
    m.add("sup_difference", r.sup_difference);
    m.add("ode_peak", r.ode_peak);
    m.add("wall_time_seconds",
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count());
    if (!c.out.empty() && c.out != "solution.csv") m.write(c.out);
    std::cout << m.to_string();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PDE surrogates for tridiagonal master equations"};
    app.require_subcommand(1);
    RunConfig c;

    auto add_common = [&c](CLI::App* sub) {
        sub->add_option("--model", c.model, "voter|sis");
        sub->add_option("--tau", c.tau, "up-rate parameter");
        sub->add_option("--gamma", c.gamma, "down-rate parameter");
        sub->add_option("--N", c.n, "state-space resolution (N+1 states)")->check(CLI::PositiveNumber);
        sub->add_option("--t", c.t_final, "final time")->check(CLI::NonNegativeNumber);
        sub->add_option("--M", c.m_grid, "fine grid resolution (default 8N)");
        sub->add_option("--J", c.j_modes, "spectral modes")->check(CLI::PositiveNumber);
        sub->add_option("--rel-tol", c.rel_tol, "relative tolerance");
        sub->add_option("--abs-tol", c.abs_tol, "absolute tolerance");
        sub->add_option("--seed", c.seed, "random seed (recorded in the manifest)");
        sub->add_flag("--clamp-diffusion", c.clamp_diffusion,
                      "clamp a negative diffusion coefficient to zero instead of refusing");
    };

    CLI::App* solve = app.add_subcommand("solve", "solve one formulation and write a CSV profile");
    add_common(solve);
    solve->add_option("--method", c.method, "dynamic|robin|spectral");
    solve->add_option("--init", c.init, "sin2|gaussian|poly|delta:K");
    solve->add_option("--out", c.out, "output CSV path");
    solve->add_flag("--with-ode", c.with_ode, "also compute the ODE reference columns");

    CLI::App* converge = app.add_subcommand("converge", "empirical convergence order study");
    add_common(converge);
    converge->add_option("--method", c.method, "dynamic|robin|spectral");
    converge->add_option("--init", c.init, "sin2|gaussian|poly");
    converge->add_option("--N-list", c.n_list_arg, "comma-separated N values, e.g. 25,50,100,200")
        ->required();
    converge->add_option("--out", c.out, "output CSV path");

    CLI::App* figure1 = app.add_subcommand(
        "figure1", "distribution profile: ODE vs spectral curves at time t");
    add_common(figure1);
    figure1->add_option("--init", c.init, "delta:K initial state");
    figure1->add_option("--out-ode", c.out_ode, "ODE curve CSV path");
    figure1->add_option("--out-spectral", c.out_spectral, "spectral curve CSV path");

    CLI::App* bench = app.add_subcommand("bench", "time the ODE solve against the spectral pipeline");
    add_common(bench);
    bench->add_option("--out", c.out, "optional report path (key=value lines)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    try {
        if (app.got_subcommand(solve)) return cmd_solve(c);
        if (app.got_subcommand(converge)) return cmd_converge(c);
        if (app.got_subcommand(figure1)) {
            // paper-figure defaults when untouched
            if (figure1->count("--N") == 0) c.n = 1000;
            if (figure1->count("--t") == 0) c.t_final = 500.0;
            if (figure1->count("--init") == 0) c.init = "delta:199";
            return cmd_figure1(c);
        }
        if (app.got_subcommand(bench)) return cmd_bench(c);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const mepde::SolverError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
