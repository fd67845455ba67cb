#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mepde/coefficients.hpp"
#include "mepde/grid.hpp"
#include "mepde/models.hpp"
#include "mepde/ode.hpp"
#include "mepde/pde_dynamic.hpp"
#include "mepde/pde_robin.hpp"
#include "mepde/spectral.hpp"

namespace mepde {

enum class Method { dynamic, robin, spectral };
enum class ModelKind { voter, sis };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::dynamic: return "dynamic";
        case Method::robin: return "robin";
        case Method::spectral: return "spectral";
    }
    return "?";
}

inline const char* to_string(ModelKind m) {
    return m == ModelKind::voter ? "voter" : "sis";
}

/// Max over the coarse points k/N of |u(t, k/N) - x_k(t)|. The PDE grid must
/// contain every k/N as a node; misalignment is an error, never silently
/// interpolated.
inline double sup_error(const GridFunction<double>& u, const StateVector<double>& x, int n) {
    if (x.values.size() != n + 1)
        throw std::invalid_argument("sup_error: state vector must have N+1 entries");
    double worst = 0;
    for (int k = 0; k <= n; ++k) {
        const double z = double(k) / double(n);
        const Eigen::Index j = aligned_node_index(u, z);
        if (j < 0)
            throw std::invalid_argument("sup_error: grid has no node at z=" + std::to_string(z));
        worst = std::max(worst, std::abs(u.values[j] - x.values[k]));
    }
    return worst;
}

struct ErrorReport {
    int n = 0;
    double t = 0;
    double sup_err = 0;
    Method method = Method::dynamic;
    Eigen::Index m_grid = 0;
    double rel_tol = 0;
    double abs_tol = 0;
};

struct OrderEstimate {
    int n_coarse = 0;
    int n_fine = 0;
    double err_coarse = 0;
    double err_fine = 0;
    double observed_order = 0;
    bool excluded = false;  // one of the errors sits at the solver noise floor
};

struct StudySettings {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    int m_factor = 8;     // fine grid M = m_factor * N
    int j_modes = 40;     // spectral truncation
    double ref_rel_tol = 1e-10;
    bool clamp_diffusion = false;
    std::string initial = "sin2";
};

struct ConvergenceResult {
    std::vector<ErrorReport> reports;
    std::vector<OrderEstimate> pairs;
    double median_order = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline CoefficientField<double> make_field(ModelKind kind, double tau, double gamma, int n) {
    if (kind == ModelKind::voter) return voter_field<double>({tau, gamma, n});
    return sis_field<double>({tau, gamma, n});
}

/// ODE reference: dense matrix exponential where affordable, otherwise the
/// adaptive integrator at a tight tolerance.
inline StateVector<double> reference_solution(const TridiagonalSystem<double>& sys,
                                              const StateVector<double>& v, double t,
                                              double ref_rel_tol) {
    if (sys.n_states() <= 2000) return expm_oracle(sys, v, t);
    return integrate(sys, v, t, ref_rel_tol, 1e-14);
}

}  // namespace detail

/// Solve the requested PDE formulation at resolution N (fine grid
/// m_factor * N) and report the sup error against the ODE reference at t.
inline ErrorReport run_error_report(ModelKind kind, double tau, double gamma, Method method,
                                    int n, double t, const StudySettings& s) {
    CoefficientField<double> field = detail::make_field(kind, tau, gamma, n);
    auto [u0, v] = smooth_initial<double>(s.initial, n);
    TridiagonalSystem<double> sys = build_matrix(field);
    StateVector<double> ref = detail::reference_solution(sys, v, t, s.ref_rel_tol);

    PdeSolveOptions<double> opt;
    opt.rel_tol = s.rel_tol;
    opt.abs_tol = s.abs_tol;
    opt.clamp_diffusion = s.clamp_diffusion;
    const Eigen::Index m = Eigen::Index(s.m_factor) * n;

    GridFunction<double> u;
    switch (method) {
        case Method::dynamic:
            u = solve_dynamic(assemble_dynamic(field), u0, t, m, opt);
            break;
        case Method::robin:
            u = solve_robin(assemble_robin(field), u0, t, m, opt);
            break;
        case Method::spectral: {
            if (std::abs(tau - gamma) > 1e-14 * (tau + gamma))
                throw std::invalid_argument("spectral method requires the symmetric voter model");
            if (kind != ModelKind::voter)
                throw std::invalid_argument("spectral method requires the voter model");
            u = solve_spectral(1.0 / n, tau + gamma, s.j_modes, u0, t, n);
            break;
        }
    }
    ErrorReport r;
    r.n = n;
    r.t = t;
    r.sup_err = sup_error(u, ref, n);
    r.method = method;
    r.m_grid = m;
    r.rel_tol = s.rel_tol;
    r.abs_tol = s.abs_tol;
    return r;
}

/// Empirical convergence order: for every (N, 2N) both present in n_list,
/// p = log2(err(N) / err(2N)). Pairs whose errors do not clear ten times the
/// solver tolerance are flagged excluded rather than dropped.
inline ConvergenceResult convergence_study(ModelKind kind, double tau, double gamma,
                                           Method method, const std::vector<int>& n_list,
                                           double t, const StudySettings& s = {}) {
    if (n_list.size() < 2)
        throw std::invalid_argument("convergence_study: need at least two N values (pairs required)");
    for (size_t i = 1; i < n_list.size(); ++i)
        if (n_list[i] <= n_list[i - 1])
            throw std::invalid_argument("convergence_study: N list must be increasing");

    ConvergenceResult out;
    for (int n : n_list) out.reports.push_back(run_error_report(kind, tau, gamma, method, n, t, s));

    bool any_pair = false;
    std::vector<double> orders;
    for (size_t i = 0; i < n_list.size(); ++i) {
        auto it = std::find(n_list.begin(), n_list.end(), 2 * n_list[i]);
        if (it == n_list.end()) continue;
        any_pair = true;
        const size_t j = size_t(it - n_list.begin());
        OrderEstimate e;
        e.n_coarse = n_list[i];
        e.n_fine = n_list[j];
        e.err_coarse = out.reports[i].sup_err;
        e.err_fine = out.reports[j].sup_err;
        const double floor = 10.0 * (s.rel_tol * 1.0 + s.abs_tol);
        e.excluded = !(e.err_coarse > floor && e.err_fine > floor);
        e.observed_order = e.excluded ? std::numeric_limits<double>::quiet_NaN()
                                      : std::log2(e.err_coarse / e.err_fine);
        if (!e.excluded) orders.push_back(e.observed_order);
        out.pairs.push_back(e);
    }
    if (!any_pair)
        throw std::invalid_argument("convergence_study: no (N, 2N) pairs in the list");
    if (!orders.empty()) {
        std::sort(orders.begin(), orders.end());
        const size_t mid = orders.size() / 2;
        out.median_order = (orders.size() % 2) ? orders[mid]
                                               : 0.5 * (orders[mid - 1] + orders[mid]);
    }
    return out;
}

struct BenchmarkReport {
    int n = 0;
    double t = 0;
    int j_modes = 0;
    double ode_seconds = 0;
    double spectral_seconds = 0;
    double speedup = 0;
    double sup_difference = 0;
    double ode_peak = 0;
};

/// Wall-clock the adaptive ODE solve against the full spectral pipeline on
/// the symmetric voter model with point-mass initial data at k0 ~ N/5.
/// One warm-up run each, then the median of three timed runs, serially.
inline BenchmarkReport benchmark(double tau, double gamma, int n, double t, int j_modes) {
    if (std::abs(tau - gamma) > 1e-14 * (tau + gamma))
        throw std::invalid_argument("benchmark: symmetric voter only (tau == gamma)");
    CoefficientField<double> field = voter_field<double>({tau, gamma, n});
    TridiagonalSystem<double> sys = build_matrix(field);
    const int k0 = std::max(0, n / 5 - 1);
    auto [v, d] = delta_initial<double>(k0, n);

    StateVector<double> x;
    auto ode_run = [&]() { x = integrate(sys, v, t, 1e-8, 1e-12); };

    GridFunction<double> u;
    const double h = 1.0 / n;
    auto spectral_run = [&]() {
        Eigen::VectorXd omegas = find_eigenfrequencies(h, j_modes);
        Eigen::VectorXd load = spectral_load_point(h, omegas, d.z0(), d.continuum_mass());
        SpectralModel<double> model = build_spectral_model(h, tau + gamma, j_modes, load);
        u = evaluate_spectral(model, t, 0.0, 1.0, Eigen::Index(n));
    };

    auto time_median3 = [](const std::function<void()>& run) {
        run();  // warm-up, excluded
        std::array<double, 3> times{};
        for (auto& ti : times) {
            const auto t0 = std::chrono::steady_clock::now();
            run();
            ti = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
        std::sort(times.begin(), times.end());
        return times[1];
    };

    BenchmarkReport r;
    r.n = n;
    r.t = t;
    r.j_modes = j_modes;
    r.ode_seconds = time_median3(ode_run);
    r.spectral_seconds = time_median3(spectral_run);
    r.speedup = r.ode_seconds / r.spectral_seconds;
    r.sup_difference = sup_error(u, x, n);
    r.ode_peak = x.values.maxCoeff();
    return r;
}

}  // namespace mepde
