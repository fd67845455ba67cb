#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "mepde/coefficients.hpp"
#include "mepde/errors.hpp"
#include "mepde/grid.hpp"
#include "mepde/runge_kutta.hpp"

namespace mepde {

/// Divergence-form problem on the extended interval [-h/2, 1+h/2]:
///   u_t = (alpha(z) u)_zz + (beta(z) u)_z,
///   (alpha u)_z + beta u = 0 at both endpoints,
/// with alpha = (a+c) h^2 / 2 and beta = (c-a) h. The boundary condition
/// makes the integral of u over the extended interval a constant of motion.
template <typename Scalar = double>
struct RobinPdeProblem {
    int n{0};
    Scalar h{0};
    std::function<Scalar(Scalar)> alpha;
    std::function<Scalar(Scalar)> beta;
    Scalar z_left{0}, z_right{0};
    bool parabolic{true};
    Scalar bad_lo{0}, bad_hi{0};  // where alpha < 0, when !parabolic
};

/// alpha(z) = (a(z)+c(z)) h^2 / 2, beta(z) = (c(z)-a(z)) h.
/// The pair is the unique solution of a_k = alpha_k/h^2 - beta_k/(2h),
/// c_k = alpha_k/h^2 + beta_k/(2h).
template <typename Scalar>
std::pair<std::function<Scalar(Scalar)>, std::function<Scalar(Scalar)>> alpha_beta(
    const CoefficientField<Scalar>& field) {
    const Scalar h = field.h();
    auto a = field.a, c = field.c;
    std::function<Scalar(Scalar)> alpha = [a, c, h](Scalar z) {
        return Scalar(0.5) * h * h *
               (detail::eval_coefficient<Scalar>(a, z, "a") +
                detail::eval_coefficient<Scalar>(c, z, "c"));
    };
    std::function<Scalar(Scalar)> beta = [a, c, h](Scalar z) {
        return h * (detail::eval_coefficient<Scalar>(c, z, "c") -
                    detail::eval_coefficient<Scalar>(a, z, "a"));
    };
    return {std::move(alpha), std::move(beta)};
}

template <typename Scalar>
RobinPdeProblem<Scalar> assemble_robin(const CoefficientField<Scalar>& field) {
    if (field.n < 2) throw std::invalid_argument("assemble_robin: N must be at least 2");
    RobinPdeProblem<Scalar> p;
    p.n = field.n;
    p.h = field.h();
    auto ab = alpha_beta(field);
    p.alpha = std::move(ab.first);
    p.beta = std::move(ab.second);
    p.z_left = -p.h / 2;
    p.z_right = 1 + p.h / 2;
    constexpr int probes = 2048;
    for (int i = 0; i <= probes; ++i) {
        const Scalar z = p.z_left + (p.z_right - p.z_left) * Scalar(i) / Scalar(probes);
        if (p.alpha(z) < Scalar(0)) {
            if (p.parabolic) {
                p.parabolic = false;
                p.bad_lo = z;
            }
            p.bad_hi = z;
        }
    }
    return p;
}

namespace detail {

/// Cell-centered mesh of [-h/2, 1+h/2] with m cells per coarse interval:
/// nodes z_j = h (2j+1-m) / (2m), j = 0 .. (N+1)m - 1. Odd m keeps every
/// coarse point k/N a node; m = 1 reproduces the coarse grid 0, h, ..., 1.
template <typename Scalar>
Scalar robin_node(int n, int m, Eigen::Index j) {
    const Scalar h = Scalar(1) / Scalar(n);
    return h * Scalar(2 * j + 1 - m) / Scalar(2 * m);
}

/// Bands of the semi-discrete operator. Central differences for (alpha u)_zz
/// and (beta u)_z; at the two extreme rows the ghost value is eliminated
/// through the boundary condition discretized at the domain endpoint with a
/// centered derivative and the arithmetic mean of the two neighbors. After
/// elimination the end rows need no ghost coefficients at all, and every
/// column sums to zero exactly (p and q cancel term by term).
template <typename Scalar>
TridiagonalSystem<Scalar> robin_bands(const RobinPdeProblem<Scalar>& prob, int m) {
    const Eigen::Index count = Eigen::Index(prob.n + 1) * m;
    const Scalar delta = prob.h / Scalar(m);
    Eigen::VectorX<Scalar> p(count), q(count);
    for (Eigen::Index j = 0; j < count; ++j) {
        const Scalar z = robin_node<Scalar>(prob.n, m, j);
        p[j] = prob.alpha(z) / (delta * delta);
        q[j] = prob.beta(z) / (2 * delta);
    }
    TridiagonalSystem<Scalar> sys;
    sys.sub = (p - q).head(count - 1);
    sys.sup = (p + q).tail(count - 1);
    sys.diag.resize(count);
    sys.diag[0] = -p[0] + q[0];
    for (Eigen::Index j = 1; j < count - 1; ++j) sys.diag[j] = -2 * p[j];
    sys.diag[count - 1] = -p[count - 1] - q[count - 1];
    detail::set_stochastic_flag(sys);
    return sys;
}

/// Smallest odd per-cell refinement giving at least m_request nodes.
template <typename Scalar>
int robin_refinement(int n, Eigen::Index m_request) {
    int m = int((m_request + n) / (n + 1));
    if (m < 1) m = 1;
    if (m % 2 == 0) ++m;
    return m;
}

}  // namespace detail

/// The nodes solve_robin will use for a requested resolution, as an empty
/// GridFunction (useful for preparing initial data and reading results).
template <typename Scalar>
GridFunction<Scalar> robin_grid(const RobinPdeProblem<Scalar>& prob, Eigen::Index m_request) {
    const int m = detail::robin_refinement<Scalar>(prob.n, m_request);
    const Eigen::Index count = Eigen::Index(prob.n + 1) * m;
    GridFunction<Scalar> g;
    g.z_min = detail::robin_node<Scalar>(prob.n, m, 0);
    g.z_max = detail::robin_node<Scalar>(prob.n, m, count - 1);
    g.values = Eigen::VectorX<Scalar>::Zero(count);
    return g;
}

/// Integral of u over the extended interval: midpoint rule dz * sum(values),
/// which is the exactly conserved functional of the scheme.
template <typename Scalar>
Scalar robin_mass(const GridFunction<Scalar>& g) {
    return integral_midpoint(g);
}

/// Method of lines on the cell-centered extended grid. The returned
/// GridFunction carries the mesh nodes (its z_min/z_max are the extreme
/// nodes, half a cell inside the domain endpoints).
template <typename Scalar>
GridFunction<Scalar> solve_robin(const RobinPdeProblem<Scalar>& prob,
                                 const std::function<Scalar(Scalar)>& u0,
                                 Scalar t_final, Eigen::Index m_request,
                                 const PdeSolveOptions<Scalar>& opt = {},
                                 PdeSolveInfo* info = nullptr) {
    if (m_request < 4 * prob.n)
        throw std::invalid_argument("solve_robin: refinement M must be at least 4N");
    if (!(t_final >= Scalar(0)))
        throw std::invalid_argument("solve_robin: t_final must be >= 0");
    if (!prob.parabolic && !opt.clamp_diffusion)
        throw SolverError("solve_robin: alpha is negative on [" + std::to_string(double(prob.bad_lo)) +
                          ", " + std::to_string(double(prob.bad_hi)) +
                          "]; pass clamp_diffusion to override");

    const int m = detail::robin_refinement<Scalar>(prob.n, m_request);
    RobinPdeProblem<Scalar> worked = prob;
    long clamped = 0;
    if (!prob.parabolic) {
        auto alpha = prob.alpha;
        worked.alpha = [alpha](Scalar z) { return std::max(alpha(z), Scalar(0)); };
        clamped = 1;
    }
    if (info) {
        info->clamped = clamped > 0;
        info->clamped_nodes = clamped;
    }
    TridiagonalSystem<Scalar> bands = detail::robin_bands(worked, m);
    const Eigen::Index count = bands.n_states();

    GridFunction<Scalar> g;
    g.z_min = detail::robin_node<Scalar>(prob.n, m, 0);
    g.z_max = detail::robin_node<Scalar>(prob.n, m, count - 1);
    g.values.resize(count);
    for (Eigen::Index j = 0; j < count; ++j)
        g.values[j] = u0(detail::robin_node<Scalar>(prob.n, m, j));

    auto rhs = [&bands](Scalar, const Eigen::VectorX<Scalar>& u, Eigen::VectorX<Scalar>& du) {
        apply_tridiagonal(bands, u, du);
    };
    IntegrateOptions<Scalar> iopt{opt.rel_tol, opt.abs_tol, opt.max_steps};
    g.values = rk45_integrate<Scalar>(rhs, g.values, Scalar(0), t_final, iopt);
    g.time = t_final;
    return g;
}

template <typename Scalar>
GridFunction<Scalar> solve_robin(const RobinPdeProblem<Scalar>& prob,
                                 const GridFunction<Scalar>& u0, Scalar t_final,
                                 Eigen::Index m_request, const PdeSolveOptions<Scalar>& opt = {},
                                 PdeSolveInfo* info = nullptr) {
    std::function<Scalar(Scalar)> f = [&u0](Scalar z) { return value_at(u0, z); };
    return solve_robin(prob, f, t_final, m_request, opt, info);
}

/// The discretization at the coarse spacing h itself (one cell per state).
/// By construction this must coincide with build_matrix on the same field.
template <typename Scalar>
TridiagonalSystem<Scalar> discrete_robin_system(const CoefficientField<Scalar>& field) {
    TridiagonalSystem<Scalar> direct = build_matrix(field);
    if (!direct.stochastic)
        throw std::invalid_argument("discrete_robin_system: field must be stochastic");
    RobinPdeProblem<Scalar> prob = assemble_robin(field);
    return detail::robin_bands(prob, 1);
}

}  // namespace mepde
