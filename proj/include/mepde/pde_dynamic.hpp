#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "mepde/coefficients.hpp"
#include "mepde/errors.hpp"
#include "mepde/grid.hpp"
#include "mepde/runge_kutta.hpp"

namespace mepde {

/// Parabolic problem on [0,1] whose boundary values evolve by their own ODEs:
///   interior:  u_t = D(z) u_zz + V(z) u_z + R(z) u
///   left:      u_t(t,0) = bl_flux * u_z(t,0) + bl_react * u(t,0)
///   right:     u_t(t,1) = br_flux * u_z(t,1) + br_react * u(t,1)
/// with D(z) = (h^2/2)(a(z-h)+c(z+h)), V(z) = h(c(z+h)-a(z-h)),
/// R(z) = a(z-h)+b(z)+c(z+h), bl_flux = h c(h), bl_react = c(h)+b(0),
/// br_flux = -h a(1-h), br_react = a(1-h)+b(1).
template <typename Scalar = double>
struct DynamicPdeProblem {
    int n{0};  // coarse grid count, h = 1/n
    Scalar h{0};
    std::function<Scalar(Scalar)> diffusion;  // D
    std::function<Scalar(Scalar)> drift;      // V
    std::function<Scalar(Scalar)> reaction;   // R
    Scalar bl_flux{0}, bl_react{0};
    Scalar br_flux{0}, br_react{0};
    bool parabolic{true};
    Scalar bad_lo{0}, bad_hi{0};  // an interval where D < 0, when !parabolic
};

template <typename Scalar>
DynamicPdeProblem<Scalar> assemble_dynamic(const CoefficientField<Scalar>& field) {
    if (field.n < 2) throw std::invalid_argument("assemble_dynamic: N must be at least 2");
    DynamicPdeProblem<Scalar> p;
    p.n = field.n;
    const Scalar h = field.h();
    p.h = h;
    auto a = field.a, b = field.b, c = field.c;
    p.diffusion = [a, c, h](Scalar z) {
        return Scalar(0.5) * h * h *
               (detail::eval_coefficient<Scalar>(a, z - h, "a") +
                detail::eval_coefficient<Scalar>(c, z + h, "c"));
    };
    p.drift = [a, c, h](Scalar z) {
        return h * (detail::eval_coefficient<Scalar>(c, z + h, "c") -
                    detail::eval_coefficient<Scalar>(a, z - h, "a"));
    };
    p.reaction = [a, b, c, h](Scalar z) {
        return detail::eval_coefficient<Scalar>(a, z - h, "a") +
               detail::eval_coefficient<Scalar>(b, z, "b") +
               detail::eval_coefficient<Scalar>(c, z + h, "c");
    };
    const Scalar c_h = detail::eval_coefficient<Scalar>(c, h, "c");
    const Scalar a_1mh = detail::eval_coefficient<Scalar>(a, 1 - h, "a");
    p.bl_flux = h * c_h;
    p.bl_react = c_h + detail::eval_coefficient<Scalar>(b, Scalar(0), "b");
    p.br_flux = -h * a_1mh;
    p.br_react = a_1mh + detail::eval_coefficient<Scalar>(b, Scalar(1), "b");

    // probe the diffusion sign on a fine interior grid
    constexpr int probes = 2048;
    for (int i = 1; i < probes; ++i) {
        const Scalar z = Scalar(i) / Scalar(probes);
        if (p.diffusion(z) < Scalar(0)) {
            if (p.parabolic) {
                p.parabolic = false;
                p.bad_lo = z;
            }
            p.bad_hi = z;
        }
    }
    return p;
}

template <typename Scalar = double>
struct PdeSolveOptions {
    Scalar rel_tol = Scalar(1e-8);
    Scalar abs_tol = Scalar(1e-12);
    std::int64_t max_steps = 100'000'000;
    /// Accept a non-parabolic problem by clamping D to max(D, 0).
    bool clamp_diffusion = false;
};

struct PdeSolveInfo {
    bool clamped = false;
    long clamped_nodes = 0;
};

/// Method of lines on M+1 equispaced nodes of [0,1]: second-order central
/// differences inside, the dynamic boundary ODEs with one-sided three-point
/// derivative stencils at the two end nodes, time integration by the shared
/// adaptive RK pair.
template <typename Scalar>
GridFunction<Scalar> solve_dynamic(const DynamicPdeProblem<Scalar>& prob,
                                   const std::function<Scalar(Scalar)>& u0,
                                   Scalar t_final, Eigen::Index m,
                                   const PdeSolveOptions<Scalar>& opt = {},
                                   PdeSolveInfo* info = nullptr) {
    if (m < 4 * prob.n)
        throw std::invalid_argument("solve_dynamic: refinement M must be at least 4N");
    if (!(t_final >= Scalar(0)))
        throw std::invalid_argument("solve_dynamic: t_final must be >= 0");

    const Scalar dz = Scalar(1) / Scalar(m);
    Eigen::VectorX<Scalar> dcoef(m - 1), vcoef(m - 1), rcoef(m - 1);
    long clamped = 0;
    Scalar neg_lo = 0, neg_hi = 0;
    for (Eigen::Index j = 1; j < m; ++j) {
        const Scalar z = Scalar(j) * dz;
        Scalar d = prob.diffusion(z);
        if (d < Scalar(0)) {
            if (clamped == 0) neg_lo = z;
            neg_hi = z;
            ++clamped;
            d = Scalar(0);
        }
        dcoef[j - 1] = d;
        vcoef[j - 1] = prob.drift(z);
        rcoef[j - 1] = prob.reaction(z);
    }
    if (clamped > 0 && !opt.clamp_diffusion)
        throw SolverError("solve_dynamic: diffusion coefficient is negative on [" +
                          std::to_string(double(neg_lo)) + ", " + std::to_string(double(neg_hi)) +
                          "]; pass clamp_diffusion to override");
    if (info) {
        info->clamped = clamped > 0;
        info->clamped_nodes = clamped;
    }

    const Scalar inv_dz2 = Scalar(1) / (dz * dz);
    const Scalar inv_2dz = Scalar(1) / (2 * dz);
    auto rhs = [&](Scalar, const Eigen::VectorX<Scalar>& u, Eigen::VectorX<Scalar>& du) {
        const auto uc = u.segment(1, m - 1).array();
        const auto ul = u.head(m - 1).array();
        const auto ur = u.tail(m - 1).array();
        du.segment(1, m - 1) =
            (dcoef.array() * (ul - 2 * uc + ur) * inv_dz2 +
             vcoef.array() * (ur - ul) * inv_2dz + rcoef.array() * uc)
                .matrix();
        const Scalar dl = (-3 * u[0] + 4 * u[1] - u[2]) * inv_2dz;
        const Scalar dr = (3 * u[m] - 4 * u[m - 1] + u[m - 2]) * inv_2dz;
        du[0] = prob.bl_flux * dl + prob.bl_react * u[0];
        du[m] = prob.br_flux * dr + prob.br_react * u[m];
    };

    GridFunction<Scalar> g = GridFunction<Scalar>::sample(u0, Scalar(0), Scalar(1), m);
    IntegrateOptions<Scalar> iopt{opt.rel_tol, opt.abs_tol, opt.max_steps};
    g.values = rk45_integrate<Scalar>(rhs, g.values, Scalar(0), t_final, iopt);
    g.time = t_final;
    return g;
}

template <typename Scalar>
GridFunction<Scalar> solve_dynamic(const DynamicPdeProblem<Scalar>& prob,
                                   const GridFunction<Scalar>& u0, Scalar t_final,
                                   Eigen::Index m, const PdeSolveOptions<Scalar>& opt = {},
                                   PdeSolveInfo* info = nullptr) {
    std::function<Scalar(Scalar)> f = [&u0](Scalar z) { return value_at(u0, z); };
    return solve_dynamic(prob, f, t_final, m, opt, info);
}

/// A function together with its first three derivatives, supplied in closed
/// form so truncation defects can be measured against exact derivatives.
template <typename Scalar = double>
struct SmoothFunction {
    std::function<Scalar(Scalar)> f;
    std::function<Scalar(Scalar)> d1;
    std::function<Scalar(Scalar)> d2;
    std::function<Scalar(Scalar)> d3;
};

/// Defect of the generator rows against the differential operators they
/// approximate, measured on the sampled test function:
///   interior = max_k |(A f_N)_k - (D f'' + V f' + R f)(k/N)|, 1 <= k <= N-1
///   boundary = max of the two end-row defects against the boundary operators.
template <typename Scalar>
std::pair<Scalar, Scalar> truncation_residual(const CoefficientField<Scalar>& field,
                                              const SmoothFunction<Scalar>& fn, int n) {
    if (n < 2) throw std::invalid_argument("truncation_residual: N must be at least 2");
    const Scalar h = Scalar(1) / Scalar(n);
    auto a = [&](int k) { return detail::eval_coefficient<Scalar>(field.a, Scalar(k) / Scalar(n), "a"); };
    auto b = [&](int k) { return detail::eval_coefficient<Scalar>(field.b, Scalar(k) / Scalar(n), "b"); };
    auto c = [&](int k) { return detail::eval_coefficient<Scalar>(field.c, Scalar(k) / Scalar(n), "c"); };
    auto fv = [&](int k) { return fn.f(Scalar(k) / Scalar(n)); };

    Scalar interior = 0;
    for (int k = 1; k <= n - 1; ++k) {
        const Scalar z = Scalar(k) / Scalar(n);
        const Scalar row = a(k - 1) * fv(k - 1) + b(k) * fv(k) + c(k + 1) * fv(k + 1);
        const Scalar dcoef = Scalar(0.5) * h * h * (a(k - 1) + c(k + 1));
        const Scalar vcoef = h * (c(k + 1) - a(k - 1));
        const Scalar rcoef = a(k - 1) + b(k) + c(k + 1);
        const Scalar op = dcoef * fn.d2(z) + vcoef * fn.d1(z) + rcoef * fn.f(z);
        interior = std::max(interior, std::abs(row - op));
    }

    const Scalar row0 = b(0) * fv(0) + c(1) * fv(1);
    const Scalar op0 = h * c(1) * fn.d1(0) + (c(1) + b(0)) * fn.f(0);
    const Scalar rowN = a(n - 1) * fv(n - 1) + b(n) * fv(n);
    const Scalar opN = -h * a(n - 1) * fn.d1(1) + (a(n - 1) + b(n)) * fn.f(1);
    const Scalar boundary = std::max(std::abs(row0 - op0), std::abs(rowN - opN));
    return {interior, boundary};
}

}  // namespace mepde
