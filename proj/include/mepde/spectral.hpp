#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "mepde/errors.hpp"
#include "mepde/grid.hpp"

namespace mepde {

/// Fourier-method model for the symmetric problem
///   u_t = alpha_rate h^2 u_zz on (0,1),
///   u_t(t,0) = alpha_rate h u_z(t,0),  u_t(t,1) = -alpha_rate h u_z(t,1).
/// Eigenfunctions w_j(z) = cos(omega_j z / h) - omega_j sin(omega_j z / h)
/// with lambda_j = -alpha_rate omega_j^2; the omega_j solve
/// tan(omega/h) = 2 omega / (omega^2 - 1), one per bracket
/// ((2j-1) h pi/2, (2j+1) h pi/2), omega_0 = 0. The family is not
/// orthogonal, so coefficients come from the Gram system G c = U.
template <typename Scalar = double>
struct SpectralModel {
    Scalar h{0};
    Scalar alpha_rate{0};
    Eigen::VectorX<Scalar> omegas;
    Eigen::VectorX<Scalar> lambdas;
    Eigen::MatrixX<Scalar> gram;
    Eigen::VectorX<Scalar> coeffs;
};

/// Pole-free form of the eigenfrequency equation.
template <typename Scalar>
Scalar eigenfrequency_equation(Scalar omega, Scalar h) {
    const Scalar th = omega / h;
    return (omega * omega - 1) * std::sin(th) - 2 * omega * std::cos(th);
}

template <typename Scalar>
Scalar eigenfrequency_equation_deriv(Scalar omega, Scalar h) {
    const Scalar th = omega / h;
    const Scalar s = std::sin(th), c = std::cos(th);
    return 2 * omega * s + (omega * omega - 1) * c / h - 2 * c + 2 * omega * s / h;
}

/// First J eigenfrequencies. omega_0 = 0 is exact; for j >= 1 the root is
/// bracketed inside ((2j-1) h pi/2, (2j+1) h pi/2), located by a sign-change
/// scan (the bracket straddling omega = 1 can hold two roots; the first is
/// taken), then polished by Newton safeguarded with bisection until
/// |F(omega)| <= 1e-13 (1 + omega^2).
template <typename Scalar>
Eigen::VectorX<Scalar> find_eigenfrequencies(Scalar h, int j_count) {
    if (!(h > Scalar(0) && h < Scalar(1)))
        throw std::invalid_argument("find_eigenfrequencies: h must lie in (0,1)");
    if (j_count < 1) throw std::invalid_argument("find_eigenfrequencies: need J >= 1");
    Eigen::VectorX<Scalar> omegas(j_count);
    omegas[0] = Scalar(0);
    const Scalar half_pi_h = h * Scalar(EIGEN_PI) / 2;
    constexpr int scan = 256;
    for (int j = 1; j < j_count; ++j) {
        const Scalar lo = Scalar(2 * j - 1) * half_pi_h;
        const Scalar hi = Scalar(2 * j + 1) * half_pi_h;
        // locate the first sign change
        Scalar xa = lo, fa = eigenfrequency_equation(lo, h);
        Scalar xb = 0, fb = 0;
        bool found = false;
        for (int i = 1; i <= scan; ++i) {
            const Scalar x = lo + (hi - lo) * Scalar(i) / Scalar(scan);
            const Scalar fx = eigenfrequency_equation(x, h);
            if (fa == Scalar(0)) {
                xb = xa;
                fb = fa;
                found = true;
                break;
            }
            if (fa * fx <= Scalar(0)) {
                xb = x;
                fb = fx;
                found = true;
                break;
            }
            xa = x;
            fa = fx;
        }
        if (!found)
            throw SolverError("find_eigenfrequencies: no sign change in bracket j=" +
                              std::to_string(j));
        Scalar x = (xa + xb) / 2;
        const auto tol = [](Scalar w) { return Scalar(1e-13) * (1 + w * w); };
        for (int it = 0; it < 200; ++it) {
            const Scalar fx = eigenfrequency_equation(x, h);
            if (std::abs(fx) <= tol(x)) break;
            if ((fa < Scalar(0)) == (fx < Scalar(0))) {
                xa = x;
                fa = fx;
            } else {
                xb = x;
                fb = fx;
            }
            const Scalar d = eigenfrequency_equation_deriv(x, h);
            Scalar xn = (d != Scalar(0)) ? x - fx / d : x;
            const Scalar wlo = std::min(xa, xb), whi = std::max(xa, xb);
            if (!(xn > wlo && xn < whi)) xn = (xa + xb) / 2;
            if (xn == x) break;
            x = xn;
        }
        if (std::abs(eigenfrequency_equation(x, h)) > Scalar(1e-12) * (1 + x * x))
            throw SolverError("find_eigenfrequencies: did not converge in bracket j=" +
                              std::to_string(j));
        omegas[j] = x;
    }
    return omegas;
}

template <typename Scalar>
Scalar eigenfunction(Scalar omega, Scalar h, Scalar z) {
    const Scalar q = omega * z / h;
    return std::cos(q) - omega * std::sin(q);
}

template <typename Scalar>
Scalar eigenfunction_deriv(Scalar omega, Scalar h, Scalar z) {
    const Scalar q = omega * z / h;
    return -(omega / h) * (std::sin(q) + omega * std::cos(q));
}

namespace detail {

/// L2(0,1) inner product of two eigenfunctions from the closed-form
/// antiderivatives (product-to-sum). qk = omega_k / h are the frequencies in z.
template <typename Scalar>
Scalar eigen_pair_inner(Scalar omega_k, Scalar omega_l, Scalar h, bool same) {
    const Scalar qk = omega_k / h, ql = omega_l / h;
    if (omega_k == Scalar(0) && omega_l == Scalar(0)) return Scalar(1);
    if (omega_l == Scalar(0)) return eigen_pair_inner(omega_l, omega_k, h, false);
    if (omega_k == Scalar(0)) {
        // <1, w_l> = sin(ql)/ql - omega_l (1-cos(ql))/ql
        return std::sin(ql) / ql - omega_l * (1 - std::cos(ql)) / ql;
    }
    if (same) {
        const Scalar q2 = 2 * qk;
        const Scalar icc = Scalar(0.5) + std::sin(q2) / (2 * q2);
        const Scalar iss = Scalar(0.5) - std::sin(q2) / (2 * q2);
        const Scalar isc = (1 - std::cos(q2)) / (2 * q2);
        return icc - 2 * omega_k * isc + omega_k * omega_k * iss;
    }
    const Scalar d = qk - ql, s = qk + ql;
    const Scalar sd = std::sin(d) / d, ss = std::sin(s) / s;
    const Scalar cd = (1 - std::cos(d)) / d, cs = (1 - std::cos(s)) / s;
    const Scalar icc = (sd + ss) / 2;
    const Scalar iss = (sd - ss) / 2;
    const Scalar isc_lk = (cs - cd) / 2;  // integral sin(ql z) cos(qk z)
    const Scalar isc_kl = (cs + cd) / 2;  // integral sin(qk z) cos(ql z)
    return icc - omega_l * isc_lk - omega_k * isc_kl + omega_k * omega_l * iss;
}

template <typename Scalar>
void require_strictly_increasing(const Eigen::VectorX<Scalar>& omegas) {
    for (Eigen::Index j = 1; j < omegas.size(); ++j)
        if (!(omegas[j] > omegas[j - 1]))
            throw std::invalid_argument("spectral: frequencies must be strictly increasing");
}

}  // namespace detail

template <typename Scalar>
Eigen::MatrixX<Scalar> gram_matrix(Scalar h, const Eigen::VectorX<Scalar>& omegas) {
    detail::require_strictly_increasing(omegas);
    const Eigen::Index j_count = omegas.size();
    Eigen::MatrixX<Scalar> g(j_count, j_count);
    for (Eigen::Index k = 0; k < j_count; ++k) {
        for (Eigen::Index l = 0; l <= k; ++l) {
            const Scalar v = detail::eigen_pair_inner(omegas[k], omegas[l], h, k == l);
            g(k, l) = v;
            g(l, k) = v;
        }
    }
    return g;
}

/// U_j = integral of w_j * u0 over (0,1) by composite Simpson, refined until
/// two successive refinements differ by less than tol.
template <typename Scalar>
Eigen::VectorX<Scalar> spectral_load(Scalar h, const Eigen::VectorX<Scalar>& omegas,
                                     const std::function<Scalar(Scalar)>& u0,
                                     Scalar tol = Scalar(1e-10)) {
    detail::require_strictly_increasing(omegas);
    const Eigen::Index j_count = omegas.size();
    Eigen::VectorX<Scalar> u(j_count);
    for (Eigen::Index j = 0; j < j_count; ++j) {
        const Scalar w = omegas[j];
        auto f = [&](Scalar z) { return eigenfunction(w, h, z) * u0(z); };
        auto simpson = [&](Eigen::Index intervals) {
            const Scalar dz = Scalar(1) / Scalar(intervals);
            Scalar acc = f(Scalar(0)) + f(Scalar(1));
            for (Eigen::Index i = 1; i < intervals; ++i)
                acc += f(Scalar(i) * dz) * ((i % 2) ? Scalar(4) : Scalar(2));
            return acc * dz / Scalar(3);
        };
        Eigen::Index m = 512;
        Scalar prev = simpson(m);
        for (int r = 0; r < 14; ++r) {
            m *= 2;
            const Scalar cur = simpson(m);
            const Scalar diff = std::abs(cur - prev);
            prev = cur;
            if (diff < tol) break;
        }
        u[j] = prev;
    }
    return u;
}

/// Load vector of a point mass at z0: U_j = mass * w_j(z0).
template <typename Scalar>
Eigen::VectorX<Scalar> spectral_load_point(Scalar h, const Eigen::VectorX<Scalar>& omegas,
                                           Scalar z0, Scalar mass) {
    detail::require_strictly_increasing(omegas);
    Eigen::VectorX<Scalar> u(omegas.size());
    for (Eigen::Index j = 0; j < omegas.size(); ++j)
        u[j] = mass * eigenfunction(omegas[j], h, z0);
    return u;
}

template <typename Scalar>
std::pair<Eigen::MatrixX<Scalar>, Eigen::VectorX<Scalar>> gram_and_load(
    Scalar h, const Eigen::VectorX<Scalar>& omegas,
    const std::function<Scalar(Scalar)>& u0) {
    return {gram_matrix(h, omegas), spectral_load(h, omegas, u0)};
}

/// Assemble the model and solve G c = U (dense LDLT). A Gram matrix that is
/// not positive definite is reported with its extreme eigenvalues.
template <typename Scalar>
SpectralModel<Scalar> build_spectral_model(Scalar h, Scalar alpha_rate, int j_count,
                                           const Eigen::VectorX<Scalar>& load) {
    SpectralModel<Scalar> model;
    model.h = h;
    model.alpha_rate = alpha_rate;
    model.omegas = find_eigenfrequencies(h, j_count);
    model.lambdas = -alpha_rate * model.omegas.cwiseProduct(model.omegas);
    model.gram = gram_matrix(h, model.omegas);
    Eigen::LDLT<Eigen::MatrixX<Scalar>> ldlt(model.gram);
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= Scalar(0)) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixX<Scalar>> es(model.gram);
        const Scalar emin = es.eigenvalues().minCoeff();
        const Scalar emax = es.eigenvalues().maxCoeff();
        throw SolverError("spectral: Gram matrix is not positive definite (eigenvalues in [" +
                          std::to_string(double(emin)) + ", " + std::to_string(double(emax)) + "])");
    }
    model.coeffs = ldlt.solve(load);
    return model;
}

/// u(t, z) = sum_j c_j exp(lambda_j t) w_j(z) on an equispaced output grid.
template <typename Scalar>
GridFunction<Scalar> evaluate_spectral(const SpectralModel<Scalar>& model, Scalar t,
                                       Scalar z_min, Scalar z_max, Eigen::Index m) {
    GridFunction<Scalar> g;
    g.z_min = z_min;
    g.z_max = z_max;
    g.time = t;
    Eigen::ArrayX<Scalar> z(m + 1);
    for (Eigen::Index i = 0; i <= m; ++i)
        z[i] = z_min + (z_max - z_min) * Scalar(i) / Scalar(m);
    Eigen::ArrayX<Scalar> acc = Eigen::ArrayX<Scalar>::Zero(m + 1);
    for (Eigen::Index j = 0; j < model.omegas.size(); ++j) {
        const Scalar w = model.omegas[j];
        const Scalar amp = model.coeffs[j] * std::exp(model.lambdas[j] * t);
        if (amp == Scalar(0)) continue;
        const Eigen::ArrayX<Scalar> q = z * (w / model.h);
        acc += amp * (q.cos() - w * q.sin());
    }
    g.values = acc.matrix();
    return g;
}

/// Convenience wrapper: build the model for a smooth initial profile and
/// evaluate at time t on m+1 points of [0,1].
template <typename Scalar>
GridFunction<Scalar> solve_spectral(Scalar h, Scalar alpha_rate, int j_count,
                                    const std::function<Scalar(Scalar)>& u0, Scalar t,
                                    Eigen::Index m) {
    Eigen::VectorX<Scalar> omegas = find_eigenfrequencies(h, j_count);
    Eigen::VectorX<Scalar> load = spectral_load(h, omegas, u0);
    SpectralModel<Scalar> model = build_spectral_model(h, alpha_rate, j_count, load);
    return evaluate_spectral(model, t, Scalar(0), Scalar(1), m);
}

}  // namespace mepde
