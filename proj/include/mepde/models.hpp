#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "mepde/coefficients.hpp"
#include "mepde/ode.hpp"

namespace mepde {

/// Two-opinion invasion on a cycle graph, reduced to a birth-death chain on
/// {0..N} with constant rates 2*tau up and 2*gamma down.
template <typename Scalar = double>
struct VoterParams {
    Scalar tau{0};
    Scalar gamma{0};
    int n{2};
};

/// SIS epidemic on the complete graph with N+1 nodes; k infected -> k+1 at
/// rate k(N-k)tau, k -> k-1 at rate k*gamma.
template <typename Scalar = double>
struct SisParams {
    Scalar tau{0};
    Scalar gamma{0};
    int n{2};
};

namespace detail {

template <typename Scalar, typename P>
void check_model_params(const P& p, const char* name) {
    if (p.n < 2) throw std::invalid_argument(std::string(name) + ": N must be at least 2");
    if (p.tau < Scalar(0) || p.gamma < Scalar(0))
        throw std::invalid_argument(std::string(name) + ": rates must be nonnegative");
    if (!(p.tau + p.gamma > Scalar(0)))
        throw std::invalid_argument(std::string(name) + ": tau + gamma must be positive");
}

}  // namespace detail

/// a == 2*tau, c == 2*gamma; b is -2(tau+gamma) on (0,1) with the boundary
/// values -2*tau at z<=0 and -2*gamma at z>=1, so the interior reaction
/// a(z-h)+b(z)+c(z+h) vanishes identically on (0,1).
template <typename Scalar = double>
CoefficientField<Scalar> voter_field(const VoterParams<Scalar>& p) {
    detail::check_model_params<Scalar>(p, "voter_field");
    const Scalar tau = p.tau, gamma = p.gamma;
    CoefficientField<Scalar> f;
    f.n = p.n;
    f.a = [tau](Scalar) { return 2 * tau; };
    f.c = [gamma](Scalar) { return 2 * gamma; };
    f.b = [tau, gamma](Scalar z) -> Scalar {
        if (z <= Scalar(0)) return -2 * tau;
        if (z >= Scalar(1)) return -2 * gamma;
        return -2 * (tau + gamma);
    };
    return f;
}

/// a(z) = N^2 tau z(1-z), c(z) = N gamma z, b = -a - c. State 0 is absorbing
/// (column 0 of the generator is zero).
template <typename Scalar = double>
CoefficientField<Scalar> sis_field(const SisParams<Scalar>& p) {
    detail::check_model_params<Scalar>(p, "sis_field");
    const Scalar tau = p.tau, gamma = p.gamma, n = Scalar(p.n);
    CoefficientField<Scalar> f;
    f.n = p.n;
    f.a = [tau, n](Scalar z) { return n * n * tau * z * (1 - z); };
    f.c = [gamma, n](Scalar z) { return n * gamma * z; };
    f.b = [tau, gamma, n](Scalar z) { return -(n * n * tau * z * (1 - z)) - n * gamma * z; };
    return f;
}

/// Point-mass initial condition: location z0 = k0/N carrying unit discrete
/// mass (sum over the N+1 states is 1, i.e. continuum mass h).
template <typename Scalar = double>
struct DeltaInitial {
    int k0{0};
    int n{1};

    Scalar z0() const { return Scalar(k0) / Scalar(n); }
    Scalar discrete_mass() const { return Scalar(1); }
    /// integral of the matching continuum profile
    Scalar continuum_mass() const { return Scalar(1) / Scalar(n); }
};

template <typename Scalar = double>
std::pair<StateVector<Scalar>, DeltaInitial<Scalar>> delta_initial(int k0, int n) {
    if (k0 < 0 || k0 > n) throw std::invalid_argument("delta_initial: index out of range");
    StateVector<Scalar> v;
    v.values = Eigen::VectorX<Scalar>::Zero(n + 1);
    v.values[k0] = Scalar(1);
    return {std::move(v), DeltaInitial<Scalar>{k0, n}};
}

/// Mollified realization for the method-of-lines solvers: a Gaussian of
/// standard deviation 2/N normalized so that the sum over the N+1 grid
/// points equals the discrete mass.
template <typename Scalar = double>
std::function<Scalar(Scalar)> mollified_delta(const DeltaInitial<Scalar>& d) {
    const Scalar sigma = Scalar(2) / Scalar(d.n);
    const Scalar z0 = d.z0();
    Scalar grid_sum = 0;
    for (int k = 0; k <= d.n; ++k) {
        const Scalar dzk = Scalar(k) / Scalar(d.n) - z0;
        grid_sum += std::exp(-dzk * dzk / (2 * sigma * sigma));
    }
    const Scalar amp = d.discrete_mass() / grid_sum;
    return [amp, z0, sigma](Scalar z) {
        const Scalar s = z - z0;
        return amp * std::exp(-s * s / (2 * sigma * sigma));
    };
}

/// Named smooth profiles and their grid sampling v_k = u0(k/N).
template <typename Scalar = double>
std::pair<std::function<Scalar(Scalar)>, StateVector<Scalar>> smooth_initial(
    const std::string& name, int n) {
    std::function<Scalar(Scalar)> u0;
    if (name == "sin2") {
        u0 = [](Scalar z) {
            const Scalar s = std::sin(Scalar(EIGEN_PI) * z);
            return s * s;
        };
    } else if (name == "gaussian") {
        u0 = [](Scalar z) { return std::exp(Scalar(-50) * (z - Scalar(0.3)) * (z - Scalar(0.3))); };
    } else if (name == "poly") {
        u0 = [](Scalar z) { return z * z * (1 - z) * (1 - z); };
    } else {
        throw std::invalid_argument("smooth_initial: unknown profile '" + name + "'");
    }
    StateVector<Scalar> v;
    v.values.resize(n + 1);
    for (int k = 0; k <= n; ++k) v.values[k] = u0(Scalar(k) / Scalar(n));
    return {std::move(u0), std::move(v)};
}

}  // namespace mepde
