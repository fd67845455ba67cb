#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "mepde/coefficients.hpp"
#include "mepde/errors.hpp"
#include "mepde/random.hpp"
#include "mepde/runge_kutta.hpp"

namespace mepde {

template <typename Scalar = double>
struct StateVector {
    Eigen::VectorX<Scalar> values;
    Scalar time{0};

    Scalar sum() const { return values.sum(); }
};

/// Solve x' = A x, x(0) = v up to t_final with the adaptive RK 5(4) pair.
/// Matrix-vector products use the bands, so each stage is O(N).
template <typename Scalar>
StateVector<Scalar> integrate(const TridiagonalSystem<Scalar>& sys,
                              const StateVector<Scalar>& v, Scalar t_final,
                              Scalar rel_tol, Scalar abs_tol,
                              std::int64_t max_steps = 100'000'000) {
    if (v.values.size() != sys.n_states())
        throw std::invalid_argument("integrate: state size does not match the system");
    if (!(t_final >= Scalar(0))) throw std::invalid_argument("integrate: t_final must be >= 0");
    IntegrateOptions<Scalar> opt;
    opt.rel_tol = rel_tol;
    opt.abs_tol = abs_tol;
    opt.max_steps = max_steps;
    auto rhs = [&sys](Scalar, const Eigen::VectorX<Scalar>& x, Eigen::VectorX<Scalar>& dx) {
        apply_tridiagonal(sys, x, dx);
    };
    Eigen::VectorX<Scalar> x =
        rk45_integrate<Scalar>(rhs, v.values, Scalar(0), t_final, opt);
    return {std::move(x), v.time + t_final};
}

/// Dense e^{tA} by scaling and squaring with a degree-25 Taylor factor:
/// B = tA / 2^s with ||B||_1 <= 2, E = T_25(B)^(2^s). Refuses n_states > 2000
/// (dense cost); around 1e-12 relative accuracy for ||tA||_1 up to 1e4.
template <typename Scalar>
Eigen::MatrixX<Scalar> expm_dense(const TridiagonalSystem<Scalar>& sys, Scalar t) {
    using Mat = Eigen::MatrixX<Scalar>;
    const Eigen::Index n = sys.n_states();
    if (n > 2000)
        throw std::invalid_argument("expm_dense: refusing n_states=" + std::to_string(n) +
                                    " > 2000 (dense matrix exponential)");
    if (!(t >= Scalar(0))) throw std::invalid_argument("expm_dense: t must be >= 0");

    Mat b = to_dense(sys);
    b *= t;
    const Scalar norm1 = b.cwiseAbs().colwise().sum().maxCoeff();
    constexpr double theta = 2.0;
    constexpr int taylor_degree = 25;
    int s = 0;
    if (double(norm1) > theta) s = int(std::ceil(std::log2(double(norm1) / theta)));
    b /= Scalar(std::pow(2.0, s));

    // Horner form of the Taylor polynomial
    const Mat id = Mat::Identity(n, n);
    Mat p = id + b / Scalar(taylor_degree);
    for (int k = taylor_degree - 1; k >= 1; --k) {
        p = id + (b * p) / Scalar(k);
    }
    for (int k = 0; k < s; ++k) p = p * p;
    return p;
}

/// Reference solution e^{tA} v for cross-checking the adaptive integrator.
template <typename Scalar>
StateVector<Scalar> expm_oracle(const TridiagonalSystem<Scalar>& sys,
                                const StateVector<Scalar>& v, Scalar t) {
    if (v.values.size() != sys.n_states())
        throw std::invalid_argument("expm_oracle: state size does not match the system");
    if (t == Scalar(0)) return v;
    Eigen::MatrixX<Scalar> e = expm_dense(sys, t);
    return {e * v.values, v.time + t};
}

struct EmpiricalDistribution {
    Eigen::VectorX<std::int64_t> counts;
    std::int64_t samples{0};
    double time{0};

    Eigen::VectorXd frequencies() const {
        return counts.cast<double>() / double(samples);
    }
};

/// Monte-Carlo oracle: simulate n_samples trajectories of the birth-death
/// chain with up-rate a_k = sub[k] and down-rate c_k = sup[k-1], exponential
/// waiting times, and report the state counts at t_final. Per-trajectory
/// generators are SplitMix64 streams keyed by (seed, trajectory), so the
/// result does not depend on scheduling.
template <typename Scalar>
EmpiricalDistribution gillespie(const TridiagonalSystem<Scalar>& sys, int k0,
                                Scalar t_final, std::int64_t n_samples,
                                std::uint64_t seed) {
    const Eigen::Index n = sys.n_states();
    if (!sys.stochastic)
        throw std::invalid_argument("gillespie: system is not a stochastic generator");
    if ((sys.sub.size() && sys.sub.minCoeff() < Scalar(0)) ||
        (sys.sup.size() && sys.sup.minCoeff() < Scalar(0)))
        throw std::invalid_argument("gillespie: negative transition rate");
    if (k0 < 0 || k0 >= n) throw std::invalid_argument("gillespie: k0 out of range");
    if (n_samples < 1) throw std::invalid_argument("gillespie: need at least one sample");
    if (!(t_final >= Scalar(0))) throw std::invalid_argument("gillespie: t_final must be >= 0");

    EmpiricalDistribution dist;
    dist.counts = Eigen::VectorX<std::int64_t>::Zero(n);
    dist.samples = n_samples;
    dist.time = double(t_final);

    for (std::int64_t traj = 0; traj < n_samples; ++traj) {
        SplitMix64 rng = SplitMix64::stream(seed, std::uint64_t(traj));
        Eigen::Index k = k0;
        double clock = 0;
        while (true) {
            const double up = (k <= n - 2) ? double(sys.sub[k]) : 0.0;
            const double down = (k >= 1) ? double(sys.sup[k - 1]) : 0.0;
            const double total = up + down;
            if (total <= 0.0) break;  // frozen state
            clock += rng.exponential(total);
            if (clock > double(t_final)) break;
            if (rng.uniform01() * total <= up)
                ++k;
            else
                --k;
        }
        ++dist.counts[k];
    }
    return dist;
}

}  // namespace mepde
