#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "mepde/errors.hpp"

namespace mepde {

template <typename Scalar = double>
struct IntegrateOptions {
    Scalar rel_tol = Scalar(1e-8);
    Scalar abs_tol = Scalar(1e-12);
    std::int64_t max_steps = 100'000'000;
};

/// Embedded Dormand-Prince 5(4) pair with FSAL, step-size control against
/// abs_tol + rel_tol*|y| per component. rhs(t, y, dy) fills dy in place.
/// Throws SolverError on step-size underflow, persistent NaN/Inf, or when
/// max_steps is exhausted; the error carries the failure time.
template <typename Scalar, typename Rhs>
Eigen::VectorX<Scalar> rk45_integrate(Rhs&& rhs, Eigen::VectorX<Scalar> y,
                                      Scalar t0, Scalar t_end,
                                      const IntegrateOptions<Scalar>& opt = {}) {
    using Vec = Eigen::VectorX<Scalar>;
    if (!(t_end >= t0)) throw std::invalid_argument("rk45_integrate: t_end < t0");
    if (!(opt.rel_tol > Scalar(0)) || !(opt.abs_tol > Scalar(0)))
        throw std::invalid_argument("rk45_integrate: tolerances must be positive");
    if (t_end == t0) return y;

    // Dormand-Prince tableau
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                     a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // difference of 5th and embedded 4th order weights
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const Eigen::Index n = y.size();
    Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), yerr(n);

    Scalar t = t0;
    rhs(t, y, k1);

    auto scaled_rms = [&](const Vec& v, const Vec& ref) -> Scalar {
        Scalar acc = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const Scalar sc = opt.abs_tol + opt.rel_tol * std::abs(ref[i]);
            const Scalar r = v[i] / sc;
            acc += r * r;
        }
        return std::sqrt(acc / Scalar(n));
    };

    // starting step size (Hairer-Norsett-Wanner I.4 heuristic)
    const Scalar span = t_end - t0;
    Scalar h;
    {
        const Scalar d0 = scaled_rms(y, y);
        const Scalar d1 = scaled_rms(k1, y);
        Scalar h0 = (d0 < Scalar(1e-5) || d1 < Scalar(1e-5)) ? Scalar(1e-6)
                                                             : Scalar(0.01) * d0 / d1;
        h0 = std::min(h0, span);
        ytmp = y + h0 * k1;
        rhs(t + h0, ytmp, k2);
        const Scalar d2 = scaled_rms(Vec(k2 - k1), y) / h0;
        Scalar h1;
        if (std::max(d1, d2) <= Scalar(1e-15))
            h1 = std::max(Scalar(1e-6), h0 * Scalar(1e-3));
        else
            h1 = std::pow(Scalar(0.01) / std::max(d1, d2), Scalar(0.2));
        h = std::min({Scalar(100) * h0, h1, span});
    }

    const Scalar eps = std::numeric_limits<Scalar>::epsilon();
    std::int64_t steps = 0;
    bool last_rejected = false;
    int consecutive_bad = 0;

    while (t < t_end) {
        if (++steps > opt.max_steps)
            throw SolverError("rk45_integrate: step limit (" + std::to_string(opt.max_steps) +
                                  ") exhausted at t=" + std::to_string(double(t)),
                              double(t));
        const Scalar hmin = Scalar(16) * eps * std::max(Scalar(1), std::abs(t));
        if (h < hmin)
            throw SolverError("rk45_integrate: step size underflow (stiffness?) at t=" +
                                  std::to_string(double(t)),
                              double(t));
        h = std::min(h, t_end - t);

        ytmp = y + h * Scalar(a21) * k1;
        rhs(t + Scalar(c2) * h, ytmp, k2);
        ytmp = y + h * (Scalar(a31) * k1 + Scalar(a32) * k2);
        rhs(t + Scalar(c3) * h, ytmp, k3);
        ytmp = y + h * (Scalar(a41) * k1 + Scalar(a42) * k2 + Scalar(a43) * k3);
        rhs(t + Scalar(c4) * h, ytmp, k4);
        ytmp = y + h * (Scalar(a51) * k1 + Scalar(a52) * k2 + Scalar(a53) * k3 +
                        Scalar(a54) * k4);
        rhs(t + Scalar(c5) * h, ytmp, k5);
        ytmp = y + h * (Scalar(a61) * k1 + Scalar(a62) * k2 + Scalar(a63) * k3 +
                        Scalar(a64) * k4 + Scalar(a65) * k5);
        rhs(t + h, ytmp, k6);
        ynew = y + h * (Scalar(b1) * k1 + Scalar(b3) * k3 + Scalar(b4) * k4 +
                        Scalar(b5) * k5 + Scalar(b6) * k6);
        rhs(t + h, ynew, k7);  // FSAL stage
        yerr = h * (Scalar(e1) * k1 + Scalar(e3) * k3 + Scalar(e4) * k4 +
                    Scalar(e5) * k5 + Scalar(e6) * k6 + Scalar(e7) * k7);

        if (!ynew.allFinite() || !yerr.allFinite()) {
            if (++consecutive_bad > 60)
                throw SolverError("rk45_integrate: NaN/Inf persists at t=" +
                                      std::to_string(double(t)),
                                  double(t));
            h *= Scalar(0.1);
            last_rejected = true;
            continue;
        }
        consecutive_bad = 0;

        Scalar err = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const Scalar sc =
                opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            const Scalar r = yerr[i] / sc;
            err += r * r;
        }
        err = std::sqrt(err / Scalar(n));

        if (err <= Scalar(1)) {
            t += h;
            y.swap(ynew);
            k1.swap(k7);
            Scalar fac = Scalar(0.9) * std::pow(std::max(err, Scalar(1e-10)), Scalar(-0.2));
            fac = std::clamp(fac, Scalar(0.2), last_rejected ? Scalar(1) : Scalar(5));
            h *= fac;
            last_rejected = false;
        } else {
            Scalar fac = Scalar(0.9) * std::pow(err, Scalar(-0.2));
            h *= std::clamp(fac, Scalar(0.2), Scalar(0.9));
            last_rejected = true;
        }
    }
    return y;
}

}  // namespace mepde
