#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

namespace mepde {

/// Coefficient functions a, b, c of a birth-death generator, defined at least
/// on [-1/N, 1+1/N]. h = 1/N is the grid spacing of the N+1 states.
template <typename Scalar = double>
struct CoefficientField {
    std::function<Scalar(Scalar)> a;
    std::function<Scalar(Scalar)> b;
    std::function<Scalar(Scalar)> c;
    int n{0};  // grid count N; states are k/N, k = 0..N

    Scalar h() const { return Scalar(1) / Scalar(n); }
};

/// Piecewise-linear function through samples at z0 + k*dz, constant beyond
/// the sampled range. Lets sampled rate tables stand in for closed forms.
template <typename Scalar = double>
std::function<Scalar(Scalar)> piecewise_linear(Scalar z0, Scalar dz,
                                               Eigen::VectorX<Scalar> samples) {
    if (samples.size() < 2) throw std::invalid_argument("piecewise_linear: need at least 2 samples");
    if (!(dz > Scalar(0))) throw std::invalid_argument("piecewise_linear: dz must be positive");
    return [z0, dz, s = std::move(samples)](Scalar z) -> Scalar {
        const Scalar t = (z - z0) / dz;
        if (t <= Scalar(0)) return s[0];
        if (t >= Scalar(s.size() - 1)) return s[s.size() - 1];
        const auto j = Eigen::Index(std::floor(double(t)));
        const Scalar w = t - Scalar(j);
        return (Scalar(1) - w) * s[j] + w * s[j + 1];
    };
}

namespace detail {

template <typename Scalar>
Scalar eval_coefficient(const std::function<Scalar(Scalar)>& f, Scalar z, const char* name) {
    if (!f) throw std::invalid_argument(std::string("coefficient ") + name + " is not set");
    Scalar v;
    try {
        v = f(z);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("coefficient ") + name +
                                    " failed at z=" + std::to_string(double(z)) + ": " + e.what());
    }
    if (!std::isfinite(double(v)))
        throw std::invalid_argument(std::string("coefficient ") + name +
                                    " is not finite at z=" + std::to_string(double(z)));
    return v;
}

}  // namespace detail

/// (N+1)x(N+1) tridiagonal generator in band storage.
/// sub[k] = entry (k+1,k), diag[k] = entry (k,k), sup[k] = entry (k,k+1).
template <typename Scalar = double>
struct TridiagonalSystem {
    Eigen::VectorX<Scalar> sub;   // a_0 .. a_{N-1}
    Eigen::VectorX<Scalar> diag;  // b_0 .. b_N
    Eigen::VectorX<Scalar> sup;   // c_1 .. c_N
    bool stochastic{false};

    Eigen::Index n_states() const { return diag.size(); }
};

/// Largest |column sum|; zero for exactly conservative generators.
template <typename Scalar>
Scalar check_column_sums(const TridiagonalSystem<Scalar>& sys) {
    const Eigen::Index n = sys.n_states();
    Scalar worst = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        Scalar s = sys.diag[k];
        if (k >= 1) s += sys.sup[k - 1];
        if (k <= n - 2) s += sys.sub[k];
        worst = std::max(worst, std::abs(s));
    }
    return worst;
}

namespace detail {

template <typename Scalar>
void set_stochastic_flag(TridiagonalSystem<Scalar>& sys) {
    Scalar maxabs = std::max({sys.diag.cwiseAbs().maxCoeff(),
                              sys.sub.size() ? sys.sub.cwiseAbs().maxCoeff() : Scalar(0),
                              sys.sup.size() ? sys.sup.cwiseAbs().maxCoeff() : Scalar(0)});
    const bool offdiag_nonneg =
        (sys.sub.size() == 0 || sys.sub.minCoeff() >= Scalar(0)) &&
        (sys.sup.size() == 0 || sys.sup.minCoeff() >= Scalar(0));
    sys.stochastic = offdiag_nonneg && check_column_sums(sys) <= Scalar(1e-12) * maxabs;
}

}  // namespace detail

/// Sample the coefficient field on its grid and assemble the generator.
template <typename Scalar>
TridiagonalSystem<Scalar> build_matrix(const CoefficientField<Scalar>& field) {
    if (field.n < 1) throw std::invalid_argument("build_matrix: grid count N must be positive");
    const int n = field.n;
    TridiagonalSystem<Scalar> sys;
    sys.sub.resize(n);
    sys.diag.resize(n + 1);
    sys.sup.resize(n);
    for (int k = 0; k <= n; ++k) {
        const Scalar z = Scalar(k) / Scalar(n);
        sys.diag[k] = detail::eval_coefficient(field.b, z, "b");
        if (k <= n - 1) sys.sub[k] = detail::eval_coefficient(field.a, z, "a");
        if (k >= 1) sys.sup[k - 1] = detail::eval_coefficient(field.c, z, "c");
    }
    detail::set_stochastic_flag(sys);
    return sys;
}

/// out = A x with O(N) work on the bands.
template <typename Scalar>
void apply_tridiagonal(const TridiagonalSystem<Scalar>& sys,
                       const Eigen::VectorX<Scalar>& x, Eigen::VectorX<Scalar>& out) {
    const Eigen::Index n = sys.n_states();
    out = sys.diag.cwiseProduct(x);
    out.segment(1, n - 1) += sys.sub.cwiseProduct(x.head(n - 1));
    out.head(n - 1) += sys.sup.cwiseProduct(x.tail(n - 1));
}

template <typename Scalar>
Eigen::MatrixX<Scalar> to_dense(const TridiagonalSystem<Scalar>& sys) {
    const Eigen::Index n = sys.n_states();
    Eigen::MatrixX<Scalar> m = Eigen::MatrixX<Scalar>::Zero(n, n);
    m.diagonal() = sys.diag;
    m.diagonal(-1) = sys.sub;
    m.diagonal(1) = sys.sup;
    return m;
}

}  // namespace mepde
