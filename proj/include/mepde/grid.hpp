#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

namespace mepde {

/// Values of a function of one variable on a uniform grid. Both extreme
/// nodes are stored; spacing is (z_max - z_min) / intervals().
template <typename Scalar = double>
struct GridFunction {
    Scalar z_min{0};
    Scalar z_max{1};
    Eigen::VectorX<Scalar> values;
    Scalar time{0};

    Eigen::Index intervals() const { return values.size() - 1; }
    Scalar dz() const { return (z_max - z_min) / Scalar(intervals()); }
    Scalar node(Eigen::Index j) const { return z_min + Scalar(j) * dz(); }

    static GridFunction sample(const std::function<Scalar(Scalar)>& f,
                               Scalar z_min, Scalar z_max, Eigen::Index m,
                               Scalar time = Scalar(0)) {
        if (m < 2) throw std::invalid_argument("GridFunction: need at least 2 intervals");
        if (!(z_max > z_min)) throw std::invalid_argument("GridFunction: z_max must exceed z_min");
        GridFunction g;
        g.z_min = z_min;
        g.z_max = z_max;
        g.time = time;
        g.values.resize(m + 1);
        const Scalar dz = (z_max - z_min) / Scalar(m);
        for (Eigen::Index j = 0; j <= m; ++j) {
            const Scalar z = z_min + Scalar(j) * dz;
            const Scalar v = f(z);
            if (!std::isfinite(double(v)))
                throw std::runtime_error("GridFunction: non-finite sample at z=" + std::to_string(double(z)));
            g.values[j] = v;
        }
        return g;
    }
};

/// Composite trapezoid rule over the stored nodes.
template <typename Scalar>
Scalar integral_trapezoid(const GridFunction<Scalar>& g) {
    const auto n = g.values.size();
    Scalar s = g.values.sum() - Scalar(0.5) * (g.values[0] + g.values[n - 1]);
    return s * g.dz();
}

/// Midpoint-rule integral dz * sum(values). For a cell-centered grid this is
/// the integral over [z_min - dz/2, z_max + dz/2]; it is the exactly conserved
/// functional of the Robin scheme.
template <typename Scalar>
Scalar integral_midpoint(const GridFunction<Scalar>& g) {
    return g.values.sum() * g.dz();
}

/// Linear interpolation; clamps outside [z_min, z_max].
template <typename Scalar>
Scalar value_at(const GridFunction<Scalar>& g, Scalar z) {
    const Scalar dz = g.dz();
    Scalar s = (z - g.z_min) / dz;
    if (s <= Scalar(0)) return g.values[0];
    if (s >= Scalar(g.intervals())) return g.values[g.values.size() - 1];
    const auto j = Eigen::Index(std::floor(double(s)));
    const Scalar w = s - Scalar(j);
    return (Scalar(1) - w) * g.values[j] + w * g.values[j + 1];
}

/// Index of the node equal to z within tol, or -1 if no node matches.
template <typename Scalar>
Eigen::Index aligned_node_index(const GridFunction<Scalar>& g, Scalar z,
                                Scalar tol = Scalar(1e-12)) {
    const Scalar dz = g.dz();
    const auto j = Eigen::Index(std::llround(double((z - g.z_min) / dz)));
    if (j < 0 || j >= g.values.size()) return -1;
    if (std::abs(double(g.z_min + Scalar(j) * dz - z)) > double(tol)) return -1;
    return j;
}

}  // namespace mepde
