#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "mepde/harness.hpp"
#include "mepde/models.hpp"
#include "mepde/pde_dynamic.hpp"
#include "mepde/pde_robin.hpp"

#include <cmath>

using namespace mepde;

TEST_CASE("alpha/beta construction") {
    SUBCASE("a == c makes beta vanish") {
        CoefficientField<double> f;
        f.n = 10;
        f.a = f.c = [](double z) { return 1.0 + z; };
        f.b = [](double) { return 0.0; };
        auto [alpha, beta] = alpha_beta(f);
        for (double z : {-0.05, 0.2, 1.05}) CHECK(beta(z) == doctest::Approx(0.0));
    }
    SUBCASE("voter reproduces the drift 2(gamma-tau) h") {
        const double tau = 0.7, gamma = 0.3;
        const int n = 50;
        auto [alpha, beta] = alpha_beta(voter_field<double>({tau, gamma, n}));
        const double h = 1.0 / n;
        CHECK(alpha(0.3) == doctest::Approx((tau + gamma) * h * h).epsilon(1e-14));
        CHECK(beta(0.3) == doctest::Approx(2 * (gamma - tau) * h).epsilon(1e-13));
    }
    SUBCASE("one-sided rates") {
        CoefficientField<double> f;
        f.n = 8;
        f.a = [](double) { return 0.0; };
        f.c = [](double) { return 1.0; };
        f.b = [](double) { return 0.0; };
        auto [alpha, beta] = alpha_beta(f);
        const double h = 1.0 / 8;
        CHECK(alpha(0.5) == doctest::Approx(h * h / 2).epsilon(1e-15));
        CHECK(beta(0.5) == doctest::Approx(h).epsilon(1e-15));
    }
}

TEST_CASE("assemble_robin flags the SIS degeneracy and keeps voter parabolic") {
    auto sis = assemble_robin(sis_field<double>({1.0, 1.0, 10}));
    CHECK(!sis.parabolic);
    CHECK(sis.bad_lo <= -0.04);  // alpha(-0.05) < 0
    auto vot = assemble_robin(voter_field<double>({0.5, 0.5, 10}));
    CHECK(vot.parabolic);
    CHECK(vot.z_left == doctest::Approx(-0.05));
    CHECK(vot.z_right == doctest::Approx(1.05));
}

TEST_CASE("coarse rediscretization reproduces the generator exactly") {
    for (auto [tau, gamma] : {std::pair{0.5, 0.5}, std::pair{0.7, 0.3}}) {
        auto f = voter_field<double>({tau, gamma, 10});
        auto direct = build_matrix(f);
        auto re = discrete_robin_system(f);
        CHECK((re.sub - direct.sub).cwiseAbs().maxCoeff() <= 1e-13);
        CHECK((re.diag - direct.diag).cwiseAbs().maxCoeff() <= 1e-13);
        CHECK((re.sup - direct.sup).cwiseAbs().maxCoeff() <= 1e-13);
    }
    auto f = sis_field<double>({2.0, 1.0, 8});
    auto direct = build_matrix(f);
    auto re = discrete_robin_system(f);
    CHECK((re.sub - direct.sub).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((re.diag - direct.diag).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((re.sup - direct.sup).cwiseAbs().maxCoeff() <= 1e-12);

    CoefficientField<double> zero;
    zero.n = 4;
    zero.a = zero.b = zero.c = [](double) { return 0.0; };
    auto z = discrete_robin_system(zero);
    CHECK(z.sub.isZero(0.0));
    CHECK(z.diag.isZero(0.0));
    CHECK(z.sup.isZero(0.0));
}

TEST_CASE("rediscretization refuses non-conservative fields") {
    CoefficientField<double> f;
    f.n = 4;
    f.a = f.c = [](double) { return 0.0; };
    f.b = [](double) { return -1.0; };
    CHECK_THROWS_AS((void)discrete_robin_system(f), std::invalid_argument);
}

TEST_CASE("constants are stationary under pure-Neumann data") {
    CoefficientField<double> f;
    f.n = 20;
    f.a = f.c = [](double) { return 1.0; };  // beta == 0, alpha constant
    f.b = [](double) { return -2.0; };
    auto p = assemble_robin(f);
    auto u = solve_robin<double>(p, [](double) { return 1.0; }, 2.0, 160, {1e-10, 1e-14});
    CHECK((u.values.array() - 1.0).abs().maxCoeff() <= 1e-9);
}

TEST_CASE("the integral of u is conserved") {
    auto p = assemble_robin(voter_field<double>({0.7, 0.3, 30}));
    auto [u0, v] = smooth_initial<double>("gaussian", 30);
    auto start = solve_robin(p, u0, 0.0, 240, {1e-9, 1e-13});
    auto end = solve_robin(p, u0, 5.0, 240, {1e-9, 1e-13});
    const double m0 = robin_mass(start), m1 = robin_mass(end);
    CHECK(std::abs(m1 - m0) <= 1e-7 * std::abs(m0));
}

TEST_CASE("robin grid hits the comparison points k/N") {
    auto p = assemble_robin(voter_field<double>({0.5, 0.5, 10}));
    auto g = robin_grid(p, 80);
    for (int k = 0; k <= 10; ++k)
        CHECK(aligned_node_index(g, double(k) / 10.0) >= 0);
}

TEST_CASE("robin and dynamic formulations agree at second order") {
    const double tau = 0.7, gamma = 0.3, t = 1.0;
    auto [u0, v50] = smooth_initial<double>("sin2", 50);

    auto diff_at = [&](int n) {
        auto field = voter_field<double>({tau, gamma, n});
        auto ud = solve_dynamic(assemble_dynamic(field), u0, t, Eigen::Index(8) * n,
                                {1e-10, 1e-13});
        auto ur = solve_robin(assemble_robin(field), u0, t, Eigen::Index(8) * n,
                              {1e-10, 1e-13});
        double worst = 0;
        for (int k = 0; k <= n; ++k) {
            const double z = double(k) / n;
            const auto jd = aligned_node_index(ud, z);
            const auto jr = aligned_node_index(ur, z);
            REQUIRE(jd >= 0);
            REQUIRE(jr >= 0);
            worst = std::max(worst, std::abs(ud.values[jd] - ur.values[jr]));
        }
        return worst;
    };
    const double d50 = diff_at(50);
    const double d100 = diff_at(100);
    // both approximate the same generator to O(N^-2); C calibrated at N=50
    const double c_est = d50 * 50.0 * 50.0;
    CHECK(d100 <= 1.75 * c_est / (100.0 * 100.0));
}

TEST_CASE("divergence-form truncation: h^3 interior, h^2 boundary") {
    // field a=1, c=2 (voter tau=0.5, gamma=1), constant alpha and beta:
    //   alpha = 1.5 h^2, beta = h. Test cubic adjusted to satisfy the
    //   boundary conditions, so the end-row comparison is meaningful.
    auto residuals = [&](int n) {
        auto field = voter_field<double>({0.5, 1.0, n});
        const double h = 1.0 / n;
        const double alpha = 1.5 * h * h, beta = h;
        Eigen::Matrix2d a2;
        Eigen::Vector2d rhs2;
        const double zl = -h / 2, zr = 1 + h / 2;
        a2 << alpha + beta * zl, beta, alpha + beta * zr, beta;
        rhs2 << -(3 * alpha * zl * zl + beta * zl * zl * zl),
            -(3 * alpha * zr * zr + beta * zr * zr * zr);
        const Eigen::Vector2d c10 = a2.colPivHouseholderQr().solve(rhs2);
        const double c1 = c10[0], c0 = c10[1];
        auto fv = [&](double z) { return z * z * z + c1 * z + c0; };
        auto f1 = [&](double z) { return 3 * z * z + c1; };
        auto f2 = [&](double z) { return 6 * z; };
        auto lf = [&](double z) { return alpha * f2(z) + beta * f1(z); };

        auto sys = discrete_robin_system(field);
        double interior = 0;
        for (int k = 1; k <= n - 1; ++k) {
            const double z = double(k) / n;
            const double row = sys.sub[k - 1] * fv(z - h) + sys.diag[k] * fv(z) +
                               sys.sup[k] * fv(z + h);
            interior = std::max(interior, std::abs(row - lf(z)));
        }
        const double row0 = sys.diag[0] * fv(0.0) + sys.sup[0] * fv(h);
        const double rowN = sys.sub[n - 1] * fv(1.0 - h) + sys.diag[n] * fv(1.0);
        const double boundary = std::max(std::abs(row0 - lf(0.0)), std::abs(rowN - lf(1.0)));
        return std::pair{interior, boundary};
    };
    auto [i64, b64] = residuals(64);
    auto [i128, b128] = residuals(128);
    CHECK(i64 / i128 == doctest::Approx(8.0).epsilon(0.02));
    CHECK(b64 / b128 >= 3.0);
    CHECK(b64 / b128 <= 5.0);
}

TEST_CASE("solver preconditions") {
    auto p = assemble_robin(voter_field<double>({0.5, 0.5, 20}));
    auto [u0, v] = smooth_initial<double>("sin2", 20);
    CHECK_THROWS_AS((void)solve_robin(p, u0, 0.1, 40, {}), std::invalid_argument);

    auto sis = assemble_robin(sis_field<double>({1.0, 1.0, 10}));
    CHECK_THROWS_AS((void)solve_robin(sis, u0, 0.1, 80, {}), SolverError);
    PdeSolveOptions<double> opt;
    opt.clamp_diffusion = true;
    auto u = solve_robin(sis, u0, 0.1, 80, opt);
    CHECK(u.values.allFinite());
}
