#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "nbl/scheme.hpp"
#include "nbl/symbol.hpp"

using namespace nbl;
using std::numbers::pi;

namespace {

// Power-boundedness oracle: iterates the k x k companion matrix of the
// characteristic recurrence at sampled frequencies and watches for norm
// growth. Independent of the root-condition path in cauchy_stability.
bool power_bounded(const SchemeSpec& spec, int n_eta = 256, int n_pow = 10000) {
    const int k = spec.k_levels();
    for (int i = 0; i < n_eta; ++i) {
        const double eta = -pi + 2.0 * pi * (i + 1) / n_eta;
        const cplx A = amplification(spec, std::polar(1.0, eta));
        Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(k, k);
        for (int s = 0; s < k; ++s)
            C(0, k - 1 - s) = -(spec.alpha[static_cast<size_t>(s)] +
                                spec.lambda * A * spec.beta[static_cast<size_t>(s)]);
        for (int r = 1; r < k; ++r) C(r, r - 1) = 1.0;
        Eigen::VectorXcd v = Eigen::VectorXcd::Ones(k);
        double base = v.norm();
        for (int n = 0; n < n_pow; ++n) {
            v = C * v;
            if (v.norm() > 100.0 * base) return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("amplification vanishes at z = 1 for consistent schemes") {
    for (auto name : {Builtin::upwind, Builtin::lax_friedrichs, Builtin::lax_wendroff,
                      Builtin::leap_frog, Builtin::ab3_five_point}) {
        for (double a : {1.0, -1.0}) {
            auto s = builtin_scheme(name, a, 0.4);
            CHECK(std::abs(amplification(s, 1.0)) < 1e-12);
            // centered-difference derivative at 1 equals a
            const double h = 1e-6;
            cplx d = (amplification(s, 1.0 + h) - amplification(s, 1.0 - h)) / (2.0 * h);
            CHECK(std::abs(d - cplx(a)) < 1e-8);
            CHECK(std::abs(amplification_derivative(s, 1.0) - cplx(a)) < 1e-12);
        }
    }
}

TEST_CASE("amplification throws at the pole z = 0") {
    auto s = builtin_scheme(Builtin::lax_friedrichs, -1.0, 0.5);
    CHECK_THROWS_AS(amplification(s, 0.0), numerical_error);
}

TEST_CASE("upwind symbol closed form a(1 - e^{-i theta})") {
    auto s = builtin_scheme(Builtin::upwind, 1.0, 0.5);
    for (double th : {0.1, 1.0, 3.0, -2.0}) {
        cplx z = std::polar(1.0, th);
        cplx expect = 1.0 - std::exp(cplx(0.0, -th));
        CHECK(std::abs(amplification(s, z) - expect) < 1e-14);
    }
}

TEST_CASE("AB3 real part identity (2/3) sin^4(theta/2)") {
    auto s = builtin_scheme(Builtin::ab3_five_point, -1.0, 0.4);
    double worst = 0.0;
    for (int i = 0; i < 4096; ++i) {
        const double th = -pi + 2.0 * pi * (i + 1) / 4096;
        const double re = amplification(s, std::polar(1.0, th)).real();
        const double expect = 2.0 / 3.0 * std::pow(std::sin(th / 2.0), 4);
        worst = std::max(worst, std::abs(re - expect));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("circle roots: AB3 has only theta = 0") {
    auto s = builtin_scheme(Builtin::ab3_five_point, -1.0, 0.4);
    auto roots = circle_roots(s);
    REQUIRE(roots.size() == 1);
    CHECK(roots[0].theta == 0.0);
    CHECK(roots[0].simple);
    CHECK(circle_assumption_holds(roots));
}

TEST_CASE("circle roots: leap-frog has theta = 0 and theta = pi") {
    auto s = builtin_scheme(Builtin::leap_frog, -1.0, 0.4);
    auto roots = circle_roots(s);
    REQUIRE(roots.size() == 2);
    bool has_pi = false;
    for (const auto& r : roots) has_pi |= std::abs(std::abs(r.theta) - pi) < 1e-6;
    CHECK(has_pi);
    CHECK_FALSE(circle_assumption_holds(roots));
}

TEST_CASE("circle roots: Lax-Friedrichs a=-1, lambda=0.5 has only theta = 0") {
    auto s = builtin_scheme(Builtin::lax_friedrichs, -1.0, 0.5);
    auto roots = circle_roots(s);
    REQUIRE(roots.size() == 1);
    CHECK(roots[0].theta == 0.0);
}

TEST_CASE("disk roots: AB3 matches the two reported roots") {
    auto s = builtin_scheme(Builtin::ab3_five_point, -1.0, 0.4);
    auto dr = disk_roots(s);
    REQUIRE(dr.size() == 2);
    CHECK(dr[0].multiplicity == 1);
    CHECK(dr[1].multiplicity == 1);
    // sorted by modulus: 0.0809 before -0.6595
    CHECK(std::abs(dr[0].z - cplx(0.0809311604614482)) < 1e-10);
    CHECK(std::abs(dr[1].z - cplx(-0.6594991175435264)) < 1e-10);
}

TEST_CASE("disk roots: Lax-Friedrichs closed form (1+la)/(1-la)") {
    const double lam = 0.5, a = -1.0;
    auto s = builtin_scheme(Builtin::lax_friedrichs, a, lam);
    auto dr = disk_roots(s);
    REQUIRE(dr.size() == 1);
    CHECK(std::abs(dr[0].z - cplx((1 + lam * a) / (1 - lam * a))) < 1e-12);
}

TEST_CASE("disk roots: upwind a>0 has none") {
    auto s = builtin_scheme(Builtin::upwind, 1.0, 0.5);
    CHECK(disk_roots(s).empty());
}

TEST_CASE("disk root residuals are small") {
    for (auto [name, a] : std::initializer_list<std::pair<Builtin, double>>{
             {Builtin::ab3_five_point, -1.0},
             {Builtin::lax_friedrichs, -1.0},
             {Builtin::lax_wendroff, -1.0},
             {Builtin::lax_wendroff, 1.0}}) {
        auto s = builtin_scheme(name, a, 0.4);
        double scale = 0.0;
        for (double c : s.space) scale = std::max(scale, std::abs(c));
        for (const auto& dr : disk_roots(s)) {
            cplx v = amplification(s, dr.z) * std::pow(dr.z, s.r);
            CHECK(std::abs(v) < 1e-8 * scale);
        }
    }
}

TEST_CASE("contour count agrees with polynomial count and the theoretical value") {
    struct Case { Builtin b; double a; int expect; };
    for (auto c : std::initializer_list<Case>{{Builtin::ab3_five_point, -1.0, 2},
                                              {Builtin::upwind, 1.0, 0},
                                              {Builtin::lax_friedrichs, -1.0, 1},
                                              {Builtin::lax_wendroff, -1.0, 1},
                                              {Builtin::lax_wendroff, 1.0, 0}}) {
        auto s = builtin_scheme(c.b, c.a, 0.4);
        int poly = 0;
        for (const auto& dr : disk_roots(s)) poly += dr.multiplicity;
        CHECK(poly == c.expect);
        CHECK(contour_root_count(s) == c.expect);
        CHECK(expected_disk_count(s) == c.expect);
    }
}

TEST_CASE("contour count parameter validation") {
    auto s = builtin_scheme(Builtin::upwind, 1.0, 0.5);
    CHECK_THROWS_AS(contour_root_count(s, 2.0), scheme_error);
    CHECK(contour_root_count(s, 0.05, 512) == 0);
}

TEST_CASE("Cauchy stability: AB3 stable at 0.4, unstable at 4.0") {
    auto ok = cauchy_stability(builtin_scheme(Builtin::ab3_five_point, -1.0, 0.4));
    CHECK(ok.verdict == Verdict::stable);
    auto bad = cauchy_stability(builtin_scheme(Builtin::ab3_five_point, -1.0, 4.0));
    CHECK(bad.verdict == Verdict::unstable);
}

TEST_CASE("Cauchy stability: upwind boundary at lambda a = 1") {
    CHECK(cauchy_stability(builtin_scheme(Builtin::upwind, 1.0, 0.5)).verdict == Verdict::stable);
    CHECK(cauchy_stability(builtin_scheme(Builtin::upwind, 1.0, 1.0)).verdict == Verdict::stable);
    CHECK(cauchy_stability(builtin_scheme(Builtin::upwind, 1.0, 1.2)).verdict == Verdict::unstable);
}

TEST_CASE("Cauchy verdict agrees with the power-boundedness oracle") {
    struct Case { Builtin b; double a; double lam; };
    for (auto c : std::initializer_list<Case>{{Builtin::upwind, 1.0, 0.5},
                                              {Builtin::upwind, 1.0, 1.3},
                                              {Builtin::lax_friedrichs, -1.0, 0.5},
                                              {Builtin::lax_wendroff, -1.0, 0.4},
                                              {Builtin::ab3_five_point, -1.0, 0.4},
                                              {Builtin::ab3_five_point, -1.0, 4.0}}) {
        auto s = builtin_scheme(c.b, c.a, c.lam);
        const bool oracle = power_bounded(s);
        const auto verdict = cauchy_stability(s).verdict;
        INFO("scheme ", builtin_name(c.b), " lambda ", c.lam);
        CHECK((verdict != Verdict::unstable) == oracle);
    }
}

TEST_CASE("leap-frog Cauchy roots all sit on the unit circle") {
    // non-dissipative: every characteristic root has modulus one, and for
    // |lambda a| < 1 they stay simple
    auto d = cauchy_stability(builtin_scheme(Builtin::leap_frog, -1.0, 0.4));
    CHECK(d.verdict != Verdict::unstable);
    CHECK(d.worst_modulus == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("stability region probe on AB3 and leap-frog") {
    auto ab3 = multistep_polynomials(builtin_scheme(Builtin::ab3_five_point, -1.0, 0.4));
    auto res = stability_region_probe(ab3, {0.5, 1.0, 2.0, 1e-3});
    for (bool b : res) CHECK(b);

    auto lf = multistep_polynomials(builtin_scheme(Builtin::leap_frog, -1.0, 0.4));
    // P_1(X) = X^2 - 2X - 1 with root 1 + sqrt(2) > 1
    auto res2 = stability_region_probe(lf, {1.0});
    REQUIRE(res2.size() == 1);
    CHECK(res2[0]);
}

TEST_CASE("stability region probe rejects broken hypotheses") {
    MultistepPolynomials mp;
    mp.rho = {0.5, 0.5, 1.0};  // rho(1) != 0
    mp.sigma = {1.0};
    CHECK_THROWS_AS(stability_region_probe(mp, {1.0}), scheme_error);
}

TEST_CASE("analyze_symbol cross-checks all counters on AB3") {
    auto sa = analyze_symbol(builtin_scheme(Builtin::ab3_five_point, -1.0, 0.4));
    CHECK(sa.assumption4_ok);
    CHECK(sa.disk_count_poly == 2);
    CHECK(sa.disk_count_contour == 2);
    CHECK(sa.disk_count_expected == 2);
    CHECK(sa.cauchy.verdict == Verdict::stable);
}
