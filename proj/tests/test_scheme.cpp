#include <doctest.h>

#include <random>

#include "nbl/scheme.hpp"

using namespace nbl;

namespace {

// Oracle for the flux identity: applies the telescoped flux differences to
// an arbitrary sequence and compares with the direct stencil sum.
double flux_identity_gap(const SchemeSpec& spec, const std::vector<double>& u) {
    const auto f = flux_coefficients(spec);
    auto F = [&](int j) {  // F(u_{j-r}, ..., u_{j+p-1}), arguments u_{j+l}, l=-r..p-1
        double s = 0.0;
        for (int l = -spec.r; l <= spec.p - 1; ++l)
            s += f[static_cast<size_t>(l + spec.r)] * u[static_cast<size_t>(j + l)];
        return s;
    };
    double worst = 0.0;
    for (int j = spec.r; j + spec.p < static_cast<int>(u.size()) - 1; ++j) {
        double direct = 0.0;
        for (int l = -spec.r; l <= spec.p; ++l)
            direct += spec.coeff(l) * u[static_cast<size_t>(j + l)];
        worst = std::max(worst, std::abs(direct - (F(j + 1) - F(j))));
    }
    return worst;
}

SchemeSpec random_consistent_scheme(std::mt19937& rng) {
    std::uniform_int_distribution<int> width(1, 3);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    SchemeSpec s;
    s.a = 0.0;
    while (s.a == 0.0) s.a = val(rng);
    s.lambda = 0.5;
    s.r = width(rng);
    s.p = width(rng);
    s.space.assign(static_cast<size_t>(s.r + s.p + 1), 0.0);
    for (auto& c : s.space) c = val(rng);
    // project onto the consistency constraints sum a_l = 0, sum l a_l = a
    // by adjusting a_0 and a_p (p >= 1 guaranteed above)
    double sum = 0.0, mom = 0.0;
    for (int l = -s.r; l <= s.p; ++l) {
        if (l == 0 || l == s.p) continue;
        sum += s.coeff(l);
        mom += l * s.coeff(l);
    }
    s.space[static_cast<size_t>(s.p + s.r)] = (s.a - mom) / s.p;
    s.space[static_cast<size_t>(s.r)] = -sum - s.coeff(s.p);
    if (s.coeff(-s.r) == 0.0) s.space[0] = 0.1;  // keep the stencil tight
    s.alpha = {-1.0, 1.0};
    s.beta = {1.0};
    return s;
}

}  // namespace

TEST_CASE("upwind scheme passes all consistency checks") {
    auto s = builtin_scheme(Builtin::upwind, 1.0, 0.5);
    auto rep = check_consistency(s);
    CHECK(rep.space_ok);
    CHECK(rep.time_ok);
    CHECK(rep.sigma_alpha_nonzero);
    CHECK(rep.residuals.at("sum_a") == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(rep.residuals.at("moment_a") == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("AB3 five-point scheme is consistent for a = -1") {
    auto s = builtin_scheme(Builtin::ab3_five_point, -1.0, 0.4);
    auto rep = check_consistency(s);
    CHECK(rep.all_ok());
    CHECK(s.k_levels() == 3);
    CHECK(s.r == 2);
    CHECK(s.p == 2);
}

TEST_CASE("perturbing a_0 by 1 shifts the sum residual by exactly 1") {
    auto s = builtin_scheme(Builtin::upwind, 1.0, 0.5);
    s.space[static_cast<size_t>(s.r)] += 1.0;
    auto rep = check_consistency(s);
    CHECK_FALSE(rep.space_ok);
    CHECK(rep.residuals.at("sum_a") == doctest::Approx(1.0));
}

TEST_CASE("flux coefficients: upwind and Lax-Friedrichs closed forms") {
    // upwind flux for a > 0 is F_{j+1/2} = a u_j
    auto up = builtin_scheme(Builtin::upwind, 1.0, 0.5);
    auto f = flux_coefficients(up);
    REQUIRE(f.size() == 1);
    CHECK(f[0] == doctest::Approx(1.0));

    // Lax-Friedrichs flux: a (u_j + u_{j+1})/2 - (u_{j+1} - u_j)/(2 lambda)
    const double lam = 0.5, a = 1.0;
    auto lf = builtin_scheme(Builtin::lax_friedrichs, a, lam);
    auto flf = flux_coefficients(lf);
    REQUIRE(flf.size() == 2);
    CHECK(flf[0] == doctest::Approx(0.5 / lam + 0.5 * a));
    CHECK(flf[1] == doctest::Approx(-0.5 / lam + 0.5 * a));
}

TEST_CASE("flux consistency F(u,...,u) = a u") {
    for (auto name : {Builtin::upwind, Builtin::lax_friedrichs, Builtin::lax_wendroff,
                      Builtin::leap_frog, Builtin::ab3_five_point}) {
        for (double a : {0.7, -1.0}) {
            auto s = builtin_scheme(name, a, 0.4);
            auto f = flux_coefficients(s);
            double sum = 0.0;
            for (double c : f) sum += c;
            CHECK(sum == doctest::Approx(a).epsilon(1e-12));
        }
    }
}

TEST_CASE("flux identity holds on random sequences for builtins and random schemes") {
    std::mt19937 rng(20240817);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    auto random_seq = [&](int n) {
        std::vector<double> u(static_cast<size_t>(n));
        for (auto& v : u) v = val(rng);
        return u;
    };

    for (auto name : {Builtin::upwind, Builtin::lax_friedrichs, Builtin::lax_wendroff,
                      Builtin::leap_frog, Builtin::ab3_five_point}) {
        auto s = builtin_scheme(name, -1.0, 0.4);
        for (int trial = 0; trial < 100; ++trial)
            CHECK(flux_identity_gap(s, random_seq(s.r + s.p + 10)) < 1e-12);
    }
    for (int trial = 0; trial < 20; ++trial) {
        auto s = random_consistent_scheme(rng);
        REQUIRE(check_consistency(s).space_ok);
        CHECK(flux_identity_gap(s, random_seq(s.r + s.p + 10)) < 1e-12);
    }
}

TEST_CASE("flux identity on every 0/1 pattern of stencil length") {
    auto s = builtin_scheme(Builtin::ab3_five_point, -1.0, 0.4);
    const int len = s.r + s.p + 1;
    // embed each pattern in a zero-padded sequence so every shift is covered
    for (int mask = 0; mask < (1 << len); ++mask) {
        std::vector<double> u(static_cast<size_t>(len + 2 * (s.r + s.p)), 0.0);
        for (int i = 0; i < len; ++i)
            u[static_cast<size_t>(s.r + s.p + i)] = (mask >> i) & 1;
        CHECK(flux_identity_gap(s, u) < 1e-14);
    }
}

TEST_CASE("check_consistency is deterministic") {
    auto s = builtin_scheme(Builtin::lax_wendroff, -1.0, 0.4);
    auto r1 = check_consistency(s);
    auto r2 = check_consistency(s);
    CHECK(r1.residuals == r2.residuals);
    CHECK(r1.space_ok == r2.space_ok);
}

TEST_CASE("leap-frog builtin matches its stated normalization") {
    auto s = builtin_scheme(Builtin::leap_frog, -1.0, 0.4);
    CHECK(s.k_levels() == 2);
    CHECK(s.coeff(-1) == doctest::Approx(0.5));
    CHECK(s.coeff(1) == doctest::Approx(-0.5));
    CHECK(s.beta[1] == doctest::Approx(2.0));
    CHECK(check_consistency(s).all_ok());
}

TEST_CASE("structural validation errors name the violated invariant") {
    SchemeSpec s = builtin_scheme(Builtin::upwind, 1.0, 0.5);
    s.alpha.back() = 2.0;
    CHECK_THROWS_WITH_AS(s.validate(), doctest::Contains("alpha_k = 1"), scheme_error);

    SchemeSpec s2 = builtin_scheme(Builtin::upwind, 1.0, 0.5);
    s2.space[0] = 0.0;
    CHECK_THROWS_WITH_AS(s2.validate(), doctest::Contains("tight"), scheme_error);

    CHECK_THROWS_AS(builtin_scheme("nope", 1.0, 0.5), scheme_error);
}

TEST_CASE("tau is the reciprocal CFL number") {
    auto s = builtin_scheme(Builtin::upwind, 2.0, 0.25);
    CHECK(s.tau() == doctest::Approx(1.0 / (0.25 * 2.0)));
}

TEST_CASE("inconsistent scheme refuses flux form") {
    auto s = builtin_scheme(Builtin::upwind, 1.0, 0.5);
    s.space[static_cast<size_t>(s.r)] += 0.5;
    CHECK_THROWS_AS(flux_coefficients(s), scheme_error);
}
