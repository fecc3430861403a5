#include "nbl/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace nbl {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double tol_disk = 1e-9;
constexpr double tol_unit = 1e-8;
constexpr double cluster_tol = 1e-6;

// Coefficients of z^r A(z), low to high degree.
std::vector<cplx> lifted_symbol(const SchemeSpec& spec) {
    std::vector<cplx> c(spec.space.size());
    for (size_t i = 0; i < spec.space.size(); ++i) c[i] = spec.space[i];
    return c;
}

double max_coeff(const SchemeSpec& spec) {
    double m = 0.0;
    for (double c : spec.space) m = std::max(m, std::abs(c));
    return m;
}

cplx horner(const std::vector<cplx>& c, cplx z) {
    cplx v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * z + *it;
    return v;
}

}  // namespace

std::vector<cplx> polynomial_roots(const std::vector<cplx>& coeffs) {
    // Strip trailing zeros so the companion matrix is well defined.
    std::vector<cplx> c = coeffs;
    double scale = 0.0;
    for (auto v : c) scale = std::max(scale, std::abs(v));
    if (scale == 0.0) throw numerical_error("polynomial_roots: zero polynomial");
    while (c.size() > 1 && std::abs(c.back()) < 1e-14 * scale) c.pop_back();
    const int n = static_cast<int>(c.size()) - 1;
    if (n == 0) return {};
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[static_cast<size_t>(i)] / c.back();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
    if (es.info() != Eigen::Success)
        throw numerical_error("polynomial_roots: eigenvalue iteration failed");
    std::vector<cplx> roots(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) roots[static_cast<size_t>(i)] = es.eigenvalues()(i);
    return roots;
}

cplx amplification(const SchemeSpec& spec, cplx z) {
    if (z == 0.0) {
        std::ostringstream msg;
        msg << "amplification: z = 0 is a pole of order " << spec.r;
        throw numerical_error(msg.str());
    }
    cplx v = horner(lifted_symbol(spec), z);
    return v / std::pow(z, spec.r);
}

cplx amplification_derivative(const SchemeSpec& spec, cplx z) {
    if (z == 0.0) throw numerical_error("amplification_derivative: pole at z = 0");
    // d/dz [ P(z)/z^r ] = P'(z)/z^r - r P(z)/z^{r+1}
    auto c = lifted_symbol(spec);
    std::vector<cplx> dc;
    for (size_t i = 1; i < c.size(); ++i) dc.push_back(double(i) * c[i]);
    cplx P = horner(c, z);
    cplx dP = dc.empty() ? cplx(0.0) : horner(dc, z);
    return dP / std::pow(z, spec.r) - double(spec.r) * P / std::pow(z, spec.r + 1);
}

std::vector<CircleRoot> circle_roots(const SchemeSpec& spec, int n_samples, double tol) {
    if (n_samples < 64) throw scheme_error("circle_roots: n_samples must be >= 64");
    const double scale = max_coeff(spec);

    auto mag2 = [&](double theta) {
        cplx v = amplification(spec, std::polar(1.0, theta));
        return std::norm(v);
    };

    std::vector<double> theta(static_cast<size_t>(n_samples)), g(static_cast<size_t>(n_samples));
    for (int i = 0; i < n_samples; ++i) {
        theta[static_cast<size_t>(i)] = -pi + 2.0 * pi * (i + 1) / n_samples;  // (-pi, pi]
        g[static_cast<size_t>(i)] = mag2(theta[static_cast<size_t>(i)]);
    }

    std::vector<CircleRoot> out;
    const double accept = tol * scale;
    for (int i = 0; i < n_samples; ++i) {
        const int im = (i + n_samples - 1) % n_samples;
        const int ip = (i + 1) % n_samples;
        if (g[size_t(i)] > g[size_t(im)] || g[size_t(i)] > g[size_t(ip)]) continue;
        // Golden-section refinement of the bracketed minimum.
        const double step = 2.0 * pi / n_samples;
        double lo = theta[size_t(i)] - step, hi = theta[size_t(i)] + step;
        const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double f1 = mag2(x1), f2 = mag2(x2);
        for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
            if (f1 < f2) {
                hi = x2; x2 = x1; f2 = f1;
                x1 = hi - gr * (hi - lo); f1 = mag2(x1);
            } else {
                lo = x1; x1 = x2; f1 = f2;
                x2 = lo + gr * (hi - lo); f2 = mag2(x2);
            }
        }
        double root = 0.5 * (lo + hi);
        if (std::sqrt(mag2(root)) > accept) continue;
        if (root <= -pi) root += 2.0 * pi;
        if (root > pi) root -= 2.0 * pi;
        CircleRoot cr;
        cr.theta = root;
        cr.simple = std::abs(amplification_derivative(spec, std::polar(1.0, root))) > cluster_tol * scale;
        // A pair of roots closer than one grid step would show up as one
        // minimum; mark it for the caller.
        cr.resolved = cr.simple || std::sqrt(mag2(root)) < 1e-12 * scale;
        out.push_back(cr);
    }

    // Merge duplicates and guarantee theta = 0 is present.
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.theta < b.theta; });
    std::vector<CircleRoot> merged;
    for (const auto& cr : out) {
        if (!merged.empty() && std::abs(cr.theta - merged.back().theta) < 1e-8) continue;
        merged.push_back(cr);
    }
    bool has_zero = std::any_of(merged.begin(), merged.end(),
                                [](const auto& cr) { return std::abs(cr.theta) < 1e-8; });
    if (!has_zero) {
        CircleRoot zero;
        zero.theta = 0.0;
        zero.simple = std::abs(amplification_derivative(spec, 1.0)) > cluster_tol * scale;
        merged.insert(merged.begin(), zero);
    } else {
        for (auto& cr : merged)
            if (std::abs(cr.theta) < 1e-8) cr.theta = 0.0;
    }
    return merged;
}

bool circle_assumption_holds(const std::vector<CircleRoot>& roots) {
    return roots.size() == 1 && roots.front().theta == 0.0 && roots.front().simple;
}

std::string_view verdict_name(Verdict v) {
    switch (v) {
        case Verdict::stable: return "stable";
        case Verdict::marginal: return "marginal";
        case Verdict::unstable: return "unstable";
    }
    return "?";
}

MultistepPolynomials multistep_polynomials(const SchemeSpec& spec) {
    MultistepPolynomials mp;
    mp.rho = spec.alpha;
    mp.sigma = spec.beta;
    return mp;
}

CauchyDiagnostics cauchy_stability(const SchemeSpec& spec, int n_samples) {
    if (n_samples < 64) throw scheme_error("cauchy_stability: n_samples must be >= 64");
    spec.validate();
    const int k = spec.k_levels();
    CauchyDiagnostics diag;
    diag.verdict = Verdict::stable;
    for (int i = 0; i < n_samples; ++i) {
        const double eta = -pi + 2.0 * pi * (i + 1) / n_samples;
        const cplx A = amplification(spec, std::polar(1.0, eta));
        // characteristic polynomial rho(X) + lambda A sigma(X)
        std::vector<cplx> poly(static_cast<size_t>(k + 1));
        for (int s = 0; s <= k; ++s) poly[size_t(s)] = spec.alpha[size_t(s)];
        for (int s = 0; s < k; ++s) poly[size_t(s)] += spec.lambda * A * spec.beta[size_t(s)];
        std::vector<cplx> roots;
        try {
            roots = polynomial_roots(poly);
        } catch (const numerical_error&) {
            std::ostringstream msg;
            msg << "cauchy_stability: root finding failed at eta = " << eta;
            throw numerical_error(msg.str());
        }
        for (size_t ri = 0; ri < roots.size(); ++ri) {
            const double m = std::abs(roots[ri]);
            if (m > diag.worst_modulus) {
                diag.worst_modulus = m;
                diag.worst_eta = eta;
            }
            if (m > 1.0 + tol_unit) {
                diag.verdict = Verdict::unstable;
            } else if (m >= 1.0 - tol_unit && diag.verdict == Verdict::stable) {
                // unit-modulus roots must be numerically simple
                for (size_t rj = 0; rj < roots.size(); ++rj) {
                    if (rj != ri && std::abs(roots[ri] - roots[rj]) < cluster_tol) {
                        diag.verdict = Verdict::marginal;
                        break;
                    }
                }
            }
        }
        if (diag.verdict == Verdict::unstable) {
            diag.worst_eta = eta;
            return diag;
        }
    }
    return diag;
}

std::vector<DiskRoot> disk_roots(const SchemeSpec& spec) {
    spec.validate();
    const auto all = polynomial_roots(lifted_symbol(spec));
    std::vector<cplx> inside;
    for (const auto& z : all) {
        const double m = std::abs(z);
        if (m >= 1.0 - tol_disk && m < 1.0 + tol_disk && std::abs(z - cplx(1.0)) > 1e-6) {
            std::ostringstream msg;
            msg << "Assumption 4 borderline: root near the unit circle at z = ("
                << z.real() << ", " << z.imag() << ")";
            throw numerical_error(msg.str());
        }
        if (m > 0.0 && m < 1.0 - tol_disk) inside.push_back(z);
    }
    std::sort(inside.begin(), inside.end(), [](const cplx& a, const cplx& b) {
        const double ma = std::abs(a), mb = std::abs(b);
        if (std::abs(ma - mb) > 1e-12) return ma < mb;
        return std::arg(a) < std::arg(b);
    });
    std::vector<DiskRoot> out;
    for (const auto& z : inside) {
        if (!out.empty() && std::abs(z - out.back().z) < cluster_tol) {
            // cluster into one multiple root at the group mean
            auto& g = out.back();
            g.z = (g.z * double(g.multiplicity) + z) / double(g.multiplicity + 1);
            ++g.multiplicity;
        } else {
            out.push_back({z, 1});
        }
    }
    return out;
}

int expected_disk_count(const SchemeSpec& spec) {
    return spec.a < 0 ? spec.r : spec.r - 1;
}

int contour_root_count(const SchemeSpec& spec, double epsilon, int n_quad) {
    spec.validate();
    if (!(epsilon > 0.0 && epsilon <= pi / 4))
        throw scheme_error("contour_root_count: epsilon must lie in (0, pi/4]");
    if (n_quad < 16) throw scheme_error("contour_root_count: n_quad too small");

    auto integrand = [&](cplx z) { return amplification_derivative(spec, z) / amplification(spec, z); };

    // Arc: z = e^{i theta}, theta in [eps, 2 pi - eps], dz = i z dtheta.
    cplx sum = 0.0;
    {
        const double a0 = epsilon, a1 = 2.0 * pi - epsilon;
        const double h = (a1 - a0) / n_quad;
        for (int i = 0; i <= n_quad; ++i) {
            const double th = a0 + h * i;
            const cplx z = std::polar(1.0, th);
            cplx v = integrand(z) * cplx(0.0, 1.0) * z;
            sum += (i == 0 || i == n_quad) ? 0.5 * h * v : h * v;
        }
    }
    // Chord: z = cos(eps) + i w, w from -sin(eps) to +sin(eps).
    {
        const double w0 = -std::sin(epsilon), w1 = std::sin(epsilon);
        const double h = (w1 - w0) / n_quad;
        for (int i = 0; i <= n_quad; ++i) {
            const cplx z(std::cos(epsilon), w0 + h * i);
            cplx v = integrand(z) * cplx(0.0, 1.0);
            sum += (i == 0 || i == n_quad) ? 0.5 * h * v : h * v;
        }
    }
    const double winding = (sum / cplx(0.0, 2.0 * pi)).real();
    const double count = winding + spec.r;
    const double rounded = std::round(count);
    if (std::abs(count - rounded) > 0.25) {
        std::ostringstream msg;
        msg << "contour_root_count: integral " << count
            << " too far from an integer (contour too coarse or root near contour)";
        throw numerical_error(msg.str());
    }
    return static_cast<int>(rounded);
}

std::vector<bool> stability_region_probe(const MultistepPolynomials& mp,
                                         const std::vector<double>& mu_samples) {
    auto eval = [](const std::vector<double>& c, double x) {
        double v = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * x + *it;
        return v;
    };
    auto deriv_eval = [](const std::vector<double>& c, double x) {
        double v = 0.0;
        for (size_t i = c.size() - 1; i >= 1; --i) v = v * x + double(i) * c[i];
        return v;
    };

    const double rho1 = eval(mp.rho, 1.0);
    const double drho1 = deriv_eval(mp.rho, 1.0);
    const double sig1 = eval(mp.sigma, 1.0);
    if (std::abs(rho1) > 1e-10)
        throw scheme_error("stability_region_probe: hypothesis rho(1) = 0 fails");
    if (std::abs(drho1 - sig1) > 1e-10 || std::abs(sig1) < 1e-10)
        throw scheme_error("stability_region_probe: hypothesis rho'(1) = sigma(1) != 0 fails");
    {
        std::vector<cplx> rc(mp.rho.begin(), mp.rho.end());
        for (const auto& z : polynomial_roots(rc)) {
            const double m = std::abs(z);
            if (m > 1.0 + tol_unit)
                throw scheme_error("stability_region_probe: rho violates the root condition");
        }
    }

    std::vector<bool> out;
    out.reserve(mu_samples.size());
    for (double mu : mu_samples) {
        if (!(mu > 0.0)) throw scheme_error("stability_region_probe: mu samples must be positive");
        auto Pmu = [&](double x) { return eval(mp.rho, x) - mu * eval(mp.sigma, x); };
        // P_mu(1) < 0 and P_mu monic of degree k: bracket the sign change
        // on (1, X_hi) and confirm with bisection.
        double lo = 1.0, hi = 2.0;
        int expand = 0;
        while (Pmu(hi) <= 0.0 && expand++ < 200) hi *= 2.0;
        bool found = Pmu(lo) < 0.0 && Pmu(hi) > 0.0;
        if (found) {
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                (Pmu(mid) < 0.0 ? lo : hi) = mid;
            }
            found = hi > 1.0;
        }
        out.push_back(found);
    }
    return out;
}

SymbolAnalysis analyze_symbol(const SchemeSpec& spec) {
    SymbolAnalysis sa;
    sa.circle = circle_roots(spec);
    sa.assumption4_ok = circle_assumption_holds(sa.circle);
    sa.disk_count_expected = expected_disk_count(spec);
    sa.cauchy = cauchy_stability(spec);
    if (sa.assumption4_ok) {
        sa.disk = disk_roots(spec);
        for (const auto& dr : sa.disk) sa.disk_count_poly += dr.multiplicity;
        sa.disk_count_contour = contour_root_count(spec);
    } else {
        // circle roots other than z = 1 sit on the contour and make the
        // disk count ill-defined
        sa.disk_count_poly = -1;
        sa.disk_count_contour = -1;
    }
    return sa;
}

}  // namespace nbl
