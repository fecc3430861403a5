#include "nbl/scheme.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace nbl {

double SchemeSpec::tau() const { return 1.0 / (lambda * std::abs(a)); }

void SchemeSpec::validate() const {
    if (a == 0.0) throw scheme_error("velocity a must be nonzero");
    if (!(lambda > 0.0)) throw scheme_error("CFL parameter lambda must be positive");
    if (r < 0 || p < 0) throw scheme_error("stencil widths r, p must be nonnegative");
    if (space.size() != static_cast<size_t>(r + p + 1))
        throw scheme_error("space coefficient array must have r+p+1 entries");
    if (coeff(-r) == 0.0 || coeff(p) == 0.0)
        throw scheme_error("stencil widths are not tight: a_{-r} and a_p must be nonzero");
    if (alpha.size() < 2) throw scheme_error("time integrator needs k >= 1 (alpha has k+1 entries)");
    if (beta.size() + 1 != alpha.size())
        throw scheme_error("beta must have exactly k entries (k = len(alpha)-1)");
    if (alpha.back() != 1.0) throw scheme_error("normalization alpha_k = 1 violated");
    if (std::abs(alpha.front()) + std::abs(beta.front()) == 0.0)
        throw scheme_error("normalization |alpha_0| + |beta_0| > 0 violated");
}

ConsistencyReport check_consistency(const SchemeSpec& spec, double tol) {
    spec.validate();
    ConsistencyReport rep;

    double sum_a = 0.0, moment_a = 0.0;
    for (int l = -spec.r; l <= spec.p; ++l) {
        sum_a += spec.coeff(l);
        moment_a += l * spec.coeff(l);
    }
    double sum_alpha = std::accumulate(spec.alpha.begin(), spec.alpha.end(), 0.0);
    double sigma_alpha = 0.0;
    for (size_t s = 0; s < spec.alpha.size(); ++s) sigma_alpha += double(s) * spec.alpha[s];
    double sum_beta = std::accumulate(spec.beta.begin(), spec.beta.end(), 0.0);

    rep.residuals["sum_a"] = std::abs(sum_a);
    rep.residuals["moment_a"] = std::abs(moment_a - spec.a);
    rep.residuals["sum_alpha"] = std::abs(sum_alpha);
    rep.residuals["order_one"] = std::abs(sigma_alpha - sum_beta);
    rep.residuals["sigma_alpha"] = std::abs(sigma_alpha);

    rep.space_ok = rep.residuals["sum_a"] <= tol && rep.residuals["moment_a"] <= tol;
    rep.time_ok = rep.residuals["sum_alpha"] <= tol && rep.residuals["order_one"] <= tol;
    rep.sigma_alpha_nonzero = rep.residuals["sigma_alpha"] > tol;
    return rep;
}

std::vector<double> flux_coefficients(const SchemeSpec& spec) {
    auto rep = check_consistency(spec);
    if (!rep.space_ok)
        throw scheme_error("flux form requires a consistent space stencil (sum a_l = 0)");
    // The telescoped identity  sum_l a_l u_{j+l} = F_{j+1/2} - F_{j-1/2}
    // together with F(u,...,u) = a u pins f_l = -sum_{m=-r..l} a_m.
    std::vector<double> f(static_cast<size_t>(spec.r + spec.p));
    double partial = 0.0;
    for (int l = -spec.r; l <= spec.p - 1; ++l) {
        partial += spec.coeff(l);
        f[static_cast<size_t>(l + spec.r)] = -partial;
    }
    return f;
}

const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names = {
        "upwind", "lax_friedrichs", "lax_wendroff", "leap_frog", "ab3_five_point"};
    return names;
}

Builtin builtin_from_name(std::string_view name) {
    if (name == "upwind") return Builtin::upwind;
    if (name == "lax_friedrichs") return Builtin::lax_friedrichs;
    if (name == "lax_wendroff") return Builtin::lax_wendroff;
    if (name == "leap_frog") return Builtin::leap_frog;
    if (name == "ab3_five_point") return Builtin::ab3_five_point;
    std::ostringstream msg;
    msg << "unknown scheme '" << name << "'; available:";
    for (const auto& n : builtin_names()) msg << ' ' << n;
    throw scheme_error(msg.str());
}

std::string_view builtin_name(Builtin b) {
    switch (b) {
        case Builtin::upwind: return "upwind";
        case Builtin::lax_friedrichs: return "lax_friedrichs";
        case Builtin::lax_wendroff: return "lax_wendroff";
        case Builtin::leap_frog: return "leap_frog";
        case Builtin::ab3_five_point: return "ab3_five_point";
    }
    return "?";
}

SchemeSpec builtin_scheme(Builtin name, double a, double lambda) {
    if (a == 0.0) throw scheme_error("velocity a must be nonzero");
    if (!(lambda > 0.0)) throw scheme_error("CFL parameter lambda must be positive");
    SchemeSpec s;
    s.a = a;
    s.lambda = lambda;
    switch (name) {
        case Builtin::upwind:
            if (a > 0) {
                s.r = 1; s.p = 0;
                s.space = {-a, a};
            } else {
                s.r = 0; s.p = 1;
                s.space = {-a, a};
            }
            s.alpha = {-1.0, 1.0};
            s.beta = {1.0};
            break;
        case Builtin::lax_friedrichs:
            s.r = 1; s.p = 1;
            s.space = {-0.5 / lambda - 0.5 * a, 1.0 / lambda, -0.5 / lambda + 0.5 * a};
            s.alpha = {-1.0, 1.0};
            s.beta = {1.0};
            break;
        case Builtin::lax_wendroff:
            s.r = 1; s.p = 1;
            s.space = {-0.5 * a - 0.5 * lambda * a * a,
                       lambda * a * a,
                       0.5 * a - 0.5 * lambda * a * a};
            s.alpha = {-1.0, 1.0};
            s.beta = {1.0};
            break;
        case Builtin::leap_frog:
            s.r = 1; s.p = 1;
            s.space = {-0.5 * a, 0.0, 0.5 * a};
            s.alpha = {-1.0, 0.0, 1.0};
            s.beta = {0.0, 2.0};
            break;
        case Builtin::ab3_five_point:
            s.r = 2; s.p = 2;
            s.space = {a / 12.0 + 1.0 / 24.0,
                       -2.0 * a / 3.0 - 1.0 / 6.0,
                       0.25,
                       2.0 * a / 3.0 - 1.0 / 6.0,
                       -a / 12.0 + 1.0 / 24.0};
            s.alpha = {0.0, 0.0, -1.0, 1.0};
            s.beta = {5.0 / 12.0, -16.0 / 12.0, 23.0 / 12.0};
            break;
    }
    return s;
}

SchemeSpec builtin_scheme(std::string_view name, double a, double lambda) {
    return builtin_scheme(builtin_from_name(name), a, lambda);
}

SchemeSpec load_scheme_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw scheme_error("cannot open scheme file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw scheme_error("scheme file parse error: " + std::string(e.what()));
    }

    double a = j.value("a", 0.0);
    double lambda = j.value("lambda", 0.0);
    if (j.contains("scheme")) return builtin_scheme(j["scheme"].get<std::string>(), a, lambda);

    if (!j.contains("space_coeffs") || !j.contains("alpha") || !j.contains("beta"))
        throw scheme_error("scheme file needs either 'scheme' or space_coeffs/alpha/beta");

    std::map<int, double> coeffs;
    for (const auto& pair : j["space_coeffs"]) {
        if (!pair.is_array() || pair.size() != 2)
            throw scheme_error("space_coeffs entries must be [l, a_l] pairs");
        coeffs[pair[0].get<int>()] = pair[1].get<double>();
    }
    if (coeffs.empty()) throw scheme_error("space_coeffs is empty");

    SchemeSpec s;
    s.a = a;
    s.lambda = lambda;
    s.r = -coeffs.begin()->first;
    s.p = coeffs.rbegin()->first;
    if (s.r < 0 || s.p < 0)
        throw scheme_error("space_coeffs must span an interval containing offsets of both signs or 0");
    s.space.assign(static_cast<size_t>(s.r + s.p + 1), 0.0);
    for (auto [l, v] : coeffs) s.space[static_cast<size_t>(l + s.r)] = v;
    s.alpha = j["alpha"].get<std::vector<double>>();
    s.beta = j["beta"].get<std::vector<double>>();
    s.validate();
    return s;
}

}  // namespace nbl
