#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nbl {

/// Thrown on invalid scheme definitions or failed preconditions.
class scheme_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown when a numerical routine fails (blow-up, non-convergence, ...).
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One explicit linear multistep finite-difference scheme for
/// the transport equation u_t + a u_x = 0:
///
///   sum_{s=0..k} alpha_s u_j^{n+s}
///     + lambda sum_{s=0..k-1} beta_s sum_{l=-r..p} a_l u_{j+l}^{n+s} = 0
///
/// The space coefficients a_l are stored dimensionless (they multiply
/// lambda directly), alpha_k = 1 by normalization.
struct SchemeSpec {
    double a = 0.0;       // transport velocity, != 0
    double lambda = 0.0;  // CFL ratio dt/dx, > 0
    int r = 0;            // left stencil width
    int p = 0;            // right stencil width
    std::vector<double> space;  // a_{-r}, ..., a_p  (size r+p+1)
    std::vector<double> alpha;  // alpha_0 .. alpha_k
    std::vector<double> beta;   // beta_0 .. beta_{k-1}

    int k_levels() const { return static_cast<int>(alpha.size()) - 1; }
    double coeff(int l) const { return space[static_cast<size_t>(l + r)]; }
    double tau() const;  // dx = tau |a| dt, i.e. tau = 1/(lambda |a|)

    /// Checks the structural invariants; throws scheme_error naming the
    /// violated one.
    void validate() const;
};

struct ConsistencyReport {
    bool space_ok = false;            // sum a_l = 0 and sum l a_l = a
    bool time_ok = false;             // sum alpha = 0, sum s alpha_s = sum beta
    bool sigma_alpha_nonzero = false; // sum s alpha_s bounded away from 0
    std::map<std::string, double> residuals;

    bool all_ok() const { return space_ok && time_ok && sigma_alpha_nonzero; }
};

/// Evaluates the consistency sums of the space stencil and the time
/// integrator. Residual keys: "sum_a", "moment_a", "sum_alpha",
/// "order_one", "sigma_alpha".
ConsistencyReport check_consistency(const SchemeSpec& spec, double tol = 1e-10);

/// Flux coefficients f_{-r}..f_{p-1} of the conservative form,
/// f_l = -sum_{m=-r..l} a_m, so that sum_l a_l u_{j+l} telescopes into
/// flux differences and F(u,...,u) = a u. Requires sum a_l = 0; throws
/// scheme_error otherwise.
std::vector<double> flux_coefficients(const SchemeSpec& spec);

enum class Builtin {
    upwind,
    lax_friedrichs,
    lax_wendroff,
    leap_frog,
    ab3_five_point,
};

Builtin builtin_from_name(std::string_view name);
std::string_view builtin_name(Builtin b);
const std::vector<std::string>& builtin_names();

SchemeSpec builtin_scheme(Builtin name, double a, double lambda);
SchemeSpec builtin_scheme(std::string_view name, double a, double lambda);

/// Loads a scheme definition file (JSON): keys "a", "lambda",
/// "space_coeffs" (list of [l, a_l] pairs), "alpha", "beta"; or
/// "scheme": "<builtin>" with "a", "lambda".
SchemeSpec load_scheme_file(const std::string& path);

}  // namespace nbl
