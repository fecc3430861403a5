#pragma once

#include <complex>
#include <vector>

#include "nbl/scheme.hpp"

namespace nbl {

using cplx = std::complex<double>;

/// Amplification function A(z) = sum_{l=-r..p} a_l z^l, evaluated as
/// the degree-(r+p) polynomial z^r A(z) divided by z^r. Throws on z = 0
/// (pole of order r).
cplx amplification(const SchemeSpec& spec, cplx z);
cplx amplification_derivative(const SchemeSpec& spec, cplx z);

struct CircleRoot {
    double theta = 0.0;   // in (-pi, pi]
    bool simple = true;   // |A'(e^{i theta})| clearly nonzero
    bool resolved = true; // false when clustered below grid resolution
};

/// Locates the roots of A on the unit circle by scanning |A(e^{i theta})|^2
/// on a uniform grid and refining each local minimum. theta = 0 is always
/// reported (A(1) = 0 for consistent schemes).
std::vector<CircleRoot> circle_roots(const SchemeSpec& spec, int n_samples = 4096,
                                     double tol = 1e-8);

/// The unique-circle-root condition: theta = 0 is the only root of A on S^1.
bool circle_assumption_holds(const std::vector<CircleRoot>& roots);

enum class Verdict { stable, marginal, unstable };
std::string_view verdict_name(Verdict v);

struct CauchyDiagnostics {
    Verdict verdict = Verdict::unstable;
    double worst_eta = 0.0;      // frequency with the largest root modulus
    double worst_modulus = 0.0;  // that modulus
};

/// Applies the root condition to rho(X) + lambda A(e^{i eta}) sigma(X)
/// over sampled frequencies eta. A unit-modulus root that is nearly
/// multiple downgrades "stable" to "marginal".
CauchyDiagnostics cauchy_stability(const SchemeSpec& spec, int n_samples = 1024);

struct DiskRoot {
    cplx z;
    int multiplicity = 1;
};

/// Roots of z^r A(z) with 0 < |z| < 1, clustered into multiplicity groups.
/// Throws numerical_error when a root other than z = 1 sits within
/// tol_disk of the unit circle (borderline circle-root case).
std::vector<DiskRoot> disk_roots(const SchemeSpec& spec);

/// Counts the zeros of A inside the unit disk via the residue formula
/// along the circle-with-chord contour avoiding z = 1: the winding
/// integral of A'/A plus the pole order r. Independent of disk_roots.
int contour_root_count(const SchemeSpec& spec, double epsilon = 0.1, int n_quad = 2048);

/// The root count predicted by the sign of a: r when a < 0, r-1 when a > 0.
int expected_disk_count(const SchemeSpec& spec);

struct MultistepPolynomials {
    std::vector<double> rho;    // rho(X) = sum alpha_j X^j, degree k, monic
    std::vector<double> sigma;  // sigma(X) = sum beta_j X^j, degree <= k-1
};

MultistepPolynomials multistep_polynomials(const SchemeSpec& spec);

/// For each mu > 0, reports whether P_mu(X) = rho(X) - mu sigma(X) has a
/// real root in (1, inf) (i.e. mu lies outside the stability region).
/// Checks first that the method is stable and of order >= 1:
/// rho(1) = 0, rho'(1) = sigma(1) != 0, root condition on rho.
std::vector<bool> stability_region_probe(const MultistepPolynomials& mp,
                                         const std::vector<double>& mu_samples);

struct SymbolAnalysis {
    std::vector<CircleRoot> circle;
    std::vector<DiskRoot> disk;
    int disk_count_poly = 0;
    int disk_count_contour = 0;
    int disk_count_expected = 0;
    CauchyDiagnostics cauchy;
    bool assumption4_ok = false;
};

/// Runs every diagnostic on one scheme.
SymbolAnalysis analyze_symbol(const SchemeSpec& spec);

/// Roots of a complex polynomial (coefficients low to high) via the
/// companion-matrix eigenvalues.
std::vector<cplx> polynomial_roots(const std::vector<cplx>& coeffs);

}  // namespace nbl
