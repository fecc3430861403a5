#pragma once

#include <vector>

#include "nbl/scheme.hpp"
#include "nbl/symbol.hpp"

namespace nbl {

/// One exponential mode: poly(j) * z^j with poly given by coefficients
/// in ascending powers of j.
struct SequenceTerm {
    cplx z;
    std::vector<cplx> poly;
};

/// Closed-form linear combination of exponential modes. Evaluations are
/// real by construction (conjugate-pair roots); the imaginary residue is
/// checked against a 1e-10 budget.
class ClosedFormSequence {
public:
    ClosedFormSequence() = default;
    explicit ClosedFormSequence(std::vector<SequenceTerm> terms);

    double operator()(long j) const;
    bool empty() const { return terms_.empty(); }
    const std::vector<SequenceTerm>& terms() const { return terms_; }

private:
    std::vector<SequenceTerm> terms_;
};

enum class TraceSet {
    trivial,    // a > 0: C_num = {0}, profile identically zero
    full_line,  // a < 0: C_num = R
};

struct BoundaryLayerProfile {
    std::vector<DiskRoot> roots;
    std::vector<cplx> omega;      // coordinates of w in the (j^nu z_i^j) basis
    ClosedFormSequence w;         // leading profile, w_0..w_{r-1} = -1 (a<0)
    ClosedFormSequence w_tilde;   // first corrector, w~_0..w~_{r-1} = 0
    double decay_rate = 0.0;      // rho = max_i |z_i|
    TraceSet c_num = TraceSet::trivial;
    int r = 0;

    double evaluate_w(long j) const;
    double evaluate_corrector(long j) const;
    /// Smallest horizon beyond which the profile is numerically zero
    /// (rho^J < 1e-16), capped at 10^4.
    long horizon() const;
};

/// Solves the r x r boundary system for the profile associated with the
/// trace value u = 1 (a < 0), or returns the trivial profile (a > 0).
/// Requires the disk roots of the symbol analysis; throws numerical_error
/// when the basis matrix is ill conditioned (> 1e12).
BoundaryLayerProfile build_profile(const SchemeSpec& spec, const std::vector<DiskRoot>& roots);

/// Constructs the corrector w~ solving  sum_l a_l w~_{j+l} + w_j = 0 with
/// zero boundary rows, via per-mode particular solutions (upper
/// triangular coefficient identification) plus a homogeneous correction.
/// No-op for the trivial (a > 0) profile.
void build_corrector(const SchemeSpec& spec, BoundaryLayerProfile& profile);

}  // namespace nbl
