#include "nbl/profile.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

namespace nbl {

namespace {

// j^nu with the 0^0 = 1 convention used by the basis sequences.
cplx jpow(long j, int nu) {
    if (nu == 0) return 1.0;
    return std::pow(double(j), nu);
}

double binom(int n, int k) {
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
    return v;
}

// Moment M_t(z) = sum_l a_l l^t z^l.
cplx moment(const SchemeSpec& spec, cplx z, int t) {
    cplx s = 0.0;
    for (int l = -spec.r; l <= spec.p; ++l)
        s += spec.coeff(l) * std::pow(double(l), t) * std::pow(z, l);
    return s;
}

struct Mode {
    size_t root_index;
    int nu;
};

std::vector<Mode> enumerate_modes(const std::vector<DiskRoot>& roots) {
    std::vector<Mode> modes;
    for (size_t i = 0; i < roots.size(); ++i)
        for (int nu = 0; nu < roots[i].multiplicity; ++nu) modes.push_back({i, nu});
    return modes;
}

Eigen::MatrixXcd boundary_matrix(const std::vector<DiskRoot>& roots,
                                 const std::vector<Mode>& modes, int r) {
    Eigen::MatrixXcd M(r, static_cast<int>(modes.size()));
    for (int j = 0; j < r; ++j)
        for (size_t m = 0; m < modes.size(); ++m)
            M(j, static_cast<int>(m)) =
                jpow(j, modes[m].nu) * std::pow(roots[modes[m].root_index].z, j);
    return M;
}

Eigen::VectorXcd solve_guarded(const Eigen::MatrixXcd& M, const Eigen::VectorXcd& rhs) {
    if (M.rows() == 0) return Eigen::VectorXcd();  // r = 0: nothing to solve
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (smin == 0.0 || smax / smin > 1e12)
        throw numerical_error(
            "boundary basis matrix is ill conditioned; disk roots are likely mis-clustered");
    return svd.solve(rhs);
}

std::vector<SequenceTerm> collect_terms(const std::vector<DiskRoot>& roots,
                                        const std::vector<std::vector<cplx>>& per_root_poly) {
    std::vector<SequenceTerm> terms;
    for (size_t i = 0; i < roots.size(); ++i) {
        bool nonzero = false;
        for (auto c : per_root_poly[i]) nonzero |= (c != cplx(0.0));
        if (nonzero) terms.push_back({roots[i].z, per_root_poly[i]});
    }
    return terms;
}

}  // namespace

ClosedFormSequence::ClosedFormSequence(std::vector<SequenceTerm> terms)
    : terms_(std::move(terms)) {}

double ClosedFormSequence::operator()(long j) const {
    cplx v = 0.0;
    for (const auto& t : terms_) {
        const double logmag = j * std::log(std::abs(t.z));
        if (logmag < -690.0) continue;  // |z|^j below ~1e-300
        cplx poly = 0.0;
        for (auto it = t.poly.rbegin(); it != t.poly.rend(); ++it)
            poly = poly * double(j) + *it;
        v += poly * std::pow(t.z, double(j));
    }
    if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v.real())))
        throw numerical_error("profile evaluation has a non-real residue");
    return v.real();
}

double BoundaryLayerProfile::evaluate_w(long j) const {
    if (c_num == TraceSet::trivial) return 0.0;
    return w(j);
}

double BoundaryLayerProfile::evaluate_corrector(long j) const {
    if (c_num == TraceSet::trivial || w_tilde.empty()) return 0.0;
    return w_tilde(j);
}

long BoundaryLayerProfile::horizon() const {
    if (decay_rate <= 0.0) return 0;
    const long J = static_cast<long>(std::ceil(-16.0 * std::log(10.0) / std::log(decay_rate)));
    return std::min(J, 10000L);
}

BoundaryLayerProfile build_profile(const SchemeSpec& spec, const std::vector<DiskRoot>& roots) {
    spec.validate();
    BoundaryLayerProfile prof;
    prof.roots = roots;
    prof.r = spec.r;
    for (const auto& dr : roots) prof.decay_rate = std::max(prof.decay_rate, std::abs(dr.z));

    if (spec.a > 0) {
        prof.c_num = TraceSet::trivial;
        return prof;
    }
    prof.c_num = TraceSet::full_line;

    const auto modes = enumerate_modes(roots);
    if (static_cast<int>(modes.size()) != spec.r) {
        std::ostringstream msg;
        msg << "profile basis has " << modes.size() << " modes but r = " << spec.r
            << "; the disk root count is off";
        throw numerical_error(msg.str());
    }

    const Eigen::MatrixXcd M = boundary_matrix(roots, modes, spec.r);
    const Eigen::VectorXcd rhs = Eigen::VectorXcd::Constant(spec.r, cplx(-1.0));
    const Eigen::VectorXcd omega = solve_guarded(M, rhs);
    prof.omega.assign(omega.data(), omega.data() + omega.size());

    std::vector<std::vector<cplx>> per_root(roots.size());
    for (size_t i = 0; i < roots.size(); ++i)
        per_root[i].assign(static_cast<size_t>(roots[i].multiplicity), 0.0);
    for (size_t m = 0; m < modes.size(); ++m)
        per_root[modes[m].root_index][static_cast<size_t>(modes[m].nu)] = prof.omega[m];
    prof.w = ClosedFormSequence(collect_terms(roots, per_root));
    return prof;
}

void build_corrector(const SchemeSpec& spec, BoundaryLayerProfile& prof) {
    if (prof.c_num == TraceSet::trivial) return;  // zero corrector

    const auto& roots = prof.roots;
    const auto modes = enumerate_modes(roots);

    // Particular solution for each mode Z^(m) = j^nu z_i^j: an ansatz
    //   P^(m)_j = sum_{s=0..mu_i-1} sigma_s j^{mu_i+s} z_i^j
    // plugged into  sum_l a_l P_{j+l} = -j^nu z_i^j  and identified power
    // by power in j. The moments M_t(z_i) vanish for t < mu_i, which
    // makes the identification upper triangular with nonzero diagonal
    // C(mu_i+t, t) M_{mu_i}(z_i).
    std::vector<std::vector<cplx>> part(roots.size());
    for (size_t i = 0; i < roots.size(); ++i)
        part[i].assign(static_cast<size_t>(2 * roots[i].multiplicity), 0.0);

    for (size_t m = 0; m < modes.size(); ++m) {
        const size_t i = modes[m].root_index;
        const int mu = roots[i].multiplicity;
        const int nu = modes[m].nu;
        const cplx z = roots[i].z;

        std::vector<cplx> sigma(static_cast<size_t>(mu), 0.0);
        for (int t = mu - 1; t >= 0; --t) {
            cplx acc = (t == nu) ? cplx(-1.0) : cplx(0.0);
            for (int s = t + 1; s < mu; ++s)
                acc -= sigma[size_t(s)] * binom(mu + s, t) * moment(spec, z, mu + s - t);
            sigma[size_t(t)] = acc / (binom(mu + t, t) * moment(spec, z, mu));
        }
        for (int s = 0; s < mu; ++s)
            part[i][static_cast<size_t>(mu + s)] += prof.omega[m] * sigma[size_t(s)];
    }

    // Homogeneous correction so that w~_0 .. w~_{r-1} = 0.
    ClosedFormSequence W(collect_terms(roots, part));
    Eigen::VectorXcd rhs(prof.r);
    for (int j = 0; j < prof.r; ++j) {
        cplx v = 0.0;
        for (const auto& t : W.terms()) {
            cplx poly = 0.0;
            for (auto it = t.poly.rbegin(); it != t.poly.rend(); ++it)
                poly = poly * double(j) + *it;
            v += poly * std::pow(t.z, double(j));
        }
        rhs(j) = -v;
    }
    const Eigen::MatrixXcd M = boundary_matrix(roots, modes, prof.r);
    const Eigen::VectorXcd varpi = solve_guarded(M, rhs);

    std::vector<std::vector<cplx>> total = part;
    for (size_t m = 0; m < modes.size(); ++m)
        total[modes[m].root_index][static_cast<size_t>(modes[m].nu)] += varpi(static_cast<int>(m));
    prof.w_tilde = ClosedFormSequence(collect_terms(roots, total));
}

}  // namespace nbl
