#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "nbl/profile.hpp"
#include "nbl/scheme.hpp"

namespace nbl {

using ScalarFn = std::function<double(double)>;

/// Rolling multistep state on the uniform grid over [0, x_max]:
/// N cells, dx = x_max/N, dt = lambda dx. The window holds the k most
/// recent time levels; time_index is the index n of the newest.
struct GridSolution {
    int n_cells = 0;
    double x_max = 1.0;
    double dx = 0.0;
    double dt = 0.0;
    std::vector<std::vector<double>> window;  // oldest first, size k
    long time_index = 0;
    std::vector<std::pair<double, std::vector<double>>> snapshots;

    const std::vector<double>& newest() const { return window.back(); }
};

/// Cell averages of u0(x - a t^n) for the k starting levels, by
/// Gauss-Legendre quadrature per cell. For a > 0 the initial condition
/// is extended by zero to the left, splitting any cell the kink
/// x = a t^n crosses.
std::vector<std::vector<double>> initial_levels(const SchemeSpec& spec, int n_cells,
                                                const ScalarFn& u0, int quad_order = 6,
                                                double x_max = 1.0);

/// Advances one step: appends level n+k computed for j >= r (Dirichlet
/// zeros at j < r and on ghost cells beyond the right edge), drops the
/// oldest level. Throws numerical_error on blow-up.
void step(const SchemeSpec& spec, GridSolution& grid);

struct RunOptions {
    double t_final = 0.0;
    std::vector<double> snapshot_times;
    bool stop_at_or_after = false;  // default: largest n with n dt <= T
    bool keep_history = false;      // store every level (weighted norms)
    int quad_order = 6;
    double x_max = 1.0;
};

struct RunResult {
    GridSolution grid;
    std::vector<std::vector<double>> history;  // levels 0..N_T when kept
};

RunResult run(const SchemeSpec& spec, int n_cells, const ScalarFn& u0, const RunOptions& opt);

/// Exact interior solution u0(x - a t), zero-extended for a > 0.
double exact_interior(const ScalarFn& u0, double a, double x, double t);

/// Cell average of the exact interior solution over cell j at time t.
double interior_average(const ScalarFn& u0, double a, int j, double dx, double t,
                        int quad_order = 6);
std::vector<double> interior_vector(const ScalarFn& u0, double a, int n_cells, double dx,
                                    double t, int quad_order = 6);

/// Trace discretization u^tr_n = (1/dt) int_{t^n}^{t^{n+1}} u0(|a| t) dt.
/// Only defined for outgoing velocities (a < 0).
double trace_average(const ScalarFn& u0, double a, long n, double dt, int quad_order = 6);

/// Assembles u^app_{.,n} = u^int + u^tr_n w + dx * (trace time-derivative) w~.
/// For a > 0 (or n < k) the boundary layer terms vanish.
std::vector<double> approximate_solution(const SchemeSpec& spec,
                                         const BoundaryLayerProfile& profile,
                                         const ScalarFn& u0, int n_cells, double dx, long n,
                                         int quad_order = 6);

/// sqrt(dx * sum (u_j - ref_j)^2); throws on length mismatch.
double l2_error(const std::vector<double>& u, const std::vector<double>& ref, double dx);
double l2_norm(const std::vector<double>& u, double dx);

struct WeightedNorms {
    double interior_sum = 0.0;  // sum dt dx e^{-2 n gamma dt} |e_j^n|^2
    double boundary_sum = 0.0;  // trace rows j = 0..r+p-1
};

WeightedNorms weighted_norms(const std::vector<std::vector<double>>& error_history,
                             double gamma, double dx, double dt, int r, int p);

struct ConvergenceResult {
    std::vector<int> cells;
    std::vector<double> dx;
    std::vector<double> raw;
    std::vector<double> corrected;
    double raw_slope = 0.0;
    double corrected_slope = 0.0;
    bool complete = true;  // false when a level blew up
};

/// Runs the scheme on each grid, measures raw (vs u^int) and corrected
/// (vs u^app) l2 errors at t_final, and fits log-log slopes by least
/// squares. Levels at the quadrature floor (< 1e-12) are excluded from
/// the fit.
ConvergenceResult convergence_study(const SchemeSpec& spec, const ScalarFn& u0, double t_final,
                                    const std::vector<int>& levels);

}  // namespace nbl
