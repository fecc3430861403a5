#include "nbl/simulate.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace nbl {

namespace {

struct GaussRule {
    std::vector<double> nodes;    // on [-1, 1]
    std::vector<double> weights;  // sum = 2
};

const GaussRule& gauss_rule(int order) {
    static const GaussRule g2{{-0.5773502691896257, 0.5773502691896257}, {1.0, 1.0}};
    static const GaussRule g4{
        {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526},
        {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538}};
    static const GaussRule g6{{-0.9324695142031521, -0.6612093864662645, -0.2386191860831969,
                               0.2386191860831969, 0.6612093864662645, 0.9324695142031521},
                              {0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
                               0.4679139345726910, 0.3607615730481386, 0.1713244923791704}};
    static const GaussRule g8{
        {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
         0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363},
        {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
         0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763}};
    switch (order) {
        case 2: return g2;
        case 4: return g4;
        case 6: return g6;
        case 8: return g8;
    }
    throw scheme_error("gauss_rule: supported quadrature orders are 2, 4, 6, 8");
}

double gauss_integral(const ScalarFn& f, double a, double b, int order) {
    const auto& rule = gauss_rule(order);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return half * s;
}

double checked(double v, const char* what) {
    if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << what << ": non-finite value encountered";
        throw numerical_error(msg.str());
    }
    return v;
}

// Index selected by the stopping rule for a target time.
long target_index(double t, double dt, bool at_or_after) {
    if (at_or_after) return static_cast<long>(std::ceil(t / dt - 1e-9));
    return static_cast<long>(std::floor(t / dt + 1e-9));
}

}  // namespace

double exact_interior(const ScalarFn& u0, double a, double x, double t) {
    const double y = x - a * t;
    if (a > 0 && y < 0) return 0.0;  // zero extension for the incoming case
    return u0(y);
}

double interior_average(const ScalarFn& u0, double a, int j, double dx, double t,
                        int quad_order) {
    const double xa = j * dx, xb = (j + 1) * dx;
    auto shifted = [&](double x) { return checked(u0(x - a * t), "interior_average"); };
    if (a > 0) {
        const double kink = a * t;  // u0 is zero-extended below x = a t
        if (xb <= kink) return 0.0;
        if (xa < kink) return gauss_integral(shifted, kink, xb, quad_order) / dx;
    }
    return gauss_integral(shifted, xa, xb, quad_order) / dx;
}

std::vector<double> interior_vector(const ScalarFn& u0, double a, int n_cells, double dx,
                                    double t, int quad_order) {
    std::vector<double> v(static_cast<size_t>(n_cells));
    for (int j = 0; j < n_cells; ++j)
        v[static_cast<size_t>(j)] = interior_average(u0, a, j, dx, t, quad_order);
    return v;
}

std::vector<std::vector<double>> initial_levels(const SchemeSpec& spec, int n_cells,
                                                const ScalarFn& u0, int quad_order,
                                                double x_max) {
    spec.validate();
    const double dx = x_max / n_cells;
    const double dt = spec.lambda * dx;
    std::vector<std::vector<double>> levels;
    for (int n = 0; n < spec.k_levels(); ++n)
        levels.push_back(interior_vector(u0, spec.a, n_cells, dx, n * dt, quad_order));
    return levels;
}

void step(const SchemeSpec& spec, GridSolution& grid) {
    const int k = spec.k_levels();
    const int N = grid.n_cells;
    std::vector<double> next(static_cast<size_t>(N), 0.0);

    auto at = [&](int level, int j) -> double {
        if (j < 0 || j >= N) return 0.0;  // Dirichlet on ghost cells at both edges
        return grid.window[static_cast<size_t>(level)][static_cast<size_t>(j)];
    };

    for (int j = spec.r; j < N; ++j) {
        double acc = 0.0;
        for (int s = 0; s < k; ++s) {
            acc += spec.alpha[static_cast<size_t>(s)] * at(s, j);
            double flux = 0.0;
            for (int l = -spec.r; l <= spec.p; ++l) flux += spec.coeff(l) * at(s, j + l);
            acc += spec.lambda * spec.beta[static_cast<size_t>(s)] * flux;
        }
        const double v = -acc;  // alpha_k = 1
        if (!std::isfinite(v)) {
            std::ostringstream msg;
            msg << "blow-up at n = " << grid.time_index + 1 << ", j = " << j;
            throw numerical_error(msg.str());
        }
        next[static_cast<size_t>(j)] = v;
    }

    grid.window.erase(grid.window.begin());
    grid.window.push_back(std::move(next));
    ++grid.time_index;
}

RunResult run(const SchemeSpec& spec, int n_cells, const ScalarFn& u0, const RunOptions& opt) {
    spec.validate();
    const int k = spec.k_levels();
    RunResult res;
    auto& grid = res.grid;
    grid.n_cells = n_cells;
    grid.x_max = opt.x_max;
    grid.dx = opt.x_max / n_cells;
    grid.dt = spec.lambda * grid.dx;
    grid.window = initial_levels(spec, n_cells, u0, opt.quad_order, opt.x_max);
    grid.time_index = k - 1;

    std::vector<long> targets;
    for (double ts : opt.snapshot_times)
        targets.push_back(target_index(ts, grid.dt, opt.stop_at_or_after));

    auto maybe_record = [&](long n, const std::vector<double>& level) {
        for (size_t i = 0; i < targets.size(); ++i)
            if (targets[i] == n)
                grid.snapshots.emplace_back(opt.snapshot_times[i], level);
    };

    if (opt.keep_history)
        res.history.assign(grid.window.begin(), grid.window.end());
    for (int n = 0; n < k; ++n) maybe_record(n, grid.window[static_cast<size_t>(n)]);

    const long n_final = std::max<long>(target_index(opt.t_final, grid.dt, opt.stop_at_or_after),
                                        k - 1);
    while (grid.time_index < n_final) {
        step(spec, grid);
        if (opt.keep_history) res.history.push_back(grid.newest());
        maybe_record(grid.time_index, grid.newest());
    }
    return res;
}

double trace_average(const ScalarFn& u0, double a, long n, double dt, int quad_order) {
    if (a > 0)
        throw scheme_error("trace_average: no trace discretization for incoming velocity a > 0");
    auto f = [&](double t) { return checked(u0(std::abs(a) * t), "trace_average"); };
    return gauss_integral(f, n * dt, (n + 1) * dt, quad_order) / dt;
}

std::vector<double> approximate_solution(const SchemeSpec& spec,
                                         const BoundaryLayerProfile& profile,
                                         const ScalarFn& u0, int n_cells, double dx, long n,
                                         int quad_order) {
    const double dt = spec.lambda * dx;
    std::vector<double> v = interior_vector(u0, spec.a, n_cells, dx, n * dt, quad_order);
    if (spec.a > 0 || n < spec.k_levels()) return v;

    const int k = spec.k_levels();
    const double utr = trace_average(u0, spec.a, n, dt, quad_order);
    double dtrace = 0.0;  // sum_s alpha_s u^tr_{n+s}
    for (int s = 0; s <= k; ++s)
        dtrace += spec.alpha[static_cast<size_t>(s)] * trace_average(u0, spec.a, n + s, dt, quad_order);
    const double sum_beta = std::accumulate(spec.beta.begin(), spec.beta.end(), 0.0);
    const double bl1 = dtrace / (dt * sum_beta);

    const long J = std::min<long>(n_cells, profile.horizon() + 1);
    for (long j = 0; j < J; ++j)
        v[static_cast<size_t>(j)] += utr * profile.evaluate_w(j) + dx * bl1 * profile.evaluate_corrector(j);
    return v;
}

double l2_error(const std::vector<double>& u, const std::vector<double>& ref, double dx) {
    if (u.size() != ref.size())
        throw scheme_error("l2_error: vector length mismatch");
    double s = 0.0;
    for (size_t j = 0; j < u.size(); ++j) {
        const double d = u[j] - ref[j];
        s += d * d;
    }
    return std::sqrt(dx * s);
}

double l2_norm(const std::vector<double>& u, double dx) {
    double s = 0.0;
    for (double v : u) s += v * v;
    return std::sqrt(dx * s);
}

WeightedNorms weighted_norms(const std::vector<std::vector<double>>& error_history,
                             double gamma, double dx, double dt, int r, int p) {
    if (!(gamma > 0.0)) throw scheme_error("weighted_norms: gamma must be positive");
    WeightedNorms out;
    for (size_t n = 0; n < error_history.size(); ++n) {
        const double w = std::exp(-2.0 * double(n) * gamma * dt);
        double row = 0.0;
        const auto& e = error_history[n];
        for (double v : e) row += v * v;
        out.interior_sum += dt * dx * w * row;
        double trace = 0.0;
        for (int j = 0; j < r + p && j < static_cast<int>(e.size()); ++j)
            trace += e[static_cast<size_t>(j)] * e[static_cast<size_t>(j)];
        out.boundary_sum += dt * w * trace;
    }
    return out;
}

ConvergenceResult convergence_study(const SchemeSpec& spec, const ScalarFn& u0, double t_final,
                                    const std::vector<int>& levels) {
    if (levels.size() < 3)
        throw scheme_error("convergence_study: need at least 3 grid levels");
    ConvergenceResult res;
    const auto analysis = disk_roots(spec);
    auto profile = build_profile(spec, analysis);
    build_corrector(spec, profile);

    for (int N : levels) {
        RunOptions opt;
        opt.t_final = t_final;
        try {
            auto rr = run(spec, N, u0, opt);
            const long n = rr.grid.time_index;
            const auto uint_vec = interior_vector(u0, spec.a, N, rr.grid.dx, n * rr.grid.dt);
            const auto uapp = approximate_solution(spec, profile, u0, N, rr.grid.dx, n);
            res.cells.push_back(N);
            res.dx.push_back(rr.grid.dx);
            res.raw.push_back(l2_error(rr.grid.newest(), uint_vec, rr.grid.dx));
            res.corrected.push_back(l2_error(rr.grid.newest(), uapp, rr.grid.dx));
        } catch (const numerical_error&) {
            res.complete = false;
            break;
        }
    }

    auto fit = [&](const std::vector<double>& err) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int m = 0;
        for (size_t i = 0; i < err.size(); ++i) {
            if (err[i] < 1e-12) continue;  // quadrature floor
            const double x = std::log(res.dx[i]), y = std::log(err[i]);
            sx += x; sy += y; sxx += x * x; sxy += x * y;
            ++m;
        }
        if (m < 2) return 0.0;
        return (m * sxy - sx * sy) / (m * sxx - sx * sx);
    };
    res.raw_slope = fit(res.raw);
    res.corrected_slope = fit(res.corrected);
    return res;
}

}  // namespace nbl
