#include "qdx/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "qdx/parallel.hpp"
#include "qdx/quadrature.hpp"
#include "qdx/tracemap.hpp"

namespace qdx {

namespace {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

LinearFit least_squares(const std::vector<std::pair<double, double>>& pts) {
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (sxx == 0.0) throw DegenerateFit("regression abscissae coincide");
    return {sxy / sxx, my - (sxy / sxx) * mx};
}

double safe_log(double p) { return std::log(std::max(p, 1e-320)); }

}  // namespace

CouplingConstants coupling_constants(double lambda, const std::vector<double>& deltas,
                                     const std::vector<double>& p_list) {
    CouplingConstants c;
    c.lambda = lambda;
    double disc = (lambda - 4.0) * (lambda - 4.0) - 12.0;
    if (disc < 0.0)
        throw DomainError("S_l needs lambda >= 4 + 2 sqrt(3); got " + std::to_string(lambda));
    c.s_lower = 0.5 * ((lambda - 4.0) + std::sqrt(disc));
    c.s_upper = 2.0 * lambda + 22.0;
    if (!(lambda > std::sqrt(24.0)))
        throw DomainError("lower bounds need lambda > sqrt(24)");
    c.alpha_upper = kTwoLogPhi / std::log(c.s_lower);
    c.alpha_lower = kTwoLogPhi / std::log(c.s_upper);
    c.alpha_upper_valid = lambda >= 8.0;
    c.s_exponent = std::log(c.s_upper) / kTwoLogPhi;
    for (double d : deltas) c.lambda0_at[d] = lambda_zero(d);
    double kappa = 2.0 * std::log(std::sqrt(17.0) / 4.0) / (5.0 * std::log(c.s_upper));
    for (double p : p_list)
        c.beta_lower_zero_phase.emplace_back(p, c.alpha_lower - (2.0 / p) * (1.0 - kappa));
    return c;
}

RhsResult theorem1_rhs(std::int64_t N, double t, const PotentialSpec& spec, Side side,
                       double quad_tol) {
    if (N < 1 || !(t > 0.0)) throw DomainError("theorem1_rhs needs N >= 1, t > 0");
    double k = spectral_bound(spec);
    double eps = 1.0 / t;
    auto f = [&](double e) {
        double lg = window_max_log_norm_sq({e, eps}, N, side, spec);
        return std::exp(-lg);
    };
    QuadratureOptions opt;
    opt.rel_tol = quad_tol;
    QuadratureResult q = integrate(f, -k, k, opt);
    double t4 = t * t * t * t;
    return {t4 * q.value, t4 * q.error_estimate, q.evaluations};
}

RhsResult lemma2_rhs(std::int64_t N, double t, const PotentialSpec& spec, Side side,
                     double quad_tol) {
    if (N < 1 || !(t > 0.0)) throw DomainError("lemma2_rhs needs N >= 1, t > 0");
    double k = spectral_bound(spec);
    double eps = 1.0 / t;
    std::int64_t box =
        N + static_cast<std::int64_t>(std::ceil((2.0 * k / eps) * std::log(1e10))) + 64;
    auto f = [&](double e) { return resolvent_tail_sum(e, eps, spec, N, side, box); };
    QuadratureOptions opt;
    opt.rel_tol = quad_tol;
    QuadratureResult q = integrate(f, -k, k, opt);
    return {q.value, q.error_estimate, q.evaluations};
}

TransportExponents transport_exponents(const std::vector<std::pair<double, double>>& series,
                                       double p) {
    if (!(p > 0.0)) throw DomainError("transport_exponents needs p > 0");
    std::vector<std::pair<double, double>> pts;
    for (const auto& [t, m] : series)
        if (t > 0.0) pts.emplace_back(t, m);
    if (pts.size() < 8) throw SeriesTooShort("need at least 8 positive-time samples");
    std::sort(pts.begin(), pts.end());
    double t_min = pts.front().first, t_max = pts.back().first;
    if (t_max / t_min < 100.0)
        throw SeriesTooShort("series spans fewer than two decades of t");

    double region_lo = t_max / 100.0;  // final two decades
    TransportExponents out;
    out.p = p;
    out.beta_minus = HUGE_VAL;
    out.beta_plus = -HUGE_VAL;
    out.window_t_low = HUGE_VAL;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        double lo = pts[i].first;
        if (lo < region_lo || lo * 10.0 > t_max * (1.0 + 1e-12)) continue;
        std::vector<std::pair<double, double>> win;
        for (const auto& [t, m] : pts)
            if (t >= lo && t <= lo * 10.0) win.emplace_back(std::log(t), safe_log(m));
        if (win.size() < 4) continue;
        LinearFit fit = least_squares(win);
        double slope = fit.slope / p;
        out.beta_minus = std::min(out.beta_minus, slope);
        out.beta_plus = std::max(out.beta_plus, slope);
        out.window_t_low = std::min(out.window_t_low, lo);
        out.window_t_high = std::max(out.window_t_high, lo * 10.0);
        ++out.windows;
    }
    if (out.windows == 0) throw SeriesTooShort("no full one-decade window in the final decades");
    return out;
}

SpreadingProfile spreading_profile(const ProbabilityGrid& grid, double threshold_zero,
                                   double threshold_inf) {
    if (grid.alphas.empty() || grid.times.size() < 4)
        throw SeriesTooShort("spreading profile needs an alpha grid and >= 4 times");
    if (grid.values.size() != grid.alphas.size())
        throw DomainError("probability grid shape mismatch");
    double t_max = *std::max_element(grid.times.begin(), grid.times.end());
    double t_min = *std::min_element(grid.times.begin(), grid.times.end());
    if (t_max / t_min < 100.0) throw SeriesTooShort("times span fewer than two decades");
    for (double a : grid.alphas)
        if (a < 0.0 || a > 1.2) throw DomainError("alpha grid must lie in [0, 1.2]");

    double window_lo = t_max / 10.0;  // final decade
    SpreadingProfile out;
    out.alphas = grid.alphas;
    out.threshold_zero = threshold_zero;
    out.threshold_inf = threshold_inf;
    out.window_t_low = window_lo;
    out.window_t_high = t_max;
    out.s_minus.resize(grid.alphas.size());
    out.s_plus.resize(grid.alphas.size());
    for (std::size_t a = 0; a < grid.alphas.size(); ++a) {
        double lo_ratio = HUGE_VAL, hi_ratio = -HUGE_VAL;
        for (std::size_t i = 0; i < grid.times.size(); ++i) {
            double t = grid.times[i];
            if (t < window_lo) continue;
            double ratio = safe_log(grid.values[a][i]) / std::log(t);
            lo_ratio = std::min(lo_ratio, ratio);
            hi_ratio = std::max(hi_ratio, ratio);
        }
        out.s_minus[a] = -lo_ratio;
        out.s_plus[a] = -hi_ratio;
    }
    auto largest_below = [&](const std::vector<double>& s, double thr) {
        double best = 0.0;
        for (std::size_t a = 0; a < s.size(); ++a)
            if (s[a] < thr) best = std::max(best, grid.alphas[a]);
        return best;
    };
    out.alpha_l_minus = largest_below(out.s_minus, threshold_zero);
    out.alpha_l_plus = largest_below(out.s_plus, threshold_zero);
    out.alpha_u_minus = largest_below(out.s_minus, threshold_inf);
    out.alpha_u_plus = largest_below(out.s_plus, threshold_inf);
    return out;
}

PowerLaw transfer_power_law(double lambda, double delta, int k, int root_stride) {
    PotentialSpec spec = PotentialSpec::fibonacci(lambda, 0.0);
    auto profiles = root_profiles(k, lambda);
    std::vector<std::int64_t> fib_ns;
    for (int j = 1; j <= k; ++j) fib_ns.push_back(fibonacci(j));
    std::vector<double> max_log(fib_ns.size(), 0.0);

    std::vector<double> roots;
    for (std::size_t i = 0; i < profiles.size(); i += static_cast<std::size_t>(std::max(1, root_stride)))
        roots.push_back(profiles[i].first);

    std::vector<std::vector<double>> per_root(roots.size());
    parallel_for(roots.size(), 0, [&](std::size_t ri) {
        std::vector<double> logs(fib_ns.size(), 0.0);
        TransferMatrix phi = TransferMatrix::identity();
        std::size_t next = 0;
        std::complex<double> z{roots[ri], 0.0};
        for (std::int64_t n = 1; n <= fib_ns.back(); ++n) {
            phi = TransferMatrix::one_step(z, potential_value(spec, n)) * phi;
            if (next < fib_ns.size() && n == fib_ns[next]) {
                logs[next] = phi.log_norm();
                ++next;
            }
        }
        per_root[ri] = std::move(logs);
    });
    for (const auto& logs : per_root)
        for (std::size_t j = 0; j < logs.size(); ++j) max_log[j] = std::max(max_log[j], logs[j]);

    PowerLaw out;
    out.roots_sampled = static_cast<int>(roots.size());
    std::vector<std::pair<double, double>> pts;
    for (std::size_t j = 0; j < fib_ns.size(); ++j) {
        if (fib_ns[j] < 2) continue;  // log N = 0 carries no slope information
        pts.emplace_back(std::log(static_cast<double>(fib_ns[j])), max_log[j]);
        out.envelope.emplace_back(pts.back());
    }
    LinearFit fit = least_squares(pts);
    out.gamma = fit.slope;
    double worst = -HUGE_VAL;
    for (const auto& [ln, lg] : pts) worst = std::max(worst, lg - fit.slope * ln);
    out.c = std::exp(worst);
    return out;
}

EnvelopeFit fit_envelope(const std::vector<EnvelopePoint>& points) {
    if (points.size() < 4) throw DegenerateFit("envelope fit needs >= 4 points");
    double best_sse = HUGE_VAL;
    EnvelopeFit best;
    for (int i = 0; i <= 120; ++i) {
        double c = 0.05 * std::pow(100.0, i / 120.0);  // 0.05 .. 5
        double biggest = -HUGE_VAL;
        for (const auto& pt : points)
            biggest = std::max(biggest,
                               safe_log(pt.probability) - std::log(std::exp(-c * pt.n) + pt.rhs));
        double sse = 0.0;
        for (const auto& pt : points) {
            double r = biggest + std::log(std::exp(-c * pt.n) + pt.rhs) - safe_log(pt.probability);
            sse += r * r;
        }
        if (sse < best_sse) {
            best_sse = sse;
            best.small_c = c;
            best.big_c = std::exp(biggest);
        }
    }
    best.violations = 0;
    best.max_ratio = 0.0;
    for (const auto& pt : points) {
        double bound = best.big_c * (std::exp(-best.small_c * pt.n) + pt.rhs);
        double ratio = pt.probability / bound;
        best.max_ratio = std::max(best.max_ratio, ratio);
        if (ratio > 1.0 + 1e-9) ++best.violations;
    }
    return best;
}

SandwichReport sandwich_report(double lambda, const SandwichConfig& config) {
    SandwichReport rep;
    rep.constants = coupling_constants(lambda, {0.0, 0.1, 0.2}, {1.0, 2.0, 4.0, 8.0});
    if (!rep.constants.alpha_upper_valid)
        throw DomainError("sandwich upper bound needs lambda >= 8");
    rep.slack_lower = config.slack_lower;
    rep.slack_upper = config.slack_upper;

    std::vector<double> alphas = config.alpha_grid;
    if (alphas.empty())
        for (double a = 0.05; a <= 1.0 + 1e-12; a += 0.05) alphas.push_back(a);
    std::vector<double> ts = config.t_grid;
    if (ts.empty()) {
        for (int i = 0; i < 8; ++i) ts.push_back(10.0 * std::pow(100.0, i / 7.0));
    }
    rep.t_grid = ts;

    PotentialSpec spec = PotentialSpec::fibonacci(lambda, 0.0);
    ProbabilityGrid grid;
    grid.alphas = alphas;
    grid.times = ts;
    grid.values.assign(alphas.size(), std::vector<double>(ts.size(), 0.0));

    struct Task {
        std::size_t a, i;
    };
    std::vector<Task> tasks;
    for (std::size_t a = 0; a < alphas.size(); ++a)
        for (std::size_t i = 0; i < ts.size(); ++i) tasks.push_back({a, i});
    parallel_for(tasks.size(), config.workers, [&](std::size_t j) {
        auto [a, i] = tasks[j];
        double T = ts[i];
        std::int64_t n = static_cast<std::int64_t>(std::ceil(std::pow(T, alphas[a]))) - 1;
        n = std::max<std::int64_t>(n, 1);
        double p = parseval_average(n, T, spec, Side::Right, config.quad_tol).value +
                   parseval_average(n, T, spec, Side::Left, config.quad_tol).value;
        grid.values[a][i] = p;
    });

    rep.averaged_profile = spreading_profile(grid);
    for (std::size_t a = 0; a < alphas.size(); ++a)
        rep.rows.push_back({alphas[a], rep.averaged_profile.s_minus[a],
                            rep.averaged_profile.s_plus[a]});

    rep.lower_ok =
        rep.constants.alpha_lower - config.slack_lower <= rep.averaged_profile.alpha_u_minus;
    rep.upper_ok =
        rep.averaged_profile.alpha_u_plus <= rep.constants.alpha_upper + config.slack_upper;

    for (double l : config.lambda_sweep) {
        CouplingConstants cc = coupling_constants(l);
        rep.product_sweep.emplace_back(l, cc.alpha_upper * std::log(l));
    }
    return rep;
}

}  // namespace qdx
