#include "qdx/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "qdx/bessel.hpp"
#include "qdx/quadrature.hpp"

namespace qdx {

namespace {

constexpr std::complex<double> kPhase[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};  // (-i)^m

// Chebyshev coefficients c_m = (2 - delta_{m0}) (-i)^m J_m(x) truncated at the first
// sustained drop below `cut`; returns |c| magnitudes and the tail bound.
struct ChebCoeffs {
    std::vector<double> j;  // J_0 .. J_M
    int order = 0;
    double tail = 0.0;
};

ChebCoeffs chebyshev_coefficients(double x, double cut) {
    int m0 = static_cast<int>(std::ceil(std::exp(1.0) * x / 2.0)) + 40;
    int probe = m0 + 64;
    std::vector<double> j = bessel_j_array(x, probe);
    int order = -1;
    int run = 0;
    for (int m = std::max(2, static_cast<int>(std::ceil(x))); m <= probe; ++m) {
        if (std::fabs(2.0 * j[static_cast<std::size_t>(m)]) < cut) {
            if (++run == 3) {
                order = m - 2;
                break;
            }
        } else {
            run = 0;
        }
    }
    if (order < 0) order = probe;  // cut never reached; tail bound reports the damage
    double tail = 0.0;
    for (int m = order + 1; m <= probe; ++m) tail += std::fabs(2.0 * j[static_cast<std::size_t>(m)]);
    // beyond the probe window the terms decay faster than geometrically
    tail += std::fabs(2.0 * j[static_cast<std::size_t>(probe)]);
    ChebCoeffs c;
    j.resize(static_cast<std::size_t>(order) + 1);
    c.j = std::move(j);
    c.order = order;
    c.tail = tail;
    return c;
}

}  // namespace

WavePacket evolve(const PotentialSpec& spec, double t, const EvolveOptions& opt) {
    if (t < 0.0) throw DomainError("evolve needs t >= 0");
    if (!(opt.tol > 0.0) || opt.tol > 1e-6) throw DomainError("evolve tol must lie in (0, 1e-6]");
    double k = spectral_bound(spec);
    double x = k * t;
    double cut = std::min(opt.tol * 1e-3, 1e-12);

    if (t == 0.0) {
        WavePacket w;
        w.t = 0.0;
        w.window = LatticeWindow(0, 0);
        w.window.at(0) = 1.0;
        return w;
    }

    ChebCoeffs cheb = chebyshev_coefficients(x, cut);
    std::int64_t radius = cheb.order;
    if (radius > opt.window_cap)
        throw TolUnreachable("evolution window of " + std::to_string(radius) +
                             " sites exceeds the cap");

    std::size_t size = static_cast<std::size_t>(2 * radius + 1);
    std::vector<double> vk(size);
    for (std::int64_t n = -radius; n <= radius; ++n)
        vk[static_cast<std::size_t>(n + radius)] = potential_value(spec, n) / k;
    double invk = 1.0 / k;

    std::vector<std::complex<double>> prev(size), cur(size), next(size), psi(size);
    prev[static_cast<std::size_t>(radius)] = 1.0;  // phi_0 = delta_0
    // phi_1 = (H/K) delta_0
    cur[static_cast<std::size_t>(radius)] = vk[static_cast<std::size_t>(radius)];
    if (radius >= 1) {
        cur[static_cast<std::size_t>(radius - 1)] = invk;
        cur[static_cast<std::size_t>(radius + 1)] = invk;
    }
    for (std::size_t i = 0; i < size; ++i)
        psi[i] = cheb.j[0] * prev[i] + (2.0 * cheb.j[1]) * kPhase[1] * cur[i];

    std::int64_t r = 1;
    for (int m = 2; m <= cheb.order; ++m) {
        r = std::min<std::int64_t>(r + 1, radius);
        std::size_t lo = static_cast<std::size_t>(radius - r), hi = static_cast<std::size_t>(radius + r);
        for (std::size_t i = lo; i <= hi; ++i) {
            std::complex<double> h = vk[i] * cur[i];
            if (i > 0) h += invk * cur[i - 1];
            if (i + 1 < size) h += invk * cur[i + 1];
            next[i] = 2.0 * h - prev[i];
        }
        std::complex<double> cm = (2.0 * cheb.j[static_cast<std::size_t>(m)]) * kPhase[m % 4];
        for (std::size_t i = lo; i <= hi; ++i) psi[i] += cm * next[i];
        std::swap(prev, cur);
        std::swap(cur, next);
    }

    WavePacket w;
    w.t = t;
    w.window = LatticeWindow(-radius, radius);
    w.window.amplitudes = std::move(psi);
    w.truncation_bound = cheb.tail;
    w.norm_defect = std::fabs(w.window.norm_squared() - 1.0);
    return w;
}

// ---------------------------------------------------------------------------
// stepping propagator
// ---------------------------------------------------------------------------

Evolver::Evolver(const PotentialSpec& spec, double t_max, double step_tol, std::int64_t window_cap)
    : spec_(spec), step_tol_(step_tol) {
    k_ = spectral_bound(spec);
    inv_k_ = 1.0 / k_;
    cap_radius_ = static_cast<std::int64_t>(std::ceil(k_ * t_max)) + 256;
    if (cap_radius_ > window_cap)
        throw TolUnreachable("stepping window of " + std::to_string(cap_radius_) +
                             " sites exceeds the cap");
    std::size_t size = static_cast<std::size_t>(2 * cap_radius_ + 1);
    psi_.assign(size, {0.0, 0.0});
    tmp0_.assign(size, {0.0, 0.0});
    tmp1_.assign(size, {0.0, 0.0});
    tmp2_.assign(size, {0.0, 0.0});
    psi_[static_cast<std::size_t>(cap_radius_)] = 1.0;
    vk_.resize(size);
    for (std::int64_t n = -cap_radius_; n <= cap_radius_; ++n)
        vk_[static_cast<std::size_t>(n + cap_radius_)] = potential_value(spec, n) / k_;
}

void Evolver::apply_h(const std::vector<std::complex<double>>& in,
                      std::vector<std::complex<double>>& out, std::int64_t r) const {
    std::size_t lo = static_cast<std::size_t>(cap_radius_ - r);
    std::size_t hi = static_cast<std::size_t>(cap_radius_ + r);
    for (std::size_t i = lo; i <= hi; ++i) {
        std::complex<double> h = vk_[i] * in[i];
        if (i > 0) h += inv_k_ * in[i - 1];
        if (i + 1 < vk_.size()) h += inv_k_ * in[i + 1];
        out[i] = h;
    }
}

void Evolver::step_to(double t) {
    if (t < t_ - 1e-12) throw DomainError("Evolver cannot step backwards");
    double dt = t - t_;
    t_ = t;
    if (dt <= 0.0) return;
    double x = k_ * dt;
    ChebCoeffs cheb = chebyshev_coefficients(x, step_tol_);

    std::int64_t r_target = std::min(active_ + cheb.order, cap_radius_);
    std::size_t lo = static_cast<std::size_t>(cap_radius_ - r_target);
    std::size_t hi = static_cast<std::size_t>(cap_radius_ + r_target);

    // tmp0 = phi_0 = psi, tmp1 = phi_1 = (H/K) psi
    std::copy(psi_.begin() + static_cast<std::ptrdiff_t>(lo),
              psi_.begin() + static_cast<std::ptrdiff_t>(hi + 1),
              tmp0_.begin() + static_cast<std::ptrdiff_t>(lo));
    apply_h(tmp0_, tmp1_, r_target);
    for (std::size_t i = lo; i <= hi; ++i)
        psi_[i] = cheb.j[0] * tmp0_[i] + (2.0 * cheb.j[1]) * kPhase[1] * tmp1_[i];
    for (int m = 2; m <= cheb.order; ++m) {
        apply_h(tmp1_, tmp2_, r_target);
        for (std::size_t i = lo; i <= hi; ++i) tmp2_[i] = 2.0 * tmp2_[i] - tmp0_[i];
        std::complex<double> cm = (2.0 * cheb.j[static_cast<std::size_t>(m)]) * kPhase[m % 4];
        for (std::size_t i = lo; i <= hi; ++i) psi_[i] += cm * tmp2_[i];
        std::swap(tmp0_, tmp1_);
        std::swap(tmp1_, tmp2_);
    }

    // trim the active range back to the numerically supported packet
    const double clip = 1e-18;
    std::int64_t act = r_target;
    while (act > 0 &&
           std::abs(psi_[static_cast<std::size_t>(cap_radius_ - act)]) < clip &&
           std::abs(psi_[static_cast<std::size_t>(cap_radius_ + act)]) < clip)
        --act;
    active_ = act;
}

double Evolver::outside_probability(std::int64_t N, Side side) const {
    double s = 0.0;
    if (side == Side::Right) {
        for (std::int64_t n = std::max(N, -active_); n <= active_; ++n)
            s += std::norm(psi_[static_cast<std::size_t>(cap_radius_ + n)]);
    } else {
        for (std::int64_t n = std::max(N, -active_); n <= active_; ++n)
            s += std::norm(psi_[static_cast<std::size_t>(cap_radius_ - n)]);
    }
    return s;
}

double Evolver::outside_probability_both(std::int64_t N) const {
    double s = outside_probability(N, Side::Right) + outside_probability(N, Side::Left);
    if (N == 0) s -= std::norm(psi_[static_cast<std::size_t>(cap_radius_)]);
    return s;
}

double Evolver::moment(double p) const {
    double s = 0.0;
    for (std::int64_t n = 1; n <= active_; ++n) {
        double w = std::pow(static_cast<double>(n), p);
        s += w * (std::norm(psi_[static_cast<std::size_t>(cap_radius_ + n)]) +
                  std::norm(psi_[static_cast<std::size_t>(cap_radius_ - n)]));
    }
    return s;
}

double Evolver::norm_squared() const {
    double s = 0.0;
    for (std::int64_t n = -active_; n <= active_; ++n)
        s += std::norm(psi_[static_cast<std::size_t>(cap_radius_ + n)]);
    return s;
}

std::complex<double> Evolver::amplitude(std::int64_t n) const {
    if (n < -cap_radius_ || n > cap_radius_) return {0.0, 0.0};
    return psi_[static_cast<std::size_t>(cap_radius_ + n)];
}

// ---------------------------------------------------------------------------
// functionals of a wavepacket
// ---------------------------------------------------------------------------

double outside_probability(const WavePacket& psi, std::int64_t N, ProbabilitySide side) {
    if (N < 0) throw DomainError("outside_probability needs N >= 0");
    const auto& w = psi.window;
    double right = 0.0, left = 0.0;
    if (side != ProbabilitySide::Left)
        for (std::int64_t n = std::max(N, w.left); n <= w.right; ++n)
            right += std::norm(w.value(n));
    if (side != ProbabilitySide::Right)
        for (std::int64_t n = std::max(N, -w.right); n <= -w.left; ++n)
            left += std::norm(w.value(-n));
    switch (side) {
        case ProbabilitySide::Right: return right;
        case ProbabilitySide::Left: return left;
        case ProbabilitySide::Both: {
            double s = left + right;
            if (N == 0) s -= std::norm(w.value(0));
            return s;
        }
    }
    return 0.0;
}

MomentResult moment(const WavePacket& psi, double p) {
    if (!(p > 0.0)) throw DomainError("moment needs p > 0");
    MomentResult r;
    const auto& w = psi.window;
    for (std::int64_t n = w.left; n <= w.right; ++n) {
        if (n == 0) continue;
        r.value += std::pow(std::fabs(static_cast<double>(n)), p) * std::norm(w.value(n));
    }
    double edge = static_cast<double>(std::max(std::llabs(w.left), std::llabs(w.right)));
    r.truncation_term =
        psi.truncation_bound * psi.truncation_bound * std::pow(2.0 * edge + 1.0, p);
    return r;
}

// ---------------------------------------------------------------------------
// exponential time averaging
// ---------------------------------------------------------------------------

namespace {

// integral_0^D e^{-c u} u^j du for j = 0,1,2, series-stabilized for small cD
void weight_moments(double c, double d, double out[3]) {
    double w = c * d;
    if (w < 1e-3) {
        out[0] = d * (1.0 - w / 2 + w * w / 6 - w * w * w / 24);
        out[1] = d * d * (0.5 - w / 3 + w * w / 8 - w * w * w / 30);
        out[2] = d * d * d * (1.0 / 3 - w / 4 + w * w / 10 - w * w * w / 36);
    } else {
        double e = std::exp(-w);
        out[0] = (1.0 - e) / c;
        out[1] = (1.0 - (1.0 + w) * e) / (c * c);
        out[2] = (2.0 - (2.0 + 2.0 * w + w * w) * e) / (c * c * c);
    }
}

double weighted_integral(const std::vector<std::pair<double, double>>& s, double c) {
    double total = 0.0;
    std::size_t i = 0;
    while (i + 1 < s.size()) {
        if (i + 2 < s.size()) {
            // quadratic through three consecutive samples, exact weight moments
            double t0 = s[i].first, t1 = s[i + 1].first, t2 = s[i + 2].first;
            double f0 = s[i].second, f1 = s[i + 1].second, f2 = s[i + 2].second;
            double d1 = t1 - t0, d2 = t2 - t0;
            if (!(d1 > 0.0 && d2 > d1)) throw GridTooCoarse("time grid not strictly increasing");
            double g = ((f2 - f0) / d2 - (f1 - f0) / d1) / (d2 - d1);
            double b = (f1 - f0) / d1 - g * d1;
            double m[3];
            weight_moments(c, d2, m);
            total += std::exp(-c * t0) * (f0 * m[0] + b * m[1] + g * m[2]);
            i += 2;
        } else {
            double t0 = s[i].first, t1 = s[i + 1].first;
            double f0 = s[i].second, f1 = s[i + 1].second;
            double d1 = t1 - t0;
            if (!(d1 > 0.0)) throw GridTooCoarse("time grid not strictly increasing");
            double b = (f1 - f0) / d1;
            double m[3];
            weight_moments(c, d1, m);
            total += std::exp(-c * t0) * (f0 * m[0] + b * m[1]);
            i += 1;
        }
    }
    return total;
}

}  // namespace

TimeAverage time_average(const std::vector<std::pair<double, double>>& samples, double T,
                         double rel_tol) {
    if (!(T > 0.0)) throw DomainError("time_average needs T > 0");
    if (samples.size() < 5) throw GridTooCoarse("need at least 5 samples");
    if (samples.front().first > 1e-9 * T)
        throw GridTooCoarse("grid must start at t = 0");
    if (samples.back().first < 20.0 * T * (1.0 - 1e-12))
        throw GridTooCoarse("grid must cover [0, 20T]");

    double c = 2.0 / T;
    double full = weighted_integral(samples, c) * (2.0 / T);

    std::vector<std::pair<double, double>> coarse;
    coarse.reserve(samples.size() / 2 + 2);
    for (std::size_t i = 0; i < samples.size(); i += 2) coarse.push_back(samples[i]);
    if (coarse.back().first != samples.back().first) coarse.push_back(samples.back());
    double half = weighted_integral(coarse, c) * (2.0 / T);

    double sup = 0.0;
    for (const auto& [t, f] : samples) sup = std::max(sup, std::fabs(f));

    TimeAverage out;
    out.value = full;
    out.error_estimate = std::fabs(full - half);
    out.tail_bound = std::exp(-40.0) * sup;
    if (out.error_estimate + out.tail_bound > rel_tol * std::fabs(out.value))
        throw GridTooCoarse("time average error " + std::to_string(out.error_estimate) +
                            " above " + std::to_string(rel_tol) + " relative");
    return out;
}

std::vector<double> averaging_grid(double T, int points_per_decade, double linear_step) {
    if (!(T > 0.0)) throw DomainError("averaging_grid needs T > 0");
    double h = linear_step > 0.0 ? linear_step : T / 512.0;
    std::vector<double> g;
    for (double t = 0.0; t < T; t += h) g.push_back(t);
    double factor = std::pow(10.0, 1.0 / points_per_decade);
    for (double t = T; t < 20.0 * T; t *= factor) g.push_back(t);
    g.push_back(20.0 * T);
    return g;
}

// ---------------------------------------------------------------------------
// resolvent
// ---------------------------------------------------------------------------

namespace {

std::int64_t resolvent_padding(std::complex<double> z, const PotentialSpec& spec, double tol) {
    double k = spectral_bound(spec);
    double s = spec.sup_norm();
    double im = std::fabs(z.imag());
    if (im > 0.0) return static_cast<std::int64_t>(std::ceil((2.0 * k / im) * std::log(1.0 / tol)));
    double d = 0.0;
    if (z.real() > 2.0 + s) d = z.real() - (2.0 + s);
    if (z.real() < -(2.0 + s)) d = -(2.0 + s) - z.real();
    if (d <= 0.0)
        throw DomainError("resolvent_vector needs Im z > 0 or real z outside the spectrum");
    return static_cast<std::int64_t>(std::ceil((2.0 * k / d) * std::log(1.0 / tol)));
}

}  // namespace

ResolventVector resolvent_vector(std::complex<double> z, const PotentialSpec& spec,
                                 std::int64_t radius, const ResolventOptions& opt) {
    if (radius < 1) throw DomainError("resolvent_vector needs radius >= 1");
    std::int64_t pad = resolvent_padding(z, spec, opt.tol);
    std::int64_t box = radius + pad;
    if (box > opt.box_cap)
        throw BoxCapExceeded("resolvent box half-width " + std::to_string(box) +
                             " exceeds the cap (imaginary part too small for desk scale)");

    // decaying-ratio recursions from the box boundary inward
    std::vector<std::complex<double>> rho(static_cast<std::size_t>(box) + 1);
    std::complex<double> r{0.0, 0.0};
    for (std::int64_t n = box; n >= 1; --n) {
        r = 1.0 / ((z - potential_value(spec, n)) - r);
        rho[static_cast<std::size_t>(n)] = r;  // u(n)/u(n-1)
    }
    std::vector<std::complex<double>> sig(static_cast<std::size_t>(box) + 1);
    std::complex<double> sl{0.0, 0.0};
    for (std::int64_t n = box; n >= 1; --n) {
        sl = 1.0 / ((z - potential_value(spec, -n)) - sl);
        sig[static_cast<std::size_t>(n)] = sl;  // u(-n)/u(-n+1)
    }

    std::complex<double> u0 = 1.0 / ((potential_value(spec, 0) - z) + rho[1] + sig[1]);

    ResolventVector out;
    out.z = z;
    out.window = LatticeWindow(-radius, radius);
    out.window.at(0) = u0;
    std::complex<double> u = u0;
    for (std::int64_t n = 1; n <= radius; ++n) {
        u *= rho[static_cast<std::size_t>(n)];
        out.window.at(n) = u;
    }
    u = u0;
    for (std::int64_t n = 1; n <= radius; ++n) {
        u *= sig[static_cast<std::size_t>(n)];
        out.window.at(-n) = u;
    }

    double res2 = 0.0;
    for (std::int64_t n = -(radius - 1); n <= radius - 1; ++n) {
        std::complex<double> lhs = out.window.value(n + 1) + out.window.value(n - 1) +
                                   (potential_value(spec, n) - z) * out.window.value(n);
        if (n == 0) lhs -= 1.0;
        res2 += std::norm(lhs);
    }
    out.residual = std::sqrt(res2);
    return out;
}

// ---------------------------------------------------------------------------
// Parseval-form average
// ---------------------------------------------------------------------------

// sum_{n >= N} |u(n)|^2 at z = E + i*eps via one-sided ratio recursion
double resolvent_tail_sum(double E, double eps, const PotentialSpec& spec, std::int64_t N,
                          Side side, std::int64_t box) {
    std::complex<double> z{E, eps};
    int sgn = side == Side::Right ? 1 : -1;

    std::vector<std::complex<double>> ratio(static_cast<std::size_t>(box) + 1);
    std::complex<double> r{0.0, 0.0};
    for (std::int64_t n = box; n >= 1; --n) {
        r = 1.0 / ((z - potential_value(spec, sgn * n)) - r);
        ratio[static_cast<std::size_t>(n)] = r;
    }
    std::complex<double> other{0.0, 0.0};
    for (std::int64_t n = box; n >= 1; --n)
        other = 1.0 / ((z - potential_value(spec, -sgn * n)) - other);

    std::complex<double> u = 1.0 / ((potential_value(spec, 0) - z) + ratio[1] + other);
    double sum = 0.0;
    int below = 0;
    for (std::int64_t n = 1; n <= box; ++n) {
        u *= ratio[static_cast<std::size_t>(n)];
        if (n >= N) {
            double a = std::norm(u);
            sum += a;
            if (a < 1e-16 * sum)
                ++below;
            else
                below = 0;
            if (below > 64) break;
        }
    }
    return sum;
}

namespace {

// off-spectrum decaying ratio magnitude at distance d from the spectrum interval
double offspectrum_ratio(double d) {
    double v = 2.0 + d;
    return 0.5 * (v - std::sqrt(v * v - 4.0));
}

}  // namespace

ParsevalResult parseval_average(std::int64_t N, double T, const PotentialSpec& spec, Side side,
                                double quad_tol) {
    if (N < 1) throw DomainError("parseval_average needs N >= 1");
    if (!(T > 0.0)) throw DomainError("parseval_average needs T > 0");
    double k = spectral_bound(spec);
    double eps = 1.0 / T;
    std::int64_t box =
        N + static_cast<std::int64_t>(std::ceil((2.0 * k / eps) * std::log(1e10))) + 64;

    auto f = [&](double e) { return resolvent_tail_sum(e, eps, spec, N, side, box); };
    QuadratureOptions qopt;
    qopt.rel_tol = quad_tol;
    QuadratureResult q = integrate(f, -k - 2.0, k + 2.0, qopt);

    // |E| > K+2 tail: |u| <= q(d)^n envelope with d = |E| - (2 + sup_norm) >= measured gap
    double s = spec.sup_norm();
    double tail = 0.0;
    {
        int steps = 64;
        double emax = k + 44.0;
        double h = (emax - (k + 2.0)) / steps;
        for (int i = 0; i < steps; ++i) {
            double e = k + 2.0 + (i + 0.5) * h;
            double d = e - (2.0 + s);
            double qq = offspectrum_ratio(d);
            double val = std::pow(qq, 2.0 * static_cast<double>(N)) /
                         (d * d * (1.0 - qq * qq));
            tail += 2.0 * val * h;  // both signs of E
        }
        double dmax = emax - (2.0 + s);
        double qmax = offspectrum_ratio(dmax);
        tail += 2.0 * std::pow(qmax, 2.0 * static_cast<double>(N)) / dmax;
    }

    ParsevalResult out;
    out.value = q.value / (M_PI * T);
    out.quadrature_error = q.error_estimate / (M_PI * T);
    out.tail_bound = tail / (M_PI * T);
    out.evaluations = q.evaluations;
    return out;
}

}  // namespace qdx
