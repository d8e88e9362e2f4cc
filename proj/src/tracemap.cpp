#include "qdx/tracemap.hpp"

#include <algorithm>
#include <cmath>

namespace qdx {

double lambda_zero(double delta) {
    if (delta < 0.0) throw DomainError("lambda_zero needs delta >= 0");
    double u = 1.0 + delta;
    return std::sqrt(12.0 * u * u + 8.0 * u * u * u + 4.0);
}

// ---------------------------------------------------------------------------
// complex trace sequence
// ---------------------------------------------------------------------------

TraceState::TraceState(std::complex<double> z, int k_max, double lambda)
    : z_(z), lambda_(lambda), k_max_(k_max) {
    if (k_max < 0) throw DomainError("trace_sequence needs k_max >= 0");
    values_.reserve(static_cast<std::size_t>(k_max) + 2);
    values_.emplace_back(std::complex<double>{1.0, 0.0});
    values_.emplace_back(0.5 * z);
    if (k_max >= 1) values_.emplace_back(0.5 * (z - lambda));
    for (int j = 1; j < k_max; ++j) {
        const auto& a = values_[values_.size() - 1];
        const auto& b = values_[values_.size() - 2];
        const auto& c = values_[values_.size() - 3];
        values_.push_back(2.0 * (a * b) - c);
    }

    // one rounding step at magnitude M perturbs the invariant by ~ eps * M^2
    const double eps = 2.220446049250313e-16;
    const double quarter = 0.25 * lambda * lambda;
    drift_bound_.assign(static_cast<std::size_t>(std::max(0, k_max)), 0.0);
    double acc = 0.0;
    for (int j = 0; j < k_max; ++j) {
        double l2 = std::max({log2_abs(j + 1), log2_abs(j), log2_abs(j - 1)});
        double m2 = (l2 > 512.0) ? HUGE_VAL : std::exp2(2.0 * l2);
        acc += 16.0 * eps * std::max(1.0, m2) / quarter;
        drift_bound_[static_cast<std::size_t>(j)] = acc;
    }
    invariant_value_ = k_max >= 1 ? fricke_value_c(0).real() : quarter;
}

std::complex<double> TraceState::fricke_value_c(int j) const {
    if (j < 0 || j >= k_max_) throw DomainError("fricke level out of range");
    const auto& a = entry(j + 1);
    const auto& b = entry(j);
    const auto& c = entry(j - 1);
    scaled_complex i = a * a + b * b + c * c - 2.0 * (a * (b * c)) -
                       scaled_complex(std::complex<double>{1.0, 0.0});
    return i.to_complex();
}

double TraceState::fricke_relative_deviation(int j) const {
    double quarter = 0.25 * lambda_ * lambda_;
    return std::abs(fricke_value_c(j) - quarter) / quarter;
}

TraceState trace_sequence(std::complex<double> z, int k_max, double lambda) {
    return TraceState(z, k_max, lambda);
}

// ---------------------------------------------------------------------------
// real-axis band engine, templated on the working real type
// ---------------------------------------------------------------------------

namespace {

template <class Real>
struct RawBand {
    Real left, right, root;
    int m;
};

template <class Real>
class BandEngine {
public:
    BandEngine(double lambda, double delta) : lam_(Real(lambda)), thr_(Real(1) + Real(delta)) {}

    // x_k(E) in scaled arithmetic (exact through off-band escape)
    scaled_real<Real> eval(Real E, int k) const {
        scaled_real<Real> xm2(Real(1));         // x_{-1}
        scaled_real<Real> xm1(E / Real(2));     // x_0
        if (k == 0) return xm1;
        scaled_real<Real> x((E - lam_) / Real(2));  // x_1
        for (int j = 1; j < k; ++j) {
            scaled_real<Real> nxt = Real(2) * (x * xm1) - xm2;
            xm2 = xm1;
            xm1 = x;
            x = nxt;
        }
        return x;
    }

    int profile_m(Real E, int k) const {
        scaled_real<Real> xm2(Real(1));
        scaled_real<Real> xm1(E / Real(2));
        scaled_real<Real> one(Real(1));
        int m = scaled_real<Real>::cmp_abs(xm1, one) <= 0 ? 1 : 0;  // l = 0
        if (k == 1) return m;
        scaled_real<Real> x((E - lam_) / Real(2));
        for (int j = 1; j < k; ++j) {  // x holds x_j here, counted for l = j <= k-1
            if (scaled_real<Real>::cmp_abs(x, one) <= 0) ++m;
            scaled_real<Real> nxt = Real(2) * (x * xm1) - xm2;
            xm2 = xm1;
            xm1 = x;
            x = nxt;
        }
        return m;
    }

    std::vector<RawBand<Real>> level(int k, const std::vector<RawBand<Real>>* parents1,
                                     const std::vector<RawBand<Real>>* parents2) const {
        std::int64_t want = fibonacci(k);
        std::vector<std::pair<Real, Real>> regions;
        if (parents1 == nullptr) {
            regions.emplace_back(Real(-3) - lam_, Real(3) + lam_);
        } else {
            std::vector<std::pair<Real, Real>> iv;
            for (const auto& b : *parents1) iv.emplace_back(b.left, b.right);
            if (parents2 != nullptr)
                for (const auto& b : *parents2) iv.emplace_back(b.left, b.right);
            std::sort(iv.begin(), iv.end(), [](auto& p, auto& q) { return p.first < q.first; });
            for (const auto& p : iv) {
                if (!regions.empty() && p.first <= regions.back().second)
                    regions.back().second = std::max(regions.back().second, p.second);
                else
                    regions.push_back(p);
            }
        }

        int n0 = parents1 == nullptr ? static_cast<int>(4096 * std::max(1.0, double(lam_) / 8.0))
                                     : 64;
        std::vector<Real> roots;
        for (int attempt = 0; attempt <= 10; ++attempt) {
            roots.clear();
            for (const auto& [a0, b0] : regions) {
                Real pad = (b0 - a0) * Real(1e-9);
                Real a = a0 - pad, b = b0 + pad;
                Real prevE = a;
                int prevSign = eval(a, k).sign();
                for (int i = 1; i <= n0; ++i) {
                    Real E = a + (b - a) * Real(i) / Real(n0);
                    int s = eval(E, k).sign();
                    if (s * prevSign < 0) roots.push_back(bisect_root(prevE, E, k));
                    if (s != 0) {
                        prevSign = s;
                        prevE = E;
                    }
                }
            }
            if (static_cast<std::int64_t>(roots.size()) == want) break;
            n0 *= 2;
        }
        if (static_cast<std::int64_t>(roots.size()) != want)
            throw BandCountMismatch("level " + std::to_string(k) + ": found " +
                                    std::to_string(roots.size()) + " roots, expected " +
                                    std::to_string(want) +
                                    " (coupling below lambda_0 or scan exhausted)");
        std::sort(roots.begin(), roots.end());

        std::vector<RawBand<Real>> bands;
        bands.reserve(roots.size());
        for (std::size_t i = 0; i < roots.size(); ++i) {
            Real gap_l = i > 0 ? roots[i] - roots[i - 1] : Real(4);
            Real gap_r = i + 1 < roots.size() ? roots[i + 1] - roots[i] : Real(4);
            auto [l, r] = edges(roots[i], k, std::min(gap_l, gap_r));
            bands.push_back({l, r, roots[i], 0});
        }
        for (std::size_t i = 0; i < bands.size(); ++i) {
            if (!(bands[i].left < bands[i].root && bands[i].root < bands[i].right))
                throw BandCountMismatch("level " + std::to_string(k) +
                                        ": band does not bracket its root");
            if (i > 0 && !(bands[i - 1].right < bands[i].left))
                throw BandCountMismatch("level " + std::to_string(k) + ": bands overlap");
        }
        return bands;
    }

    std::vector<RawBand<Real>> build(int k) const {
        std::vector<RawBand<Real>> prev2, prev1;
        for (int j = 1; j <= k; ++j) {
            std::vector<RawBand<Real>> cur =
                j <= 2 ? level(j, nullptr, nullptr) : level(j, &prev1, &prev2);
            prev2 = std::move(prev1);
            prev1 = std::move(cur);
        }
        for (auto& b : prev1) b.m = profile_m(b.root, k);
        return prev1;
    }

private:
    Real bisect_root(Real a, Real b, int k) const {
        int sa = eval(a, k).sign();
        for (int it = 0; it < 40000; ++it) {
            Real m = (a + b) / Real(2);
            if (m == a || m == b) break;
            int sm = eval(m, k).sign();
            if (sm == sa && sm != 0)
                a = m;
            else
                b = m;
        }
        return (a + b) / Real(2);
    }

    // first |x_k| = thr crossing on each side: derivative-scaled march, then bisection
    std::pair<Real, Real> edges(Real root, int k, Real cap) const {
        Real hw0 = half_width_estimate(root, k);
        if (!(hw0 > Real(0)) || hw0 > cap) hw0 = cap / Real(64);
        Real lo = root, hi = root;
        for (int dir = 0; dir < 2; ++dir) {
            Real sgn = dir == 0 ? Real(-1) : Real(1);
            Real h = hw0 / Real(4);
            Real prev = root;
            Real cur = root + sgn * h;
            int steps = 0;
            while (inside(cur, k)) {
                prev = cur;
                if (++steps % 8 == 0) h *= Real(2);
                cur = cur + sgn * h;
                if (real_traits<Real>::fabs(cur - root) > cap) break;
            }
            Real e = bisect_edge(prev, cur, k);
            (dir == 0 ? lo : hi) = e;
        }
        return {lo, hi};
    }

    bool inside(Real E, int k) const {
        return scaled_real<Real>::cmp_abs(eval(E, k), scaled_real<Real>(thr_)) <= 0;
    }

    Real bisect_edge(Real in, Real out, int k) const {
        Real a = in, b = out;  // |x(a)| <= thr < |x(b)| (or b capped; bisection still lands on edge)
        for (int it = 0; it < 40000; ++it) {
            Real m = (a + b) / Real(2);
            if (m == a || m == b) break;
            if (inside(m, k))
                a = m;
            else
                b = m;
        }
        return (a + b) / Real(2);
    }

    Real half_width_estimate(Real root, int k) const {
        // |x_k'| via the derivative recursion
        scaled_real<Real> xm2(Real(1)), xm1(root / Real(2));
        scaled_real<Real> dm2(Real(0)), dm1(Real(0.5));
        if (k == 0) return Real(2) * thr_;
        scaled_real<Real> x((root - lam_) / Real(2)), d(Real(0.5));
        for (int j = 1; j < k; ++j) {
            scaled_real<Real> nx = Real(2) * (x * xm1) - xm2;
            scaled_real<Real> nd = Real(2) * ((d * xm1) + (x * dm1)) - dm2;
            xm2 = xm1; xm1 = x; x = nx;
            dm2 = dm1; dm1 = d; d = nd;
        }
        if (d.is_zero()) return Real(0);
        double log_hw = std::log(static_cast<double>(thr_)) - d.log_abs();
        if (log_hw > 300.0) return Real(0);
        return static_cast<Real>(std::exp(log_hw));
    }

    Real lam_;
    Real thr_;
};

// conservative escalation rule: smallest conceivable width S_u^{-floor(2k/3)} vs
// long-double grid resolution near the spectrum's right end
bool needs_quad_precision(double lambda, int k) {
    double su = 2.0 * lambda + 22.0;
    double floor_log = -std::floor(2.0 * k / 3.0) * std::log(su);
    double ulp = (lambda + 3.0) * static_cast<double>(real_traits<long double>::eps());
    return floor_log < std::log(4096.0 * ulp);
}

template <class Real>
BandSet to_band_set(const std::vector<RawBand<Real>>& raw, int k, double delta, double lambda) {
    BandSet out;
    out.k = k;
    out.delta = delta;
    out.lambda = lambda;
    out.bands.reserve(raw.size());
    for (const auto& b : raw) {
        Band bd;
        bd.left = static_cast<double>(b.left);
        bd.right = static_cast<double>(b.right);
        bd.root = static_cast<double>(b.root);
        bd.m = b.m;
        bd.width = static_cast<double>(b.right - b.left);
        out.bands.push_back(bd);
    }
    return out;
}

template <class Real>
std::vector<RawBand<Real>> build_raw(double lambda, double delta, int k) {
    return BandEngine<Real>(lambda, delta).build(k);
}

void check_band_preconditions(int k, double delta, double lambda) {
    if (k < 1) throw DomainError("band level must be >= 1");
    if (delta < 0.0) throw DomainError("delta must be >= 0");
    if (!(lambda > lambda_zero(delta)))
        throw DomainError("coupling must exceed lambda_0(delta) = " +
                          std::to_string(lambda_zero(delta)));
}

}  // namespace

BandSet real_bands(int k, double delta, double lambda) {
    check_band_preconditions(k, delta, lambda);
    if (needs_quad_precision(lambda, k))
        return to_band_set(build_raw<__float128>(lambda, delta, k), k, delta, lambda);
    return to_band_set(build_raw<long double>(lambda, delta, k), k, delta, lambda);
}

std::vector<std::pair<double, int>> root_profiles(int k, double lambda) {
    try {
        BandSet bs = real_bands(k, 0.0, lambda);
        std::vector<std::pair<double, int>> out;
        out.reserve(bs.bands.size());
        for (const auto& b : bs.bands) out.emplace_back(b.root, b.m);
        return out;
    } catch (const BandCountMismatch& e) {
        throw RootCountMismatch(e.what());
    }
}

std::map<int, std::int64_t> c_histogram(int k, double lambda) {
    if (k < 2) throw DomainError("c_histogram needs k >= 2");
    std::map<int, std::int64_t> h;
    for (const auto& [root, m] : root_profiles(k, lambda)) ++h[m];
    return h;
}

BandScaling band_scaling(int k, double delta, double lambda) {
    if (k < 3) throw DomainError("band_scaling needs k >= 3");
    BandSet bs = real_bands(k, delta, lambda);
    BandScaling r;
    std::size_t n = bs.bands.size();
    r.m_values.reserve(n);
    r.log_widths.reserve(n);
    double sm = 0.0, sw = 0.0;
    for (const auto& b : bs.bands) {
        r.m_values.push_back(b.m);
        r.log_widths.push_back(std::log(b.width));
        sm += b.m;
        sw += r.log_widths.back();
    }
    double mm = sm / static_cast<double>(n), mw = sw / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = r.m_values[i] - mm, dy = r.log_widths[i] - mw;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw DegenerateFit("all bands share one m value");
    r.slope = sxy / sxx;
    r.intercept = mw - r.slope * mm;
    r.correlation = sxy / std::sqrt(sxx * syy);
    r.residuals.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        r.residuals.push_back(r.log_widths[i] - (r.intercept + r.slope * r.m_values[i]));
    return r;
}

namespace {

template <class Real>
BoxDimension box_dimension_impl(double lambda, int k, double delta) {
    auto raw = build_raw<Real>(lambda, delta, k);
    Real lo = raw.front().left, hi = raw.back().right;
    Real diam = hi - lo;
    Real wmin = raw.front().right - raw.front().left;
    for (const auto& b : raw) wmin = std::min(wmin, b.right - b.left);

    std::int64_t fk = fibonacci(k);
    BoxDimension out;
    Real eps = diam / Real(4);
    std::vector<std::pair<double, double>> pts;  // (log 1/eps, log count)
    double log_eps = std::log(static_cast<double>(diam)) - std::log(4.0);
    while (eps >= wmin / Real(2)) {
        __int128 last = -1;
        bool have_last = false;
        std::int64_t count = 0;
        for (const auto& b : raw) {
            auto j0 = static_cast<__int128>((b.left - lo) / eps);
            auto j1 = static_cast<__int128>((b.right - lo) / eps);
            if (have_last && j0 <= last) j0 = last + 1;
            if (j1 >= j0) {
                count += static_cast<std::int64_t>(j1 - j0) + 1;
                last = j1;
                have_last = true;
            }
        }
        if (count >= 8 && count <= fk / 2) {
            pts.emplace_back(-log_eps, std::log(static_cast<double>(count)));
            if (out.scales_used == 0) out.eps_max = std::exp(log_eps);
            out.eps_min = std::exp(log_eps);
            ++out.scales_used;
        }
        eps = eps / Real(2);
        log_eps -= 0.6931471805599453;
    }
    if (pts.size() < 4)
        throw DegenerateFit("box dimension: only " + std::to_string(pts.size()) +
                            " usable scales (need 4)");
    double mx = 0.0, my = 0.0;
    for (auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (auto& [x, y] : pts) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    out.estimate = sxy / sxx;
    out.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    out.fit_points = std::move(pts);
    return out;
}

}  // namespace

BoxDimension box_dimension(double lambda, int k, double delta) {
    check_band_preconditions(k, delta, lambda);
    if (needs_quad_precision(lambda, k)) return box_dimension_impl<__float128>(lambda, k, delta);
    return box_dimension_impl<long double>(lambda, k, delta);
}

}  // namespace qdx
