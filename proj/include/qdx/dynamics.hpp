#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "qdx/lattice.hpp"
#include "qdx/transfer.hpp"

namespace qdx {

// e^{-itH} delta_0 sampled on a finite window, with certificates: norm_defect is
// | ||psi||^2 - 1 |, truncation_bound bounds the l2 mass the computation may have
// misplaced (Chebyshev tail; the window itself contains the full polynomial support).
struct WavePacket {
    double t = 0.0;
    LatticeWindow window;
    double norm_defect = 0.0;
    double truncation_bound = 0.0;
};

struct EvolveOptions {
    double tol = 1e-8;                  // certification target; must be <= 1e-6
    std::int64_t window_cap = 10'000'000;  // sites per side
};

// Chebyshev expansion of e^{-itH} in the rescaled operator H/K: coefficients
// (2 - delta_{m0})(-i)^m J_m(K t), truncated when they fall below
// min(tol*1e-3, 1e-12); window radius equals the expansion order, so the
// polynomial support is computed exactly. Throws TolUnreachable past window_cap.
WavePacket evolve(const PotentialSpec& spec, double t, const EvolveOptions& opt = {});

// In-place stepping propagator for dense time series. The active range is trimmed
// to the numerically supported packet after each step (clip 1e-18), keeping the
// cost ballistic rather than order-times-steps.
class Evolver {
public:
    Evolver(const PotentialSpec& spec, double t_max, double step_tol = 1e-15,
            std::int64_t window_cap = 10'000'000);

    void step_to(double t);  // t must be >= current time
    double time() const { return t_; }

    double outside_probability(std::int64_t N, Side side) const;
    double outside_probability_both(std::int64_t N) const;
    double moment(double p) const;
    double norm_squared() const;
    std::complex<double> amplitude(std::int64_t n) const;

private:
    void apply_h(const std::vector<std::complex<double>>& in,
                 std::vector<std::complex<double>>& out, std::int64_t r) const;

    PotentialSpec spec_;
    double inv_k_;
    double k_;
    double step_tol_;
    double t_ = 0.0;
    std::int64_t cap_radius_;
    std::int64_t active_ = 0;  // amplitudes live on [-active_, active_]
    std::vector<std::complex<double>> psi_, tmp0_, tmp1_, tmp2_;
    std::vector<double> vk_;  // V(n)/K over the full window
};

// P_r(N,t) = sum_{n>=N} |psi(n)|^2, P_l likewise for n <= -N. Both sides at N = 0
// count the origin once: P_l + P_r - |psi(0)|^2.
enum class ProbabilitySide { Right, Left, Both };
double outside_probability(const WavePacket& psi, std::int64_t N, ProbabilitySide side);

struct MomentResult {
    double value = 0.0;
    double truncation_term = 0.0;  // ballistic-envelope bound on the missing tail
};
MomentResult moment(const WavePacket& psi, double p);

struct TimeAverage {
    double value = 0.0;
    double error_estimate = 0.0;  // grid-refinement estimate
    double tail_bound = 0.0;      // e^{-40} * sup|f| beyond 20T
};

// <f>(T) = (2/T) integral_0^inf e^{-2t/T} f(t) dt from samples on [0, 20T]:
// piecewise-quadratic interpolation integrated exactly against the weight
// (so constants, t and t^2 are reproduced to roundoff). GridTooCoarse when the
// refinement estimate exceeds rel_tol * value.
TimeAverage time_average(const std::vector<std::pair<double, double>>& samples, double T,
                         double rel_tol = 1e-6);

// default sampling grid: linear fill on [0, T], then 64 points/decade up to 20T
std::vector<double> averaging_grid(double T, int points_per_decade = 64, double linear_step = 0.0);

struct ResolventVector {
    std::complex<double> z;
    LatticeWindow window;   // u(n) = <(H - z)^{-1} delta_0, delta_n> on |n| <= radius
    double residual = 0.0;  // ||(H - z)u - delta_0|| over the window interior
};

struct ResolventOptions {
    double tol = 1e-12;             // boundary-contamination target
    std::int64_t box_cap = 50'000'000;  // total half-width cap
};

// Tridiagonal solve by two-sided decaying-ratio recursion on a box of half-width
// radius + padding, padding = ceil((2K/|Im z|) ln(1/tol)) (or the off-spectrum
// analogue for real z). Throws BoxCapExceeded when the box would pass the cap.
ResolventVector resolvent_vector(std::complex<double> z, const PotentialSpec& spec,
                                 std::int64_t radius, const ResolventOptions& opt = {});

// sum over the chosen side of |<(H - E - i eps)^{-1} d_0, d_n>|^2 for |n| >= N,
// truncated once the terms stop contributing; box is the recursion depth
double resolvent_tail_sum(double E, double eps, const PotentialSpec& spec, std::int64_t N,
                          Side side, std::int64_t box);

struct ParsevalResult {
    double value = 0.0;
    double quadrature_error = 0.0;
    double tail_bound = 0.0;  // certified bound on the |E| > K+2 contribution
    int evaluations = 0;
};

// <P_side(N,.)>(T) = (1/(pi T)) integral sum_{side} |u_{E+i/T}(n)|^2 dE, evaluated
// over [-K-2, K+2] by adaptive quadrature; the tail is bounded analytically via the
// off-spectrum decay ratio and reported.
ParsevalResult parseval_average(std::int64_t N, double T, const PotentialSpec& spec, Side side,
                                double quad_tol = 1e-6);

}  // namespace qdx
