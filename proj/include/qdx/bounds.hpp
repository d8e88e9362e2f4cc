#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "qdx/dynamics.hpp"
#include "qdx/lattice.hpp"

namespace qdx {

inline constexpr double kGoldenMean = 1.6180339887498948482;
inline constexpr double kTwoLogPhi = 0.9624236501192069;  // 2 ln phi

// closed-form coupling constants; S_l needs lambda >= 4 + 2*sqrt(3), the lower
// bounds need lambda > sqrt(24), the upper transport bound needs lambda >= 8
struct CouplingConstants {
    double lambda = 0.0;
    double s_lower = 0.0;  // S_l = ((l-4) + sqrt((l-4)^2 - 12)) / 2
    double s_upper = 0.0;  // S_u = 2 l + 22
    double alpha_upper = 0.0;  // 2 log phi / log S_l
    double alpha_lower = 0.0;  // 2 log phi / log S_u
    bool alpha_upper_valid = false;  // Theorem hypothesis lambda >= 8
    double s_exponent = 0.0;   // s = log S_u / (2 log phi)
    std::map<double, double> lambda0_at;
    std::vector<std::pair<double, double>> beta_lower_zero_phase;  // (p, bound)
};

CouplingConstants coupling_constants(double lambda, const std::vector<double>& deltas = {},
                                     const std::vector<double>& p_list = {});

// t^4 * integral_{-K}^{K} (max_{window} ||Phi(n, E + i/t)||^2)^{-1} dE
struct RhsResult {
    double value = 0.0;
    double quadrature_error = 0.0;
    int evaluations = 0;
};
RhsResult theorem1_rhs(std::int64_t N, double t, const PotentialSpec& spec, Side side,
                       double quad_tol = 1e-6);

// integral_{-K}^{K} sum_{n >= N} |<(H - E - i/t)^{-1} d_0, d_n>|^2 dE
RhsResult lemma2_rhs(std::int64_t N, double t, const PotentialSpec& spec, Side side,
                     double quad_tol = 1e-6);

struct TransportExponents {
    double beta_minus = 0.0;
    double beta_plus = 0.0;
    double p = 0.0;
    double window_t_low = 0.0;   // earliest window start used
    double window_t_high = 0.0;  // latest window end used
    int windows = 0;
};

// finite-time proxies for beta^-(p), beta^+(p): least-squares slopes of
// log M_p / (p log t) over sliding one-decade windows in the final two decades
TransportExponents transport_exponents(const std::vector<std::pair<double, double>>& series,
                                       double p);

struct ProbabilityGrid {
    std::vector<double> alphas;
    std::vector<double> times;                // t (or T for the averaged variant)
    std::vector<std::vector<double>> values;  // values[a][i] = P at (alphas[a], times[i])
};

struct SpreadingProfile {
    std::vector<double> alphas;
    std::vector<double> s_minus;  // -min log P / log t over the final decade
    std::vector<double> s_plus;   // -max log P / log t over the final decade
    double alpha_l_minus = 0.0, alpha_l_plus = 0.0;
    double alpha_u_minus = 0.0, alpha_u_plus = 0.0;
    double threshold_zero = 0.05;
    double threshold_inf = 10.0;
    double window_t_low = 0.0, window_t_high = 0.0;
};

SpreadingProfile spreading_profile(const ProbabilityGrid& grid, double threshold_zero = 0.05,
                                   double threshold_inf = 10.0);

// Measured power law ||Phi(N,z)|| <= C N^gamma over z in sigma_k^delta (sampled at
// the x_k roots) and Fibonacci N <= F_k; gamma from least squares on the max
// envelope, C lifted so the bound has zero violations on the sample.
struct PowerLaw {
    double gamma = 0.0;
    double c = 0.0;
    int roots_sampled = 0;
    std::vector<std::pair<double, double>> envelope;  // (log N, log max ||Phi||)
};
PowerLaw transfer_power_law(double lambda, double delta, int k, int root_stride = 1);

// single (C, c) envelope P <= C (e^{-cN} + rhs) fitted over a whole grid
struct EnvelopeFit {
    double big_c = 0.0;
    double small_c = 0.0;
    int violations = 0;
    double max_ratio = 0.0;  // max P / (C (e^{-cN} + rhs)); <= 1 when fit holds
};
struct EnvelopePoint {
    double n = 0.0;
    double t = 0.0;
    double probability = 0.0;
    double rhs = 0.0;
};
EnvelopeFit fit_envelope(const std::vector<EnvelopePoint>& points);

// one row of the sandwich comparison table
struct SandwichRow {
    double alpha = 0.0;
    double s_minus = 0.0;
    double s_plus = 0.0;
};

struct SandwichReport {
    CouplingConstants constants;
    SpreadingProfile averaged_profile;  // from <P(ceil(T^a)-1, .)>(T)
    std::vector<SandwichRow> rows;
    std::vector<double> t_grid;
    double slack_lower = 0.1;
    double slack_upper = 0.15;
    bool lower_ok = false;  // alpha_lower - slack <= <alpha_u^->
    bool upper_ok = false;  // <alpha_u^+> <= alpha_upper + slack
    // formula-only sweep: (lambda, alpha_upper(lambda) * ln lambda)
    std::vector<std::pair<double, double>> product_sweep;
};

struct SandwichConfig {
    std::vector<double> alpha_grid;   // defaults to 0.05 .. 1.0
    std::vector<double> t_grid;       // defaults to 8 log-spaced in [10, 1000]
    std::vector<double> lambda_sweep = {8.0, 32.0, 128.0, 512.0};
    double quad_tol = 1e-3;
    double slack_lower = 0.1;
    double slack_upper = 0.15;
    int workers = 0;  // 0 = serial
};

SandwichReport sandwich_report(double lambda, const SandwichConfig& config = {});

}  // namespace qdx
