#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "qdx/common.hpp"
#include "qdx/scaled.hpp"

namespace qdx {

// lambda_0(delta) = sqrt(12(1+d)^2 + 8(1+d)^3 + 4); couplings above it give the
// F_k-component band structure and empty triple intersections.
double lambda_zero(double delta);

// Trace sequence x_{-1} = 1, x_0 = z/2, x_1 = (z - lambda)/2 (half-trace of M_1),
// then x_{k+1} = 2 x_k x_{k-1} - x_{k-2}. Values are stored in scaled form, so
// doubly-exponential escape is represented, not an error.
class TraceState {
public:
    TraceState(std::complex<double> z, int k_max, double lambda);

    int level() const { return k_max_; }
    std::complex<double> z() const { return z_; }
    double lambda() const { return lambda_; }

    // x_j for j in [-1, k_max]; overflows to inf beyond double range
    std::complex<double> value(int j) const { return entry(j).to_complex(); }
    const scaled_complex& scaled_value(int j) const { return entry(j); }
    double log2_abs(int j) const { return entry(j).log2_abs(); }

    // |I_j - lambda^2/4| / (lambda^2/4) with I_j built from (x_{j+1}, x_j, x_{j-1}),
    // defined for j in [0, k_max-1]. Meaningful only where certified_bound is small.
    double fricke_relative_deviation(int j) const;
    // accumulated bound on the rounding-induced relative drift of I_j; +inf once
    // the magnitudes exceed what double arithmetic can certify
    double fricke_certified_bound(int j) const { return drift_bound_.at(static_cast<std::size_t>(j)); }

    // I_0, exact up to a few ulps: the invariant_value certificate (= lambda^2/4)
    double invariant_value() const { return invariant_value_; }

private:
    const scaled_complex& entry(int j) const { return values_.at(static_cast<std::size_t>(j + 1)); }
    std::complex<double> fricke_value_c(int j) const;

    std::complex<double> z_;
    double lambda_;
    int k_max_;
    std::vector<scaled_complex> values_;     // x_{-1} .. x_{k_max}
    std::vector<double> drift_bound_;        // per invariant level
    double invariant_value_;
};

TraceState trace_sequence(std::complex<double> z, int k_max, double lambda);

struct Band {
    double left = 0.0;
    double right = 0.0;
    double root = 0.0;
    int m = 0;          // #{0 <= l <= k-1 : |x_l(root)| <= 1}
    double width = 0.0; // computed at working precision before narrowing to double
};

struct BandSet {
    int k = 0;
    double delta = 0.0;
    double lambda = 0.0;
    std::vector<Band> bands;  // sorted, pairwise disjoint, one root each, F_k total
};

// The F_k components of { E real : |x_k(E)| <= 1 + delta }, each with its root of
// x_k and the profile m(root). Roots are isolated hierarchically inside the bands
// of levels k-1 and k-2 (the nesting property), with count-driven grid refinement;
// endpoints by bisection on |x_k| - (1+delta) to working-precision resolution
// (comfortably below the 1e-12 contract for the supported couplings). Internally
// runs in long double, escalating to __float128 when the conservative width floor
// S_u(lambda)^{-floor(2k/3)} approaches the long-double grid resolution.
BandSet real_bands(int k, double delta, double lambda);

// all F_k roots of x_k with their m profiles (delta = 0 band structure)
std::vector<std::pair<double, int>> root_profiles(int k, double lambda);

// histogram m -> count over all F_k roots
std::map<int, std::int64_t> c_histogram(int k, double lambda);

struct BandScaling {
    double slope = 0.0;       // d log(width) / d m, least squares
    double intercept = 0.0;
    double correlation = 0.0; // Pearson corr of (m, log width)
    std::vector<double> residuals;
    std::vector<int> m_values;
    std::vector<double> log_widths;
};

// regression of log(band width) against the root profile m over all bands at level k
BandScaling band_scaling(int k, double delta, double lambda);

struct BoxDimension {
    double estimate = 0.0;
    double r_squared = 0.0;
    int scales_used = 0;
    double eps_max = 0.0;
    double eps_min = 0.0;
    std::vector<std::pair<double, double>> fit_points;  // (log 1/eps, log count)
};

// Box-counting estimate of dim_B for the level-k approximation. Dyadic scales
// descend from diameter/4; the regression is restricted to the point regime
// 8 <= N(eps) <= F_k/2, where level-k bands act as points (below that the count
// slope drifts toward 1 as boxes fill band interiors). DegenerateFit if fewer
// than 4 scales land in the window.
BoxDimension box_dimension(double lambda, int k, double delta);

}  // namespace qdx
