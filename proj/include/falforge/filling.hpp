#pragma once

#include <string>
#include <vector>

#include "falforge/error.hpp"

namespace falforge {

/// Crossing-circle cusp rectangle: one of the two identical tiles, with its
/// white and black side lengths and the half-twist flag of the circle.
struct CuspShape {
    double w = 0.0;
    double b = 0.0;
    bool half_twist = false;
};

/// Crossings inserted in the twist region by 1/n filling: |2n| without a
/// half-twist, |2n+1| with one. The twist direction is taken to match the
/// sign of n. n = 0 without a half-twist would remove the circle trivially
/// and is rejected.
long crossing_count(long n, bool half_twist);

/// Normalized length of the 1/n slope on a crossing-circle cusp with c
/// crossings: sqrt(w/(2b) + c^2 b/(2w)). Always at least sqrt(c), with
/// equality iff w/b = c.
double normalized_length(const CuspShape& shape, long c);

/// Combine per-cusp normalized lengths: 1/L^2 = sum 1/L_i^2.
double aggregate_length(const std::vector<double>& lengths);

/// Effective crossing threshold. All logarithms are natural.
struct MinCrossings {
    double raw = 0.0;        // n * max{107.6/d^2 + 14.41, 45.20/(d^2.5 log(1+e)) + 14.41}
    long threshold = 0;      // ceil(raw)
    long per_circle_share = 0; // ceil(threshold / n_circles)
    // minimal filling integers reaching the full threshold at each parity
    long n_even = 0, c_even = 0;
    long n_odd = 0, c_odd = 0;
    // minimal filling integers reaching the per-circle share at each parity
    long share_n_even = 0, share_c_even = 0;
    long share_n_odd = 0, share_c_odd = 0;
};

/// delta is an input: the caller must ensure the base ball lies in the
/// delta/(1+epsilon)-thick part. Throws ValidationError on nonpositive
/// parameters.
MinCrossings min_crossings(double epsilon, double delta, int n_circles);

struct CircleFilling {
    int circle = -1;
    bool half_twist = false;
    long n = 0; // filling integer
    long c = 0; // crossings added
    double w = 0.0, b = 0.0;
    double normalized = 0.0; // L_i
};

struct SlopePlan {
    double epsilon = 0.0;
    double bigR = 0.0;
    double delta = 0.0;
    long threshold = 0;
    long per_circle_share = 0;
    std::vector<CircleFilling> circles;
    double aggregate = 0.0;
};

/// Choose the minimal parity-admissible filling integer per crossing circle
/// meeting the per-circle share of the threshold.
SlopePlan make_plan(double epsilon, double bigR, double delta,
                    const std::vector<CuspShape>& cusps);

struct Certificate {
    bool pass = false;
    std::vector<int> deficient;      // circles below their share
    double first_factor = 0.0;       // 1 + epsilon
    double composite = 0.0;          // (1 + epsilon)^2
    std::string report;
};

/// Check a plan against its threshold: passes iff every circle satisfies
/// n_circles * c_i >= threshold (the per-circle share, in exact integer
/// arithmetic). The report records the distortion chain, including the
/// qc-to-bilipschitz exponent 3/2 behind the first (1+epsilon) factor.
Certificate certificate(double epsilon, double bigR, double delta, const SlopePlan& plan);

} // namespace falforge
