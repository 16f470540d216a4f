#include "falforge/filling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace falforge {

namespace {

constexpr double kThick = 107.6;
constexpr double kAdd = 14.41;
constexpr double kLog = 45.20;

void require_positive(double x, const char* name) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw ValidationError(std::string(name) + " must be positive");
    }
}

// smallest admissible c of the given parity with c >= bound
long parity_ceil(long bound, bool odd) {
    long c = std::max<long>(bound, odd ? 1 : 2);
    if ((c % 2 == 1) != odd) ++c;
    return c;
}

} // namespace

long crossing_count(long n, bool half_twist) {
    if (!half_twist && n == 0) {
        throw ValidationError("crossing_count: n = 0 without a half-twist removes the circle");
    }
    return half_twist ? std::labs(2 * n + 1) : std::labs(2 * n);
}

double normalized_length(const CuspShape& shape, long c) {
    require_positive(shape.w, "cusp side w");
    require_positive(shape.b, "cusp side b");
    if (c < 1) throw ValidationError("normalized_length: c must be at least 1");
    double cc = static_cast<double>(c);
    return std::sqrt(shape.w / (2.0 * shape.b) + cc * cc * shape.b / (2.0 * shape.w));
}

double aggregate_length(const std::vector<double>& lengths) {
    if (lengths.empty()) throw ValidationError("aggregate_length: empty list");
    double s = 0.0;
    for (double L : lengths) {
        require_positive(L, "normalized length");
        s += 1.0 / (L * L);
    }
    return 1.0 / std::sqrt(s);
}

MinCrossings min_crossings(double epsilon, double delta, int n_circles) {
    require_positive(epsilon, "epsilon");
    require_positive(delta, "delta");
    if (n_circles < 1) throw ValidationError("min_crossings: need at least one crossing circle");

    double term_thick = kThick / (delta * delta) + kAdd;
    double term_log = kLog / (std::pow(delta, 2.5) * std::log1p(epsilon)) + kAdd;
    MinCrossings out;
    out.raw = static_cast<double>(n_circles) * std::max(term_thick, term_log);
    out.threshold = static_cast<long>(std::ceil(out.raw));
    out.per_circle_share =
        (out.threshold + static_cast<long>(n_circles) - 1) / static_cast<long>(n_circles);

    out.c_even = parity_ceil(out.threshold, false);
    out.n_even = out.c_even / 2;
    out.c_odd = parity_ceil(out.threshold, true);
    out.n_odd = (out.c_odd - 1) / 2;
    out.share_c_even = parity_ceil(out.per_circle_share, false);
    out.share_n_even = out.share_c_even / 2;
    out.share_c_odd = parity_ceil(out.per_circle_share, true);
    out.share_n_odd = (out.share_c_odd - 1) / 2;
    return out;
}

SlopePlan make_plan(double epsilon, double bigR, double delta,
                    const std::vector<CuspShape>& cusps) {
    if (cusps.empty()) throw ValidationError("make_plan: no crossing circles");
    require_positive(bigR, "R");
    MinCrossings mc = min_crossings(epsilon, delta, static_cast<int>(cusps.size()));

    SlopePlan plan;
    plan.epsilon = epsilon;
    plan.bigR = bigR;
    plan.delta = delta;
    plan.threshold = mc.threshold;
    plan.per_circle_share = mc.per_circle_share;
    std::vector<double> lengths;
    for (size_t i = 0; i < cusps.size(); ++i) {
        const CuspShape& cusp = cusps[i];
        CircleFilling f;
        f.circle = static_cast<int>(i);
        f.half_twist = cusp.half_twist;
        f.c = cusp.half_twist ? mc.share_c_odd : mc.share_c_even;
        f.n = cusp.half_twist ? mc.share_n_odd : mc.share_n_even;
        f.w = cusp.w;
        f.b = cusp.b;
        f.normalized = normalized_length(cusp, f.c);
        lengths.push_back(f.normalized);
        plan.circles.push_back(f);
    }
    plan.aggregate = aggregate_length(lengths);
    return plan;
}

Certificate certificate(double epsilon, double bigR, double delta, const SlopePlan& plan) {
    require_positive(epsilon, "epsilon");
    require_positive(delta, "delta");
    require_positive(bigR, "R");
    if (plan.circles.empty()) throw ValidationError("certificate: empty plan");

    long n = static_cast<long>(plan.circles.size());
    Certificate cert;
    cert.first_factor = 1.0 + epsilon;
    cert.composite = (1.0 + epsilon) * (1.0 + epsilon);
    for (const CircleFilling& f : plan.circles) {
        if (n * f.c < plan.threshold) cert.deficient.push_back(f.circle);
    }
    cert.pass = cert.deficient.empty();

    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(6);
    os << "effective filling certificate\n";
    os << "  inputs: epsilon = " << epsilon << ", R = " << bigR << ", delta = " << delta
       << " (ball assumed in the delta/(1+epsilon)-thick part)\n";
    os << "  crossing circles: " << n << ", threshold C = " << plan.threshold
       << ", per-circle share ceil(C/n) = " << plan.per_circle_share << "\n";
    for (const CircleFilling& f : plan.circles) {
        os << "  circle " << f.circle << (f.half_twist ? " (half-twist)" : "") << ": 1/"
           << f.n << " filling, c = " << f.c << ", L = " << f.normalized
           << (n * f.c >= plan.threshold ? "" : "  [deficient]") << "\n";
    }
    os << "  aggregate L = " << plan.aggregate << " (1/L^2 = sum 1/L_i^2)\n";
    if (cert.pass) {
        os << "  verdict: PASS\n";
        os << "  chain: per-circle c >= C/n => L_i^2 >= C/n => inclusion of the R-ball is "
           << "(1+epsilon)-bilipschitz after filling;\n";
        os << "  composed with the (1+epsilon) from the K^(3/2)-bilipschitz visual extension "
           << "of the packing deformation, total distortion (1+epsilon)^2 = " << cert.composite
           << "\n";
    } else {
        os << "  verdict: FAIL (" << cert.deficient.size() << " deficient circle(s))\n";
    }
    cert.report = os.str();
    return cert;
}

} // namespace falforge
