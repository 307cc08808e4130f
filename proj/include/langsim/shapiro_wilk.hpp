#pragma once

// Shapiro-Wilk W test for normality, Royston's AS R94 algorithm (the swilk
// routine), valid for 3 <= n <= 5000.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "langsim/error.hpp"

namespace langsim {

struct ShapiroResult {
    double w = 1.0;
    double p = 1.0;
};

namespace detail {

// cc[0] + cc[1]*x + ... + cc[nord-1]*x^(nord-1), evaluated as in AS R94.
inline double swilk_poly(const double* cc, int nord, double x) {
    double ret = cc[0];
    if (nord > 1) {
        double p = x * cc[nord - 1];
        for (int j = nord - 2; j > 0; --j) p = (p + cc[j]) * x;
        ret += p;
    }
    return ret;
}

inline double normal_quantile(double q) {
    return boost::math::quantile(boost::math::normal_distribution<double>(0.0, 1.0), q);
}

inline double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

}  // namespace detail

inline constexpr std::size_t kShapiroMaxSample = 5000;

inline ShapiroResult shapiro_wilk(std::span<const double> sample) {
    static constexpr double small = 1e-19;
    static constexpr double g[2] = {-2.273, .459};
    static constexpr double c1[6] = {0., .221157, -.147981, -2.07119, 4.434685, -2.706056};
    static constexpr double c2[6] = {0., .042981, -.293762, -1.752461, 5.682633, -3.582633};
    static constexpr double c3[4] = {.544, -.39978, .025054, -6.714e-4};
    static constexpr double c4[4] = {1.3822, -.77857, .062767, -.0020322};
    static constexpr double c5[4] = {-1.5861, -.31082, -.083751, .0038915};
    static constexpr double c6[3] = {-.4803, -.082676, .0030302};

    const int n = static_cast<int>(sample.size());
    if (n < 3) throw Error(Errc::SampleTooSmall, "Shapiro-Wilk needs at least 3 observations, got " + std::to_string(n));
    if (sample.size() > kShapiroMaxSample)
        throw Error(Errc::SampleTooLarge, "Shapiro-Wilk supports at most 5000 observations, got " + std::to_string(n));

    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    if (!(x.front() < x.back())) throw Error(Errc::DegenerateSample, "sample has zero variance");
    const double centre = x[static_cast<std::size_t>(n / 2)];
    for (double& v : x) v -= centre;

    const int nn2 = n / 2;
    std::vector<double> a(static_cast<std::size_t>(nn2) + 1, 0.0);  // 1-based
    const double an = n;
    if (n == 3) {
        a[1] = std::sqrt(0.5);
    } else {
        const double an25 = an + .25;
        double summ2 = 0.0;
        for (int i = 1; i <= nn2; ++i) {
            a[i] = detail::normal_quantile((i - .375) / an25);
            summ2 += a[i] * a[i];
        }
        summ2 *= 2.;
        const double ssumm2 = std::sqrt(summ2);
        const double rsn = 1. / std::sqrt(an);
        const double a1 = detail::swilk_poly(c1, 6, rsn) - a[1] / ssumm2;
        int i1;
        double fac;
        if (n > 5) {
            i1 = 3;
            const double a2 = -a[2] / ssumm2 + detail::swilk_poly(c2, 6, rsn);
            fac = std::sqrt((summ2 - 2. * (a[1] * a[1]) - 2. * (a[2] * a[2])) / (1. - 2. * (a1 * a1) - 2. * (a2 * a2)));
            a[2] = a2;
        } else {
            i1 = 2;
            fac = std::sqrt((summ2 - 2. * (a[1] * a[1])) / (1. - 2. * (a1 * a1)));
        }
        a[1] = a1;
        for (int i = i1; i <= nn2; ++i) a[i] /= -fac;
    }

    const double range = x[n - 1] - x[0];
    if (range < small) throw Error(Errc::DegenerateSample, "sample range is below 1e-19");

    auto sign = [](int v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); };
    double sx = x[0] / range;
    double sa = -a[1];
    for (int i = 1, j = n - 1; i < n; --j) {
        const double xi = x[i] / range;
        sx += xi;
        ++i;
        if (i != j) sa += sign(i - j) * a[std::min(i, j)];
    }

    sa /= n;
    sx /= n;
    double ssa = 0., ssx = 0., sax = 0.;
    for (int i = 0, j = n - 1; i < n; ++i, --j) {
        const double asa = i != j ? sign(i - j) * a[1 + std::min(i, j)] - sa : -sa;
        const double xsx = x[i] / range - sx;
        ssa += asa * asa;
        ssx += xsx * xsx;
        sax += asa * xsx;
    }

    // w1 = 1 - W, computed directly to avoid rounding error for W near 1.
    const double ssassx = std::sqrt(ssa * ssx);
    const double w1 = (ssassx - sax) * (ssassx + sax) / (ssa * ssx);
    ShapiroResult out;
    out.w = 1. - w1;

    if (n == 3) {
        const double pi6 = 6.0 / std::numbers::pi;
        const double stqr = std::numbers::pi / 3.0;
        out.p = std::max(0.0, pi6 * (std::asin(std::sqrt(out.w)) - stqr));
        return out;
    }
    double y = std::log(w1);
    const double xx = std::log(an);
    double m, s;
    if (n <= 11) {
        const double gamma = detail::swilk_poly(g, 2, an);
        if (y >= gamma) {
            out.p = 1e-99;
            return out;
        }
        y = -std::log(gamma - y);
        m = detail::swilk_poly(c3, 4, an);
        s = std::exp(detail::swilk_poly(c4, 4, an));
    } else {
        m = detail::swilk_poly(c5, 4, xx);
        s = std::exp(detail::swilk_poly(c6, 3, xx));
    }
    out.p = std::clamp(detail::normal_upper_tail((y - m) / s), 0.0, 1.0);
    return out;
}

}  // namespace langsim
