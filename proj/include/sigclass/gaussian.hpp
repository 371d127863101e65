#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sigclass/core.hpp"

namespace sigclass {

inline double normal_log_pdf(double x, double mu, double var) {
    const double d = x - mu;
    return -0.5 * (std::log(2.0 * std::numbers::pi * var) + d * d / var);
}

inline double normal_pdf(double x, double mu, double var) {
    return std::exp(normal_log_pdf(x, mu, var));
}

inline double normal_cdf(double z) {
    return 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0);
}

// Mass of N(mu, var) on [lo, hi].  Evaluated through erfc on whichever side of
// the mean the interval lies, so far-tail masses are differences of two small
// numbers instead of two values near 1.
inline double normal_interval_mass(double lo, double hi, double mu, double var) {
    const double inv = 1.0 / std::sqrt(2.0 * var);
    const double a = (lo - mu) * inv;
    const double b = (hi - mu) * inv;
    if (a + b >= 0.0) return 0.5 * (std::erfc(a) - std::erfc(b));
    return 0.5 * (std::erfc(-b) - std::erfc(-a));
}

inline double mixture_pdf(double x, const MixtureParams& p) {
    return p.alpha[0] * normal_pdf(x, p.mu[0], p.var[0]) +
           p.alpha[1] * normal_pdf(x, p.mu[1], p.var[1]);
}

// log of the mixture density via log-sum-exp; stays finite far beyond where
// the plain density underflows
inline double mixture_log_pdf(double x, const MixtureParams& p) {
    double t[2];
    for (int i = 0; i < 2; ++i) {
        t[i] = p.alpha[i] > 0.0
                   ? std::log(p.alpha[i]) + normal_log_pdf(x, p.mu[i], p.var[i])
                   : -std::numeric_limits<double>::infinity();
    }
    const double hi = std::max(t[0], t[1]);
    if (!std::isfinite(hi)) return hi;
    return hi + std::log1p(std::exp(std::min(t[0], t[1]) - hi));
}

}  // namespace sigclass
