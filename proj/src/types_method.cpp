#include "sigclass/types_method.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sigclass/errors.hpp"
#include "sigclass/gaussian.hpp"
#include "sigclass/objective.hpp"

namespace sigclass {

GridSpec build_grid(std::int64_t n, double c, double zeta, double eta) {
    if (!(c > 0.0)) throw BadConstants("c must be positive");
    if (!(zeta > 0.0)) throw BadConstants("zeta must be positive");
    if (!(eta > 0.0)) throw BadConstants("eta must be positive");
    if (!(zeta + eta < 0.5)) throw BadConstants("zeta + eta must be below 1/2");
    if (n < 2) throw BadConstants("sample count must be at least 2");
    GridSpec g;
    g.c = c;
    g.zeta = zeta;
    g.eta = eta;
    g.n = n;
    const double nd = static_cast<double>(n);
    g.m_bound = c * std::pow(nd, 0.5 + zeta);
    g.n_bins = 2 * static_cast<std::int64_t>(std::floor(std::pow(nd, 1.0 - eta) / std::log(nd))) + 1;
    g.bin_width = 2.0 * g.m_bound / static_cast<double>(g.n_bins);
    return g;
}

TypeHistogram histogram_type(const SampleSet& samples, const GridSpec& grid) {
    validate(samples);
    TypeHistogram hist;
    hist.grid = grid;
    hist.counts.assign(static_cast<std::size_t>(grid.n_bins), 0);
    for (double x : samples.values) {
        if (std::abs(x) >= grid.m_bound) {
            ++hist.outliers;
            continue;
        }
        auto k = static_cast<std::int64_t>(std::floor(x / grid.bin_width + 0.5));
        k = std::clamp(k, grid.k_min(), grid.k_max());
        ++hist.counts[static_cast<std::size_t>(k - grid.k_min())];
    }
    return hist;
}

DiscretizedModel discretize_model(const MixtureParams& theta, const GridSpec& grid) {
    validate(theta);
    for (double v : theta.var) {
        if (!(v > 0.0)) {
            throw std::invalid_argument("discretization needs strictly positive variances");
        }
    }
    DiscretizedModel model;
    model.grid = grid;
    model.theta = theta;
    model.masses.resize(static_cast<std::size_t>(grid.n_bins));
    const double w = grid.bin_width;
    double total = 0.0;
    for (std::int64_t k = grid.k_min(); k <= grid.k_max(); ++k) {
        const double lo = (static_cast<double>(k) - 0.5) * w;
        const double hi = (static_cast<double>(k) + 0.5) * w;
        double mass = 0.0;
        for (int i = 0; i < 2; ++i) {
            mass += theta.alpha[i] * normal_interval_mass(lo, hi, theta.mu[i], theta.var[i]);
        }
        model.masses[static_cast<std::size_t>(k - grid.k_min())] = mass;
        total += mass;
    }
    if (!(total > 0.0)) throw NotADistribution("mixture has zero mass on the grid range");
    model.c_p = 1.0 / total;
    for (double& mass : model.masses) mass *= model.c_p;
    return model;
}

double outlier_bound(const MixtureParams& theta_star, const GridSpec& grid) {
    validate(theta_star);
    const double m = grid.m_bound;
    const double log_n = std::log(static_cast<double>(grid.n));
    double sum = 0.0;
    for (int i = 0; i < 2; ++i) {
        const double v = theta_star.var[i];
        if (!(v > 0.0)) throw std::invalid_argument("outlier bound needs positive variances");
        const double up = m + theta_star.mu[i];
        const double dn = m - theta_star.mu[i];
        sum += std::exp(-up * up / (2.0 * v) + log_n);
        sum += std::exp(-dn * dn / (2.0 * v) + log_n);
    }
    return std::min(1.0, sum);
}

double cross_entropy_rhs(const MixtureParams& theta_hat, const GridSpec& grid) {
    const DiscretizedModel model = discretize_model(theta_hat, grid);
    const double two_pi_e = 2.0 * std::numbers::pi * std::numbers::e;
    const double w = grid.bin_width;
    double rhs = 0.0;
    for (int i = 0; i < 2; ++i) {
        rhs += 0.5 * theta_hat.alpha[i] * std::log(two_pi_e * theta_hat.var[i]);
    }
    rhs += entropy_discrete(theta_hat.alpha);
    rhs += (theta_hat.alpha[0] / (2.0 * theta_hat.var[0]) +
            theta_hat.alpha[1] / (2.0 * theta_hat.var[1])) *
           w * w;
    rhs -= std::log(w);
    rhs -= std::log(model.c_p);
    return rhs;
}

BoundSides cross_entropy_sides(const TypeHistogram& hist, const MixtureParams& theta_hat) {
    if (hist.outliers > 0) throw OutliersPresent(hist.outliers);
    const DiscretizedModel model = discretize_model(theta_hat, hist.grid);
    const std::int64_t n = hist.total();
    if (n <= 0) throw EmptySampleSet();
    BoundSides sides;
    for (std::size_t k = 0; k < hist.counts.size(); ++k) {
        if (hist.counts[k] == 0) continue;
        const double frac = static_cast<double>(hist.counts[k]) / static_cast<double>(n);
        if (model.masses[k] <= 0.0) {
            sides.lhs = std::numeric_limits<double>::infinity();
            break;
        }
        sides.lhs -= frac * std::log(model.masses[k]);
    }
    sides.rhs = cross_entropy_rhs(theta_hat, hist.grid);
    return sides;
}

double kl_discrete(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw NotADistribution("vector lengths differ");
    double ps = 0.0, qs = 0.0;
    for (double v : p) {
        if (!(v >= 0.0)) throw NotADistribution("negative or NaN probability");
        ps += v;
    }
    for (double v : q) {
        if (!(v >= 0.0)) throw NotADistribution("negative or NaN probability");
        qs += v;
    }
    if (std::abs(ps - 1.0) > 1e-9) throw NotADistribution("first argument sums to " + std::to_string(ps));
    if (std::abs(qs - 1.0) > 1e-9) throw NotADistribution("second argument sums to " + std::to_string(qs));
    double d = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] == 0.0) continue;
        if (q[k] == 0.0) return std::numeric_limits<double>::infinity();
        d += p[k] * std::log(p[k] / q[k]);
    }
    return d;
}

double kl_density_quadrature(const DensityFn& p, const DensityFn& q, double lo, double hi,
                             std::int64_t n_points) {
    if (n_points < 1000) throw std::invalid_argument("quadrature needs at least 1000 points");
    if (!(lo < hi)) throw std::invalid_argument("quadrature interval is empty");
    const double h = (hi - lo) / static_cast<double>(n_points);
    double sum = 0.0;
    for (std::int64_t j = 0; j < n_points; ++j) {
        const double x = lo + (static_cast<double>(j) + 0.5) * h;
        const double pv = p(x);
        if (pv < 1e-300) continue;
        const double qv = q(x);
        if (qv <= 0.0) return std::numeric_limits<double>::infinity();
        sum += pv * std::log(pv / qv);
    }
    return sum * h;
}

double StepDensity::operator()(double x) const {
    if (std::abs(x) >= grid.m_bound) return 0.0;
    auto k = static_cast<std::int64_t>(std::floor(x / grid.bin_width + 0.5));
    k = std::clamp(k, grid.k_min(), grid.k_max());
    return heights[static_cast<std::size_t>(k - grid.k_min())];
}

StepDensity step_density(const TypeHistogram& hist) {
    if (hist.outliers > 0) throw OutliersPresent(hist.outliers);
    const std::int64_t n = hist.total();
    if (n <= 0) throw EmptySampleSet();
    StepDensity q;
    q.grid = hist.grid;
    q.heights.resize(hist.counts.size());
    const double scale = 1.0 / (hist.grid.bin_width * static_cast<double>(n));
    for (std::size_t k = 0; k < hist.counts.size(); ++k) {
        q.heights[k] = static_cast<double>(hist.counts[k]) * scale;
    }
    return q;
}

namespace {

// right side of the divergence-plus-entropy inequality, without epsilon
double membership_rhs(const MixtureParams& theta) {
    const double two_pi_e = 2.0 * std::numbers::pi * std::numbers::e;
    double rhs = 0.0;
    for (int i = 0; i < 2; ++i) {
        if (theta.alpha[i] > 0.0) {
            rhs += 0.5 * theta.alpha[i] * std::log(two_pi_e * theta.var[i]);
        }
    }
    return rhs + entropy_discrete(theta.alpha);
}

// cross entropy of p against the mixture: integral of -p ln(mixture), which
// equals the divergence plus the differential entropy of p
double cross_entropy_quadrature(const DensityFn& p, const MixtureParams& theta, double lo,
                                double hi, std::int64_t n_points) {
    const double h = (hi - lo) / static_cast<double>(n_points);
    double sum = 0.0;
    for (std::int64_t j = 0; j < n_points; ++j) {
        const double x = lo + (static_cast<double>(j) + 0.5) * h;
        const double pv = p(x);
        if (pv < 1e-300) continue;
        sum -= pv * mixture_log_pdf(x, theta);
    }
    return sum * h;
}

}  // namespace

bool f_membership(const DensityFn& p, double support_lo, double support_hi,
                  const MixtureParams& theta_tilde, double epsilon, std::int64_t n_points) {
    if (n_points < 1000) throw std::invalid_argument("quadrature needs at least 1000 points");
    if (!(support_lo < support_hi)) throw std::invalid_argument("support interval is empty");
    validate(theta_tilde);
    for (double v : theta_tilde.var) {
        if (!(v > 0.0)) throw std::invalid_argument("membership test needs positive variances");
    }
    const double lhs = cross_entropy_quadrature(p, theta_tilde, support_lo, support_hi, n_points);
    return lhs <= membership_rhs(theta_tilde) + epsilon;
}

bool f_membership(const StepDensity& p, const MixtureParams& theta_tilde, double epsilon) {
    const std::int64_t n_points = 64 * p.grid.n_bins;
    const DensityFn fn = [&p](double x) { return p(x); };
    return f_membership(fn, -p.grid.m_bound, p.grid.m_bound, theta_tilde, epsilon, n_points);
}

bool RegionSpec::contains(const MixtureParams& p) const {
    const auto inside = [](const Interval& iv, double v) { return v >= iv.lo && v <= iv.hi; };
    return inside(alpha1, p.alpha[0]) && inside(mu1, p.mu[0]) && inside(mu2, p.mu[1]) &&
           inside(var1, p.var[0]) && inside(var2, p.var[1]);
}

bool RegionSpec::contains_up_to_relabel(const MixtureParams& p) const {
    MixtureParams swapped;
    swapped.alpha = {p.alpha[1], p.alpha[0]};
    swapped.mu = {p.mu[1], p.mu[0]};
    swapped.var = {p.var[1], p.var[0]};
    return contains(p) || contains(swapped);
}

void validate(const RegionSpec& region) {
    if (!(region.variance_floor > 0.0)) {
        throw std::invalid_argument("region variance floor must be positive");
    }
    const auto check = [](const Interval& iv, const char* name) {
        if (std::isnan(iv.lo) || std::isnan(iv.hi) || iv.lo > iv.hi) {
            throw std::invalid_argument(std::string("region interval ") + name + " is empty");
        }
    };
    check(region.alpha1, "alpha1");
    check(region.mu1, "mu1");
    check(region.mu2, "mu2");
    check(region.var1, "var1");
    check(region.var2, "var2");
    if (region.var1.lo < region.variance_floor || region.var2.lo < region.variance_floor) {
        throw std::invalid_argument("region variance intervals must sit above the floor");
    }
    if (region.alpha1.lo < 0.0 || region.alpha1.hi > 1.0) {
        throw std::invalid_argument("region weight interval must lie inside [0,1]");
    }
}

double exponent_lower_bound_grid(const RegionSpec& region, const MixtureParams& theta_star,
                                 int grid_resolution) {
    validate(region);
    validate_generative(theta_star);
    if (grid_resolution < 1) throw std::invalid_argument("grid resolution must be at least 1");

    // infinite interval ends are clamped for the scan to a finite window
    // derived from the true parameters; finite ends are kept as given
    const double sigma_max = std::sqrt(std::max(theta_star.var[0], theta_star.var[1]));
    const double mu_lo = std::min(theta_star.mu[0], theta_star.mu[1]) - 4.0 * sigma_max;
    const double mu_hi = std::max(theta_star.mu[0], theta_star.mu[1]) + 4.0 * sigma_max;
    const double var_hi = 4.0 * std::max(theta_star.var[0], theta_star.var[1]);
    const auto window = [](Interval iv, double lo_w, double hi_w) {
        if (std::isinf(iv.lo)) iv.lo = lo_w;
        if (std::isinf(iv.hi)) iv.hi = hi_w;
        // a finite end can push past the window; collapse to the given end
        if (iv.hi < iv.lo) {
            if (std::isinf(iv.hi)) iv.hi = iv.lo;
            else iv.lo = iv.hi;
        }
        return iv;
    };
    const Interval a_iv = window(region.alpha1, 0.05, 0.95);
    const Interval m1_iv = window(region.mu1, mu_lo, mu_hi);
    const Interval m2_iv = window(region.mu2, mu_lo, mu_hi);
    const Interval v1_iv = window(region.var1, region.variance_floor, var_hi);
    const Interval v2_iv = window(region.var2, region.variance_floor, var_hi);

    const int r = grid_resolution;
    const auto point = [r](const Interval& iv, int j) {
        return iv.lo + (static_cast<double>(j) + 0.5) * (iv.hi - iv.lo) / static_cast<double>(r);
    };

    const std::int64_t n_points = 10000;
    bool any = false;
    double best = std::numeric_limits<double>::infinity();
    for (int ja = 0; ja < r; ++ja) {
        for (int j1 = 0; j1 < r; ++j1) {
            for (int j2 = 0; j2 < r; ++j2) {
                for (int jv1 = 0; jv1 < r; ++jv1) {
                    for (int jv2 = 0; jv2 < r; ++jv2) {
                        MixtureParams cand;
                        cand.alpha[0] = point(a_iv, ja);
                        cand.alpha[1] = 1.0 - cand.alpha[0];
                        cand.mu = {point(m1_iv, j1), point(m2_iv, j2)};
                        cand.var = {point(v1_iv, jv1), point(v2_iv, jv2)};
                        if (cand.alpha[0] <= 0.0 || cand.alpha[0] >= 1.0) continue;

                        const double s_cand =
                            std::sqrt(std::max(cand.var[0], cand.var[1]));
                        const double lo_c = std::min(cand.mu[0], cand.mu[1]) - 12.0 * s_cand;
                        const double hi_c = std::max(cand.mu[0], cand.mu[1]) + 12.0 * s_cand;
                        const DensityFn cand_pdf = [&cand](double x) {
                            return mixture_pdf(x, cand);
                        };
                        if (!f_membership(cand_pdf, lo_c, hi_c, cand, 0.0, n_points)) continue;

                        const double s_star =
                            std::sqrt(std::max(theta_star.var[0], theta_star.var[1]));
                        const double lo = std::min(lo_c, std::min(theta_star.mu[0],
                                                                  theta_star.mu[1]) -
                                                             12.0 * s_star);
                        const double hi = std::max(hi_c, std::max(theta_star.mu[0],
                                                                  theta_star.mu[1]) +
                                                             12.0 * s_star);
                        const DensityFn star_pdf = [&theta_star](double x) {
                            return mixture_pdf(x, theta_star);
                        };
                        const double d =
                            kl_density_quadrature(cand_pdf, star_pdf, lo, hi, n_points);
                        any = true;
                        best = std::min(best, d);
                    }
                }
            }
        }
    }
    if (!any) throw EmptyRegionGrid();
    return best;
}

}  // namespace sigclass
