#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "sigclass/core.hpp"

namespace sigclass {

// Grid sized for N samples:
//   m_bound  = c * N^(1/2 + zeta)
//   n_bins   = 2 * floor(N^(1 - eta) / ln N) + 1   (odd by construction)
//   bin_width = 2 * m_bound / n_bins
// Requires c, zeta, eta > 0 and zeta + eta < 1/2 (BadConstants otherwise), and
// N >= 2 so the bin count is positive.
GridSpec build_grid(std::int64_t n, double c, double zeta, double eta);

// Bin counts a_k over half-open cells [(k - 1/2) W, (k + 1/2) W), i.e.
// k = floor(x / W + 1/2); samples with |x| >= m_bound (boundary included)
// count as outliers instead.
TypeHistogram histogram_type(const SampleSet& samples, const GridSpec& grid);

// The mixture's probability mass per bin, renormalized over the in-range bins:
// masses[k] = c_p * integral of the mixture density over bin k, with c_p the
// reciprocal in-range mass, so the masses sum to one.  c_p -> 1 as the grid
// bound grows.
struct DiscretizedModel {
    GridSpec grid;
    MixtureParams theta;
    std::vector<double> masses;  // index 0 corresponds to grid.k_min()
    double c_p = 1.0;
    double mass_at(std::int64_t k) const {
        return masses[static_cast<std::size_t>(k - grid.k_min())];
    }
};

DiscretizedModel discretize_model(const MixtureParams& theta, const GridSpec& grid);

// Union-of-tails bound on the probability that any of grid.n samples from
// theta_star lands outside [-m_bound, m_bound]:
//   sum_i exp(-(M + mu_i)^2 / (2 v_i) + ln N) + sum_i exp(-(M - mu_i)^2 / (2 v_i) + ln N),
// truncated at 1.
double outlier_bound(const MixtureParams& theta_star, const GridSpec& grid);

struct BoundSides {
    double lhs = 0.0;
    double rhs = 0.0;
};

// Analytic right side of the quantized cross-entropy bound for fitted
// parameters on a grid; the c_P term comes from discretizing theta_hat.
// Exposed separately so the bound can be printed without sample data.
double cross_entropy_rhs(const MixtureParams& theta_hat, const GridSpec& grid);

// Both sides of the quantized cross-entropy bound.  The left side is the
// cross-entropy of the empirical type against the discretized model,
//   lhs = sum_{a_k > 0} (a_k / N) * (-ln masses[k]),
// (+infinity if the model gives an occupied bin zero mass).  The right side
// bounds it analytically:
//   rhs = sum_i (a_i/2) ln(2 pi e v_i) + H(a1, a2)
//       + (a1/(2 v1) + a2/(2 v2)) * W^2 - ln W - ln c_p
// with W the bin width.  Requires an outlier-free histogram (OutliersPresent).
BoundSides cross_entropy_sides(const TypeHistogram& hist, const MixtureParams& theta_hat);

// sum p ln(p/q) with 0-mass terms contributing 0 and +infinity when q has a
// hole where p has mass.  Both vectors must be distributions (NotADistribution).
double kl_discrete(std::span<const double> p, std::span<const double> q);

using DensityFn = std::function<double(double)>;

// Midpoint-rule quadrature of p ln(p/q) over [lo, hi] with n_points >= 1000
// uniform cells; points where p < 1e-300 contribute nothing.
double kl_density_quadrature(const DensityFn& p, const DensityFn& q, double lo, double hi,
                             std::int64_t n_points);

// Piecewise-constant density reconstructed from a type: height
// a_k / (bin_width * N) on bin k, zero outside the grid range.
struct StepDensity {
    GridSpec grid;
    std::vector<double> heights;  // index 0 corresponds to grid.k_min()
    double operator()(double x) const;
};

// Requires an outlier-free histogram (OutliersPresent), so the heights
// integrate to one.
StepDensity step_density(const TypeHistogram& hist);

// Membership predicate for the divergence-plus-entropy family: true when
//   integral of -p ln(mixture(theta_tilde)) over the support
//     <= sum_i (a_i/2) ln(2 pi e v_i) + H(a1, a2) + epsilon.
// The left side equals D(p || mixture) + H(p); evaluating the cross-entropy
// directly avoids computing the two pieces separately.
bool f_membership(const DensityFn& p, double support_lo, double support_hi,
                  const MixtureParams& theta_tilde, double epsilon, std::int64_t n_points);

// Step-density overload: integrates over the grid range with 64 quadrature
// points per bin (midpoint cells align with bin edges, so the step's jumps
// never straddle a cell).
bool f_membership(const StepDensity& p, const MixtureParams& theta_tilde, double epsilon);

struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
};

// Box constraints on mixture parameters (the second weight is 1 - alpha1).
// Variance intervals must sit above the floor.
struct RegionSpec {
    Interval alpha1{0.0, 1.0};
    Interval mu1;
    Interval mu2;
    Interval var1{1e-6, std::numeric_limits<double>::infinity()};
    Interval var2{1e-6, std::numeric_limits<double>::infinity()};
    double variance_floor = 1e-6;

    bool contains(const MixtureParams& p) const;
    // either labeling of p may satisfy the box (class labels are arbitrary)
    bool contains_up_to_relabel(const MixtureParams& p) const;
};

void validate(const RegionSpec& region);

// Upper estimate of the restricted divergence minimum over the region: scan a
// uniform grid of candidate parameters inside the box (grid_resolution points
// per free dimension; unbounded interval ends are clamped to a finite window
// around theta_star first), keep candidates whose own mixture density passes
// f_membership against themselves, and return the smallest quadrature
// divergence to theta_star.  This bounds the parametric restriction only; it
// is not a certified value of the full variational minimum.  Throws
// EmptyRegionGrid when nothing passes.
double exponent_lower_bound_grid(const RegionSpec& region, const MixtureParams& theta_star,
                                 int grid_resolution);

}  // namespace sigclass
