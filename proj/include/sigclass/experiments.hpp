#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "sigclass/core.hpp"
#include "sigclass/optimizer.hpp"
#include "sigclass/rng.hpp"
#include "sigclass/types_method.hpp"

namespace sigclass {

struct LabeledSamples {
    SampleSet samples;
    std::vector<int> labels;  // generating component per sample, 0 or 1
};

// Draw n points from the two-component mixture: pick the component by weight,
// then a Gaussian draw with that component's mean and variance.  Latent labels
// are kept for misclassification scoring.
LabeledSamples sample_mixture(const MixtureParams& theta_star, std::size_t n, Rng& rng);

// One solver run, flattened for tabulation.  Parameter errors are absolute
// differences against the generating parameters under the label permutation
// that minimizes their sum (labels are unidentifiable).
struct TrialRecord {
    std::int64_t trial_id = 0;
    std::int64_t n = 0;
    std::uint64_t data_seed = 0;
    MixtureParams theta_hat;
    double log_gain = 0.0;
    double kl_star_to_hat = 0.0;  // quadrature divergence, generating -> fitted
    bool converged = false;
    bool collapsed = false;       // every restart collapsed; stats fields are zero
    bool certificate_passed = false;
    double max_residual = 0.0;
    double err_alpha = 0.0;
    double err_mu1 = 0.0;
    double err_mu2 = 0.0;
    double err_var1 = 0.0;
    double err_var2 = 0.0;
    double misclassification = 0.0;
    bool in_region = false;       // for exponent runs: fit landed in the region
};

struct ExperimentPlan {
    MixtureParams theta_star;
    std::vector<std::int64_t> n_values;  // strictly increasing
    std::int64_t trials_per_n = 100;
    std::uint64_t seed = 0;
    OptimizerConfig optimizer;
    double grid_c = 1.0;
    double grid_zeta = 0.1;
    double grid_eta = 0.2;
    std::optional<RegionSpec> region;
    std::int64_t kl_points = 100000;
    double certify_tol = 1e-7;
};

void validate(const ExperimentPlan& plan);

struct TrialSet {
    ExperimentPlan plan;
    std::vector<TrialRecord> records;  // n_values-major, trial-minor order
};

// Called from the coordinating thread after each sample size finishes.
using ProgressFn = std::function<void(std::int64_t n)>;

// Run every (n, trial) cell of the plan.  Each cell derives its own data
// stream and solver seed from the plan seed and the cell's global index, so
// results do not depend on thread count or execution order.  Collapsed trials
// are recorded, not fatal.  compute_kl=false leaves kl_star_to_hat as NaN
// (the quadrature dominates runtime when the study does not need it).
TrialSet run_trials(const ExperimentPlan& plan, int threads, bool compute_kl = true,
                    const ProgressFn& progress = {});

// Fraction of samples the solution assigns to the wrong generating component,
// minimized over the two label permutations.  Hard memberships only
// (SoftMembership otherwise).
double misclassification_rate(const std::vector<int>& labels, const MembershipMatrix& m);

struct ConsistencyRow {
    std::int64_t n = 0;
    std::int64_t trials = 0;
    std::int64_t collapsed = 0;
    double median_err_alpha = 0.0;
    double median_err_mu1 = 0.0;
    double median_err_mu2 = 0.0;
    double median_err_var1 = 0.0;
    double median_err_var2 = 0.0;
    double p90_err_alpha = 0.0;
    double p90_err_mu1 = 0.0;
    double p90_err_mu2 = 0.0;
    double p90_err_var1 = 0.0;
    double p90_err_var2 = 0.0;
    double median_misclassification = 0.0;
    double median_kl = 0.0;
    double certified_fraction = 0.0;
};

struct ConsistencyResult {
    ExperimentPlan plan;
    std::vector<ConsistencyRow> rows;
    std::vector<TrialRecord> records;
};

// Per-N medians and 90th percentiles of the label-resolved errors, plus the
// certified fraction.  Collapsed trials are counted and excluded from the
// percentiles.
ConsistencyResult run_consistency(const ExperimentPlan& plan, int threads,
                                  const ProgressFn& progress = {});

struct CoverageRow {
    std::int64_t n = 0;
    std::int64_t trials = 0;
    std::int64_t covered = 0;  // trials with kl_star_to_hat <= threshold
    double coverage = 0.0;
    double wilson_lo = 0.0;    // 95% score interval for the coverage rate
    double wilson_hi = 0.0;
    double threshold = 0.0;    // H(alpha*) + epsilon
};

struct CoverageResult {
    ExperimentPlan plan;
    double epsilon = 0.0;
    std::vector<CoverageRow> rows;
    std::vector<TrialRecord> records;
};

// Per-N fraction of trials whose fitted model stays within divergence
// H(alpha1*, alpha2*) + epsilon of the generating model.  Collapsed trials
// count as uncovered.
CoverageResult run_kl_coverage(const ExperimentPlan& plan, double epsilon, int threads,
                               const ProgressFn& progress = {});

struct ExponentRow {
    std::int64_t n = 0;
    std::int64_t trials = 0;
    std::int64_t hits = 0;     // fits landing in the region (up to relabel)
    double p_hat = 0.0;
    double wilson_lo = 0.0;
    double wilson_hi = 0.0;
    bool censored = false;     // zero hits: p_hat replaced by the 3/n bound
    double neg_log_rate = 0.0; // -ln(p) / n, from p_hat or the bound
};

struct ExponentResult {
    ExperimentPlan plan;
    std::vector<ExponentRow> rows;
    // least-squares slope of -ln p_hat against n over uncensored rows
    // (absent with fewer than two such rows)
    std::optional<double> fitted_slope;
    // informational: restricted-divergence upper estimate from the region scan
    std::optional<double> grid_lower_bound;
};

// Estimate how fast the probability of the fit landing in the region decays
// with n.  Requires plan.region, and the region must exclude the generating
// parameters up to relabeling (std::invalid_argument otherwise).  Zero-hit
// rows are censored with a one-sided rule-of-three bound (p <= 3/trials);
// AllCensored when every row is.  grid_resolution > 0 also runs
// exponent_lower_bound_grid for comparison.
ExponentResult run_exponent(const ExperimentPlan& plan, int threads, int grid_resolution = 4,
                            const ProgressFn& progress = {});

struct WilsonInterval {
    double lo = 0.0;
    double hi = 0.0;
};

// 95% score interval (z = 1.96) for a binomial proportion.
WilsonInterval wilson_interval(std::int64_t hits, std::int64_t trials);

}  // namespace sigclass
