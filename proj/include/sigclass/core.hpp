#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "sigclass/errors.hpp"

namespace sigclass {

// Observed real-valued signal samples x_1..x_N, order preserved.
struct SampleSet {
    std::vector<double> values;
    std::size_t size() const { return values.size(); }
};

// EmptySampleSet / NonFiniteSample (with offending index)
void validate(const SampleSet& samples);

enum class MembershipKind { hard, soft };

// Per-sample class weights; row n is (m_n1, m_n2).  Rows live on the
// probability simplex; a hard matrix holds only 0/1 entries.
struct MembershipMatrix {
    std::vector<std::array<double, 2>> weights;
    MembershipKind kind = MembershipKind::soft;
    std::size_t size() const { return weights.size(); }
};

// rows of exact 0/1 from class labels in {1, 2}
MembershipMatrix hard_split(const std::vector<int>& labels);
// all rows (0.5, 0.5)
MembershipMatrix uniform_soft(std::size_t n);
void validate(const MembershipMatrix& m);

// Two-component Gaussian source model: weights, means, variances.
struct MixtureParams {
    std::array<double, 2> alpha{0.5, 0.5};
    std::array<double, 2> mu{0.0, 0.0};
    std::array<double, 2> var{1.0, 1.0};
};

// structural invariants: finite, weights on the simplex, variances nonnegative
void validate(const MixtureParams& p);
// additionally requires both weights and both variances strictly positive, so
// the model can actually generate two-source data
void validate_generative(const MixtureParams& p);

enum class TieRule { assign_to_class1, assign_to_class2, split_half };

struct OptimizerConfig {
    int max_iters = 500;
    double tol_objective = 1e-12;  // stop when the objective drop falls below this
    int restarts = 8;
    std::uint64_t seed = 0;
    double variance_floor = 1e-6;
    double step_size = 1.0;  // initial step for the soft descent, halved by backtracking
    TieRule tie_rule = TieRule::assign_to_class1;
};

void validate(const OptimizerConfig& cfg);

// Symmetric quantization grid: bins of width bin_width centered at k*bin_width
// for k in [-(n_bins-1)/2 .. (n_bins-1)/2]; bin k covers the half-open
// interval [(k-1/2)*bin_width, (k+1/2)*bin_width).  Samples with
// |x| >= m_bound are outliers.  All derived fields are recomputable from
// (c, zeta, eta, n) bit-exactly.
struct GridSpec {
    double c = 1.0;
    double zeta = 0.1;
    double eta = 0.2;
    std::int64_t n = 0;
    double m_bound = 0.0;
    std::int64_t n_bins = 0;
    double bin_width = 0.0;
    std::int64_t k_min() const { return -(n_bins - 1) / 2; }
    std::int64_t k_max() const { return (n_bins - 1) / 2; }
};

// Empirical bin occupation counts a_k plus the count of out-of-range samples.
struct TypeHistogram {
    GridSpec grid;
    std::vector<std::int64_t> counts;  // index 0 corresponds to grid.k_min()
    std::int64_t outliers = 0;
    std::int64_t count_at(std::int64_t k) const {
        return counts[static_cast<std::size_t>(k - grid.k_min())];
    }
    std::int64_t total() const;
    bool outlier_event() const { return outliers > 0; }
};

}  // namespace sigclass
