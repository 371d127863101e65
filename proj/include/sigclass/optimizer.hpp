#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "sigclass/core.hpp"
#include "sigclass/objective.hpp"

namespace sigclass {

struct Solution {
    MembershipMatrix memberships;
    MixtureParams params;  // estimate_params(samples, memberships, variance_floor)
    double log_gain = 0.0;
    int iterations = 0;
    bool converged = false;
    double variance_floor = 1e-6;  // floor the params were estimated under
    std::vector<double> trace;     // objective after each accepted step, initial value first
};

enum class Method { fixed_point, soft_descent };

// Alternate (i) parameter re-estimation and (ii) hard posterior reassignment
// until the assignment repeats, the objective drop falls below
// cfg.tol_objective, or cfg.max_iters.  The objective never increases along
// the accepted trace.  Returns hard memberships.  Throws ClassCollapse if a
// reassignment empties a class.
Solution fixed_point(const SampleSet& samples, const MembershipMatrix& init,
                     const OptimizerConfig& cfg);

// Projected gradient descent over the product of per-sample simplices: step
// against the gradient, clamp each row back to [0,1] with unit sum, halve the
// step while the objective would rise.  Initial rows sitting exactly at one
// half get a deterministic +/-1e-6 nudge (alternating sign by sample index):
// the uniform membership is a stationary saddle on symmetric data and would
// pin the descent.  Other rows start unchanged.  A clamped variance (no
// gradient there) triggers a documented rescue: rows are pulled toward 1/2 by
// the largest factor that does not increase the objective.  Final objective
// never exceeds the initial one.
Solution soft_descent(const SampleSet& samples, const MembershipMatrix& init,
                      const OptimizerConfig& cfg);

// cfg.restarts independent runs, restart r seeded by stream r of cfg.seed.
// Initialization is distance-based: two distinct sample values become
// provisional centers and every sample joins the closer one (soft runs get
// 0.9/0.1 rows instead of 0/1).  Returns the run with the smallest objective;
// equal objectives keep the earliest restart.  Throws AllRestartsCollapsed
// when every restart collapsed.
Solution multi_start(const SampleSet& samples, const OptimizerConfig& cfg,
                     Method method = Method::fixed_point);

// Ground truth by enumeration of all 2^N - 2 two-sided hard assignments
// (single-class assignments are excluded: the objective describes two
// sources).  Ties resolve to the lexicographically smallest assignment with
// class 1 ordered before class 2.  Throws TooLarge outside 2 <= N <= 20.
Solution exhaustive_oracle(const SampleSet& samples, double variance_floor);

struct Violation {
    std::size_t index;  // sample assigned against the strict posterior order
    double margin;      // posterior log-odds at that sample
};

// Optimality certificate for a candidate solution.  Samples are partitioned
// by the posterior log-odds lambda_n = ln(a1 f1(x_n)) - ln(a2 f2(x_n)) into
// strict class-1 (lambda > tol), a boundary band (|lambda| <= tol), and
// strict class-2.  A minimizer must put weight 1 on the strict side it
// dominates; boundary rows may sit anywhere.  The six consistency residuals
// compare the solution's parameters against the parameter map recomputed from
// that partition (strict sides at full weight, boundary rows at the
// solution's own weights), floored like every estimate in this library.
struct CertificateReport {
    std::array<std::size_t, 3> partition_counts{0, 0, 0};  // strict-1, boundary, strict-2
    std::vector<Violation> map_violations;
    std::array<double, 6> consistency_residuals{};  // a1, a2, mu1, mu2, v1, v2
    bool passed = false;
};

CertificateReport certify(const SampleSet& samples, const Solution& sol, double tol = 1e-9);

}  // namespace sigclass
