#pragma once

#include <span>
#include <vector>

#include "sigclass/core.hpp"

namespace sigclass {

// The classification-gain objective in log form.  Writing H for the entropy
// of the class weights and v_i for the class variances,
//
//   log_gain = 2*H(a1, a2) + a1*ln(v1) + a2*ln(v2).
//
// The exponentiated gain is never materialized; a hard split with two tight
// clusters would overflow/underflow it long before the log does anything
// interesting.
struct ObjectiveReport {
    double log_gain = 0.0;
    MixtureParams params;
    double per_class_entropy_term = 0.0;                     // H(a1, a2), nats
    std::array<double, 2> per_class_variance_terms{0.0, 0.0};  // a_i * ln(v_i)
};

// Membership-weighted parameter estimates:
//   a_i = sum_n m_ni / N
//   mu_i = sum_n m_ni x_n / (a_i N)
//   v_i  = sum_n m_ni (x_n - mu_i)^2 / (a_i N), clamped up to `floor`.
// Throws EmptyClass when a column of m sums to zero.
MixtureParams estimate_params(const SampleSet& samples, const MembershipMatrix& m, double floor);

ObjectiveReport log_gain(const SampleSet& samples, const MembershipMatrix& m, double floor);

// Partial derivative of log_gain with respect to each m_n1 (the second column
// moves as 1 - m_n1), with the class estimates held at their stationary
// values:
//
//   g_n = (1/N)[ln v1 - 2 ln a1 + (x_n - mu1)^2/v1]
//       - (1/N)[ln v2 - 2 ln a2 + (x_n - mu2)^2/v2]
//
// No extra chain-rule terms appear: at the estimates above the inner
// derivatives vanish.  Refuses to evaluate when a variance is clamped at the
// floor (ClampActive) because the clamp's kink has no derivative.
std::vector<double> grad_log_gain(const SampleSet& samples, const MembershipMatrix& m,
                                  double floor);

// Posterior comparison: 1 if a1*f1(x) > a2*f2(x), 2 if <, tie_rule on equality.
// split_half cannot be expressed in a class index and falls back to class 1;
// the boundary set carries no weight in the objective, so any choice there is
// admissible.
int map_rule(double x, const MixtureParams& theta, TieRule tie_rule);

// Shannon entropy in nats with the 0*ln(0) = 0 convention.  Rejects vectors
// with negative entries or total mass off 1 by more than 1e-9.
double entropy_discrete(std::span<const double> p);

}  // namespace sigclass
