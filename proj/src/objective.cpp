#include "sigclass/objective.hpp"

#include <cmath>
#include <stdexcept>

#include "sigclass/errors.hpp"
#include "sigclass/gaussian.hpp"

namespace sigclass {

namespace {

void check_pair(const SampleSet& samples, const MembershipMatrix& m) {
    if (samples.size() != m.size()) {
        throw std::invalid_argument("membership matrix and sample set sizes differ");
    }
}

struct RawEstimates {
    MixtureParams params;     // variances already clamped to the floor
    std::array<double, 2> raw_var{};  // unclamped variances
};

RawEstimates estimate_raw(const SampleSet& samples, const MembershipMatrix& m, double floor) {
    const std::size_t n = samples.size();
    const double nd = static_cast<double>(n);
    RawEstimates est;
    for (int i = 0; i < 2; ++i) {
        double weight = 0.0;
        double weighted_sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            weight += m.weights[k][i];
            weighted_sum += m.weights[k][i] * samples.values[k];
        }
        if (weight <= 0.0) throw EmptyClass(i + 1);
        const double mu = weighted_sum / weight;
        double spread = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double d = samples.values[k] - mu;
            spread += m.weights[k][i] * d * d;
        }
        const double raw = spread / weight;
        est.params.alpha[i] = weight / nd;
        est.params.mu[i] = mu;
        est.params.var[i] = raw < floor ? floor : raw;
        est.raw_var[i] = raw;
    }
    return est;
}

}  // namespace

MixtureParams estimate_params(const SampleSet& samples, const MembershipMatrix& m, double floor) {
    check_pair(samples, m);
    if (floor < 0.0) throw std::invalid_argument("variance floor must be nonnegative");
    return estimate_raw(samples, m, floor).params;
}

ObjectiveReport log_gain(const SampleSet& samples, const MembershipMatrix& m, double floor) {
    ObjectiveReport r;
    r.params = estimate_params(samples, m, floor);
    r.per_class_entropy_term = entropy_discrete(r.params.alpha);
    for (int i = 0; i < 2; ++i) {
        r.per_class_variance_terms[i] = r.params.alpha[i] * std::log(r.params.var[i]);
    }
    // the variance terms are grouped so that swapping class labels gives the
    // bit-identical value; the oracle's exact tie detection relies on this
    r.log_gain = 2.0 * r.per_class_entropy_term +
                 (r.per_class_variance_terms[0] + r.per_class_variance_terms[1]);
    return r;
}

std::vector<double> grad_log_gain(const SampleSet& samples, const MembershipMatrix& m,
                                  double floor) {
    check_pair(samples, m);
    const RawEstimates est = estimate_raw(samples, m, floor);
    for (int i = 0; i < 2; ++i) {
        if (est.raw_var[i] < floor) throw ClampActive(i + 1);
    }
    const MixtureParams& p = est.params;
    const double nd = static_cast<double>(samples.size());
    std::array<double, 2> base;
    for (int i = 0; i < 2; ++i) {
        base[i] = std::log(p.var[i]) - 2.0 * std::log(p.alpha[i]);
    }
    std::vector<double> g(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const double x = samples.values[k];
        const double d1 = x - p.mu[0];
        const double d2 = x - p.mu[1];
        g[k] = (base[0] + d1 * d1 / p.var[0]) / nd - (base[1] + d2 * d2 / p.var[1]) / nd;
    }
    return g;
}

int map_rule(double x, const MixtureParams& theta, TieRule tie_rule) {
    double score[2];
    for (int i = 0; i < 2; ++i) {
        score[i] = theta.alpha[i] > 0.0
                       ? std::log(theta.alpha[i]) + normal_log_pdf(x, theta.mu[i], theta.var[i])
                       : -std::numeric_limits<double>::infinity();
    }
    if (score[0] > score[1]) return 1;
    if (score[0] < score[1]) return 2;
    return tie_rule == TieRule::assign_to_class2 ? 2 : 1;
}

double entropy_discrete(std::span<const double> p) {
    double total = 0.0;
    for (double v : p) {
        if (!(v >= 0.0)) throw NotADistribution("negative or NaN probability");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-9) throw NotADistribution("mass sums to " + std::to_string(total));
    double h = 0.0;
    for (double v : p) {
        if (v > 0.0) h -= v * std::log(v);
    }
    return h;
}

}  // namespace sigclass
