#include "sigclass/core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sigclass {

void validate(const SampleSet& samples) {
    if (samples.values.empty()) throw EmptySampleSet();
    for (std::size_t i = 0; i < samples.values.size(); ++i) {
        if (!std::isfinite(samples.values[i])) throw NonFiniteSample(i);
    }
}

MembershipMatrix hard_split(const std::vector<int>& labels) {
    MembershipMatrix m;
    m.kind = MembershipKind::hard;
    m.weights.reserve(labels.size());
    for (int l : labels) {
        if (l == 1) {
            m.weights.push_back({1.0, 0.0});
        } else if (l == 2) {
            m.weights.push_back({0.0, 1.0});
        } else {
            throw std::invalid_argument("class label must be 1 or 2, got " + std::to_string(l));
        }
    }
    return m;
}

MembershipMatrix uniform_soft(std::size_t n) {
    MembershipMatrix m;
    m.kind = MembershipKind::soft;
    m.weights.assign(n, {0.5, 0.5});
    return m;
}

void validate(const MembershipMatrix& m) {
    for (std::size_t n = 0; n < m.weights.size(); ++n) {
        const auto& row = m.weights[n];
        for (double w : row) {
            if (!(w >= 0.0 && w <= 1.0)) {
                throw std::invalid_argument("membership weight out of [0,1] at row " +
                                            std::to_string(n));
            }
        }
        if (std::abs(row[0] + row[1] - 1.0) > 1e-12) {
            throw std::invalid_argument("membership row " + std::to_string(n) +
                                        " does not sum to 1");
        }
        if (m.kind == MembershipKind::hard && row[0] != 0.0 && row[0] != 1.0) {
            throw std::invalid_argument("hard membership row " + std::to_string(n) +
                                        " has a fractional weight");
        }
    }
}

void validate(const MixtureParams& p) {
    for (double a : p.alpha) {
        if (!std::isfinite(a) || a < 0.0) {
            throw std::invalid_argument("class weights must be finite and nonnegative");
        }
    }
    if (std::abs(p.alpha[0] + p.alpha[1] - 1.0) > 1e-12) {
        throw std::invalid_argument("class weights must sum to 1");
    }
    for (double mu : p.mu) {
        if (!std::isfinite(mu)) throw std::invalid_argument("class means must be finite");
    }
    for (double v : p.var) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("class variances must be finite and nonnegative");
        }
    }
}

void validate_generative(const MixtureParams& p) {
    validate(p);
    for (int i = 0; i < 2; ++i) {
        if (p.alpha[i] <= 0.0) {
            throw std::invalid_argument("generative model needs both class weights positive");
        }
        if (p.var[i] <= 0.0) {
            throw std::invalid_argument("generative model needs both class variances positive");
        }
    }
}

void validate(const OptimizerConfig& cfg) {
    if (cfg.max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
    if (!(cfg.tol_objective > 0.0)) throw std::invalid_argument("tol_objective must be positive");
    if (cfg.restarts < 1) throw std::invalid_argument("restarts must be at least 1");
    if (!(cfg.variance_floor > 0.0)) {
        throw std::invalid_argument("variance_floor must be positive");
    }
    if (!(cfg.step_size > 0.0)) throw std::invalid_argument("step_size must be positive");
}

std::int64_t TypeHistogram::total() const {
    std::int64_t t = outliers;
    for (std::int64_t c : counts) t += c;
    return t;
}

}  // namespace sigclass
