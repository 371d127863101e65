#include "sigclass/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "sigclass/errors.hpp"
#include "sigclass/gaussian.hpp"
#include "sigclass/rng.hpp"

namespace sigclass {

namespace {

std::vector<int> labels_of(const MembershipMatrix& m) {
    std::vector<int> labels(m.size());
    for (std::size_t k = 0; k < m.size(); ++k) labels[k] = m.weights[k][0] == 1.0 ? 1 : 2;
    return labels;
}

double objective_or_inf(const SampleSet& samples, const MembershipMatrix& m, double floor) {
    try {
        return log_gain(samples, m, floor).log_gain;
    } catch (const EmptyClass&) {
        return std::numeric_limits<double>::infinity();
    }
}

}  // namespace

Solution fixed_point(const SampleSet& samples, const MembershipMatrix& init,
                     const OptimizerConfig& cfg) {
    validate(samples);
    validate(cfg);
    validate(init);
    const std::size_t n = samples.size();
    if (init.size() != n) throw std::invalid_argument("init size does not match sample count");

    Solution sol;
    sol.variance_floor = cfg.variance_floor;
    MembershipMatrix m = init;
    ObjectiveReport rep = log_gain(samples, m, cfg.variance_floor);
    sol.trace.push_back(rep.log_gain);

    std::vector<int> prev_labels;
    bool have_prev = false;
    if (m.kind == MembershipKind::hard) {
        prev_labels = labels_of(m);
        have_prev = true;
    }

    int iter = 0;
    while (iter < cfg.max_iters) {
        ++iter;
        std::vector<int> labels(n);
        std::size_t count1 = 0;
        for (std::size_t k = 0; k < n; ++k) {
            labels[k] = map_rule(samples.values[k], rep.params, cfg.tie_rule);
            count1 += labels[k] == 1;
        }
        if (count1 == 0 || count1 == n) throw ClassCollapse();
        if (have_prev && labels == prev_labels) {
            sol.converged = true;
            break;
        }
        MembershipMatrix m_new = hard_split(labels);
        ObjectiveReport rep_new = log_gain(samples, m_new, cfg.variance_floor);
        // the alternation provably never increases the objective; treat a
        // floating-point uptick as convergence rather than accepting it
        if (rep_new.log_gain > rep.log_gain) {
            sol.converged = true;
            break;
        }
        const double drop = rep.log_gain - rep_new.log_gain;
        m = std::move(m_new);
        rep = rep_new;
        prev_labels = std::move(labels);
        have_prev = true;
        sol.trace.push_back(rep.log_gain);
        if (drop < cfg.tol_objective) {
            sol.converged = true;
            break;
        }
    }
    sol.iterations = iter;
    sol.memberships = std::move(m);
    sol.params = rep.params;
    sol.log_gain = rep.log_gain;
    return sol;
}

Solution soft_descent(const SampleSet& samples, const MembershipMatrix& init,
                      const OptimizerConfig& cfg) {
    validate(samples);
    validate(cfg);
    validate(init);
    const std::size_t n = samples.size();
    if (init.size() != n) throw std::invalid_argument("init size does not match sample count");

    Solution sol;
    sol.variance_floor = cfg.variance_floor;
    MembershipMatrix m = init;
    m.kind = MembershipKind::soft;
    // rows sitting exactly at one half get a deterministic nudge (alternating
    // sign by index); the uniform point is a stationary saddle on symmetric
    // data and would pin the descent
    for (std::size_t k = 0; k < n; ++k) {
        if (std::abs(m.weights[k][0] - 0.5) < 1e-12) {
            m.weights[k][0] = 0.5 + (k % 2 == 0 ? 1e-6 : -1e-6);
            m.weights[k][1] = 1.0 - m.weights[k][0];
        }
    }

    ObjectiveReport rep = log_gain(samples, m, cfg.variance_floor);
    sol.trace.push_back(rep.log_gain);

    int iter = 0;
    while (iter < cfg.max_iters) {
        ++iter;
        std::vector<double> grad;
        try {
            grad = grad_log_gain(samples, m, cfg.variance_floor);
        } catch (const ClampActive&) {
            // no usable derivative at a floored variance: pull every row
            // toward one half by the largest factor that does not increase
            // the objective, then retry from the mixed point
            MembershipMatrix m_res = m;
            bool rescued = false;
            for (double f = 1.0; f >= 0x1.0p-40; f *= 0.5) {
                for (std::size_t k = 0; k < n; ++k) {
                    const double w = m.weights[k][0] + f * (0.5 - m.weights[k][0]);
                    m_res.weights[k] = {w, 1.0 - w};
                }
                const double obj = objective_or_inf(samples, m_res, cfg.variance_floor);
                if (obj <= rep.log_gain) {
                    m = m_res;
                    rep = log_gain(samples, m, cfg.variance_floor);
                    sol.trace.push_back(rep.log_gain);
                    rescued = true;
                    break;
                }
            }
            if (!rescued) {
                sol.converged = true;
                break;
            }
            continue;
        }

        MembershipMatrix m_try = m;
        double step = cfg.step_size;
        bool accepted = false;
        double obj_try = 0.0;
        for (int halvings = 0; halvings < 60; ++halvings) {
            for (std::size_t k = 0; k < n; ++k) {
                const double w = std::clamp(m.weights[k][0] - step * grad[k], 0.0, 1.0);
                m_try.weights[k] = {w, 1.0 - w};
            }
            obj_try = objective_or_inf(samples, m_try, cfg.variance_floor);
            if (obj_try < rep.log_gain) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            sol.converged = true;
            break;
        }
        const double drop = rep.log_gain - obj_try;
        m = m_try;
        rep = log_gain(samples, m, cfg.variance_floor);
        sol.trace.push_back(rep.log_gain);
        if (drop < cfg.tol_objective) {
            sol.converged = true;
            break;
        }
    }
    sol.iterations = iter;
    sol.memberships = std::move(m);
    sol.params = rep.params;
    sol.log_gain = rep.log_gain;
    return sol;
}

Solution multi_start(const SampleSet& samples, const OptimizerConfig& cfg, Method method) {
    validate(samples);
    validate(cfg);
    const std::size_t n = samples.size();
    if (n < 2) throw std::invalid_argument("need at least 2 samples to form two classes");

    std::optional<Solution> best;
    for (int r = 0; r < cfg.restarts; ++r) {
        Rng rng(cfg.seed, static_cast<std::uint64_t>(r));
        const std::size_t i1 = rng.bounded(n);
        std::size_t i2 = i1;
        bool distinct = false;
        for (int tries = 0; tries < 64 && !distinct; ++tries) {
            const std::size_t cand = rng.bounded(n);
            if (samples.values[cand] != samples.values[i1]) {
                i2 = cand;
                distinct = true;
            }
        }
        for (std::size_t cand = 0; cand < n && !distinct; ++cand) {
            if (samples.values[cand] != samples.values[i1]) {
                i2 = cand;
                distinct = true;
            }
        }

        std::vector<int> labels(n);
        if (distinct) {
            const double c1 = samples.values[i1];
            const double c2 = samples.values[i2];
            for (std::size_t k = 0; k < n; ++k) {
                const double x = samples.values[k];
                labels[k] = std::abs(x - c1) <= std::abs(x - c2) ? 1 : 2;
            }
        } else {
            // every value identical: proximity seeding is meaningless, split
            // the indices down the middle instead
            for (std::size_t k = 0; k < n; ++k) labels[k] = k < (n + 1) / 2 ? 1 : 2;
        }

        MembershipMatrix init;
        if (method == Method::fixed_point) {
            init = hard_split(labels);
        } else {
            init.kind = MembershipKind::soft;
            init.weights.reserve(n);
            for (int l : labels) {
                init.weights.push_back(l == 1 ? std::array<double, 2>{0.9, 0.1}
                                              : std::array<double, 2>{0.1, 0.9});
            }
        }

        try {
            Solution sol = method == Method::fixed_point ? fixed_point(samples, init, cfg)
                                                         : soft_descent(samples, init, cfg);
            if (!best || sol.log_gain < best->log_gain) best = std::move(sol);
        } catch (const ClassCollapse&) {
            continue;
        }
    }
    if (!best) throw AllRestartsCollapsed();
    return *std::move(best);
}

Solution exhaustive_oracle(const SampleSet& samples, double variance_floor) {
    validate(samples);
    const std::size_t n = samples.size();
    if (n < 2 || n > 20) throw TooLarge(n);
    if (!(variance_floor > 0.0)) {
        throw std::invalid_argument("variance floor must be positive");
    }

    const auto& x = samples.values;
    const double nd = static_cast<double>(n);
    double best_obj = std::numeric_limits<double>::infinity();
    std::uint32_t best_v = 0;
    const std::uint32_t top = (1u << n) - 1u;
    // assignment v: bit (n-1-k) of v is 0 when sample k is in class 1, so
    // ascending v enumerates label sequences in lexicographic order and a
    // strict comparison keeps the lexicographically smallest tie
    for (std::uint32_t v = 1; v < top; ++v) {
        double w1 = 0.0, w2 = 0.0, s1 = 0.0, s2 = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (v >> (n - 1 - k) & 1u) {
                w2 += 1.0;
                s2 += x[k];
            } else {
                w1 += 1.0;
                s1 += x[k];
            }
        }
        const double mu1 = s1 / w1;
        const double mu2 = s2 / w2;
        double ss1 = 0.0, ss2 = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (v >> (n - 1 - k) & 1u) {
                const double d = x[k] - mu2;
                ss2 += d * d;
            } else {
                const double d = x[k] - mu1;
                ss1 += d * d;
            }
        }
        const double var1 = std::max(ss1 / w1, variance_floor);
        const double var2 = std::max(ss2 / w2, variance_floor);
        const double a1 = w1 / nd;
        const double a2 = w2 / nd;
        // mirrors log_gain term for term (entropy accumulation order and the
        // grouped variance terms), so label-swapped assignments tie exactly
        const double h = -(a1 * std::log(a1)) - a2 * std::log(a2);
        const double obj = 2.0 * h + (a1 * std::log(var1) + a2 * std::log(var2));
        if (obj < best_obj) {
            best_obj = obj;
            best_v = v;
        }
    }

    std::vector<int> labels(n);
    for (std::size_t k = 0; k < n; ++k) labels[k] = (best_v >> (n - 1 - k) & 1u) ? 2 : 1;
    Solution sol;
    sol.memberships = hard_split(labels);
    ObjectiveReport rep = log_gain(samples, sol.memberships, variance_floor);
    sol.params = rep.params;
    sol.log_gain = rep.log_gain;
    sol.iterations = 0;
    sol.converged = true;
    sol.variance_floor = variance_floor;
    sol.trace.push_back(rep.log_gain);
    return sol;
}

CertificateReport certify(const SampleSet& samples, const Solution& sol, double tol) {
    validate(samples);
    if (sol.memberships.size() != samples.size()) {
        throw std::invalid_argument("solution does not match the sample count");
    }
    if (!(tol > 0.0)) throw std::invalid_argument("certificate tolerance must be positive");
    const MixtureParams& p = sol.params;
    for (int i = 0; i < 2; ++i) {
        if (!(p.var[i] > 0.0)) {
            throw std::invalid_argument("certificate needs strictly positive class variances");
        }
    }

    CertificateReport report;
    const std::size_t n = samples.size();
    MembershipMatrix rebuilt;
    rebuilt.kind = MembershipKind::soft;
    rebuilt.weights.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = samples.values[k];
        const double s1 = p.alpha[0] > 0.0
                              ? std::log(p.alpha[0]) + normal_log_pdf(x, p.mu[0], p.var[0])
                              : -std::numeric_limits<double>::infinity();
        const double s2 = p.alpha[1] > 0.0
                              ? std::log(p.alpha[1]) + normal_log_pdf(x, p.mu[1], p.var[1])
                              : -std::numeric_limits<double>::infinity();
        const double lambda = s1 - s2;
        const double w1 = sol.memberships.weights[k][0];
        if (lambda > tol) {
            ++report.partition_counts[0];
            rebuilt.weights[k] = {1.0, 0.0};
            if (!(w1 >= 1.0 - tol)) report.map_violations.push_back({k, lambda});
        } else if (lambda < -tol) {
            ++report.partition_counts[2];
            rebuilt.weights[k] = {0.0, 1.0};
            if (!(w1 <= tol)) report.map_violations.push_back({k, lambda});
        } else {
            ++report.partition_counts[1];
            rebuilt.weights[k] = sol.memberships.weights[k];
        }
    }

    try {
        const MixtureParams re = estimate_params(samples, rebuilt, sol.variance_floor);
        report.consistency_residuals = {
            std::abs(p.alpha[0] - re.alpha[0]), std::abs(p.alpha[1] - re.alpha[1]),
            std::abs(p.mu[0] - re.mu[0]),       std::abs(p.mu[1] - re.mu[1]),
            std::abs(p.var[0] - re.var[0]),     std::abs(p.var[1] - re.var[1])};
    } catch (const EmptyClass&) {
        report.consistency_residuals.fill(std::numeric_limits<double>::infinity());
        report.passed = false;
        return report;
    }

    double worst = 0.0;
    for (double r : report.consistency_residuals) worst = std::max(worst, r);
    report.passed = report.map_violations.empty() && worst <= tol;
    return report;
}

}  // namespace sigclass
