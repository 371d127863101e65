#include "sigclass/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "sigclass/gaussian.hpp"
#include "sigclass/objective.hpp"

namespace sigclass {

LabeledSamples sample_mixture(const MixtureParams& theta_star, std::size_t n, Rng& rng) {
    validate_generative(theta_star);
    if (n == 0) throw EmptySampleSet();
    LabeledSamples out;
    out.samples.values.reserve(n);
    out.labels.reserve(n);
    const double s0 = std::sqrt(theta_star.var[0]);
    const double s1 = std::sqrt(theta_star.var[1]);
    for (std::size_t k = 0; k < n; ++k) {
        const int comp = rng.uniform01() < theta_star.alpha[0] ? 0 : 1;
        const double sd = comp == 0 ? s0 : s1;
        out.samples.values.push_back(theta_star.mu[comp] + sd * rng.normal());
        out.labels.push_back(comp);
    }
    return out;
}

double misclassification_rate(const std::vector<int>& labels, const MembershipMatrix& m) {
    if (m.kind != MembershipKind::hard) throw SoftMembership();
    if (labels.size() != m.size()) {
        throw std::invalid_argument("label and membership counts differ");
    }
    if (labels.empty()) throw EmptySampleSet();
    std::size_t mismatches = 0;
    for (std::size_t k = 0; k < labels.size(); ++k) {
        const int assigned = m.weights[k][0] == 1.0 ? 0 : 1;
        mismatches += assigned != labels[k];
    }
    const std::size_t best = std::min(mismatches, labels.size() - mismatches);
    return static_cast<double>(best) / static_cast<double>(labels.size());
}

WilsonInterval wilson_interval(std::int64_t hits, std::int64_t trials) {
    if (trials < 1) throw std::invalid_argument("interval needs at least one trial");
    if (hits < 0 || hits > trials) throw std::invalid_argument("hits outside [0, trials]");
    const double z = 1.96;
    const double t = static_cast<double>(trials);
    const double p = static_cast<double>(hits) / t;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / t;
    const double center = (p + z2 / (2.0 * t)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / t + z2 / (4.0 * t * t)) / denom;
    return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

void validate(const ExperimentPlan& plan) {
    validate_generative(plan.theta_star);
    if (plan.n_values.empty()) throw std::invalid_argument("n_values must not be empty");
    for (std::size_t j = 0; j < plan.n_values.size(); ++j) {
        if (plan.n_values[j] < 2) throw std::invalid_argument("n_values entries must be at least 2");
        if (j > 0 && plan.n_values[j] <= plan.n_values[j - 1]) {
            throw std::invalid_argument("n_values must be strictly increasing");
        }
    }
    if (plan.trials_per_n < 1) throw std::invalid_argument("trials_per_n must be at least 1");
    validate(plan.optimizer);
    if (!(plan.grid_c > 0.0)) throw BadConstants("c must be positive");
    if (!(plan.grid_zeta > 0.0)) throw BadConstants("zeta must be positive");
    if (!(plan.grid_eta > 0.0)) throw BadConstants("eta must be positive");
    if (!(plan.grid_zeta + plan.grid_eta < 0.5)) {
        throw BadConstants("zeta + eta must be below 1/2");
    }
    if (plan.kl_points < 1000) throw std::invalid_argument("kl_points must be at least 1000");
    if (!(plan.certify_tol > 0.0)) throw std::invalid_argument("certify_tol must be positive");
    if (plan.region) validate(*plan.region);
}

namespace {

void resolve_errors(TrialRecord& rec, const MixtureParams& hat, const MixtureParams& star) {
    const auto total = [&](bool swap) {
        const int i = swap ? 1 : 0;
        const int j = 1 - i;
        return std::abs(hat.alpha[i] - star.alpha[0]) + std::abs(hat.alpha[j] - star.alpha[1]) +
               std::abs(hat.mu[i] - star.mu[0]) + std::abs(hat.mu[j] - star.mu[1]) +
               std::abs(hat.var[i] - star.var[0]) + std::abs(hat.var[j] - star.var[1]);
    };
    const bool swap = total(true) < total(false);
    const int i = swap ? 1 : 0;
    const int j = 1 - i;
    rec.err_alpha = std::abs(hat.alpha[i] - star.alpha[0]);
    rec.err_mu1 = std::abs(hat.mu[i] - star.mu[0]);
    rec.err_mu2 = std::abs(hat.mu[j] - star.mu[1]);
    rec.err_var1 = std::abs(hat.var[i] - star.var[0]);
    rec.err_var2 = std::abs(hat.var[j] - star.var[1]);
}

double kl_star_to(const MixtureParams& star, const MixtureParams& hat, std::int64_t n_points) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const MixtureParams* p : {&star, &hat}) {
        for (int i = 0; i < 2; ++i) {
            const double s = std::sqrt(p->var[i]);
            lo = std::min(lo, p->mu[i] - 12.0 * s);
            hi = std::max(hi, p->mu[i] + 12.0 * s);
        }
    }
    const DensityFn p_star = [&star](double x) { return mixture_pdf(x, star); };
    const DensityFn p_hat = [&hat](double x) { return mixture_pdf(x, hat); };
    return kl_density_quadrature(p_star, p_hat, lo, hi, n_points);
}

void run_cell(const ExperimentPlan& plan, std::int64_t gid, bool compute_kl, TrialRecord& rec) {
    const std::int64_t j = gid / plan.trials_per_n;
    const std::int64_t n = plan.n_values[static_cast<std::size_t>(j)];
    rec.trial_id = gid % plan.trials_per_n;
    rec.n = n;
    rec.data_seed = 2 * static_cast<std::uint64_t>(gid);
    rec.kl_star_to_hat = std::numeric_limits<double>::quiet_NaN();

    Rng data_rng(plan.seed, rec.data_seed);
    const LabeledSamples draw = sample_mixture(plan.theta_star, static_cast<std::size_t>(n),
                                               data_rng);
    OptimizerConfig cfg = plan.optimizer;
    cfg.seed = derive_seed(plan.seed, 2 * static_cast<std::uint64_t>(gid) + 1);

    Solution sol;
    try {
        sol = multi_start(draw.samples, cfg);
    } catch (const AllRestartsCollapsed&) {
        rec.collapsed = true;
        return;
    }
    rec.theta_hat = sol.params;
    rec.log_gain = sol.log_gain;
    rec.converged = sol.converged;

    const CertificateReport cert = certify(draw.samples, sol, plan.certify_tol);
    rec.certificate_passed = cert.passed;
    for (double r : cert.consistency_residuals) rec.max_residual = std::max(rec.max_residual, r);

    resolve_errors(rec, sol.params, plan.theta_star);
    rec.misclassification = misclassification_rate(draw.labels, sol.memberships);
    if (plan.region) rec.in_region = plan.region->contains_up_to_relabel(sol.params);
    if (compute_kl) rec.kl_star_to_hat = kl_star_to(plan.theta_star, sol.params, plan.kl_points);
}

double percentile(std::vector<double> v, double q) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0 || lo + 1 == v.size()) return v[lo];
    return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

}  // namespace

TrialSet run_trials(const ExperimentPlan& plan, int threads, bool compute_kl,
                    const ProgressFn& progress) {
    validate(plan);
    if (threads < 1) threads = 1;
    TrialSet set;
    set.plan = plan;
    set.records.resize(plan.n_values.size() * static_cast<std::size_t>(plan.trials_per_n));

    for (std::size_t j = 0; j < plan.n_values.size(); ++j) {
        const std::int64_t begin = static_cast<std::int64_t>(j) * plan.trials_per_n;
        const std::int64_t end = begin + plan.trials_per_n;
        std::atomic<std::int64_t> next{begin};
        std::exception_ptr first_error;
        std::mutex error_mutex;

        const auto worker = [&] {
            for (;;) {
                const std::int64_t gid = next.fetch_add(1);
                if (gid >= end) return;
                try {
                    run_cell(plan, gid, compute_kl, set.records[static_cast<std::size_t>(gid)]);
                } catch (...) {
                    std::scoped_lock lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    next.store(end);
                    return;
                }
            }
        };

        if (threads == 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            pool.reserve(static_cast<std::size_t>(threads) - 1);
            for (int w = 1; w < threads; ++w) pool.emplace_back(worker);
            worker();
            for (auto& th : pool) th.join();
        }
        if (first_error) std::rethrow_exception(first_error);
        if (progress) progress(plan.n_values[j]);
    }
    return set;
}

ConsistencyResult run_consistency(const ExperimentPlan& plan, int threads,
                                  const ProgressFn& progress) {
    TrialSet trials = run_trials(plan, threads, true, progress);
    ConsistencyResult result;
    result.plan = trials.plan;
    for (std::size_t j = 0; j < plan.n_values.size(); ++j) {
        const auto* group = trials.records.data() + j * static_cast<std::size_t>(plan.trials_per_n);
        ConsistencyRow row;
        row.n = plan.n_values[j];
        row.trials = plan.trials_per_n;
        std::vector<double> ea, em1, em2, ev1, ev2, mis, kl;
        std::int64_t certified = 0;
        for (std::int64_t t = 0; t < plan.trials_per_n; ++t) {
            const TrialRecord& rec = group[t];
            if (rec.collapsed) {
                ++row.collapsed;
                continue;
            }
            ea.push_back(rec.err_alpha);
            em1.push_back(rec.err_mu1);
            em2.push_back(rec.err_mu2);
            ev1.push_back(rec.err_var1);
            ev2.push_back(rec.err_var2);
            mis.push_back(rec.misclassification);
            kl.push_back(rec.kl_star_to_hat);
            certified += rec.certificate_passed;
        }
        row.median_err_alpha = percentile(ea, 0.5);
        row.median_err_mu1 = percentile(em1, 0.5);
        row.median_err_mu2 = percentile(em2, 0.5);
        row.median_err_var1 = percentile(ev1, 0.5);
        row.median_err_var2 = percentile(ev2, 0.5);
        row.p90_err_alpha = percentile(ea, 0.9);
        row.p90_err_mu1 = percentile(em1, 0.9);
        row.p90_err_mu2 = percentile(em2, 0.9);
        row.p90_err_var1 = percentile(ev1, 0.9);
        row.p90_err_var2 = percentile(ev2, 0.9);
        row.median_misclassification = percentile(mis, 0.5);
        row.median_kl = percentile(kl, 0.5);
        row.certified_fraction =
            static_cast<double>(certified) / static_cast<double>(plan.trials_per_n);
        result.rows.push_back(row);
    }
    result.records = std::move(trials.records);
    return result;
}

CoverageResult run_kl_coverage(const ExperimentPlan& plan, double epsilon, int threads,
                               const ProgressFn& progress) {
    if (epsilon < 0.0 || std::isnan(epsilon)) {
        throw std::invalid_argument("epsilon must be nonnegative");
    }
    TrialSet trials = run_trials(plan, threads, true, progress);
    CoverageResult result;
    result.plan = trials.plan;
    result.epsilon = epsilon;
    const double threshold = entropy_discrete(plan.theta_star.alpha) + epsilon;
    for (std::size_t j = 0; j < plan.n_values.size(); ++j) {
        const auto* group = trials.records.data() + j * static_cast<std::size_t>(plan.trials_per_n);
        CoverageRow row;
        row.n = plan.n_values[j];
        row.trials = plan.trials_per_n;
        row.threshold = threshold;
        for (std::int64_t t = 0; t < plan.trials_per_n; ++t) {
            const TrialRecord& rec = group[t];
            row.covered += !rec.collapsed && rec.kl_star_to_hat <= threshold;
        }
        row.coverage = static_cast<double>(row.covered) / static_cast<double>(row.trials);
        const WilsonInterval ci = wilson_interval(row.covered, row.trials);
        row.wilson_lo = ci.lo;
        row.wilson_hi = ci.hi;
        result.rows.push_back(row);
    }
    result.records = std::move(trials.records);
    return result;
}

ExponentResult run_exponent(const ExperimentPlan& plan, int threads, int grid_resolution,
                            const ProgressFn& progress) {
    if (!plan.region) throw std::invalid_argument("exponent run needs a region");
    if (plan.region->contains_up_to_relabel(plan.theta_star)) {
        throw std::invalid_argument("region must exclude the generating parameters");
    }
    TrialSet trials = run_trials(plan, threads, false, progress);
    ExponentResult result;
    result.plan = trials.plan;
    bool any_uncensored = false;
    for (std::size_t j = 0; j < plan.n_values.size(); ++j) {
        const auto* group = trials.records.data() + j * static_cast<std::size_t>(plan.trials_per_n);
        ExponentRow row;
        row.n = plan.n_values[j];
        row.trials = plan.trials_per_n;
        for (std::int64_t t = 0; t < plan.trials_per_n; ++t) row.hits += group[t].in_region;
        row.p_hat = static_cast<double>(row.hits) / static_cast<double>(row.trials);
        const WilsonInterval ci = wilson_interval(row.hits, row.trials);
        row.wilson_lo = ci.lo;
        row.wilson_hi = ci.hi;
        row.censored = row.hits == 0;
        const double p_for_rate =
            row.censored ? 3.0 / static_cast<double>(row.trials) : row.p_hat;
        row.neg_log_rate = -std::log(p_for_rate) / static_cast<double>(row.n);
        any_uncensored = any_uncensored || !row.censored;
        result.rows.push_back(row);
    }
    if (!any_uncensored) throw AllCensored();

    std::vector<double> xs, ys;
    for (const ExponentRow& row : result.rows) {
        if (row.censored) continue;
        xs.push_back(static_cast<double>(row.n));
        ys.push_back(-std::log(row.p_hat));
    }
    if (xs.size() >= 2) {
        double mx = 0.0, my = 0.0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            mx += xs[k];
            my += ys[k];
        }
        mx /= static_cast<double>(xs.size());
        my /= static_cast<double>(xs.size());
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            sxx += (xs[k] - mx) * (xs[k] - mx);
            sxy += (xs[k] - mx) * (ys[k] - my);
        }
        if (sxx > 0.0) result.fitted_slope = sxy / sxx;
    }
    if (grid_resolution > 0) {
        result.grid_lower_bound =
            exponent_lower_bound_grid(*plan.region, plan.theta_star, grid_resolution);
    }
    return result;
}

}  // namespace sigclass
