#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <vector>

#include "sigclass/core.hpp"
#include "sigclass/objective.hpp"
#include "sigclass/optimizer.hpp"
#include "sigclass/rng.hpp"

using namespace sigclass;

namespace {

SampleSet two_cluster_draw(std::size_t n, std::uint64_t seed) {
    SampleSet s;
    Rng rng(seed);
    for (std::size_t i = 0; i < n; ++i) {
        const double center = rng.uniform01() < 0.5 ? -3.0 : 3.0;
        s.values.push_back(center + rng.normal());
    }
    return s;
}

bool non_increasing(const std::vector<double>& trace) {
    for (std::size_t i = 1; i < trace.size(); ++i) {
        if (trace[i] > trace[i - 1]) return false;
    }
    return true;
}

bool same_memberships(const MembershipMatrix& a, const MembershipMatrix& b) {
    if (a.size() != b.size() || a.kind != b.kind) return false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a.weights[k] != b.weights[k]) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("fixed_point recognizes a fixed point in one pass") {
    const SampleSet s{{-5.0, -4.9, 4.9, 5.0}};
    const MembershipMatrix init = hard_split({1, 1, 2, 2});
    OptimizerConfig cfg;
    const Solution sol = fixed_point(s, init, cfg);
    CHECK(sol.converged);
    CHECK(sol.iterations == 1);
    CHECK(same_memberships(sol.memberships, init));
    CHECK(sol.trace.size() == 1);
    CHECK(sol.log_gain == log_gain(s, init, cfg.variance_floor).log_gain);
}

TEST_CASE("fixed_point walks a crossed split to the sign split") {
    const SampleSet s{{-5.0, -4.9, 4.9, 5.0}};
    OptimizerConfig cfg;
    const Solution from_crossed_a = fixed_point(s, hard_split({1, 2, 1, 2}), cfg);
    const Solution from_crossed_b = fixed_point(s, hard_split({2, 1, 2, 1}), cfg);
    const Solution oracle = exhaustive_oracle(s, cfg.variance_floor);

    // the global optimum is the sign split; both crossed starts reach it
    CHECK(oracle.memberships.weights[0][0] == 1.0);
    CHECK(oracle.memberships.weights[1][0] == 1.0);
    CHECK(oracle.memberships.weights[2][1] == 1.0);
    CHECK(oracle.memberships.weights[3][1] == 1.0);
    CHECK(from_crossed_a.log_gain == doctest::Approx(oracle.log_gain).epsilon(1e-12));
    CHECK(from_crossed_b.log_gain == doctest::Approx(oracle.log_gain).epsilon(1e-12));
    CHECK(same_memberships(from_crossed_a.memberships, oracle.memberships));
}

TEST_CASE("fixed_point traces never increase") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const SampleSet s = two_cluster_draw(30, seed);
        OptimizerConfig cfg;
        cfg.seed = seed;
        const Solution sol = multi_start(s, cfg, Method::fixed_point);
        CHECK(non_increasing(sol.trace));
    }
}

TEST_CASE("soft_descent escapes the symmetric saddle") {
    const SampleSet s{{-2.0, -1.9, 1.9, 2.0}};
    OptimizerConfig cfg;
    const Solution sol = soft_descent(s, uniform_soft(4), cfg);
    const double saddle = log_gain(s, uniform_soft(4), cfg.variance_floor).log_gain;
    CHECK(sol.converged);
    CHECK(sol.log_gain < saddle);
    CHECK(non_increasing(sol.trace));
}

TEST_CASE("soft_descent beats one hundred random hard assignments") {
    SampleSet s;
    Rng rng(3);
    for (int i = 0; i < 10; ++i) s.values.push_back(2.0 * rng.normal() + (i % 2 ? 1.5 : -1.5));
    OptimizerConfig cfg;
    cfg.seed = 3;
    const Solution sol = multi_start(s, cfg, Method::soft_descent);

    Rng assign_rng(17);
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<int> labels(10);
        bool has1 = false;
        bool has2 = false;
        for (auto& l : labels) {
            l = assign_rng.uniform01() < 0.5 ? 1 : 2;
            (l == 1 ? has1 : has2) = true;
        }
        if (!has1 || !has2) continue;
        const double hard = log_gain(s, hard_split(labels), cfg.variance_floor).log_gain;
        CHECK(sol.log_gain <= hard + 1e-9);
    }
}

TEST_CASE("soft_descent traces never increase") {
    for (std::uint64_t seed = 21; seed <= 26; ++seed) {
        const SampleSet s = two_cluster_draw(16, seed);
        OptimizerConfig cfg;
        cfg.seed = seed;
        const Solution sol = multi_start(s, cfg, Method::soft_descent);
        CHECK(non_increasing(sol.trace));
    }
}

TEST_CASE("multi_start output on separated data passes its certificate") {
    const SampleSet s = two_cluster_draw(40, 5);
    OptimizerConfig cfg;
    cfg.seed = 5;
    const Solution sol = multi_start(s, cfg);
    const CertificateReport report = certify(s, sol, 1e-9);
    CHECK(report.passed);
    CHECK(report.map_violations.empty());
}

TEST_CASE("more restarts never worsen the result") {
    const SampleSet s = two_cluster_draw(25, 9);
    OptimizerConfig one;
    one.seed = 9;
    one.restarts = 1;
    OptimizerConfig eight = one;
    eight.restarts = 8;
    const Solution a = multi_start(s, one);
    const Solution b = multi_start(s, eight);
    CHECK(b.log_gain <= a.log_gain);
}

TEST_CASE("multi_start is deterministic") {
    const SampleSet s = two_cluster_draw(25, 11);
    OptimizerConfig cfg;
    cfg.seed = 11;
    const Solution a = multi_start(s, cfg);
    const Solution b = multi_start(s, cfg);
    CHECK(a.log_gain == b.log_gain);
    CHECK(a.iterations == b.iterations);
    CHECK(a.converged == b.converged);
    CHECK(same_memberships(a.memberships, b.memberships));
    for (int i = 0; i < 2; ++i) {
        CHECK(a.params.alpha[i] == b.params.alpha[i]);
        CHECK(a.params.mu[i] == b.params.mu[i]);
        CHECK(a.params.var[i] == b.params.var[i]);
    }
    CHECK(a.trace == b.trace);
}

TEST_CASE("exhaustive_oracle finds the sign split") {
    const SampleSet s{{-5.0, -4.9, 4.9, 5.0}};
    const Solution sol = exhaustive_oracle(s, 1e-6);
    CHECK(sol.memberships.weights[0][0] == 1.0);
    CHECK(sol.memberships.weights[1][0] == 1.0);
    CHECK(sol.memberships.weights[2][1] == 1.0);
    CHECK(sol.memberships.weights[3][1] == 1.0);

    // independent check: the sign split beats every other two-sided assignment
    const double best = sol.log_gain;
    for (int v = 1; v < 15; ++v) {
        std::vector<int> labels(4);
        for (int k = 0; k < 4; ++k) labels[k] = (v >> (3 - k) & 1) ? 2 : 1;
        const double obj = log_gain(s, hard_split(labels), 1e-6).log_gain;
        CHECK(best <= obj + 1e-12);
    }
}

TEST_CASE("exhaustive_oracle breaks exact ties lexicographically") {
    const SampleSet s{{0.0, 1.0}};
    const Solution sol = exhaustive_oracle(s, 1e-6);
    CHECK(sol.memberships.weights[0][0] == 1.0);
    CHECK(sol.memberships.weights[1][1] == 1.0);
}

TEST_CASE("exhaustive_oracle rejects oversized inputs naming the cap") {
    SampleSet s;
    for (int i = 0; i < 25; ++i) s.values.push_back(static_cast<double>(i));
    try {
        exhaustive_oracle(s, 1e-6);
        FAIL("expected TooLarge");
    } catch (const TooLarge& e) {
        CHECK(e.n == 25);
        CHECK(std::string(e.what()).find("20") != std::string::npos);
    }
}

TEST_CASE("certificate passes on an oracle output with empty boundary") {
    const SampleSet s{{-5.0, -4.9, 4.9, 5.0}};
    const Solution sol = exhaustive_oracle(s, 1e-6);
    const CertificateReport report = certify(s, sol, 1e-9);
    CHECK(report.passed);
    CHECK(report.partition_counts[1] == 0);
    CHECK(report.map_violations.empty());
}

TEST_CASE("certificate flags a flipped assignment") {
    const SampleSet s{{-5.0, -4.9, 4.9, 5.0}};
    Solution sol = exhaustive_oracle(s, 1e-6);
    sol.memberships.weights[0] = {0.0, 1.0};
    const CertificateReport report = certify(s, sol, 1e-9);
    CHECK_FALSE(report.passed);
    REQUIRE(report.map_violations.size() == 1);
    CHECK(report.map_violations[0].index == 0);
}

TEST_CASE("certificate reports a perturbed mean as a residual") {
    const SampleSet s{{-5.0, -4.9, 4.9, 5.0}};
    Solution sol = exhaustive_oracle(s, 1e-6);
    sol.params.mu[0] += 0.1;
    const CertificateReport report = certify(s, sol, 1e-9);
    CHECK_FALSE(report.passed);
    CHECK(report.consistency_residuals[2] == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("soft relaxation never loses to the hard optimum") {
    Rng rng(41);
    for (int rep = 0; rep < 10; ++rep) {
        const std::size_t n = 4 + rng.bounded(11);  // N in [4, 14]
        SampleSet s;
        for (std::size_t i = 0; i < n; ++i) {
            const double center = rng.uniform01() < 0.5 ? -3.0 : 3.0;
            s.values.push_back(center + rng.normal());
        }
        OptimizerConfig cfg;
        const Solution oracle = exhaustive_oracle(s, cfg.variance_floor);
        const Solution soft = soft_descent(s, oracle.memberships, cfg);
        if (soft.converged) CHECK(soft.log_gain <= oracle.log_gain + 1e-9);
    }
}

TEST_CASE("oracle outputs always certify on random instances") {
    Rng rng(43);
    int checked = 0;
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t n = 4 + rng.bounded(9);  // N in [4, 12]
        SampleSet s;
        for (std::size_t i = 0; i < n; ++i) {
            const double center = rng.uniform01() < 0.5 ? -3.0 : 3.0;
            s.values.push_back(center + rng.normal());
        }
        const Solution sol = exhaustive_oracle(s, 1e-6);
        const CertificateReport report = certify(s, sol, 1e-9);
        if (report.partition_counts[1] > 0) continue;  // boundary case: unconstrained there
        ++checked;
        CHECK(report.passed);
    }
    CHECK(checked >= 90);  // boundary coincidences are measure-zero events
}

TEST_CASE("multi_start surfaces AllRestartsCollapsed as the dedicated error") {
    // every value identical: index split puts distinct-value seeding out of
    // reach and the first reassignment collapses one side
    const SampleSet s{{1.0, 1.0, 1.0, 1.0}};
    OptimizerConfig cfg;
    CHECK_THROWS_AS(multi_start(s, cfg), AllRestartsCollapsed);
}
