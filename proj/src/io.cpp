#include "sigclass/io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace sigclass {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string strip_comment(const std::string& line) {
    const std::size_t pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

double parse_real(const std::string& text, const std::string& where) {
    const std::string t = trim(text);
    if (t.empty()) throw ParseError(where + ": expected a number");
    const char* begin = t.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + t.size()) throw ParseError(where + ": bad number '" + t + "'");
    return v;
}

std::int64_t parse_int(const std::string& text, const std::string& where) {
    const std::string t = trim(text);
    if (t.empty()) throw ParseError(where + ": expected an integer");
    std::int64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size()) {
        throw ParseError(where + ": bad integer '" + t + "'");
    }
    return v;
}

std::uint64_t parse_u64(const std::string& text, const std::string& where) {
    const std::string t = trim(text);
    if (t.empty()) throw ParseError(where + ": expected an integer");
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size()) {
        throw ParseError(where + ": bad integer '" + t + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string::npos) {
            parts.push_back(s.substr(start));
            return parts;
        }
        parts.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

Interval parse_interval(const std::string& text, const std::string& where) {
    const auto parts = split(text, ',');
    if (parts.size() != 2) throw ParseError(where + ": expected 'lo,hi'");
    return {parse_real(parts[0], where), parse_real(parts[1], where)};
}

}  // namespace

SampleSet read_samples(std::istream& in, const std::string& name) {
    SampleSet samples;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(strip_comment(line));
        if (t.empty()) continue;
        samples.values.push_back(parse_real(t, name + ":" + std::to_string(line_no)));
    }
    return samples;
}

SampleSet read_samples_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open sample file '" + path + "'");
    return read_samples(in, path);
}

void write_samples(std::ostream& out, const SampleSet& samples) {
    for (double v : samples.values) out << format_double(v) << '\n';
}

std::string format_double(double x) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
    (void)ec;
    return std::string(buf, ptr);
}

void to_json(nlohmann::json& j, const MixtureParams& p) {
    j = nlohmann::json{{"alpha", p.alpha}, {"mu", p.mu}, {"var", p.var}};
}

void from_json(const nlohmann::json& j, MixtureParams& p) {
    j.at("alpha").get_to(p.alpha);
    j.at("mu").get_to(p.mu);
    j.at("var").get_to(p.var);
}

void to_json(nlohmann::json& j, const GridSpec& g) {
    j = nlohmann::json{{"c", g.c},           {"zeta", g.zeta},
                       {"eta", g.eta},       {"n", g.n},
                       {"m_bound", g.m_bound}, {"n_bins", g.n_bins},
                       {"bin_width", g.bin_width}};
}

void to_json(nlohmann::json& j, const ObjectiveReport& r) {
    j = nlohmann::json{{"log_gain", r.log_gain},
                       {"params", r.params},
                       {"per_class_entropy_term", r.per_class_entropy_term},
                       {"per_class_variance_terms", r.per_class_variance_terms}};
}

void to_json(nlohmann::json& j, const Violation& v) {
    j = nlohmann::json{{"index", v.index}, {"margin", v.margin}};
}

void to_json(nlohmann::json& j, const CertificateReport& c) {
    j = nlohmann::json{{"partition_counts", c.partition_counts},
                       {"map_violations", c.map_violations},
                       {"consistency_residuals", c.consistency_residuals},
                       {"passed", c.passed}};
}

void to_json(nlohmann::json& j, const Solution& s) {
    j = nlohmann::json{
        {"kind", s.memberships.kind == MembershipKind::hard ? "hard" : "soft"},
        {"memberships", s.memberships.weights},
        {"params", s.params},
        {"log_gain", s.log_gain},
        {"iterations", s.iterations},
        {"converged", s.converged},
        {"variance_floor", s.variance_floor}};
}

void from_json(const nlohmann::json& j, Solution& s) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "hard") {
        s.memberships.kind = MembershipKind::hard;
    } else if (kind == "soft") {
        s.memberships.kind = MembershipKind::soft;
    } else {
        throw ParseError("solution kind must be 'hard' or 'soft', got '" + kind + "'");
    }
    j.at("memberships").get_to(s.memberships.weights);
    j.at("params").get_to(s.params);
    j.at("log_gain").get_to(s.log_gain);
    j.at("iterations").get_to(s.iterations);
    j.at("converged").get_to(s.converged);
    j.at("variance_floor").get_to(s.variance_floor);
    s.trace.clear();
}

namespace {

std::string interval_text(const Interval& iv) {
    return format_double(iv.lo) + "," + format_double(iv.hi);
}

nlohmann::json region_json(const RegionSpec& r) {
    return nlohmann::json{{"alpha1", interval_text(r.alpha1)},
                          {"mu1", interval_text(r.mu1)},
                          {"mu2", interval_text(r.mu2)},
                          {"var1", interval_text(r.var1)},
                          {"var2", interval_text(r.var2)},
                          {"variance_floor", r.variance_floor}};
}

const char* tie_rule_name(TieRule rule) {
    switch (rule) {
        case TieRule::assign_to_class1: return "assign_to_class1";
        case TieRule::assign_to_class2: return "assign_to_class2";
        case TieRule::split_half: return "split_half";
    }
    return "assign_to_class1";
}

nlohmann::json optimizer_json(const OptimizerConfig& cfg) {
    return nlohmann::json{{"max_iters", cfg.max_iters},
                          {"tol_objective", cfg.tol_objective},
                          {"restarts", cfg.restarts},
                          {"seed", cfg.seed},
                          {"variance_floor", cfg.variance_floor},
                          {"step_size", cfg.step_size},
                          {"tie_rule", tie_rule_name(cfg.tie_rule)}};
}

nlohmann::json plan_json(const ExperimentPlan& plan) {
    nlohmann::json j{{"theta_star", plan.theta_star},
                     {"n_values", plan.n_values},
                     {"trials_per_n", plan.trials_per_n},
                     {"seed", plan.seed},
                     {"optimizer", optimizer_json(plan.optimizer)},
                     {"grid", {{"c", plan.grid_c}, {"zeta", plan.grid_zeta}, {"eta", plan.grid_eta}}},
                     {"kl_points", plan.kl_points},
                     {"certify_tol", plan.certify_tol}};
    j["region"] = plan.region ? region_json(*plan.region) : nlohmann::json(nullptr);
    return j;
}

}  // namespace

void to_json(nlohmann::json& j, const ConsistencyResult& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const ConsistencyRow& row : r.rows) {
        rows.push_back({{"n", row.n},
                        {"trials", row.trials},
                        {"collapsed", row.collapsed},
                        {"median_err_alpha", row.median_err_alpha},
                        {"median_err_mu1", row.median_err_mu1},
                        {"median_err_mu2", row.median_err_mu2},
                        {"median_err_var1", row.median_err_var1},
                        {"median_err_var2", row.median_err_var2},
                        {"p90_err_alpha", row.p90_err_alpha},
                        {"p90_err_mu1", row.p90_err_mu1},
                        {"p90_err_mu2", row.p90_err_mu2},
                        {"p90_err_var1", row.p90_err_var1},
                        {"p90_err_var2", row.p90_err_var2},
                        {"median_misclassification", row.median_misclassification},
                        {"median_kl", row.median_kl},
                        {"certified_fraction", row.certified_fraction}});
    }
    j = nlohmann::json{{"mode", "consistency"}, {"plan", plan_json(r.plan)}, {"rows", rows}};
}

void to_json(nlohmann::json& j, const CoverageResult& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const CoverageRow& row : r.rows) {
        rows.push_back({{"n", row.n},
                        {"trials", row.trials},
                        {"covered", row.covered},
                        {"coverage", row.coverage},
                        {"wilson_lo", row.wilson_lo},
                        {"wilson_hi", row.wilson_hi},
                        {"threshold", row.threshold}});
    }
    j = nlohmann::json{{"mode", "coverage"},
                       {"epsilon", r.epsilon},
                       {"plan", plan_json(r.plan)},
                       {"rows", rows}};
}

void to_json(nlohmann::json& j, const ExponentResult& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const ExponentRow& row : r.rows) {
        rows.push_back({{"n", row.n},
                        {"trials", row.trials},
                        {"hits", row.hits},
                        {"p_hat", row.p_hat},
                        {"wilson_lo", row.wilson_lo},
                        {"wilson_hi", row.wilson_hi},
                        {"censored", row.censored},
                        {"neg_log_rate", row.neg_log_rate}});
    }
    j = nlohmann::json{{"mode", "exponent"}, {"plan", plan_json(r.plan)}, {"rows", rows}};
    j["fitted_slope"] = r.fitted_slope ? nlohmann::json(*r.fitted_slope) : nlohmann::json(nullptr);
    j["grid_lower_bound"] =
        r.grid_lower_bound ? nlohmann::json(*r.grid_lower_bound) : nlohmann::json(nullptr);
}

void write_memberships_csv(std::ostream& out, const MembershipMatrix& m) {
    out << "index,m1,m2\n";
    for (std::size_t k = 0; k < m.size(); ++k) {
        out << k << ',' << format_double(m.weights[k][0]) << ',' << format_double(m.weights[k][1])
            << '\n';
    }
}

void write_trace_csv(std::ostream& out, const std::vector<double>& trace) {
    out << "iteration,log_gain\n";
    for (std::size_t k = 0; k < trace.size(); ++k) {
        out << k << ',' << format_double(trace[k]) << '\n';
    }
}

void write_histogram_csv(std::ostream& out, const TypeHistogram& hist) {
    const nlohmann::json header{{"grid", hist.grid}, {"outliers", hist.outliers}};
    out << "# " << header.dump() << '\n';
    out << "k,count\n";
    for (std::int64_t k = hist.grid.k_min(); k <= hist.grid.k_max(); ++k) {
        out << k << ',' << hist.count_at(k) << '\n';
    }
}

void write_model_csv(std::ostream& out, const DiscretizedModel& model) {
    const nlohmann::json header{{"grid", model.grid}, {"c_p", model.c_p}, {"params", model.theta}};
    out << "# " << header.dump() << '\n';
    out << "k,mass\n";
    for (std::int64_t k = model.grid.k_min(); k <= model.grid.k_max(); ++k) {
        out << k << ',' << format_double(model.mass_at(k)) << '\n';
    }
}

void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& records) {
    out << "trial_id,n,data_seed,alpha1,alpha2,mu1,mu2,var1,var2,log_gain,kl_star_to_hat,"
           "converged,collapsed,certificate_passed,max_residual,err_alpha,err_mu1,err_mu2,"
           "err_var1,err_var2,misclassification,in_region\n";
    for (const TrialRecord& r : records) {
        out << r.trial_id << ',' << r.n << ',' << r.data_seed << ','
            << format_double(r.theta_hat.alpha[0]) << ',' << format_double(r.theta_hat.alpha[1])
            << ',' << format_double(r.theta_hat.mu[0]) << ',' << format_double(r.theta_hat.mu[1])
            << ',' << format_double(r.theta_hat.var[0]) << ',' << format_double(r.theta_hat.var[1])
            << ',' << format_double(r.log_gain) << ',' << format_double(r.kl_star_to_hat) << ','
            << r.converged << ',' << r.collapsed << ',' << r.certificate_passed << ','
            << format_double(r.max_residual) << ',' << format_double(r.err_alpha) << ','
            << format_double(r.err_mu1) << ',' << format_double(r.err_mu2) << ','
            << format_double(r.err_var1) << ',' << format_double(r.err_var2) << ','
            << format_double(r.misclassification) << ',' << r.in_region << '\n';
    }
}

void write_plot_csv(std::ostream& out, const ConsistencyResult& r) {
    out << "n,median_err_alpha,median_err_mu1,median_err_mu2,median_err_var1,median_err_var2,"
           "median_misclassification,median_kl\n";
    for (const ConsistencyRow& row : r.rows) {
        out << row.n << ',' << format_double(row.median_err_alpha) << ','
            << format_double(row.median_err_mu1) << ',' << format_double(row.median_err_mu2) << ','
            << format_double(row.median_err_var1) << ',' << format_double(row.median_err_var2)
            << ',' << format_double(row.median_misclassification) << ','
            << format_double(row.median_kl) << '\n';
    }
}

void write_plot_csv(std::ostream& out, const CoverageResult& r) {
    out << "n,coverage,wilson_lo,wilson_hi,threshold\n";
    for (const CoverageRow& row : r.rows) {
        out << row.n << ',' << format_double(row.coverage) << ',' << format_double(row.wilson_lo)
            << ',' << format_double(row.wilson_hi) << ',' << format_double(row.threshold) << '\n';
    }
}

void write_plot_csv(std::ostream& out, const ExponentResult& r) {
    out << "n,p_hat,neg_log_rate,wilson_lo,wilson_hi,censored\n";
    for (const ExponentRow& row : r.rows) {
        out << row.n << ',' << format_double(row.p_hat) << ',' << format_double(row.neg_log_rate)
            << ',' << format_double(row.wilson_lo) << ',' << format_double(row.wilson_hi) << ','
            << row.censored << '\n';
    }
}

PlanFile read_plan_file(std::istream& in, const std::string& name) {
    PlanFile pf;
    RegionSpec region;
    bool region_touched = false;
    bool mode_set = false;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(strip_comment(line));
        if (t.empty()) continue;
        const std::string where = name + ":" + std::to_string(line_no);
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) throw ParseError(where + ": expected 'key = value'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        const std::string ctx = where + " (" + key + ")";

        if (key == "mode") {
            pf.mode = value;
            mode_set = true;
        } else if (key == "seed") {
            pf.plan.seed = parse_u64(value, ctx);
        } else if (key == "trials_per_n") {
            pf.plan.trials_per_n = parse_int(value, ctx);
        } else if (key == "n_values") {
            pf.plan.n_values.clear();
            for (const std::string& part : split(value, ',')) {
                pf.plan.n_values.push_back(parse_int(part, ctx));
            }
        } else if (key == "kl_points") {
            pf.plan.kl_points = parse_int(value, ctx);
        } else if (key == "certify_tol") {
            pf.plan.certify_tol = parse_real(value, ctx);
        } else if (key == "epsilon") {
            pf.epsilon = parse_real(value, ctx);
        } else if (key == "grid_resolution") {
            pf.grid_resolution = static_cast<int>(parse_int(value, ctx));
        } else if (key == "theta_star.alpha1") {
            pf.plan.theta_star.alpha[0] = parse_real(value, ctx);
            pf.plan.theta_star.alpha[1] = 1.0 - pf.plan.theta_star.alpha[0];
        } else if (key == "theta_star.mu1") {
            pf.plan.theta_star.mu[0] = parse_real(value, ctx);
        } else if (key == "theta_star.mu2") {
            pf.plan.theta_star.mu[1] = parse_real(value, ctx);
        } else if (key == "theta_star.var1") {
            pf.plan.theta_star.var[0] = parse_real(value, ctx);
        } else if (key == "theta_star.var2") {
            pf.plan.theta_star.var[1] = parse_real(value, ctx);
        } else if (key == "optimizer.max_iters") {
            pf.plan.optimizer.max_iters = static_cast<int>(parse_int(value, ctx));
        } else if (key == "optimizer.tol_objective") {
            pf.plan.optimizer.tol_objective = parse_real(value, ctx);
        } else if (key == "optimizer.restarts") {
            pf.plan.optimizer.restarts = static_cast<int>(parse_int(value, ctx));
        } else if (key == "optimizer.variance_floor") {
            pf.plan.optimizer.variance_floor = parse_real(value, ctx);
        } else if (key == "optimizer.step_size") {
            pf.plan.optimizer.step_size = parse_real(value, ctx);
        } else if (key == "optimizer.tie_rule") {
            if (value == "assign_to_class1") {
                pf.plan.optimizer.tie_rule = TieRule::assign_to_class1;
            } else if (value == "assign_to_class2") {
                pf.plan.optimizer.tie_rule = TieRule::assign_to_class2;
            } else if (value == "split_half") {
                pf.plan.optimizer.tie_rule = TieRule::split_half;
            } else {
                throw ParseError(ctx + ": unknown tie rule '" + value + "'");
            }
        } else if (key == "grid.c") {
            pf.plan.grid_c = parse_real(value, ctx);
        } else if (key == "grid.zeta") {
            pf.plan.grid_zeta = parse_real(value, ctx);
        } else if (key == "grid.eta") {
            pf.plan.grid_eta = parse_real(value, ctx);
        } else if (key == "region.alpha1") {
            region.alpha1 = parse_interval(value, ctx);
            region_touched = true;
        } else if (key == "region.mu1") {
            region.mu1 = parse_interval(value, ctx);
            region_touched = true;
        } else if (key == "region.mu2") {
            region.mu2 = parse_interval(value, ctx);
            region_touched = true;
        } else if (key == "region.var1") {
            region.var1 = parse_interval(value, ctx);
            region_touched = true;
        } else if (key == "region.var2") {
            region.var2 = parse_interval(value, ctx);
            region_touched = true;
        } else if (key == "region.variance_floor") {
            region.variance_floor = parse_real(value, ctx);
            region_touched = true;
        } else {
            throw ParseError(where + ": unknown key '" + key + "'");
        }
    }

    if (!mode_set) throw ParseError(name + ": missing required key 'mode'");
    if (pf.mode != "consistency" && pf.mode != "coverage" && pf.mode != "exponent") {
        throw ParseError(name + ": mode must be consistency, coverage, or exponent, got '" +
                         pf.mode + "'");
    }
    if (region_touched) pf.plan.region = region;
    try {
        validate(pf.plan);
    } catch (const std::exception& e) {
        throw ParseError(name + ": invalid plan: " + e.what());
    }
    return pf;
}

PlanFile read_plan_file_path(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open plan file '" + path + "'");
    return read_plan_file(in, path);
}

}  // namespace sigclass
