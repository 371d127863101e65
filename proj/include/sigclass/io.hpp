#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "sigclass/core.hpp"
#include "sigclass/experiments.hpp"
#include "sigclass/objective.hpp"
#include "sigclass/optimizer.hpp"
#include "sigclass/types_method.hpp"

namespace sigclass {

// Plain-text sample input: one real per line, '#' starts a comment, blank
// lines skipped.  ParseError messages name the offending line number.
SampleSet read_samples(std::istream& in, const std::string& name);
SampleSet read_samples_file(const std::string& path);

void write_samples(std::ostream& out, const SampleSet& samples);

// JSON bindings (argument-dependent hooks used by nlohmann::json).
void to_json(nlohmann::json& j, const MixtureParams& p);
void from_json(const nlohmann::json& j, MixtureParams& p);
void to_json(nlohmann::json& j, const GridSpec& g);
void to_json(nlohmann::json& j, const ObjectiveReport& r);
void to_json(nlohmann::json& j, const Violation& v);
void to_json(nlohmann::json& j, const CertificateReport& c);
void to_json(nlohmann::json& j, const Solution& s);
void from_json(const nlohmann::json& j, Solution& s);
void to_json(nlohmann::json& j, const ConsistencyResult& r);
void to_json(nlohmann::json& j, const CoverageResult& r);
void to_json(nlohmann::json& j, const ExponentResult& r);

// Stable text form used by every CSV and JSON writer: shortest decimal string
// that round-trips the double.
std::string format_double(double x);

// index,m1,m2 rows.
void write_memberships_csv(std::ostream& out, const MembershipMatrix& m);

// iteration,log_gain rows.
void write_trace_csv(std::ostream& out, const std::vector<double>& trace);

// '#' JSON header line carrying the grid (and outlier count), then k,count
// or k,mass rows.
void write_histogram_csv(std::ostream& out, const TypeHistogram& hist);
void write_model_csv(std::ostream& out, const DiscretizedModel& model);

// One trial per row, all TrialRecord fields.
void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& records);

// Plot-ready per-N tables.
void write_plot_csv(std::ostream& out, const ConsistencyResult& r);
void write_plot_csv(std::ostream& out, const CoverageResult& r);
void write_plot_csv(std::ostream& out, const ExponentResult& r);

// Experiment plan files: flat "key = value" lines, dotted keys for nested
// fields, '#' comments.  Intervals are written "lo,hi" (inf/-inf allowed),
// n_values as a comma list.  Unknown keys, bad values, and invalid plans all
// raise ParseError naming the key.
struct PlanFile {
    ExperimentPlan plan;
    std::string mode;         // consistency | coverage | exponent
    double epsilon = 0.1;     // coverage only
    int grid_resolution = 4;  // exponent only; 0 skips the region scan
};

PlanFile read_plan_file(std::istream& in, const std::string& name);
PlanFile read_plan_file_path(const std::string& path);

}  // namespace sigclass
