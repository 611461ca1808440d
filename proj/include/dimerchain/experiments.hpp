#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dimerchain/protocol.hpp"

namespace dimerchain {

enum class ExperimentKind {
    ThetaDeltaMap,
    ProjectionCompare,
    BaselineCompareXX,
    XxzDeltaScan,
    BaselineCompareXXZ,
    FreefermionCheck,
    SingleRun
};

std::string to_string(ExperimentKind k);
std::optional<ExperimentKind> experiment_kind_from_string(const std::string& s);

// Fully resolved experiment description. load_config() applies the per-kind
// defaults documented in the README; every run is a pure function of this
// struct, so identical configs give byte-identical CSV bodies.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::SingleRun;
    Model model = Model::XX;
    int n_sites = 8;
    double j_coupling = 1.0;
    double delta = 0.8;
    double anisotropy = 0.5;
    double theta = 0.0; // set by defaults
    double phi = 0.0;
    MeasurementOutcome outcome = MeasurementOutcome::P00;
    std::optional<double> t_max; // empty: 4 N / J per evaluated chain
    std::optional<double> dt;    // empty: 0.02 / J

    std::vector<double> theta_grid;
    std::vector<double> delta_grid;
    std::vector<double> anisotropy_grid;
    std::vector<int> n_grid;

    std::optional<double> attach_coupling; // empty: strong bond J (1 + delta)
    bool uniform_baseline = false;
    bool allow_degenerate = false;

    std::string out_prefix;
    int threads = 1;

    double resolved_t_max(const ChainSpec& spec) const;
    double resolved_dt(const ChainSpec& spec) const;
    DegeneracyPolicy policy() const;
};

// Parses and validates a JSON config file; unknown keys are rejected. When
// expected_kind is given the file's "kind" must agree (or be absent).
ExperimentConfig load_config(const std::string& path,
                             std::optional<ExperimentKind> expected_kind = {});

// Defaults-only config of a given kind.
ExperimentConfig default_config(ExperimentKind kind);

// Same as load_config but starting from an in-memory JSON document (testing
// hook; the string holds the document text).
ExperimentConfig parse_config_text(const std::string& json_text,
                                   std::optional<ExperimentKind> expected_kind = {});

struct RunSummary {
    int total_points = 0;
    int failed_points = 0;
    std::vector<std::string> files_written;
};

// Resolved config as pretty-printed JSON (what the meta sidecar records).
std::string describe_config(const ExperimentConfig& cfg);

// Runs the experiment, writing <prefix>.csv, <prefix>.gp and
// <prefix>.meta.json, printing one summary line per grid point. Failed grid
// points become rows with status != ok; only configuration problems throw.
RunSummary run_experiment(const ExperimentConfig& cfg);

} // namespace dimerchain
