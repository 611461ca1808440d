#include "dimerchain/experiments.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "dimerchain/baseline.hpp"
#include "dimerchain/freefermion.hpp"
#include "dimerchain/version.hpp"

namespace dimerchain {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string join_cells(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    return out;
}

std::vector<double> linear_grid(double min, double max, double step) {
    if (!(step > 0.0)) throw ConfigError("grid step must be positive");
    if (max < min) throw ConfigError("grid max must be >= min");
    const long count = static_cast<long>(std::floor((max - min) / step + 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(count);
    for (long k = 0; k < count; ++k) {
        out.push_back(std::min(min + k * step, max));
    }
    return out;
}

std::vector<double> parse_grid(const json& j, const std::string& name) {
    if (j.is_array()) {
        std::vector<double> out;
        for (const auto& v : j) {
            if (!v.is_number()) throw ConfigError(name + ": array entries must be numbers");
            out.push_back(v.get<double>());
        }
        if (out.empty()) throw ConfigError(name + ": grid must be non-empty");
        return out;
    }
    if (j.is_object()) {
        for (const auto& [key, value] : j.items()) {
            if (key != "min" && key != "max" && key != "step") {
                throw ConfigError(name + ": unknown grid key '" + key + "'");
            }
        }
        if (!j.contains("min") || !j.contains("max") || !j.contains("step")) {
            throw ConfigError(name + ": grid object needs min, max and step");
        }
        return linear_grid(j.at("min").get<double>(), j.at("max").get<double>(),
                           j.at("step").get<double>());
    }
    throw ConfigError(name + ": grid must be an array or a {min,max,step} object");
}

std::vector<int> parse_int_grid(const json& j, const std::string& name) {
    std::vector<int> out;
    for (double v : parse_grid(j, name)) {
        const double r = std::round(v);
        if (std::abs(v - r) > 1e-9) throw ConfigError(name + ": entries must be integers");
        out.push_back(static_cast<int>(r));
    }
    return out;
}

bool is_xxz_kind(ExperimentKind k) {
    return k == ExperimentKind::XxzDeltaScan || k == ExperimentKind::BaselineCompareXXZ;
}

void require_protocol_sites(int n, const std::string& what) {
    if (n < 4 || n % 2 != 0) {
        throw ConfigError(what + " must be even and >= 4 for protocol experiments (got " +
                          std::to_string(n) + ")");
    }
}

std::string iso_utc_now() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json grid_to_json(const std::vector<double>& g) {
    return json(g);
}

json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["kind"] = to_string(cfg.kind);
    j["model"] = to_string(cfg.model);
    j["n_sites"] = cfg.n_sites;
    j["j_coupling"] = cfg.j_coupling;
    j["delta"] = cfg.delta;
    j["anisotropy"] = cfg.anisotropy;
    j["theta"] = cfg.theta;
    j["phi"] = cfg.phi;
    j["outcome"] = to_string(cfg.outcome);
    if (cfg.t_max) j["t_max"] = *cfg.t_max;
    if (cfg.dt) j["dt"] = *cfg.dt;
    j["theta_grid"] = grid_to_json(cfg.theta_grid);
    j["delta_grid"] = grid_to_json(cfg.delta_grid);
    j["anisotropy_grid"] = grid_to_json(cfg.anisotropy_grid);
    j["n_grid"] = json(cfg.n_grid);
    if (cfg.attach_coupling) j["attach_coupling"] = *cfg.attach_coupling;
    j["uniform_baseline"] = cfg.uniform_baseline;
    j["allow_degenerate"] = cfg.allow_degenerate;
    j["out_prefix"] = cfg.out_prefix;
    j["threads"] = cfg.threads;
    return j;
}

// ---------------------------------------------------------------------------
// Point evaluation
// ---------------------------------------------------------------------------

struct Row {
    std::vector<std::string> cells;
    std::string summary;
    bool ok = true;
};

std::string failure_tag(const std::exception& e) {
    if (dynamic_cast<const DegenerateGroundStateError*>(&e)) return "degenerate_ground_state";
    if (dynamic_cast<const ZeroProbabilityError*>(&e)) return "zero_probability";
    if (dynamic_cast<const ProtocolFailureError*>(&e)) return "protocol_failure";
    return "error";
}

void run_points(int total, int threads, const std::function<void(int)>& body) {
    if (threads <= 1 || total <= 1) {
        for (int i = 0; i < total; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    const int workers = std::min(threads, total);
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < total; i = next.fetch_add(1)) {
                body(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// Plot scripts
// ---------------------------------------------------------------------------

std::string plot_script(const ExperimentConfig& cfg, const std::string& csv_name) {
    std::string s;
    s += "# gnuplot script for " + to_string(cfg.kind) + "\n";
    s += "set datafile separator ','\n";
    s += "set key autotitle columnhead\n";
    s += "set terminal pngcairo size 900,640\n";
    s += "set output '" + to_string(cfg.kind) + ".png'\n";
    switch (cfg.kind) {
        case ExperimentKind::ThetaDeltaMap:
            s += "set xlabel 'theta'\nset ylabel 'delta'\nset cblabel 'concurrence'\n";
            s += "set view map\n";
            s += "splot '" + csv_name + "' using 1:2:5 with points pt 5 ps 3 palette notitle\n";
            break;
        case ExperimentKind::ProjectionCompare:
            s += "set xlabel 'N'\nset ylabel 'concurrence at t*'\nset yrange [0:1.05]\n";
            s += "plot for [o in 'P00 P01 P10 P11'] '" + csv_name +
                 "' using 1:(strcol(2) eq o ? column(5) : NaN) with linespoints title o\n";
            break;
        case ExperimentKind::BaselineCompareXX:
        case ExperimentKind::BaselineCompareXXZ:
            s += "set xlabel 'N'\nset ylabel 'concurrence at t*'\nset yrange [0:1.05]\n";
            s += "plot for [o in 'rotation attaching'] '" + csv_name +
                 "' using 1:(strcol(2) eq o ? column(4) : NaN) with linespoints title o\n";
            break;
        case ExperimentKind::XxzDeltaScan:
            s += "set xlabel 'anisotropy'\nset ylabel 'concurrence at t*'\nset yrange [0:1.05]\n";
            s += "plot '" + csv_name + "' using 1:4 with linespoints notitle\n";
            break;
        case ExperimentKind::FreefermionCheck:
            s += "set xlabel 'N'\nset ylabel 'max |formula - numeric|'\nset logscale y\n";
            s += "plot for [o in 'odd even_printed even_2cos'] '" + csv_name +
                 "' using 1:(strcol(3) eq o ? column(4) : NaN) with points title o\n";
            break;
        case ExperimentKind::SingleRun:
            s += "set xlabel 't*'\nset ylabel 'concurrence'\nset yrange [0:1.05]\n";
            s += "plot '" + csv_name + "' using 4:6 with points pt 7 ps 2 notitle\n";
            break;
    }
    return s;
}

} // namespace

// ---------------------------------------------------------------------------
// Kind names
// ---------------------------------------------------------------------------

std::string to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::ThetaDeltaMap: return "theta_delta_map";
        case ExperimentKind::ProjectionCompare: return "projection_compare";
        case ExperimentKind::BaselineCompareXX: return "baseline_compare_xx";
        case ExperimentKind::XxzDeltaScan: return "xxz_delta_scan";
        case ExperimentKind::BaselineCompareXXZ: return "baseline_compare_xxz";
        case ExperimentKind::FreefermionCheck: return "freefermion_check";
        case ExperimentKind::SingleRun: return "single_run";
    }
    return "?";
}

std::optional<ExperimentKind> experiment_kind_from_string(const std::string& s) {
    for (ExperimentKind k :
         {ExperimentKind::ThetaDeltaMap, ExperimentKind::ProjectionCompare,
          ExperimentKind::BaselineCompareXX, ExperimentKind::XxzDeltaScan,
          ExperimentKind::BaselineCompareXXZ, ExperimentKind::FreefermionCheck,
          ExperimentKind::SingleRun}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

double ExperimentConfig::resolved_t_max(const ChainSpec& spec) const {
    return t_max ? *t_max : 4.0 * spec.n_sites / spec.j_coupling;
}

double ExperimentConfig::resolved_dt(const ChainSpec& spec) const {
    return dt ? *dt : 0.02 / spec.j_coupling;
}

DegeneracyPolicy ExperimentConfig::policy() const {
    return allow_degenerate ? DegeneracyPolicy::PickDeterministic : DegeneracyPolicy::Reject;
}

// ---------------------------------------------------------------------------
// Config loading
// ---------------------------------------------------------------------------

ExperimentConfig default_config(ExperimentKind kind) {
    ExperimentConfig cfg;
    cfg.kind = kind;
    cfg.model = is_xxz_kind(kind) ? Model::XXZ : Model::XX;
    cfg.j_coupling = 1.0;
    cfg.delta = cfg.model == Model::XXZ ? 0.75 : 0.8;
    cfg.anisotropy = 0.5;
    cfg.theta = kPi / 2.0;
    cfg.phi = 0.0;
    cfg.outcome = MeasurementOutcome::P00;
    cfg.threads = 1;
    cfg.out_prefix = to_string(kind);

    switch (kind) {
        case ExperimentKind::ThetaDeltaMap:
            cfg.n_sites = 8;
            cfg.theta_grid = linear_grid(0.0, kPi, kPi / 16.0);
            cfg.delta_grid = linear_grid(0.1, 0.9, 0.1);
            break;
        case ExperimentKind::ProjectionCompare:
            cfg.n_grid = {4, 6, 8, 10};
            break;
        case ExperimentKind::BaselineCompareXX:
        case ExperimentKind::BaselineCompareXXZ:
            cfg.n_grid = {4, 6, 8};
            break;
        case ExperimentKind::XxzDeltaScan:
            cfg.n_sites = 10;
            cfg.anisotropy_grid = linear_grid(-2.0, 2.0, 0.5);
            // The scan deliberately crosses the ferromagnetic phase, where the
            // ground level is exactly degenerate; report those points instead
            // of failing them.
            cfg.allow_degenerate = true;
            break;
        case ExperimentKind::FreefermionCheck: {
            cfg.n_grid.clear();
            for (int n = 2; n <= 11; ++n) cfg.n_grid.push_back(n);
            cfg.delta_grid = {0.0, 0.25, 0.5, 0.8, 0.95};
            break;
        }
        case ExperimentKind::SingleRun:
            cfg.n_sites = 8;
            break;
    }
    return cfg;
}

namespace {

ExperimentConfig parse_config(const json& doc, std::optional<ExperimentKind> expected_kind) {
    if (!doc.is_object()) throw ConfigError("config root must be a JSON object");

    static const std::vector<std::string> known{
        "kind",       "model",        "n_sites",         "j_coupling",      "delta",
        "anisotropy", "theta",        "phi",             "outcome",         "t_max",
        "dt",         "theta_grid",   "delta_grid",      "anisotropy_grid", "n_grid",
        "attach_coupling", "uniform_baseline", "allow_degenerate", "out_prefix", "threads"};
    for (const auto& [key, value] : doc.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }

    ExperimentKind kind;
    if (doc.contains("kind")) {
        const auto parsed = experiment_kind_from_string(doc.at("kind").get<std::string>());
        if (!parsed) {
            throw ConfigError("unknown experiment kind '" +
                              doc.at("kind").get<std::string>() + "'");
        }
        kind = *parsed;
        if (expected_kind && kind != *expected_kind) {
            throw ConfigError("config kind '" + to_string(kind) +
                              "' does not match the requested experiment '" +
                              to_string(*expected_kind) + "'");
        }
    } else if (expected_kind) {
        kind = *expected_kind;
    } else {
        throw ConfigError("config must name an experiment 'kind'");
    }

    // Model first: delta's default depends on it.
    ExperimentConfig cfg = default_config(kind);
    if (doc.contains("model")) {
        const std::string m = doc.at("model").get<std::string>();
        if (m == "XX") {
            cfg.model = Model::XX;
        } else if (m == "XXZ") {
            cfg.model = Model::XXZ;
        } else {
            throw ConfigError("model must be 'XX' or 'XXZ'");
        }
        if (is_xxz_kind(kind) && cfg.model != Model::XXZ) {
            throw ConfigError("experiment '" + to_string(kind) + "' requires model XXZ");
        }
        if (!doc.contains("delta")) {
            cfg.delta = cfg.model == Model::XXZ ? 0.75 : 0.8;
        }
    }

    try {
        if (doc.contains("n_sites")) cfg.n_sites = doc.at("n_sites").get<int>();
        if (doc.contains("j_coupling")) cfg.j_coupling = doc.at("j_coupling").get<double>();
        if (doc.contains("delta")) cfg.delta = doc.at("delta").get<double>();
        if (doc.contains("anisotropy")) cfg.anisotropy = doc.at("anisotropy").get<double>();
        if (doc.contains("theta")) cfg.theta = doc.at("theta").get<double>();
        if (doc.contains("phi")) cfg.phi = doc.at("phi").get<double>();
        if (doc.contains("t_max")) cfg.t_max = doc.at("t_max").get<double>();
        if (doc.contains("dt")) cfg.dt = doc.at("dt").get<double>();
        if (doc.contains("attach_coupling"))
            cfg.attach_coupling = doc.at("attach_coupling").get<double>();
        if (doc.contains("uniform_baseline"))
            cfg.uniform_baseline = doc.at("uniform_baseline").get<bool>();
        if (doc.contains("allow_degenerate"))
            cfg.allow_degenerate = doc.at("allow_degenerate").get<bool>();
        if (doc.contains("out_prefix")) cfg.out_prefix = doc.at("out_prefix").get<std::string>();
        if (doc.contains("threads")) cfg.threads = doc.at("threads").get<int>();
        if (doc.contains("outcome")) {
            const auto o = outcome_from_string(doc.at("outcome").get<std::string>());
            if (!o) throw ConfigError("outcome must be one of P00, P01, P10, P11");
            cfg.outcome = *o;
        }
        if (doc.contains("theta_grid")) cfg.theta_grid = parse_grid(doc.at("theta_grid"), "theta_grid");
        if (doc.contains("delta_grid")) cfg.delta_grid = parse_grid(doc.at("delta_grid"), "delta_grid");
        if (doc.contains("anisotropy_grid"))
            cfg.anisotropy_grid = parse_grid(doc.at("anisotropy_grid"), "anisotropy_grid");
        if (doc.contains("n_grid")) cfg.n_grid = parse_int_grid(doc.at("n_grid"), "n_grid");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field has the wrong type: ") + e.what());
    }

    // Validation.
    if (!(cfg.j_coupling > 0.0)) throw ConfigError("j_coupling must be positive");
    if (!(cfg.delta >= 0.0 && cfg.delta < 1.0)) throw ConfigError("delta must satisfy 0 <= delta < 1");
    if (!(cfg.theta >= 0.0 && cfg.theta <= kPi)) throw ConfigError("theta must lie in [0, pi]");
    if (!(cfg.phi >= 0.0 && cfg.phi < 2.0 * kPi)) throw ConfigError("phi must lie in [0, 2 pi)");
    if (cfg.t_max && !(*cfg.t_max > 0.0)) throw ConfigError("t_max must be positive");
    if (cfg.dt && !(*cfg.dt > 0.0)) throw ConfigError("dt must be positive");
    if (cfg.threads < 1) throw ConfigError("threads must be >= 1");
    if (cfg.attach_coupling && !(*cfg.attach_coupling >= 0.0)) {
        throw ConfigError("attach_coupling must be >= 0");
    }
    for (double th : cfg.theta_grid) {
        if (!(th >= 0.0 && th <= kPi)) throw ConfigError("theta_grid values must lie in [0, pi]");
    }
    for (double de : cfg.delta_grid) {
        if (!(de >= 0.0 && de < 1.0)) throw ConfigError("delta_grid values must satisfy 0 <= delta < 1");
    }

    switch (kind) {
        case ExperimentKind::ThetaDeltaMap:
        case ExperimentKind::XxzDeltaScan:
        case ExperimentKind::SingleRun:
            require_protocol_sites(cfg.n_sites, "n_sites");
            break;
        case ExperimentKind::ProjectionCompare:
        case ExperimentKind::BaselineCompareXX:
        case ExperimentKind::BaselineCompareXXZ:
            if (cfg.n_grid.empty()) throw ConfigError("n_grid must be non-empty");
            for (int n : cfg.n_grid) require_protocol_sites(n, "n_grid entry");
            break;
        case ExperimentKind::FreefermionCheck:
            if (cfg.n_grid.empty()) throw ConfigError("n_grid must be non-empty");
            for (int n : cfg.n_grid) {
                if (n < 2) throw ConfigError("freefermion_check needs n >= 2");
            }
            if (cfg.delta_grid.empty()) throw ConfigError("delta_grid must be non-empty");
            break;
    }
    if (kind == ExperimentKind::ThetaDeltaMap &&
        (cfg.theta_grid.empty() || cfg.delta_grid.empty())) {
        throw ConfigError("theta_delta_map needs non-empty theta_grid and delta_grid");
    }
    if (kind == ExperimentKind::XxzDeltaScan && cfg.anisotropy_grid.empty()) {
        throw ConfigError("xxz_delta_scan needs a non-empty anisotropy_grid");
    }
    return cfg;
}

} // namespace

ExperimentConfig load_config(const std::string& path,
                             std::optional<ExperimentKind> expected_kind) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error in '" + path + "': " + e.what());
    }
    return parse_config(doc, expected_kind);
}

std::string describe_config(const ExperimentConfig& cfg) {
    return config_to_json(cfg).dump(2);
}

ExperimentConfig parse_config_text(const std::string& json_text,
                                   std::optional<ExperimentKind> expected_kind) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config(doc, expected_kind);
}

// ---------------------------------------------------------------------------
// Experiment execution
// ---------------------------------------------------------------------------

namespace {

ChainSpec chain_for(const ExperimentConfig& cfg, int n_sites, double delta, double anisotropy) {
    return ChainSpec(cfg.model, n_sites, cfg.j_coupling, delta,
                     cfg.model == Model::XXZ ? anisotropy : 0.0);
}

struct PointPlan {
    std::string header;
    std::vector<std::function<Row()>> points;
};

Row protocol_row(const ExperimentConfig& cfg, const ChainSpec& spec, double theta,
                 MeasurementOutcome outcome, SpectrumCache& cache,
                 const std::vector<std::string>& prefix_cells, const std::string& label) {
    Row row;
    row.cells = prefix_cells;
    try {
        const PreparedProtocol prep(spec, RotationAngles(theta, cfg.phi), cfg.policy(),
                                    cache.get(spec));
        const TStarResult res =
            find_tstar(prep, outcome, cfg.resolved_t_max(spec), cfg.resolved_dt(spec));
        row.cells.insert(row.cells.end(),
                         {fmt(res.t_star), fmt(res.probability), fmt(res.concurrence), "ok"});
        row.summary = label + " t*=" + fmt(res.t_star) + " p=" + fmt(res.probability) +
                      " C=" + fmt(res.concurrence) + " [ok]";
    } catch (const std::exception& e) {
        const std::string tag = failure_tag(e);
        row.cells.insert(row.cells.end(), {"nan", "nan", "nan", tag});
        row.summary = label + " [" + tag + "]";
        row.ok = false;
    }
    return row;
}

PointPlan make_plan(const ExperimentConfig& cfg, std::shared_ptr<SpectrumCache> cache) {
    PointPlan plan;
    switch (cfg.kind) {
        case ExperimentKind::ThetaDeltaMap: {
            plan.header = "theta,delta,t_star,probability,concurrence,status";
            for (double theta : cfg.theta_grid) {
                for (double delta : cfg.delta_grid) {
                    plan.points.push_back([&cfg, cache, theta, delta]() {
                        const ChainSpec spec = chain_for(cfg, cfg.n_sites, delta, cfg.anisotropy);
                        return protocol_row(cfg, spec, theta, cfg.outcome, *cache,
                                            {fmt(theta), fmt(delta)},
                                            "theta=" + fmt(theta) + " delta=" + fmt(delta));
                    });
                }
            }
            break;
        }
        case ExperimentKind::ProjectionCompare: {
            plan.header = "n_sites,outcome,t_star,probability,concurrence,status";
            for (int n : cfg.n_grid) {
                for (MeasurementOutcome o :
                     {MeasurementOutcome::P00, MeasurementOutcome::P01, MeasurementOutcome::P10,
                      MeasurementOutcome::P11}) {
                    plan.points.push_back([&cfg, cache, n, o]() {
                        const ChainSpec spec = chain_for(cfg, n, cfg.delta, cfg.anisotropy);
                        return protocol_row(cfg, spec, cfg.theta, o, *cache,
                                            {std::to_string(n), to_string(o)},
                                            "N=" + std::to_string(n) + " " + to_string(o));
                    });
                }
            }
            break;
        }
        case ExperimentKind::BaselineCompareXX:
        case ExperimentKind::BaselineCompareXXZ: {
            plan.header = "n_sites,scheme,t_star,concurrence,status";
            for (int n : cfg.n_grid) {
                plan.points.push_back([&cfg, cache, n]() {
                    const ChainSpec spec = chain_for(cfg, n, cfg.delta, cfg.anisotropy);
                    Row row;
                    row.cells = {std::to_string(n), "rotation"};
                    const std::string label = "N=" + std::to_string(n) + " rotation";
                    try {
                        const PreparedProtocol prep(spec, RotationAngles(cfg.theta, cfg.phi),
                                                    cfg.policy(), cache->get(spec));
                        const TStarResult res = find_tstar(prep, cfg.outcome,
                                                           cfg.resolved_t_max(spec),
                                                           cfg.resolved_dt(spec));
                        row.cells.insert(row.cells.end(),
                                         {fmt(res.t_star), fmt(res.concurrence), "ok"});
                        row.summary = label + " t*=" + fmt(res.t_star) +
                                      " C=" + fmt(res.concurrence) + " [ok]";
                    } catch (const std::exception& e) {
                        const std::string tag = failure_tag(e);
                        row.cells.insert(row.cells.end(), {"nan", "nan", tag});
                        row.summary = label + " [" + tag + "]";
                        row.ok = false;
                    }
                    return row;
                });
                plan.points.push_back([&cfg, n]() {
                    const ChainSpec spec = chain_for(cfg, n, cfg.delta, cfg.anisotropy);
                    Row row;
                    row.cells = {std::to_string(n), "attaching"};
                    const std::string label = "N=" + std::to_string(n) + " attaching";
                    try {
                        const AttachedSystemSpec aspec(spec, cfg.attach_coupling,
                                                       cfg.uniform_baseline);
                        const AttachResult res = run_attaching(aspec, cfg.resolved_t_max(spec),
                                                               cfg.resolved_dt(spec),
                                                               cfg.policy());
                        row.cells.insert(row.cells.end(),
                                         {fmt(res.t_star), fmt(res.concurrence), "ok"});
                        row.summary = label + " t*=" + fmt(res.t_star) +
                                      " C=" + fmt(res.concurrence) + " [ok]";
                    } catch (const std::exception& e) {
                        const std::string tag = failure_tag(e);
                        row.cells.insert(row.cells.end(), {"nan", "nan", tag});
                        row.summary = label + " [" + tag + "]";
                        row.ok = false;
                    }
                    return row;
                });
            }
            break;
        }
        case ExperimentKind::XxzDeltaScan: {
            plan.header = "anisotropy,t_star,probability,concurrence,status";
            for (double anis : cfg.anisotropy_grid) {
                plan.points.push_back([&cfg, cache, anis]() {
                    const ChainSpec spec = chain_for(cfg, cfg.n_sites, cfg.delta, anis);
                    return protocol_row(cfg, spec, cfg.theta, cfg.outcome, *cache, {fmt(anis)},
                                        "anisotropy=" + fmt(anis));
                });
            }
            break;
        }
        case ExperimentKind::FreefermionCheck: {
            plan.header = "n_sites,delta,variant,max_abs_deviation,root_count,status";
            for (int n : cfg.n_grid) {
                for (double delta : cfg.delta_grid) {
                    const std::vector<std::string> variants =
                        n % 2 == 1 ? std::vector<std::string>{"odd"}
                                   : std::vector<std::string>{"even_printed", "even_2cos"};
                    for (const std::string& variant : variants) {
                        plan.points.push_back([&cfg, n, delta, variant]() {
                            Row row;
                            row.cells = {std::to_string(n), fmt(delta), variant};
                            const std::string label = "N=" + std::to_string(n) +
                                                      " delta=" + fmt(delta) + " " + variant;
                            try {
                                const ChainSpec spec(Model::XX, n, cfg.j_coupling, delta);
                                if (variant == "odd") {
                                    const FermionSpectrum numeric =
                                        spectrum_numeric(adjacency_matrix(spec));
                                    const FermionSpectrum formula = spectrum_formula_odd(spec);
                                    const double dev =
                                        (formula.lambdas - numeric.lambdas).cwiseAbs().maxCoeff();
                                    row.cells.insert(row.cells.end(), {fmt(dev), "0", "ok"});
                                    row.summary = label + " dev=" + fmt(dev) + " [ok]";
                                } else {
                                    const EvenSpectrumReport report = spectrum_formula_even(spec);
                                    const double dev = variant == "even_printed"
                                                           ? report.max_dev_printed
                                                           : report.max_dev_cosine_doubled;
                                    const std::string status =
                                        report.roots.deficit() ? "root_deficit" : "ok";
                                    row.cells.insert(
                                        row.cells.end(),
                                        {fmt(dev),
                                         std::to_string(report.roots.roots.size()), status});
                                    row.summary = label + " dev=" + fmt(dev) + " [" + status + "]";
                                    row.ok = !report.roots.deficit();
                                }
                            } catch (const std::exception& e) {
                                const std::string tag = failure_tag(e);
                                row.cells.insert(row.cells.end(), {"nan", "0", tag});
                                row.summary = label + " [" + tag + "]";
                                row.ok = false;
                            }
                            return row;
                        });
                    }
                }
            }
            break;
        }
        case ExperimentKind::SingleRun: {
            plan.header =
                "theta,phi,outcome,t_star,probability,concurrence,werner_p,werner_residual,status";
            plan.points.push_back([&cfg]() {
                Row row;
                row.cells = {fmt(cfg.theta), fmt(cfg.phi), to_string(cfg.outcome)};
                const std::string label = "theta=" + fmt(cfg.theta) + " " + to_string(cfg.outcome);
                try {
                    const ChainSpec spec = chain_for(cfg, cfg.n_sites, cfg.delta, cfg.anisotropy);
                    const ProtocolResult res =
                        run_protocol(spec, RotationAngles(cfg.theta, cfg.phi), cfg.outcome,
                                     cfg.resolved_t_max(spec), cfg.resolved_dt(spec),
                                     cfg.policy());
                    row.cells.insert(row.cells.end(),
                                     {fmt(res.t_star), fmt(res.outcome_probability),
                                      fmt(res.concurrence), fmt(res.werner_p),
                                      fmt(res.werner_residual), "ok"});
                    row.summary = label + " t*=" + fmt(res.t_star) + " p=" +
                                  fmt(res.outcome_probability) + " C=" + fmt(res.concurrence) +
                                  " werner_p=" + fmt(res.werner_p) + " [ok]";
                } catch (const std::exception& e) {
                    const std::string tag = failure_tag(e);
                    row.cells.insert(row.cells.end(),
                                     {"nan", "nan", "nan", "nan", "nan", tag});
                    row.summary = label + " [" + tag + "]";
                    row.ok = false;
                }
                return row;
            });
            break;
        }
    }
    return plan;
}

} // namespace

RunSummary run_experiment(const ExperimentConfig& cfg) {
    auto cache = std::make_shared<SpectrumCache>();
    PointPlan plan = make_plan(cfg, cache);

    std::vector<Row> rows(plan.points.size());
    run_points(static_cast<int>(plan.points.size()), cfg.threads,
               [&](int i) { rows[static_cast<std::size_t>(i)] = plan.points[i](); });

    const std::filesystem::path prefix(cfg.out_prefix);
    if (prefix.has_parent_path()) {
        std::filesystem::create_directories(prefix.parent_path());
    }
    const std::filesystem::path csv_path = prefix.string() + ".csv";
    const std::filesystem::path gp_path = prefix.string() + ".gp";
    const std::filesystem::path meta_path = prefix.string() + ".meta.json";

    {
        std::ofstream csv(csv_path, std::ios::binary);
        if (!csv) throw ConfigError("cannot write '" + csv_path.string() + "'");
        csv << plan.header << '\n';
        for (const Row& row : rows) csv << join_cells(row.cells) << '\n';
    }
    {
        std::ofstream gp(gp_path, std::ios::binary);
        gp << plot_script(cfg, csv_path.filename().string());
    }
    {
        json meta;
        meta["experiment"] = to_string(cfg.kind);
        meta["tool"] = "simulate";
        meta["version"] = kVersion;
        meta["generated_at"] = iso_utc_now();
        meta["config"] = config_to_json(cfg);
        std::ofstream mf(meta_path, std::ios::binary);
        mf << meta.dump(2) << '\n';
    }

    RunSummary summary;
    summary.total_points = static_cast<int>(rows.size());
    for (const Row& row : rows) {
        std::cout << to_string(cfg.kind) << ": " << row.summary << '\n';
        if (!row.ok) ++summary.failed_points;
    }
    std::cout << to_string(cfg.kind) << ": wrote " << csv_path.string() << " ("
              << summary.total_points - summary.failed_points << "/" << summary.total_points
              << " points ok)" << std::endl;
    summary.files_written = {csv_path.string(), gp_path.string(), meta_path.string()};
    return summary;
}

} // namespace dimerchain
