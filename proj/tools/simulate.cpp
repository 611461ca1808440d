#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "dimerchain/experiments.hpp"
#include "dimerchain/version.hpp"

namespace {

struct SubcommandState {
    dimerchain::ExperimentKind kind;
    std::string config_path;
    std::string out_prefix;
    int threads = 0;
    bool dry_run = false;
    bool selected = false;
};

} // namespace

int main(int argc, char** argv) {
    using dimerchain::ExperimentKind;

    CLI::App app{"Entanglement-generation experiments on dimerized XX/XXZ spin chains"};
    app.set_version_flag("--version", dimerchain::kVersion);
    app.require_subcommand(1);

    const std::vector<std::pair<ExperimentKind, std::string>> kinds{
        {ExperimentKind::ThetaDeltaMap, "Concurrence at t* over a (theta, delta) grid"},
        {ExperimentKind::ProjectionCompare, "Concurrence at t* per measurement outcome vs N"},
        {ExperimentKind::BaselineCompareXX, "Rotation protocol vs attached entangled pair, XX"},
        {ExperimentKind::XxzDeltaScan, "Concurrence at t* across the XXZ anisotropy axis"},
        {ExperimentKind::BaselineCompareXXZ, "Rotation protocol vs attached pair, XXZ"},
        {ExperimentKind::FreefermionCheck, "Closed-form fermion spectra vs numeric diagonalization"},
        {ExperimentKind::SingleRun, "One protocol run with full diagnostics"}};

    std::vector<std::unique_ptr<SubcommandState>> states;
    for (const auto& [kind, description] : kinds) {
        auto state = std::make_unique<SubcommandState>();
        state->kind = kind;
        CLI::App* sub = app.add_subcommand(dimerchain::to_string(kind), description);
        // Existence is checked by load_config so config problems uniformly
        // exit with code 1.
        sub->add_option("--config", state->config_path,
                        "JSON config file (defaults apply otherwise)");
        sub->add_option("--out", state->out_prefix, "Output path prefix for .csv/.gp/.meta.json");
        sub->add_option("--threads", state->threads, "Worker threads for grid points")
            ->check(CLI::PositiveNumber);
        sub->add_flag("--dry-run", state->dry_run, "Validate the config and print it, then exit");
        sub->callback([&states_ref = *state]() { states_ref.selected = true; });
        states.push_back(std::move(state));
    }

    CLI11_PARSE(app, argc, argv);

    const SubcommandState* active = nullptr;
    for (const auto& state : states) {
        if (state->selected) active = state.get();
    }
    if (active == nullptr) {
        std::cerr << "simulate: no experiment selected" << std::endl;
        return 1;
    }

    try {
        dimerchain::ExperimentConfig cfg =
            active->config_path.empty()
                ? dimerchain::default_config(active->kind)
                : dimerchain::load_config(active->config_path, active->kind);
        if (!active->out_prefix.empty()) cfg.out_prefix = active->out_prefix;
        if (active->threads > 0) cfg.threads = active->threads;

        if (active->dry_run) {
            std::cout << "config ok: " << dimerchain::to_string(cfg.kind) << "\n"
                      << dimerchain::describe_config(cfg) << std::endl;
            return 0;
        }

        const dimerchain::RunSummary summary = dimerchain::run_experiment(cfg);
        return summary.failed_points > 0 ? 2 : 0;
    } catch (const dimerchain::ConfigError& e) {
        std::cerr << "simulate: config error: " << e.what() << std::endl;
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "simulate: " << e.what() << std::endl;
        return 1;
    }
}
