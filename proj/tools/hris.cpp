#include "hris/experiment.hpp"

#include "acceptance.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>

namespace fs = std::filesystem;

namespace {

int cmd_run(const std::string& spec_path, int seeds, long steps, const std::string& out, int workers)
{
    hris::ExperimentSpec spec = hris::load_spec(spec_path);
    nlohmann::json patch = nlohmann::json::object();
    if (seeds > 0) {
        std::vector<std::uint64_t> list;
        for (int s = 0; s < seeds; ++s) list.push_back(static_cast<std::uint64_t>(s));
        patch["seeds"] = list;
    }
    if (steps > 0) patch["total_steps"] = steps;
    if (!patch.empty()) spec = hris::with_overrides(spec, patch);

    const auto results = hris::run(spec, fs::path(out), workers);
    for (const auto& r : results) {
        std::cout << r.name << ": converged reward " << r.mean_of(&hris::RunSummary::converged_reward) << " +/- "
                  << r.std_of(&hris::RunSummary::converged_reward) << ", active fraction "
                  << r.mean_of(&hris::RunSummary::active_fraction) << ", mean energy "
                  << r.mean_of(&hris::RunSummary::mean_energy_j) << " J\n";
        long violations = 0;
        for (const auto& s : r.seeds) violations += s.summary.violations;
        if (violations != 0) {
            std::cerr << r.name << ": " << violations << " power-cap violations\n";
            return 1;
        }
    }
    std::cout << "wrote " << out << '\n';
    return 0;
}

int cmd_compare(const std::vector<std::string>& dirs, const std::string& out, const std::string& curves)
{
    std::vector<hris::ExperimentResult> runs;
    for (const auto& d : dirs) runs.push_back(hris::load_experiment(d));
    const auto rows = hris::compare(runs);
    hris::write_comparison_csv(rows, out);
    if (!curves.empty()) hris::write_curves_csv(runs, curves);
    for (const auto& r : rows) {
        std::cout << r.name << ": " << r.converged_mean << " (diff " << r.diff_vs_first << ", t " << r.t_stat
                  << ")\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Hybrid RIS cognitive radio simulator and RL harness"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run an experiment spec over its seeds and sweep");
    std::string spec_path;
    int seeds = 0;
    long steps = 0;
    std::string out = "runs";
    int workers = 0;
    run->add_option("spec", spec_path, "Experiment spec (JSON)")->required()->check(CLI::ExistingFile);
    run->add_option("--seeds", seeds, "Use seeds 0..N-1 instead of the spec's list");
    run->add_option("--steps", steps, "Override total_steps");
    run->add_option("--out", out, "Output directory");
    run->add_option("--workers", workers, "Parallel workers (default: HRIS_WORKERS or core count)");

    auto* cmp = app.add_subcommand("compare", "Paired comparison of experiment directories");
    std::vector<std::string> dirs;
    std::string table = "table.csv";
    std::string curves;
    cmp->add_option("dirs", dirs, "Experiment directories; the first is the reference")->required();
    cmp->add_option("--out", table, "Comparison table CSV");
    cmp->add_option("--curves", curves, "Also write aligned mean curves to this CSV");

    auto* accept = app.add_subcommand("accept", "Run the acceptance suite");
    std::string filter;
    accept->add_option("--only", filter, "Run only criteria whose id contains this text");

    auto* defaults = app.add_subcommand("defaults", "Print the default configuration");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(spec_path, seeds, steps, out, workers);
        if (*cmp) return cmd_compare(dirs, table, curves);
        if (*accept) return hris::acceptance::run_all(filter, std::cout) == 0 ? 0 : 1;
        if (*defaults) {
            std::cout << hris::default_config().dump(2) << '\n';
            return 0;
        }
    } catch (const hris::ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
