#include "hris/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace hris {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr const char* checkpoint_magic = "HRISCKPT";
constexpr std::uint64_t checkpoint_version = 1;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream)
{
    Rng r = Rng(seed).split(stream);
    return r();
}

void save_channels(BinaryWriter& w, const ChannelSet& ch)
{
    w.matrix(ch.su_ris);
    w.u64(ch.ris_su.size());
    for (const cmat& h : ch.ris_su) w.matrix(h);
    w.matrix(ch.su_pu);
    w.matrix(ch.beacon_ris);
    w.doubles(ch.pu_gain);
}

ChannelSet load_channels(BinaryReader& r)
{
    ChannelSet ch;
    r.matrix(ch.su_ris);
    ch.ris_su.resize(r.u64());
    for (cmat& h : ch.ris_su) r.matrix(h);
    r.matrix(ch.su_pu);
    r.matrix(ch.beacon_ris);
    ch.pu_gain = r.doubles();
    return ch;
}

std::string mode_name(Resolved m)
{
    return m == Resolved::active ? "active" : "passive";
}

} // namespace

json to_json(const StepRecord& r)
{
    return {{"t", r.t},         {"reward", r.reward}, {"sum_rate", r.sum_rate}, {"mode", mode_name(r.mode)},
            {"E_total", r.energy_total}, {"alpha", r.alpha}, {"energy_J", r.energy_j}, {"cap", r.cap}};
}

StepRecord step_record_from_json(const json& j)
{
    StepRecord r;
    r.t = j.at("t").get<long>();
    r.reward = j.at("reward").get<double>();
    r.sum_rate = j.at("sum_rate").get<double>();
    r.mode = j.at("mode").get<std::string>() == "active" ? Resolved::active : Resolved::passive;
    r.energy_total = j.at("E_total").get<double>();
    r.alpha = j.at("alpha").get<double>();
    r.energy_j = j.at("energy_J").get<double>();
    r.cap = j.at("cap").get<double>();
    return r;
}

json to_json(const RewardPipelineRecord& r)
{
    return {{"t", r.t},       {"raw", r.raw},   {"post_attack", r.post_attack}, {"clipped", r.clipped},
            {"decision", to_string(r.decision)}, {"mean", r.mean}, {"std", r.std}, {"triggered", r.triggered}};
}

// ---------------------------------------------------------------------------
// Trainer

Trainer::Trainer(const ExperimentSpec& spec, std::uint64_t seed)
    : spec_(spec), seed_(seed), env_(spec.env),
      agent_(make_agent(spec.agent, static_cast<int>(env_.observation_size()), static_cast<int>(env_.action_size()),
                        spec.sac, spec.baseline, derive_seed(seed, 2))),
      pipeline_state_(spec.attack, spec.defense, Rng(seed).split(3)), buffer_(agent_->buffer_capacity())
{
    obs_ = env_.reset(derive_seed(seed, 1));
    records_.reserve(static_cast<std::size_t>(spec.total_steps));
}

void Trainer::step()
{
    const vec action = t_ < agent_->warmup_steps() ? agent_->random_action() : agent_->act(obs_, false);
    StepOutcome out = env_.step(action);

    const RewardPipelineRecord rec = pipeline_state_.step(t_, out.reward);
    if (rec.decision == Decision::accepted && agent_->kind() != AgentKind::random) {
        buffer_.push({obs_, action, rec.value(), out.observation, t_});
    }
    if (t_ >= agent_->warmup_steps() && buffer_.size() >= agent_->batch_size()) {
        agent_->update(buffer_);
    }

    const StepInfo& info = out.info;
    records_.push_back({t_, out.reward, info.sum_rate, info.resolved, info.energy_total, info.alpha,
                        info.energy_consumed, info.cap, info.tx_power, info.penalty});
    if (spec_.attack || spec_.defense) pipeline_.push_back(rec);

    obs_ = std::move(out.observation);
    ++t_;
}

void Trainer::save_checkpoint(const fs::path& path) const
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot write checkpoint " + path.string());
    BinaryWriter w(os);
    w.str(checkpoint_magic);
    w.u64(checkpoint_version);
    w.str(spec_.name);
    w.u64(seed_);
    w.i64(t_);
    w.str(to_string(agent_->kind()));
    agent_->save(w);

    const EnvSnapshot snap = env_.snapshot();
    w.str("env");
    w.rng(snap.rng);
    w.i64(snap.step);
    save_channels(w, snap.channels);
    w.matrix(snap.prev_beamformer);
    w.doubles(snap.prev_phases);
    w.f64(snap.prev_alpha);
    w.f64(snap.prev_mode);

    pipeline_state_.save(w);
    buffer_.save(w);
    w.matrix(obs_);
}

void Trainer::load_checkpoint(const fs::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot read checkpoint " + path.string());
    BinaryReader r(is);
    r.expect(checkpoint_magic);
    if (const auto v = r.u64(); v != checkpoint_version) {
        throw FormatError("unsupported checkpoint version " + std::to_string(v));
    }
    r.str(); // experiment name, informational
    if (r.u64() != seed_) throw FormatError("checkpoint belongs to a different seed");
    t_ = r.i64();
    if (r.str() != to_string(agent_->kind())) throw FormatError("checkpoint agent kind mismatch");
    agent_->load(r);

    r.expect("env");
    EnvSnapshot snap;
    snap.rng = r.rng();
    snap.step = r.i64();
    snap.channels = load_channels(r);
    r.matrix(snap.prev_beamformer);
    snap.prev_phases = r.doubles();
    snap.prev_alpha = r.f64();
    snap.prev_mode = r.f64();
    env_.restore(snap);

    pipeline_state_.load(r);
    buffer_.load(r);
    r.matrix(obs_);
    records_.clear();
    pipeline_.clear();
}

// ---------------------------------------------------------------------------
// Summaries

json to_json(const RunSummary& s)
{
    return {{"name", s.name},
            {"seed", s.seed},
            {"steps", s.steps},
            {"converged_reward", s.converged_reward},
            {"converged_sum_rate", s.converged_sum_rate},
            {"mean_reward", s.mean_reward},
            {"mean_sum_rate", s.mean_sum_rate},
            {"active_fraction", s.active_fraction},
            {"passive_fraction", s.passive_fraction},
            {"mean_energy_J", s.mean_energy_j},
            {"mean_cap", s.mean_cap},
            {"violations", s.violations},
            {"discarded", s.discarded},
            {"triggered", s.triggered}};
}

RunSummary summary_from_json(const json& j)
{
    RunSummary s;
    s.name = j.at("name").get<std::string>();
    s.seed = j.at("seed").get<std::uint64_t>();
    s.steps = j.at("steps").get<long>();
    s.converged_reward = j.at("converged_reward").get<double>();
    s.converged_sum_rate = j.at("converged_sum_rate").get<double>();
    s.mean_reward = j.at("mean_reward").get<double>();
    s.mean_sum_rate = j.at("mean_sum_rate").get<double>();
    s.active_fraction = j.at("active_fraction").get<double>();
    s.passive_fraction = j.at("passive_fraction").get<double>();
    s.mean_energy_j = j.at("mean_energy_J").get<double>();
    s.mean_cap = j.at("mean_cap").get<double>();
    s.violations = j.at("violations").get<long>();
    s.discarded = j.at("discarded").get<long>();
    s.triggered = j.at("triggered").get<long>();
    return s;
}

RunSummary summarize(const std::string& name, std::uint64_t seed, const std::vector<StepRecord>& records,
                     const std::vector<RewardPipelineRecord>& pipeline)
{
    RunSummary s;
    s.name = name;
    s.seed = seed;
    s.steps = static_cast<long>(records.size());
    if (records.empty()) return s;

    const std::size_t n = records.size();
    const std::size_t tail = std::max<std::size_t>(1, n / 10);
    long active = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const StepRecord& r = records[i];
        s.mean_reward += r.reward;
        s.mean_sum_rate += r.sum_rate;
        s.mean_energy_j += r.energy_j;
        s.mean_cap += r.cap;
        if (r.mode == Resolved::active) ++active;
        if (r.tx_power > r.cap + 1e-9) ++s.violations;
        if (i >= n - tail) {
            s.converged_reward += r.reward;
            s.converged_sum_rate += r.sum_rate;
        }
    }
    const double dn = static_cast<double>(n);
    s.mean_reward /= dn;
    s.mean_sum_rate /= dn;
    s.mean_energy_j /= dn;
    s.mean_cap /= dn;
    s.converged_reward /= static_cast<double>(tail);
    s.converged_sum_rate /= static_cast<double>(tail);
    s.active_fraction = static_cast<double>(active) / dn;
    s.passive_fraction = static_cast<double>(static_cast<long>(n) - active) / dn;
    for (const auto& p : pipeline) {
        if (p.decision == Decision::discarded) ++s.discarded;
        if (p.triggered) ++s.triggered;
    }
    return s;
}

std::vector<double> moving_average(const std::vector<double>& xs, int window)
{
    std::vector<double> out(xs.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sum += xs[i];
        if (i >= static_cast<std::size_t>(window)) sum -= xs[i - static_cast<std::size_t>(window)];
        out[i] = sum / static_cast<double>(std::min<std::size_t>(i + 1, static_cast<std::size_t>(window)));
    }
    return out;
}

double ExperimentResult::mean_of(double RunSummary::*field) const
{
    if (seeds.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : seeds) s += r.summary.*field;
    return s / static_cast<double>(seeds.size());
}

double ExperimentResult::std_of(double RunSummary::*field) const
{
    if (seeds.size() < 2) return 0.0;
    const double mu = mean_of(field);
    double ss = 0.0;
    for (const auto& r : seeds) ss += (r.summary.*field - mu) * (r.summary.*field - mu);
    return std::sqrt(ss / static_cast<double>(seeds.size() - 1));
}

// ---------------------------------------------------------------------------
// Running

namespace {

void write_lines(const fs::path& path, const auto& items)
{
    std::ofstream os(path);
    for (const auto& item : items) os << to_json(item).dump() << '\n';
}

void write_curves(const fs::path& path, const std::vector<std::uint64_t>& seeds,
                  const std::vector<std::vector<double>>& curves)
{
    std::ofstream os(path);
    os.precision(17);
    os << "step";
    for (auto s : seeds) os << ",seed_" << s;
    os << ",mean\n";
    const std::size_t n = curves.empty() ? 0 : curves.front().size();
    for (std::size_t t = 0; t < n; ++t) {
        os << t;
        double mean = 0.0;
        for (const auto& c : curves) {
            os << ',' << c[t];
            mean += c[t];
        }
        os << ',' << mean / static_cast<double>(curves.size()) << '\n';
    }
}

json aggregate_json(const ExperimentResult& r)
{
    long violations = 0;
    for (const auto& s : r.seeds) violations += s.summary.violations;
    return {{"converged_reward_mean", r.mean_of(&RunSummary::converged_reward)},
            {"converged_reward_std", r.std_of(&RunSummary::converged_reward)},
            {"converged_sum_rate_mean", r.mean_of(&RunSummary::converged_sum_rate)},
            {"active_fraction_mean", r.mean_of(&RunSummary::active_fraction)},
            {"mean_energy_J_mean", r.mean_of(&RunSummary::mean_energy_j)},
            {"violations_total", violations}};
}

} // namespace

SeedResult run_seed(const ExperimentSpec& spec, std::uint64_t seed, const fs::path* dir)
{
    const auto start = std::chrono::steady_clock::now();
    Trainer trainer(spec, seed);
    for (long t = 0; t < spec.total_steps; ++t) trainer.step();

    SeedResult result;
    result.summary = summarize(spec.name, seed, trainer.records(), trainer.pipeline_records());
    std::vector<double> rewards;
    rewards.reserve(trainer.records().size());
    for (const auto& r : trainer.records()) rewards.push_back(r.reward);
    result.curve = moving_average(rewards, spec.moving_average_window);
    result.summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (dir != nullptr) {
        fs::create_directories(*dir);
        if (spec.output.step_log) write_lines(*dir / "steps.jsonl", trainer.records());
        if (spec.output.pipeline_log && (spec.attack || spec.defense)) {
            write_lines(*dir / "pipeline.jsonl", trainer.pipeline_records());
        }
        if (spec.output.checkpoint) trainer.save_checkpoint(*dir / "checkpoint.bin");
        std::ofstream(*dir / "summary.json") << to_json(result.summary).dump(2) << '\n';
        std::ofstream(*dir / "timing.json") << json{{"wall_seconds", result.summary.wall_seconds}}.dump() << '\n';
    }
    return result;
}

int default_workers()
{
    if (const char* env = std::getenv("HRIS_WORKERS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<ExperimentResult> run(const ExperimentSpec& spec, const fs::path& out, int workers)
{
    const std::vector<ExperimentSpec> specs = expand_sweep(spec);
    struct Job {
        std::size_t spec;
        std::size_t seed;
    };
    std::vector<Job> jobs;
    std::vector<ExperimentResult> results(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i) {
        results[i].name = specs[i].name;
        results[i].seeds.resize(specs[i].seeds.size());
        for (std::size_t k = 0; k < specs[i].seeds.size(); ++k) jobs.push_back({i, k});
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
            try {
                const ExperimentSpec& s = specs[jobs[j].spec];
                const std::uint64_t seed = s.seeds[jobs[j].seed];
                if (out.empty()) {
                    results[jobs[j].spec].seeds[jobs[j].seed] = run_seed(s, seed);
                } else {
                    const fs::path dir = out / s.name / ("seed_" + std::to_string(seed));
                    results[jobs[j].spec].seeds[jobs[j].seed] = run_seed(s, seed, &dir);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const int n = std::max(1, std::min<int>(workers > 0 ? workers : default_workers(), static_cast<int>(jobs.size())));
    std::vector<std::thread> pool;
    for (int i = 1; i < n; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);

    if (!out.empty()) {
        for (std::size_t i = 0; i < specs.size(); ++i) {
            const fs::path dir = out / specs[i].name;
            fs::create_directories(dir);
            json seeds = json::array();
            std::vector<std::vector<double>> curves;
            for (const auto& s : results[i].seeds) {
                seeds.push_back(to_json(s.summary));
                curves.push_back(s.curve);
            }
            const json summary{{"name", specs[i].name},
                               {"spec", specs[i].source},
                               {"seeds", seeds},
                               {"aggregate", aggregate_json(results[i])}};
            std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';
            write_curves(dir / "curves.csv", specs[i].seeds, curves);
        }
    }
    return results;
}

// ---------------------------------------------------------------------------
// Comparison

double energy_savings(double hybrid_energy, double active_energy)
{
    if (!(active_energy > 0.0)) throw DomainError("energy_savings: active energy must be > 0");
    return 1.0 - hybrid_energy / active_energy;
}

std::vector<ComparisonRow> compare(const std::vector<ExperimentResult>& runs)
{
    if (runs.empty()) throw AlignmentError("compare: nothing to compare");
    const ExperimentResult& base = runs.front();
    std::vector<ComparisonRow> rows;
    for (const ExperimentResult& r : runs) {
        if (r.seeds.size() != base.seeds.size()) {
            throw AlignmentError("compare: " + r.name + " has " + std::to_string(r.seeds.size()) + " seeds, " +
                                 base.name + " has " + std::to_string(base.seeds.size()));
        }
        ComparisonRow row;
        row.name = r.name;
        row.seeds = r.seeds.size();
        std::vector<double> diffs;
        for (std::size_t k = 0; k < r.seeds.size(); ++k) {
            const RunSummary& a = r.seeds[k].summary;
            const RunSummary& b = base.seeds[k].summary;
            if (a.seed != b.seed) {
                throw AlignmentError("compare: seed lists differ between " + r.name + " and " + base.name);
            }
            if (a.steps != b.steps) {
                throw AlignmentError("compare: " + r.name + " ran " + std::to_string(a.steps) + " steps, " +
                                     base.name + " ran " + std::to_string(b.steps));
            }
            diffs.push_back(a.converged_reward - b.converged_reward);
        }
        row.steps = r.seeds.empty() ? 0 : r.seeds.front().summary.steps;
        row.converged_mean = r.mean_of(&RunSummary::converged_reward);
        row.converged_std = r.std_of(&RunSummary::converged_reward);
        row.sum_rate_mean = r.mean_of(&RunSummary::converged_sum_rate);
        row.active_fraction = r.mean_of(&RunSummary::active_fraction);
        row.mean_energy_j = r.mean_of(&RunSummary::mean_energy_j);

        const double n = static_cast<double>(diffs.size());
        row.diff_vs_first = n > 0 ? std::accumulate(diffs.begin(), diffs.end(), 0.0) / n : 0.0;
        if (diffs.size() > 1) {
            double ss = 0.0;
            for (double d : diffs) ss += (d - row.diff_vs_first) * (d - row.diff_vs_first);
            row.diff_std = std::sqrt(ss / (n - 1.0));
            row.t_stat = row.diff_std > 0.0 ? row.diff_vs_first / (row.diff_std / std::sqrt(n)) : 0.0;
        }
        const double base_energy = base.mean_of(&RunSummary::mean_energy_j);
        row.energy_savings_vs_first = base_energy > 0.0 ? energy_savings(row.mean_energy_j, base_energy) : 0.0;
        rows.push_back(row);
    }
    return rows;
}

ExperimentResult load_experiment(const fs::path& dir)
{
    std::ifstream in(dir / "summary.json");
    if (!in) throw AlignmentError("compare: no summary.json in " + dir.string());
    const json j = json::parse(in);
    ExperimentResult r;
    r.name = j.at("name").get<std::string>();
    for (const json& s : j.at("seeds")) r.seeds.push_back({summary_from_json(s), {}});

    std::ifstream curves(dir / "curves.csv");
    std::string line;
    if (curves && std::getline(curves, line)) {
        while (std::getline(curves, line)) {
            std::stringstream ss(line);
            std::string cell;
            std::getline(ss, cell, ','); // step
            for (auto& seed : r.seeds) {
                if (!std::getline(ss, cell, ',')) break;
                seed.curve.push_back(std::stod(cell));
            }
        }
    }
    return r;
}

void write_comparison_csv(const std::vector<ComparisonRow>& rows, const fs::path& path)
{
    std::ofstream os(path);
    os.precision(10);
    os << "name,seeds,steps,converged_mean,converged_std,sum_rate_mean,active_fraction,mean_energy_J,"
          "diff_vs_first,diff_std,t_stat,energy_savings_vs_first\n";
    for (const auto& r : rows) {
        os << r.name << ',' << r.seeds << ',' << r.steps << ',' << r.converged_mean << ',' << r.converged_std << ','
           << r.sum_rate_mean << ',' << r.active_fraction << ',' << r.mean_energy_j << ',' << r.diff_vs_first << ','
           << r.diff_std << ',' << r.t_stat << ',' << r.energy_savings_vs_first << '\n';
    }
}

void write_curves_csv(const std::vector<ExperimentResult>& runs, const fs::path& path)
{
    std::size_t n = 0;
    for (const auto& r : runs) {
        for (const auto& s : r.seeds) {
            if (n == 0) n = s.curve.size();
            if (s.curve.size() != n) throw AlignmentError("compare: curve lengths differ in " + r.name);
        }
    }
    std::ofstream os(path);
    os.precision(10);
    os << "step";
    for (const auto& r : runs) os << ',' << r.name;
    os << '\n';
    for (std::size_t t = 0; t < n; ++t) {
        os << t;
        for (const auto& r : runs) {
            double m = 0.0;
            for (const auto& s : r.seeds) m += s.curve[t];
            os << ',' << m / static_cast<double>(r.seeds.size());
        }
        os << '\n';
    }
}

} // namespace hris
