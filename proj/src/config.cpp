#include "hris/config.hpp"

#include <fstream>
#include <functional>
#include <sstream>

namespace hris {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& errors)
{
    std::string msg = "invalid experiment config:";
    for (const auto& e : errors) msg += "\n  " + e;
    return msg;
}

/// Reports keys present in `user` but absent from `schema`.
void unknown_keys(const json& user, const json& schema, const std::string& path, std::vector<std::string>& errors)
{
    if (!user.is_object() || !schema.is_object()) return;
    for (const auto& [key, value] : user.items()) {
        const std::string here = path + "/" + key;
        if (!schema.contains(key)) {
            errors.push_back(here + ": unknown field");
        } else if (schema.at(key).is_object()) {
            unknown_keys(value, schema.at(key), here, errors);
        }
    }
}

/// Typed field access that records, rather than throws, on mismatch.
class Fields {
public:
    Fields(const json& root, std::vector<std::string>& errors) : root_(root), errors_(errors) {}

    template <class T>
    T get(const std::string& pointer, T fallback = T{})
    {
        try {
            return root_.at(json::json_pointer(pointer)).get<T>();
        } catch (const std::exception& e) {
            errors_.push_back(pointer + ": " + e.what());
            return fallback;
        }
    }

    const json& at(const std::string& pointer) const { return root_.at(json::json_pointer(pointer)); }

    /// Runs a validate() and files its complaint under `section`.
    void check(const std::string& section, const std::function<void()>& validate)
    {
        try {
            validate();
        } catch (const std::exception& e) {
            errors_.push_back(section + ": " + e.what());
        }
    }

private:
    const json& root_;
    std::vector<std::string>& errors_;
};

RisModeKind parse_mode_kind(const std::string& s)
{
    if (s == "passive") return RisModeKind::passive;
    if (s == "active") return RisModeKind::active;
    if (s == "dynamic_hybrid") return RisModeKind::dynamic_hybrid;
    if (s == "fixed_hybrid") return RisModeKind::fixed_hybrid;
    throw DomainError("unknown RIS mode '" + s + "'");
}

} // namespace

ConfigError::ConfigError(std::vector<std::string> errors) : std::runtime_error(join(errors)), errors_(std::move(errors))
{
}

json default_config()
{
    return json::parse(R"({
  "name": "defaults",
  "env": {
    "topology": {"antennas": 2, "su_receivers": 2, "ris_elements": 4, "pu_receivers": 2},
    "cascade": {"su_to_ris": 4, "ris_to_su": 4, "su_to_pu": 1},
    "passive": {"beta_min": 0.6, "exponent": 1.5, "offset": 0.0},
    "active": {"alpha_min": 1.2, "alpha_max": 2.0, "e_max_j": null, "amp_noise_var_w": 0.01},
    "harvest": {"efficiency": 0.9, "beacon_power_w": 10.0, "duration_s": 1.0, "threshold_j": 50.0},
    "consumption": {"p_passive_w": 0.0001, "p_amp_w": 0.05, "p_ctrl_w": 0.01, "slot_seconds": 1.0},
    "noise": {"passive_var_w": 1.0, "active_var_w": 1.0},
    "power": {"max_power_db": 10.0, "interference_db": 10.0},
    "mode": {"kind": "dynamic_hybrid", "active_fraction": 0.5, "fixed_gain": 2.0},
    "penalty_weight": 0.1,
    "fading_block_length": 1,
    "normalize_observation": true
  },
  "agent": {
    "kind": "sac",
    "sac": {
      "gamma": 1.0, "lr": 0.001, "batch": 16, "tau_soft": 0.005, "entropy_alpha": 0.2,
      "auto_entropy": true, "target_entropy": null, "buffer_capacity": 100000,
      "warmup_steps": 1000, "hidden": [256, 256], "reward_baseline": true, "baseline_rate": 0.01
    },
    "baseline": {
      "gamma": 1.0, "lr": 0.001, "batch": 16, "tau_soft": 0.005, "buffer_capacity": 100000,
      "warmup_steps": 1000, "hidden": [256, 256], "exploration_noise": 0.1, "target_noise": 0.2,
      "noise_clip": 0.5, "policy_delay": 2, "reward_baseline": true, "baseline_rate": 0.01
    }
  },
  "attack": {"enabled": false, "kind": "invert", "scale": 0.5, "low": 0.3, "high": 0.9,
             "threshold": 0.5, "trigger_window": 50},
  "defense": {"enabled": false, "r_min": -2.0, "r_max": 2.0, "chi": 2.0, "warmup_count": 10,
              "stats_window": 500},
  "seeds": [0, 1, 2, 3, 4, 5, 6, 7, 8, 9],
  "total_steps": 20000,
  "moving_average_window": 200,
  "output": {"step_log": true, "pipeline_log": true, "checkpoint": true},
  "sweep": []
})");
}

ExperimentSpec parse_spec(const json& user)
{
    std::vector<std::string> errors;
    if (!user.is_object()) throw ConfigError({"config root must be an object"});

    json merged = default_config();
    unknown_keys(user, merged, "", errors);
    merged.merge_patch(user);
    // merge_patch drops explicit nulls; restore the nullable defaults
    if (!merged["env"]["active"].contains("e_max_j")) merged["env"]["active"]["e_max_j"] = nullptr;
    if (!merged["agent"]["sac"].contains("target_entropy")) merged["agent"]["sac"]["target_entropy"] = nullptr;

    Fields f(merged, errors);
    ExperimentSpec spec;
    spec.source = merged;
    spec.name = f.get<std::string>("/name", "experiment");

    EnvConfig& env = spec.env;
    env.topo = {f.get<int>("/env/topology/antennas"), f.get<int>("/env/topology/su_receivers"),
                f.get<int>("/env/topology/ris_elements"), f.get<int>("/env/topology/pu_receivers")};
    env.cascade = {f.get<int>("/env/cascade/su_to_ris"), f.get<int>("/env/cascade/ris_to_su"),
                   f.get<int>("/env/cascade/su_to_pu")};
    env.passive = {f.get<double>("/env/passive/beta_min"), f.get<double>("/env/passive/exponent"),
                   f.get<double>("/env/passive/offset")};
    env.harvest = {f.get<double>("/env/harvest/efficiency"), f.get<double>("/env/harvest/beacon_power_w"),
                   f.get<double>("/env/harvest/duration_s"), f.get<double>("/env/harvest/threshold_j")};
    env.active.alpha_min = f.get<double>("/env/active/alpha_min");
    env.active.alpha_max = f.get<double>("/env/active/alpha_max");
    env.active.amp_noise_var = f.get<double>("/env/active/amp_noise_var_w");
    if (f.at("/env/active/e_max_j").is_null()) {
        // full gain when the average element harvests what a unit-power beacon channel delivers
        env.active.e_max = env.harvest.efficiency * env.harvest.beacon_power * env.harvest.duration;
    } else {
        env.active.e_max = f.get<double>("/env/active/e_max_j");
    }
    env.consumption = {f.get<double>("/env/consumption/p_passive_w"), f.get<double>("/env/consumption/p_amp_w"),
                       f.get<double>("/env/consumption/p_ctrl_w"), f.get<double>("/env/consumption/slot_seconds")};
    env.noise = {f.get<double>("/env/noise/passive_var_w"), f.get<double>("/env/noise/active_var_w")};
    env.power = {db_to_linear(f.get<double>("/env/power/max_power_db")),
                 db_to_linear(f.get<double>("/env/power/interference_db"))};
    try {
        env.mode.kind = parse_mode_kind(f.get<std::string>("/env/mode/kind"));
    } catch (const std::exception& e) {
        errors.push_back(std::string("/env/mode/kind: ") + e.what());
    }
    env.mode.active_fraction = f.get<double>("/env/mode/active_fraction");
    env.mode.fixed_gain = f.get<double>("/env/mode/fixed_gain");
    env.penalty_weight = f.get<double>("/env/penalty_weight");
    env.fading.block_length = f.get<long>("/env/fading_block_length", 1);
    env.normalize_observation = f.get<bool>("/env/normalize_observation", true);

    f.check("/env/topology", [&] { env.topo.validate(); });
    f.check("/env/cascade", [&] { env.cascade.validate(); });
    f.check("/env/passive", [&] { env.passive.validate(); });
    f.check("/env/active", [&] { env.active.validate(); });
    f.check("/env/harvest", [&] { env.harvest.validate(); });
    f.check("/env/consumption", [&] { env.consumption.validate(); });
    f.check("/env/noise", [&] { env.noise.validate(); });
    f.check("/env/power", [&] { env.power.validate(); });
    f.check("/env/mode", [&] { env.mode.validate(); });
    if (!(env.penalty_weight >= 0.0)) errors.push_back("/env/penalty_weight: must be >= 0");
    if (env.fading.block_length < 1) errors.push_back("/env/fading_block_length: must be >= 1");

    try {
        spec.agent = parse_agent_kind(f.get<std::string>("/agent/kind"));
    } catch (const std::exception& e) {
        errors.push_back(std::string("/agent/kind: ") + e.what());
    }
    SacConfig& sac = spec.sac;
    sac.gamma = f.get<double>("/agent/sac/gamma");
    sac.lr = f.get<double>("/agent/sac/lr");
    sac.batch = f.get<std::size_t>("/agent/sac/batch");
    sac.tau_soft = f.get<double>("/agent/sac/tau_soft");
    sac.entropy_alpha = f.get<double>("/agent/sac/entropy_alpha");
    sac.auto_entropy = f.get<bool>("/agent/sac/auto_entropy");
    if (!f.at("/agent/sac/target_entropy").is_null()) sac.target_entropy = f.get<double>("/agent/sac/target_entropy");
    sac.buffer_capacity = f.get<std::size_t>("/agent/sac/buffer_capacity");
    sac.warmup_steps = f.get<long>("/agent/sac/warmup_steps");
    sac.hidden = f.get<std::vector<int>>("/agent/sac/hidden");
    sac.reward_baseline = f.get<bool>("/agent/sac/reward_baseline");
    sac.baseline_rate = f.get<double>("/agent/sac/baseline_rate");
    f.check("/agent/sac", [&] { sac.validate(); });

    BaselineConfig& base = spec.baseline;
    base.gamma = f.get<double>("/agent/baseline/gamma");
    base.lr = f.get<double>("/agent/baseline/lr");
    base.batch = f.get<std::size_t>("/agent/baseline/batch");
    base.tau_soft = f.get<double>("/agent/baseline/tau_soft");
    base.buffer_capacity = f.get<std::size_t>("/agent/baseline/buffer_capacity");
    base.warmup_steps = f.get<long>("/agent/baseline/warmup_steps");
    base.hidden = f.get<std::vector<int>>("/agent/baseline/hidden");
    base.exploration_noise = f.get<double>("/agent/baseline/exploration_noise");
    base.target_noise = f.get<double>("/agent/baseline/target_noise");
    base.noise_clip = f.get<double>("/agent/baseline/noise_clip");
    base.policy_delay = f.get<int>("/agent/baseline/policy_delay");
    base.reward_baseline = f.get<bool>("/agent/baseline/reward_baseline");
    base.baseline_rate = f.get<double>("/agent/baseline/baseline_rate");
    f.check("/agent/baseline", [&] { base.validate(); });

    if (f.get<bool>("/attack/enabled")) {
        AttackConfig a;
        try {
            a.kind = parse_attack_kind(f.get<std::string>("/attack/kind"));
        } catch (const std::exception& e) {
            errors.push_back(std::string("/attack/kind: ") + e.what());
        }
        a.scale = f.get<double>("/attack/scale");
        a.low = f.get<double>("/attack/low");
        a.high = f.get<double>("/attack/high");
        a.threshold = f.get<double>("/attack/threshold");
        a.trigger_window = f.get<int>("/attack/trigger_window");
        f.check("/attack", [&] { a.validate(); });
        spec.attack = a;
    }
    if (f.get<bool>("/defense/enabled")) {
        DefenseConfig d;
        d.r_min = f.get<double>("/defense/r_min");
        d.r_max = f.get<double>("/defense/r_max");
        d.chi = f.get<double>("/defense/chi");
        d.warmup_count = f.get<int>("/defense/warmup_count");
        d.stats_window = f.get<int>("/defense/stats_window");
        f.check("/defense", [&] { d.validate(); });
        spec.defense = d;
    }

    spec.seeds = f.get<std::vector<std::uint64_t>>("/seeds");
    if (spec.seeds.empty()) errors.push_back("/seeds: must list at least one seed");
    spec.total_steps = f.get<long>("/total_steps", 1);
    if (spec.total_steps < 1) errors.push_back("/total_steps: must be >= 1");
    spec.moving_average_window = f.get<int>("/moving_average_window", 1);
    if (spec.moving_average_window < 1) errors.push_back("/moving_average_window: must be >= 1");
    spec.output = {f.get<bool>("/output/step_log"), f.get<bool>("/output/pipeline_log"),
                   f.get<bool>("/output/checkpoint")};

    const json& sweep = f.at("/sweep");
    if (!sweep.is_array()) {
        errors.push_back("/sweep: must be an array");
    } else {
        for (std::size_t i = 0; i < sweep.size(); ++i) {
            const std::string here = "/sweep/" + std::to_string(i);
            const json& axis = sweep[i];
            if (!axis.is_object() || !axis.contains("path") || !axis.contains("values") ||
                !axis["path"].is_string() || !axis["values"].is_array() || axis["values"].empty()) {
                errors.push_back(here + ": needs a string 'path' and a non-empty 'values' array");
                continue;
            }
            const std::string path = axis["path"].get<std::string>();
            try {
                if (!merged.contains(json::json_pointer(path))) errors.push_back(here + ": no config field at " + path);
            } catch (const std::exception& e) {
                errors.push_back(here + ": " + e.what());
                continue;
            }
            spec.sweep.push_back({path, axis["values"].get<std::vector<json>>()});
        }
    }

    if (!errors.empty()) throw ConfigError(std::move(errors));
    return spec;
}

ExperimentSpec load_spec(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError({path + ": cannot open"});
    json user;
    try {
        user = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError({path + ": " + e.what()});
    }
    return parse_spec(user);
}

std::vector<ExperimentSpec> expand_sweep(const ExperimentSpec& spec)
{
    if (spec.sweep.empty()) return {spec};

    std::vector<std::pair<json, std::string>> points{{spec.source, spec.name}};
    for (const SweepAxis& axis : spec.sweep) {
        std::vector<std::pair<json, std::string>> next;
        const std::string leaf = axis.path.substr(axis.path.find_last_of('/') + 1);
        for (const auto& [cfg, name] : points) {
            for (const json& v : axis.values) {
                json c = cfg;
                c[json::json_pointer(axis.path)] = v;
                next.emplace_back(std::move(c), name + "__" + leaf + "=" + v.dump());
            }
        }
        points = std::move(next);
    }

    std::vector<ExperimentSpec> out;
    for (auto& [cfg, name] : points) {
        cfg["sweep"] = json::array();
        cfg["name"] = name;
        out.push_back(parse_spec(cfg));
    }
    return out;
}

ExperimentSpec with_overrides(const ExperimentSpec& spec, const json& patch)
{
    json cfg = spec.source;
    cfg.merge_patch(patch);
    return parse_spec(cfg);
}

} // namespace hris
