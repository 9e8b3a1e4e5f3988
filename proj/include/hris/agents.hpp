#pragma once

#include "hris/nn.hpp"
#include "hris/replay.hpp"
#include "hris/serialize.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hris {

using Net = nn::DenseNet<double>;
using NetAdam = nn::Adam<double>;

struct SacConfig {
    double gamma = 1.0;
    double lr = 1e-3;
    std::size_t batch = 16;
    double tau_soft = 0.005;
    double entropy_alpha = 0.2; // initial e_s
    bool auto_entropy = true;
    std::optional<double> target_entropy; // -(action dim) when unset
    std::size_t buffer_capacity = 100000;
    long warmup_steps = 1000;
    std::vector<int> hidden{256, 256};
    /// Subtract a running mean of rewards from the bootstrapped target (average-reward form for gamma = 1).
    bool reward_baseline = true;
    double baseline_rate = 0.01;

    void validate() const;
};

/// Shared settings for the deterministic-policy baselines.
struct BaselineConfig {
    double gamma = 1.0;
    double lr = 1e-3;
    std::size_t batch = 16;
    double tau_soft = 0.005;
    std::size_t buffer_capacity = 100000;
    long warmup_steps = 1000;
    std::vector<int> hidden{256, 256};
    double exploration_noise = 0.1;
    double target_noise = 0.2; // TD3 target smoothing
    double noise_clip = 0.5;
    int policy_delay = 2;      // TD3
    bool reward_baseline = true;
    double baseline_rate = 0.01;

    void validate() const;
};

struct UpdateStats {
    bool skipped = false;
    std::string warning;
    double critic_loss = 0.0;
    double critic_grad_norm = 0.0;
    double policy_loss = 0.0;
    double entropy_alpha = 0.0;
    double q_mean = 0.0;
    bool actor_updated = false;
};

inline constexpr double log_std_min = -20.0;
inline constexpr double log_std_max = 2.0;

/// Policy, twin critics and their targets, temperature, and optimizer state for one SAC instance.
struct SacBundle {
    Net policy; // outputs [mean; log_std]
    Net critic1;
    Net critic2;
    Net target1;
    Net target2;
    NetAdam policy_opt;
    NetAdam critic1_opt;
    NetAdam critic2_opt;
    double log_alpha = 0.0;
    nn::ScalarAdam alpha_opt;
    double reward_baseline = 0.0;
    int action_dim = 0;
    Net::Gradients critic_grads; // scratch, not serialized
    Net::Gradients policy_grads;

    static SacBundle create(int obs_dim, int action_dim, const SacConfig& cfg, Rng& rng);

    double entropy_alpha() const { return std::exp(log_alpha); }
    void save(BinaryWriter& w) const;
    void load(BinaryReader& r);
};

/// Log-density of a = tanh(u), u ~ N(mean, exp(log_std)^2), for one dimension.
double squashed_log_prob(double mean, double log_std, double a);

/// Stochastic: tanh of a Gaussian sample. Deterministic: tanh(mean).
vec sac_select_action(const SacBundle& bundle, const vec& state, bool deterministic, Rng& rng);

/// Bootstrapped critic targets and their ingredients, exposed for verification.
struct SacTargets {
    Eigen::MatrixXd next_actions;
    Eigen::VectorXd next_log_prob;
    Eigen::VectorXd q1_next;
    Eigen::VectorXd q2_next;
    Eigen::VectorXd target;
};

SacTargets sac_critic_targets(SacBundle& bundle, const Batch& batch, const SacConfig& cfg, Rng& rng);

/// Critic regression step only (no policy, temperature or target update).
UpdateStats sac_update_critics(SacBundle& bundle, const Batch& batch, const SacConfig& cfg, Rng& rng);

/// Full SAC step: critics, policy, temperature, then soft target update.
UpdateStats sac_update(SacBundle& bundle, const Batch& batch, const SacConfig& cfg, Rng& rng);

/// Deterministic actor with one (DDPG) or two (TD3) critics.
struct DeterministicBundle {
    Net actor;
    Net actor_target;
    std::vector<Net> critics;
    std::vector<Net> critic_targets;
    NetAdam actor_opt;
    std::vector<NetAdam> critic_opts;
    long updates = 0;
    double reward_baseline = 0.0;
    Net::Gradients critic_grads; // scratch, not serialized
    Net::Gradients actor_grads;

    static DeterministicBundle create(int obs_dim, int action_dim, int critic_count, const BaselineConfig& cfg,
                                      Rng& rng);

    void save(BinaryWriter& w) const;
    void load(BinaryReader& r);
};

/// tanh(actor(s)).
vec deterministic_action(const DeterministicBundle& bundle, const vec& state);

/// Actor action plus clipped Gaussian exploration noise.
vec noisy_action(const DeterministicBundle& bundle, const vec& state, double noise_std, Rng& rng);

UpdateStats ddpg_update(DeterministicBundle& bundle, const Batch& batch, const BaselineConfig& cfg);

/// TD3 target r + gamma * min_i Q'_i(s', clip(mu'(s') + clipped noise)).
Eigen::VectorXd td3_targets(DeterministicBundle& bundle, const Batch& batch, const BaselineConfig& cfg,
                            Rng& rng, Eigen::MatrixXd* next_actions = nullptr);

UpdateStats td3_update(DeterministicBundle& bundle, const Batch& batch, const BaselineConfig& cfg, Rng& rng);

/// Uniform in [-1, 1]^dim.
vec random_policy(Rng& rng, int dim);

enum class AgentKind { sac, ddpg, td3, random };

AgentKind parse_agent_kind(const std::string& name);
std::string to_string(AgentKind kind);

/// Uniform interface the training loop drives. Each agent owns its RNG stream.
class Agent {
public:
    virtual ~Agent() = default;

    virtual AgentKind kind() const = 0;
    virtual vec act(const vec& state, bool deterministic) = 0;
    virtual UpdateStats update(const ReplayBuffer& buffer) = 0;
    virtual long warmup_steps() const = 0;
    virtual std::size_t batch_size() const = 0;
    virtual std::size_t buffer_capacity() const = 0;
    virtual void save(BinaryWriter& w) const = 0;
    virtual void load(BinaryReader& r) = 0;

    /// Uniform action used during warm-up; drawn from the agent's stream.
    vec random_action();

protected:
    Agent(int action_dim, std::uint64_t seed) : action_dim_(action_dim), rng_(seed) {}

    int action_dim_;
    Rng rng_;
};

std::unique_ptr<Agent> make_agent(AgentKind kind, int obs_dim, int action_dim, const SacConfig& sac,
                                  const BaselineConfig& baseline, std::uint64_t seed);

} // namespace hris
