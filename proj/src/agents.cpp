#include "hris/agents.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hris {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

const double half_log_two_pi = 0.5 * std::log(2.0 * std::numbers::pi);

double softplus(double x)
{
    return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// log(1 - tanh(u)^2) without cancellation for large |u|
double log_one_minus_tanh_sq(double u)
{
    return 2.0 * (std::numbers::ln2 - u - softplus(-2.0 * u));
}

MatrixXd stack(const MatrixXd& top, const MatrixXd& bottom)
{
    MatrixXd out(top.rows() + bottom.rows(), top.cols());
    out << top, bottom;
    return out;
}

MatrixXd gaussian_noise(Rng& rng, Eigen::Index rows, Eigen::Index cols)
{
    MatrixXd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
    }
    return m;
}

std::vector<int> layer_sizes(int in, const std::vector<int>& hidden, int out)
{
    std::vector<int> sizes{in};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(out);
    return sizes;
}

double grad_norm(const Net::Gradients& g)
{
    double s = 0.0;
    for (const auto& w : g.weight) s += w.squaredNorm();
    for (const auto& b : g.bias) s += b.squaredNorm();
    return std::sqrt(s);
}

/// Reparameterized draw from the squashed Gaussian policy head.
struct PolicySample {
    MatrixXd mean;
    MatrixXd log_std;   // clamped
    MatrixXd in_range;  // 1 where the raw log_std was inside the clamp
    MatrixXd noise;
    MatrixXd pre_tanh;
    MatrixXd action;
    VectorXd log_prob;
};

PolicySample sample_policy(const MatrixXd& head, int action_dim, Rng& rng)
{
    PolicySample p;
    const Eigen::Index n = head.cols();
    p.mean = head.topRows(action_dim);
    const MatrixXd raw = head.bottomRows(action_dim);
    p.log_std = raw.cwiseMax(log_std_min).cwiseMin(log_std_max);
    p.in_range = ((raw.array() >= log_std_min) && (raw.array() <= log_std_max)).cast<double>().matrix();
    p.noise = gaussian_noise(rng, action_dim, n);
    p.pre_tanh = p.mean.array() + p.log_std.array().exp() * p.noise.array();
    p.action = p.pre_tanh.array().tanh();
    p.log_prob = VectorXd::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double lp = 0.0;
        for (int i = 0; i < action_dim; ++i) {
            const double e = p.noise(i, j);
            lp += -0.5 * e * e - p.log_std(i, j) - half_log_two_pi - log_one_minus_tanh_sq(p.pre_tanh(i, j));
        }
        p.log_prob[j] = lp;
    }
    return p;
}

void save_net(BinaryWriter& w, const Net& net)
{
    w.u64(net.sizes().size());
    for (int s : net.sizes()) w.i64(s);
    w.doubles(net.parameters());
}

void load_net(BinaryReader& r, Net& net)
{
    std::vector<int> sizes(r.u64());
    for (int& s : sizes) s = static_cast<int>(r.i64());
    net = Net(sizes);
    net.set_parameters(r.doubles());
}

void save_adam(BinaryWriter& w, const NetAdam& opt)
{
    w.i64(opt.steps());
    for (const auto* g : {&opt.first_moment(), &opt.second_moment()}) {
        w.u64(g->weight.size());
        for (std::size_t l = 0; l < g->weight.size(); ++l) {
            w.matrix(g->weight[l]);
            w.matrix(g->bias[l]);
        }
    }
}

void load_adam(BinaryReader& r, NetAdam& opt)
{
    opt.set_steps(r.i64());
    for (auto* g : {&opt.first_moment(), &opt.second_moment()}) {
        const auto layers = r.u64();
        g->weight.resize(layers);
        g->bias.resize(layers);
        for (std::size_t l = 0; l < layers; ++l) {
            r.matrix(g->weight[l]);
            r.matrix(g->bias[l]);
        }
    }
}

} // namespace

void SacConfig::validate() const
{
    if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("sac.gamma must lie in (0, 1]");
    if (!(lr > 0.0)) throw DomainError("sac.lr must be > 0");
    if (batch < 1) throw DomainError("sac.batch must be >= 1");
    if (!(tau_soft >= 0.0 && tau_soft <= 1.0)) throw DomainError("sac.tau_soft must lie in [0, 1]");
    if (!(entropy_alpha > 0.0)) throw DomainError("sac.entropy_alpha must be > 0");
    if (buffer_capacity < batch) throw DomainError("sac.buffer_capacity must be >= batch");
    if (warmup_steps < 0) throw DomainError("sac.warmup_steps must be >= 0");
    if (!(baseline_rate > 0.0 && baseline_rate <= 1.0)) throw DomainError("sac.baseline_rate must lie in (0, 1]");
}

void BaselineConfig::validate() const
{
    if (!(gamma > 0.0 && gamma <= 1.0)) throw DomainError("baseline.gamma must lie in (0, 1]");
    if (!(lr > 0.0)) throw DomainError("baseline.lr must be > 0");
    if (batch < 1) throw DomainError("baseline.batch must be >= 1");
    if (!(tau_soft >= 0.0 && tau_soft <= 1.0)) throw DomainError("baseline.tau_soft must lie in [0, 1]");
    if (buffer_capacity < batch) throw DomainError("baseline.buffer_capacity must be >= batch");
    if (policy_delay < 1) throw DomainError("baseline.policy_delay must be >= 1");
    if (warmup_steps < 0) throw DomainError("baseline.warmup_steps must be >= 0");
    if (!(baseline_rate > 0.0 && baseline_rate <= 1.0)) throw DomainError("baseline.baseline_rate must lie in (0, 1]");
}

// ---------------------------------------------------------------------------
// SAC

SacBundle SacBundle::create(int obs_dim, int action_dim, const SacConfig& cfg, Rng& rng)
{
    SacBundle b;
    b.action_dim = action_dim;
    b.policy = Net(layer_sizes(obs_dim, cfg.hidden, 2 * action_dim), rng);
    b.critic1 = Net(layer_sizes(obs_dim + action_dim, cfg.hidden, 1), rng);
    b.critic2 = Net(layer_sizes(obs_dim + action_dim, cfg.hidden, 1), rng);
    b.target1 = b.critic1;
    b.target2 = b.critic2;
    b.policy_opt = NetAdam(b.policy);
    b.critic1_opt = NetAdam(b.critic1);
    b.critic2_opt = NetAdam(b.critic2);
    b.log_alpha = std::log(cfg.entropy_alpha);
    return b;
}

void SacBundle::save(BinaryWriter& w) const
{
    w.str("sac");
    w.i64(action_dim);
    for (const Net* n : {&policy, &critic1, &critic2, &target1, &target2}) save_net(w, *n);
    for (const NetAdam* o : {&policy_opt, &critic1_opt, &critic2_opt}) save_adam(w, *o);
    w.f64(log_alpha);
    w.f64(alpha_opt.m);
    w.f64(alpha_opt.v);
    w.i64(alpha_opt.t);
    w.f64(reward_baseline);
}

void SacBundle::load(BinaryReader& r)
{
    r.expect("sac");
    action_dim = static_cast<int>(r.i64());
    for (Net* n : {&policy, &critic1, &critic2, &target1, &target2}) load_net(r, *n);
    for (NetAdam* o : {&policy_opt, &critic1_opt, &critic2_opt}) load_adam(r, *o);
    log_alpha = r.f64();
    alpha_opt.m = r.f64();
    alpha_opt.v = r.f64();
    alpha_opt.t = r.i64();
    reward_baseline = r.f64();
}

double squashed_log_prob(double mean, double log_std, double a)
{
    const double u = std::atanh(a);
    const double z = (u - mean) / std::exp(log_std);
    return -0.5 * z * z - log_std - half_log_two_pi - std::log1p(-a * a);
}

vec sac_select_action(const SacBundle& bundle, const vec& state, bool deterministic, Rng& rng)
{
    const MatrixXd head = bundle.policy.predict(MatrixXd(state));
    if (deterministic) {
        return head.topRows(bundle.action_dim).col(0).array().tanh();
    }
    return sample_policy(head, bundle.action_dim, rng).action.col(0);
}

SacTargets sac_critic_targets(SacBundle& bundle, const Batch& batch, const SacConfig& cfg, Rng& rng)
{
    SacTargets t;
    const PolicySample next = sample_policy(bundle.policy.predict(batch.next_states), bundle.action_dim, rng);
    const MatrixXd next_sa = stack(batch.next_states, next.action);
    t.next_actions = next.action;
    t.next_log_prob = next.log_prob;
    t.q1_next = bundle.target1.predict(next_sa).row(0).transpose();
    t.q2_next = bundle.target2.predict(next_sa).row(0).transpose();

    VectorXd rewards = batch.rewards;
    if (cfg.reward_baseline) {
        bundle.reward_baseline += cfg.baseline_rate * (rewards.mean() - bundle.reward_baseline);
        rewards.array() -= bundle.reward_baseline;
    }
    const double alpha = bundle.entropy_alpha();
    t.target = rewards.array() +
               cfg.gamma * (t.q1_next.cwiseMin(t.q2_next).array() - alpha * t.next_log_prob.array());
    return t;
}

UpdateStats sac_update_critics(SacBundle& bundle, const Batch& batch, const SacConfig& cfg, Rng& rng)
{
    UpdateStats stats;
    if (batch.size() < static_cast<Eigen::Index>(cfg.batch) || batch.size() == 0) {
        stats.skipped = true;
        stats.warning = "batch underflow: " + std::to_string(batch.size()) + " < " + std::to_string(cfg.batch);
        return stats;
    }
    const SacTargets t = sac_critic_targets(bundle, batch, cfg, rng);
    const MatrixXd sa = stack(batch.states, batch.actions);
    const double m = static_cast<double>(batch.size());

    double grad_sq = 0.0;
    for (auto [critic, opt] : {std::pair{&bundle.critic1, &bundle.critic1_opt},
                               std::pair{&bundle.critic2, &bundle.critic2_opt}}) {
        const VectorXd q = critic->forward(sa).row(0).transpose();
        const VectorXd err = q - t.target;
        stats.critic_loss += err.squaredNorm() / m / 2.0;
        stats.q_mean += q.mean() / 2.0;
        Net::Gradients& grads = bundle.critic_grads;
        critic->backward((2.0 / m) * err.transpose(), grads);
        const double n = grad_norm(grads);
        grad_sq += n * n;
        opt->step(*critic, grads, cfg.lr);
    }
    stats.critic_grad_norm = std::sqrt(grad_sq);
    stats.entropy_alpha = bundle.entropy_alpha();
    return stats;
}

UpdateStats sac_update(SacBundle& bundle, const Batch& batch, const SacConfig& cfg, Rng& rng)
{
    UpdateStats stats = sac_update_critics(bundle, batch, cfg, rng);
    if (stats.skipped) return stats;

    const int dim = bundle.action_dim;
    const double m = static_cast<double>(batch.size());
    const double alpha = bundle.entropy_alpha();

    const MatrixXd head = bundle.policy.forward(batch.states);
    const PolicySample p = sample_policy(head, dim, rng);
    const MatrixXd sa = stack(batch.states, p.action);
    const MatrixXd q1 = bundle.critic1.forward(sa);
    const MatrixXd q2 = bundle.critic2.forward(sa);

    // route dQ/da through whichever critic is the minimum for each sample
    MatrixXd pick1 = MatrixXd::Zero(1, batch.size());
    MatrixXd pick2 = MatrixXd::Zero(1, batch.size());
    double loss = 0.0;
    for (Eigen::Index j = 0; j < batch.size(); ++j) {
        const bool first = q1(0, j) <= q2(0, j);
        (first ? pick1 : pick2)(0, j) = 1.0;
        loss += alpha * p.log_prob[j] - std::min(q1(0, j), q2(0, j));
    }
    stats.policy_loss = loss / m;
    const MatrixXd dq_da = (bundle.critic1.input_gradient(pick1) + bundle.critic2.input_gradient(pick2))
                               .bottomRows(dim);

    MatrixXd head_grad(2 * dim, batch.size());
    for (Eigen::Index j = 0; j < batch.size(); ++j) {
        for (int i = 0; i < dim; ++i) {
            const double a = p.action(i, j);
            const double th = std::tanh(p.pre_tanh(i, j));
            const double sigma_noise = std::exp(p.log_std(i, j)) * p.noise(i, j);
            const double dq_du = dq_da(i, j) * (1.0 - a * a);
            head_grad(i, j) = (alpha * 2.0 * th - dq_du) / m;
            const double dlogp_dls = -1.0 + 2.0 * th * sigma_noise;
            head_grad(dim + i, j) = p.in_range(i, j) * (alpha * dlogp_dls - dq_du * sigma_noise) / m;
        }
    }
    Net::Gradients& pgrads = bundle.policy_grads;
    bundle.policy.backward(head_grad, pgrads);
    bundle.policy_opt.step(bundle.policy, pgrads, cfg.lr);
    stats.actor_updated = true;

    if (cfg.auto_entropy) {
        const double target_entropy = cfg.target_entropy.value_or(-static_cast<double>(dim));
        const double grad = -(p.log_prob.array() + target_entropy).mean();
        bundle.alpha_opt.step(bundle.log_alpha, grad, cfg.lr);
    }
    stats.entropy_alpha = bundle.entropy_alpha();

    bundle.target1.soft_update(bundle.critic1, cfg.tau_soft);
    bundle.target2.soft_update(bundle.critic2, cfg.tau_soft);
    return stats;
}

// ---------------------------------------------------------------------------
// DDPG / TD3

DeterministicBundle DeterministicBundle::create(int obs_dim, int action_dim, int critic_count,
                                                const BaselineConfig& cfg, Rng& rng)
{
    DeterministicBundle b;
    b.actor = Net(layer_sizes(obs_dim, cfg.hidden, action_dim), rng);
    b.actor_target = b.actor;
    b.actor_opt = NetAdam(b.actor);
    for (int i = 0; i < critic_count; ++i) {
        b.critics.emplace_back(layer_sizes(obs_dim + action_dim, cfg.hidden, 1), rng);
        b.critic_targets.push_back(b.critics.back());
        b.critic_opts.emplace_back(b.critics.back());
    }
    return b;
}

void DeterministicBundle::save(BinaryWriter& w) const
{
    w.str("deterministic");
    w.i64(updates);
    w.f64(reward_baseline);
    save_net(w, actor);
    save_net(w, actor_target);
    save_adam(w, actor_opt);
    w.u64(critics.size());
    for (std::size_t i = 0; i < critics.size(); ++i) {
        save_net(w, critics[i]);
        save_net(w, critic_targets[i]);
        save_adam(w, critic_opts[i]);
    }
}

void DeterministicBundle::load(BinaryReader& r)
{
    r.expect("deterministic");
    updates = r.i64();
    reward_baseline = r.f64();
    load_net(r, actor);
    load_net(r, actor_target);
    load_adam(r, actor_opt);
    const auto n = r.u64();
    critics.resize(n);
    critic_targets.resize(n);
    critic_opts.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        load_net(r, critics[i]);
        load_net(r, critic_targets[i]);
        load_adam(r, critic_opts[i]);
    }
}

vec deterministic_action(const DeterministicBundle& bundle, const vec& state)
{
    return bundle.actor.predict(state).array().tanh();
}

vec noisy_action(const DeterministicBundle& bundle, const vec& state, double noise_std, Rng& rng)
{
    vec a = deterministic_action(bundle, state);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        a[i] = std::clamp(a[i] + noise_std * rng.normal(), -1.0, 1.0);
    }
    return a;
}

namespace {

double fit_critic(Net& critic, NetAdam& opt, Net::Gradients& grads, const MatrixXd& sa, const VectorXd& target,
                  double lr, double& grad_sq)
{
    const double m = static_cast<double>(target.size());
    const VectorXd q = critic.forward(sa).row(0).transpose();
    const VectorXd err = q - target;
    critic.backward((2.0 / m) * err.transpose(), grads);
    const double n = grad_norm(grads);
    grad_sq += n * n;
    opt.step(critic, grads, lr);
    return err.squaredNorm() / m;
}

/// Gradient step on -mean Q_0(s, tanh(actor(s))).
double improve_actor(DeterministicBundle& b, const Batch& batch, double lr)
{
    const double m = static_cast<double>(batch.size());
    const MatrixXd pre = b.actor.forward(batch.states);
    const MatrixXd a = pre.array().tanh();
    const MatrixXd q = b.critics[0].forward(stack(batch.states, a));
    const MatrixXd dq_da =
        b.critics[0].input_gradient(MatrixXd::Constant(1, batch.size(), 1.0)).bottomRows(a.rows());
    const MatrixXd grad = (-1.0 / m) * (dq_da.array() * (1.0 - a.array().square())).matrix();
    Net::Gradients& g = b.actor_grads;
    b.actor.backward(grad, g);
    b.actor_opt.step(b.actor, g, lr);
    return -q.mean();
}

VectorXd centered_rewards(DeterministicBundle& b, const Batch& batch, const BaselineConfig& cfg)
{
    VectorXd rewards = batch.rewards;
    if (cfg.reward_baseline) {
        b.reward_baseline += cfg.baseline_rate * (rewards.mean() - b.reward_baseline);
        rewards.array() -= b.reward_baseline;
    }
    return rewards;
}

UpdateStats underflow(const Batch& batch, std::size_t want)
{
    UpdateStats s;
    s.skipped = true;
    s.warning = "batch underflow: " + std::to_string(batch.size()) + " < " + std::to_string(want);
    return s;
}

} // namespace

UpdateStats ddpg_update(DeterministicBundle& b, const Batch& batch, const BaselineConfig& cfg)
{
    if (batch.size() < static_cast<Eigen::Index>(cfg.batch) || batch.size() == 0) return underflow(batch, cfg.batch);
    UpdateStats stats;
    ++b.updates;

    const MatrixXd next_a = b.actor_target.predict(batch.next_states).array().tanh();
    const VectorXd q_next = b.critic_targets[0].predict(stack(batch.next_states, next_a)).row(0).transpose();
    const VectorXd target = centered_rewards(b, batch, cfg) + cfg.gamma * q_next;

    double grad_sq = 0.0;
    stats.critic_loss = fit_critic(b.critics[0], b.critic_opts[0], b.critic_grads, stack(batch.states, batch.actions), target,
                                   cfg.lr, grad_sq);
    stats.critic_grad_norm = std::sqrt(grad_sq);
    stats.policy_loss = improve_actor(b, batch, cfg.lr);
    stats.actor_updated = true;

    b.actor_target.soft_update(b.actor, cfg.tau_soft);
    b.critic_targets[0].soft_update(b.critics[0], cfg.tau_soft);
    return stats;
}

Eigen::VectorXd td3_targets(DeterministicBundle& b, const Batch& batch, const BaselineConfig& cfg, Rng& rng,
                            Eigen::MatrixXd* next_actions)
{
    MatrixXd a = b.actor_target.predict(batch.next_states).array().tanh();
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            const double noise = std::clamp(cfg.target_noise * rng.normal(), -cfg.noise_clip, cfg.noise_clip);
            a(i, j) = std::clamp(a(i, j) + noise, -1.0, 1.0);
        }
    }
    const MatrixXd sa = stack(batch.next_states, a);
    VectorXd q_min = b.critic_targets[0].predict(sa).row(0).transpose();
    for (std::size_t i = 1; i < b.critic_targets.size(); ++i) {
        q_min = q_min.cwiseMin(VectorXd(b.critic_targets[i].predict(sa).row(0).transpose()));
    }
    if (next_actions != nullptr) *next_actions = a;
    return centered_rewards(b, batch, cfg) + cfg.gamma * q_min;
}

UpdateStats td3_update(DeterministicBundle& b, const Batch& batch, const BaselineConfig& cfg, Rng& rng)
{
    if (batch.size() < static_cast<Eigen::Index>(cfg.batch) || batch.size() == 0) return underflow(batch, cfg.batch);
    UpdateStats stats;
    ++b.updates;

    const VectorXd target = td3_targets(b, batch, cfg, rng);
    const MatrixXd sa = stack(batch.states, batch.actions);
    double grad_sq = 0.0;
    for (std::size_t i = 0; i < b.critics.size(); ++i) {
        stats.critic_loss += fit_critic(b.critics[i], b.critic_opts[i], b.critic_grads, sa, target, cfg.lr, grad_sq) /
                             static_cast<double>(b.critics.size());
    }
    stats.critic_grad_norm = std::sqrt(grad_sq);

    if (b.updates % cfg.policy_delay == 0) {
        stats.policy_loss = improve_actor(b, batch, cfg.lr);
        stats.actor_updated = true;
        b.actor_target.soft_update(b.actor, cfg.tau_soft);
        for (std::size_t i = 0; i < b.critics.size(); ++i) {
            b.critic_targets[i].soft_update(b.critics[i], cfg.tau_soft);
        }
    }
    return stats;
}

vec random_policy(Rng& rng, int dim)
{
    vec a(dim);
    for (int i = 0; i < dim; ++i) a[i] = rng.uniform(-1.0, 1.0);
    return a;
}

// ---------------------------------------------------------------------------
// Agent wrappers

AgentKind parse_agent_kind(const std::string& name)
{
    if (name == "sac") return AgentKind::sac;
    if (name == "ddpg") return AgentKind::ddpg;
    if (name == "td3") return AgentKind::td3;
    if (name == "random") return AgentKind::random;
    throw DomainError("unknown agent kind '" + name + "' (expected sac, ddpg, td3 or random)");
}

std::string to_string(AgentKind kind)
{
    switch (kind) {
    case AgentKind::sac: return "sac";
    case AgentKind::ddpg: return "ddpg";
    case AgentKind::td3: return "td3";
    case AgentKind::random: return "random";
    }
    return "unknown";
}

vec Agent::random_action()
{
    return random_policy(rng_, action_dim_);
}

namespace {

class SacAgent final : public Agent {
public:
    SacAgent(int obs_dim, int action_dim, SacConfig cfg, std::uint64_t seed)
        : Agent(action_dim, seed), cfg_(std::move(cfg))
    {
        Rng init = rng_.split(7);
        bundle_ = SacBundle::create(obs_dim, action_dim, cfg_, init);
    }

    AgentKind kind() const override { return AgentKind::sac; }
    vec act(const vec& s, bool deterministic) override { return sac_select_action(bundle_, s, deterministic, rng_); }
    UpdateStats update(const ReplayBuffer& buffer) override
    {
        if (buffer.size() < cfg_.batch) return underflow(Batch{}, cfg_.batch);
        return sac_update(bundle_, buffer.sample(cfg_.batch, rng_), cfg_, rng_);
    }
    long warmup_steps() const override { return cfg_.warmup_steps; }
    std::size_t batch_size() const override { return cfg_.batch; }
    std::size_t buffer_capacity() const override { return cfg_.buffer_capacity; }
    void save(BinaryWriter& w) const override
    {
        w.rng(rng_.state());
        bundle_.save(w);
    }
    void load(BinaryReader& r) override
    {
        rng_.set_state(r.rng());
        bundle_.load(r);
    }

private:
    SacConfig cfg_;
    SacBundle bundle_;
};

class DeterministicAgent final : public Agent {
public:
    DeterministicAgent(AgentKind kind, int obs_dim, int action_dim, BaselineConfig cfg, std::uint64_t seed)
        : Agent(action_dim, seed), kind_(kind), cfg_(std::move(cfg))
    {
        Rng init = rng_.split(7);
        bundle_ = DeterministicBundle::create(obs_dim, action_dim, kind == AgentKind::td3 ? 2 : 1, cfg_, init);
    }

    AgentKind kind() const override { return kind_; }
    vec act(const vec& s, bool deterministic) override
    {
        return deterministic ? deterministic_action(bundle_, s) : noisy_action(bundle_, s, cfg_.exploration_noise, rng_);
    }
    UpdateStats update(const ReplayBuffer& buffer) override
    {
        if (buffer.size() < cfg_.batch) return underflow(Batch{}, cfg_.batch);
        const Batch batch = buffer.sample(cfg_.batch, rng_);
        return kind_ == AgentKind::td3 ? td3_update(bundle_, batch, cfg_, rng_) : ddpg_update(bundle_, batch, cfg_);
    }
    long warmup_steps() const override { return cfg_.warmup_steps; }
    std::size_t batch_size() const override { return cfg_.batch; }
    std::size_t buffer_capacity() const override { return cfg_.buffer_capacity; }
    void save(BinaryWriter& w) const override
    {
        w.rng(rng_.state());
        bundle_.save(w);
    }
    void load(BinaryReader& r) override
    {
        rng_.set_state(r.rng());
        bundle_.load(r);
    }

private:
    AgentKind kind_;
    BaselineConfig cfg_;
    DeterministicBundle bundle_;
};

class RandomAgent final : public Agent {
public:
    RandomAgent(int action_dim, std::uint64_t seed) : Agent(action_dim, seed) {}

    AgentKind kind() const override { return AgentKind::random; }
    vec act(const vec&, bool) override { return random_action(); }
    UpdateStats update(const ReplayBuffer&) override
    {
        UpdateStats s;
        s.skipped = true;
        return s;
    }
    long warmup_steps() const override { return 0; }
    std::size_t batch_size() const override { return 1; }
    std::size_t buffer_capacity() const override { return 1; }
    void save(BinaryWriter& w) const override { w.rng(rng_.state()); }
    void load(BinaryReader& r) override { rng_.set_state(r.rng()); }
};

} // namespace

std::unique_ptr<Agent> make_agent(AgentKind kind, int obs_dim, int action_dim, const SacConfig& sac,
                                  const BaselineConfig& baseline, std::uint64_t seed)
{
    switch (kind) {
    case AgentKind::sac:
        sac.validate();
        return std::make_unique<SacAgent>(obs_dim, action_dim, sac, seed);
    case AgentKind::ddpg:
    case AgentKind::td3:
        baseline.validate();
        return std::make_unique<DeterministicAgent>(kind, obs_dim, action_dim, baseline, seed);
    case AgentKind::random:
        return std::make_unique<RandomAgent>(action_dim, seed);
    }
    throw DomainError("unknown agent kind");
}

} // namespace hris
