#include "hris/replay.hpp"

#include <algorithm>

namespace hris {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity)
{
    if (capacity_ == 0) throw DomainError("replay buffer capacity must be >= 1");
}

void ReplayBuffer::push(Transition t)
{
    if (items_.size() < capacity_) {
        items_.push_back(std::move(t));
    } else {
        items_[inserted_ % capacity_] = std::move(t);
    }
    ++inserted_;
}

Batch ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const
{
    if (batch_size > items_.size()) throw DomainError("replay buffer holds fewer transitions than the batch size");
    std::vector<std::size_t> picked;
    picked.reserve(batch_size);
    while (picked.size() < batch_size) {
        const auto idx = static_cast<std::size_t>(rng() % items_.size());
        if (std::find(picked.begin(), picked.end(), idx) == picked.end()) picked.push_back(idx);
    }

    const auto& first = items_[picked[0]];
    const auto n = static_cast<Eigen::Index>(batch_size);
    Batch batch{Eigen::MatrixXd(first.state.size(), n), Eigen::MatrixXd(first.action.size(), n),
                Eigen::VectorXd(n), Eigen::MatrixXd(first.next_state.size(), n)};
    for (Eigen::Index j = 0; j < n; ++j) {
        const Transition& t = items_[picked[static_cast<std::size_t>(j)]];
        batch.states.col(j) = t.state;
        batch.actions.col(j) = t.action;
        batch.rewards[j] = t.reward;
        batch.next_states.col(j) = t.next_state;
    }
    return batch;
}

Batch make_batch(const std::vector<Transition>& transitions)
{
    if (transitions.empty()) throw DomainError("make_batch: no transitions");
    const auto n = static_cast<Eigen::Index>(transitions.size());
    Batch batch{Eigen::MatrixXd(transitions[0].state.size(), n), Eigen::MatrixXd(transitions[0].action.size(), n),
                Eigen::VectorXd(n), Eigen::MatrixXd(transitions[0].next_state.size(), n)};
    for (Eigen::Index j = 0; j < n; ++j) {
        const Transition& t = transitions[static_cast<std::size_t>(j)];
        batch.states.col(j) = t.state;
        batch.actions.col(j) = t.action;
        batch.rewards[j] = t.reward;
        batch.next_states.col(j) = t.next_state;
    }
    return batch;
}

void ReplayBuffer::save(BinaryWriter& w) const
{
    w.str("replay");
    w.u64(capacity_);
    w.u64(inserted_);
    w.u64(items_.size());
    for (const Transition& t : items_) {
        w.matrix(t.state);
        w.matrix(t.action);
        w.f64(t.reward);
        w.matrix(t.next_state);
        w.i64(t.step);
    }
}

void ReplayBuffer::load(BinaryReader& r)
{
    r.expect("replay");
    capacity_ = r.u64();
    inserted_ = r.u64();
    const auto n = r.u64();
    if (n > capacity_) throw FormatError("replay buffer larger than its capacity");
    items_.assign(n, {});
    for (Transition& t : items_) {
        r.matrix(t.state);
        r.matrix(t.action);
        t.reward = r.f64();
        r.matrix(t.next_state);
        t.step = r.i64();
    }
}

} // namespace hris
