#pragma once

#include "hris/numerics.hpp"
#include "hris/serialize.hpp"

#include <Eigen/Core>

#include <vector>

namespace hris {

struct Transition {
    vec state;
    vec action;
    double reward = 0.0;
    vec next_state;
    long step = 0; // environment step that produced it
};

/// Column-batched mini-batch.
struct Batch {
    Eigen::MatrixXd states;
    Eigen::MatrixXd actions;
    Eigen::VectorXd rewards;
    Eigen::MatrixXd next_states;

    Eigen::Index size() const { return rewards.size(); }
};

/// Fixed-capacity ring buffer; oldest transitions are overwritten first.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity = 100000);

    void push(Transition t);

    std::size_t size() const { return items_.size(); }
    std::size_t capacity() const { return capacity_; }
    std::size_t insertions() const { return inserted_; }
    const Transition& at(std::size_t i) const { return items_.at(i); }

    /// Uniform indices, distinct within the batch.
    Batch sample(std::size_t batch_size, Rng& rng) const;

    void save(BinaryWriter& w) const;
    void load(BinaryReader& r);

private:
    std::size_t capacity_;
    std::size_t inserted_ = 0;
    std::vector<Transition> items_;
};

Batch make_batch(const std::vector<Transition>& transitions);

} // namespace hris
