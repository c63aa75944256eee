#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "tla/rng.hpp"
#include "tla/tensor.hpp"

namespace tla {

/// One stored step. The bootstrap mask is 0 only on true termination; it
/// stays 1 on time-limit truncation so the TD target keeps bootstrapping.
struct Transition {
  std::vector<double> state;
  std::vector<double> action;
  std::vector<double> next_state;
  double reward = 0.0;
  double bootstrap_mask = 1.0;
};

/// A sampled minibatch in matrix form, rows = transitions.
struct Batch {
  Tensor states;       // [B x state_dim]
  Tensor actions;      // [B x action_dim]
  Tensor next_states;  // [B x state_dim]
  std::vector<double> rewards;
  std::vector<double> masks;
  std::size_t size() const { return rewards.size(); }
};

/// Fixed-capacity ring of transitions with uniform sampling. Oldest entries
/// are overwritten first once full.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, std::size_t state_dim, std::size_t action_dim)
      : capacity_(capacity), state_dim_(state_dim), action_dim_(action_dim) {
    check(capacity > 0, "ReplayBuffer: capacity must be positive");
    states_.resize(capacity * state_dim);
    actions_.resize(capacity * action_dim);
    next_states_.resize(capacity * state_dim);
    rewards_.resize(capacity);
    masks_.resize(capacity);
  }

  void add(std::span<const double> state, std::span<const double> action,
           double reward, std::span<const double> next_state, double mask) {
    check(state.size() == state_dim_ && next_state.size() == state_dim_,
          "ReplayBuffer::add: state width mismatch");
    check(action.size() == action_dim_, "ReplayBuffer::add: action width mismatch");
    std::copy(state.begin(), state.end(), states_.begin() + cursor_ * state_dim_);
    std::copy(action.begin(), action.end(), actions_.begin() + cursor_ * action_dim_);
    std::copy(next_state.begin(), next_state.end(),
              next_states_.begin() + cursor_ * state_dim_);
    rewards_[cursor_] = reward;
    masks_[cursor_] = mask;
    cursor_ = (cursor_ + 1) % capacity_;
    if (size_ < capacity_) ++size_;
  }

  Batch sample(std::size_t batch_size, Rng& rng) const {
    check(size_ > 0, "ReplayBuffer::sample: buffer is empty");
    Batch b;
    b.states = Tensor::zeros({batch_size, state_dim_});
    b.actions = Tensor::zeros({batch_size, action_dim_});
    b.next_states = Tensor::zeros({batch_size, state_dim_});
    b.rewards.resize(batch_size);
    b.masks.resize(batch_size);
    for (std::size_t r = 0; r < batch_size; ++r) {
      const std::size_t idx = rng.index(size_);
      std::copy_n(states_.begin() + idx * state_dim_, state_dim_,
                  b.states.data.begin() + r * state_dim_);
      std::copy_n(actions_.begin() + idx * action_dim_, action_dim_,
                  b.actions.data.begin() + r * action_dim_);
      std::copy_n(next_states_.begin() + idx * state_dim_, state_dim_,
                  b.next_states.data.begin() + r * state_dim_);
      b.rewards[r] = rewards_[idx];
      b.masks[r] = masks_[idx];
    }
    return b;
  }

  /// Transition at ring index i in [0, size); index 0 is the slot written
  /// longest ago that is still present.
  Transition get(std::size_t i) const {
    check(i < size_, "ReplayBuffer::get: index out of range");
    const std::size_t idx = size_ < capacity_ ? i : (cursor_ + i) % capacity_;
    Transition t;
    t.state.assign(states_.begin() + idx * state_dim_,
                   states_.begin() + (idx + 1) * state_dim_);
    t.action.assign(actions_.begin() + idx * action_dim_,
                    actions_.begin() + (idx + 1) * action_dim_);
    t.next_state.assign(next_states_.begin() + idx * state_dim_,
                        next_states_.begin() + (idx + 1) * state_dim_);
    t.reward = rewards_[idx];
    t.bootstrap_mask = masks_[idx];
    return t;
  }

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }
  std::size_t state_dim() const { return state_dim_; }
  std::size_t action_dim() const { return action_dim_; }

 private:
  std::size_t capacity_;
  std::size_t state_dim_;
  std::size_t action_dim_;
  std::size_t size_ = 0;
  std::size_t cursor_ = 0;
  std::vector<double> states_, actions_, next_states_, rewards_, masks_;
};

}  // namespace tla
