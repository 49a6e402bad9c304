#pragma once

#include "aerostar/numerics.hpp"

#include <vector>

namespace aerostar::agents {

struct Transition {
  Eigen::VectorXd state;
  Eigen::VectorXd action;  // critic-facing action: continuous block then +/-1 signs
  int action_index = -1;   // codebook index for value-based agents
  double reward = 0.0;
  Eigen::VectorXd next_state;
  bool terminal = false;
};

// Row-stacked minibatch.
struct Batch {
  Eigen::MatrixXd states;
  Eigen::MatrixXd actions;
  Eigen::VectorXi action_indices;
  Eigen::VectorXd rewards;
  Eigen::MatrixXd next_states;
  Eigen::VectorXd terminal;  // 1.0 for terminal transitions

  Eigen::Index size() const { return rewards.size(); }
};

class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::size_t insertions() const { return insertions_; }
  const Transition& at(std::size_t i) const { return items_.at(i); }

  // Uniform indices with replacement. Throws std::logic_error while the
  // buffer holds fewer than `batch_size` transitions.
  std::vector<std::size_t> sample_indices(std::size_t batch_size, Rng& rng) const;
  Batch sample(std::size_t batch_size, Rng& rng) const;
  Batch gather(const std::vector<std::size_t>& indices) const;

 private:
  std::size_t capacity_;
  std::size_t insertions_ = 0;
  std::vector<Transition> items_;
};

Batch make_batch(const std::vector<Transition>& transitions);

}  // namespace aerostar::agents
