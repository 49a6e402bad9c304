#include "aerostar/agents/replay_buffer.hpp"

#include <stdexcept>

namespace aerostar::agents {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  items_.reserve(std::min<std::size_t>(capacity, 4096));
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[insertions_ % capacity_] = std::move(t);
  }
  ++insertions_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t batch_size, Rng& rng) const {
  if (batch_size == 0 || items_.size() < batch_size) {
    throw std::logic_error("ReplayBuffer::sample: not enough transitions");
  }
  std::vector<std::size_t> idx(batch_size);
  for (auto& i : idx) i = rng.index(items_.size());
  return idx;
}

Batch ReplayBuffer::sample(std::size_t batch_size, Rng& rng) const {
  return gather(sample_indices(batch_size, rng));
}

Batch ReplayBuffer::gather(const std::vector<std::size_t>& indices) const {
  std::vector<Transition> picked;
  picked.reserve(indices.size());
  for (const auto i : indices) picked.push_back(items_.at(i));
  return make_batch(picked);
}

Batch make_batch(const std::vector<Transition>& transitions) {
  if (transitions.empty()) throw std::invalid_argument("make_batch: empty batch");
  const auto b = static_cast<Eigen::Index>(transitions.size());
  const Eigen::Index s = transitions.front().state.size();
  const Eigen::Index a = transitions.front().action.size();
  Batch out;
  out.states.resize(b, s);
  out.next_states.resize(b, s);
  out.actions.resize(b, a);
  out.action_indices.resize(b);
  out.rewards.resize(b);
  out.terminal.resize(b);
  for (Eigen::Index i = 0; i < b; ++i) {
    const Transition& t = transitions[static_cast<std::size_t>(i)];
    if (t.state.size() != s || t.next_state.size() != s || t.action.size() != a) {
      throw std::invalid_argument("make_batch: ragged transitions");
    }
    out.states.row(i) = t.state.transpose();
    out.next_states.row(i) = t.next_state.transpose();
    out.actions.row(i) = t.action.transpose();
    out.action_indices(i) = t.action_index;
    out.rewards(i) = t.reward;
    out.terminal(i) = t.terminal ? 1.0 : 0.0;
  }
  return out;
}

}  // namespace aerostar::agents
