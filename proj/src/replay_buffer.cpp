#include "elsim/replay_buffer.hpp"

#include <stdexcept>

namespace elsim {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw std::domain_error("ReplayBuffer: capacity must be positive");
}

void ReplayBuffer::push(Transition t) {
  if (storage_.size() < capacity_) {
    storage_.push_back(std::move(t));
  } else {
    storage_[next_] = std::move(t);
    next_ = (next_ + 1) % capacity_;
  }
  ++total_pushes_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= storage_.size()) throw std::out_of_range("ReplayBuffer: index out of range");
  if (storage_.size() < capacity_) return storage_[i];
  return storage_[(next_ + i) % capacity_];
}

const Transition& ReplayBuffer::sample_one(std::mt19937_64& rng) const {
  if (storage_.empty()) throw std::domain_error("ReplayBuffer: sample from empty buffer");
  std::uniform_int_distribution<std::size_t> dist(0, storage_.size() - 1);
  return storage_[dist(rng)];
}

std::vector<const Transition*> ReplayBuffer::sample(std::size_t k, std::mt19937_64& rng) const {
  if (storage_.empty()) throw std::domain_error("ReplayBuffer: sample from empty buffer");
  std::vector<const Transition*> out;
  out.reserve(k);
  std::uniform_int_distribution<std::size_t> dist(0, storage_.size() - 1);
  for (std::size_t i = 0; i < k; ++i) out.push_back(&storage_[dist(rng)]);
  return out;
}

}  // namespace elsim
