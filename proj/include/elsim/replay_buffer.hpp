#ifndef ELSIM_REPLAY_BUFFER_HPP_
#define ELSIM_REPLAY_BUFFER_HPP_

#include <cstdint>
#include <random>
#include <vector>

namespace elsim {

using Obs = std::vector<double>;

// One environment interaction. The extrinsic reward is deliberately not
// stored: intrinsic rewards are recomputed from the live discriminators
// at training time, and extrinsic reward never reaches skill learning.
struct Transition {
  Obs state;
  int action = 0;
  Obs next_state;
  bool done = false;
};

// Fixed-capacity FIFO buffer; the oldest transition is evicted first.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return storage_.size(); }
  bool empty() const { return storage_.empty(); }
  std::size_t capacity() const { return capacity_; }

  // Total number of pushes over the buffer's lifetime (monotone; used to
  // measure how much fresh data arrived since a checkpoint).
  std::uint64_t total_pushes() const { return total_pushes_; }

  // Oldest-first access.
  const Transition& at(std::size_t i) const;

  // Uniform draw with replacement.
  const Transition& sample_one(std::mt19937_64& rng) const;
  std::vector<const Transition*> sample(std::size_t k, std::mt19937_64& rng) const;

 private:
  std::size_t capacity_;
  std::vector<Transition> storage_;
  std::size_t next_ = 0;  // ring write position once full
  std::uint64_t total_pushes_ = 0;
};

}  // namespace elsim

#endif  // ELSIM_REPLAY_BUFFER_HPP_
