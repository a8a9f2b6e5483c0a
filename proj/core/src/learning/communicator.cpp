#include "imitate/learning/communicator.hpp"

#include <stdexcept>

#include "imitate/util/error.hpp"

namespace imitate::learning {

Eigen::VectorXd average_gradients(const std::vector<Eigen::VectorXd>& grads) {
  if (grads.empty()) throw ContractError("average_gradients: no inputs");
  Eigen::VectorXd sum = grads.front();
  for (std::size_t k = 1; k < grads.size(); ++k) {
    if (grads[k].size() != sum.size()) throw ContractError("average_gradients: layout mismatch between workers");
    sum += grads[k];
  }
  return sum / static_cast<double>(grads.size());
}

Communicator::Communicator(int size) : size_(size), slots_(size) {
  if (size < 1) throw InvalidArgument("communicator size must be at least 1");
}

void Communicator::barrier(std::unique_lock<std::mutex>& lock) {
  if (aborted_) throw std::runtime_error("communicator aborted");
  const long gen = generation_;
  if (++arrived_ == size_) {
    arrived_ = 0;
    ++generation_;
    cv_.notify_all();
    return;
  }
  cv_.wait(lock, [&] { return generation_ != gen || aborted_; });
  if (aborted_) throw std::runtime_error("communicator aborted");
}

std::vector<Eigen::VectorXd> Communicator::allgather(int rank, const Eigen::VectorXd& v) {
  if (rank < 0 || rank >= size_) throw InvalidArgument("communicator rank out of range");
  if (size_ == 1) return {v};
  std::unique_lock<std::mutex> lock(mutex_);
  slots_[rank] = v;
  barrier(lock);
  std::vector<Eigen::VectorXd> out = slots_;
  barrier(lock);
  return out;
}

Eigen::VectorXd Communicator::allreduce_mean(int rank, const Eigen::VectorXd& v) {
  return average_gradients(allgather(rank, v));
}

Eigen::VectorXd Communicator::allreduce_sum(int rank, const Eigen::VectorXd& v) {
  const auto all = allgather(rank, v);
  Eigen::VectorXd sum = all.front();
  for (std::size_t k = 1; k < all.size(); ++k) sum += all[k];
  return sum;
}

void Communicator::abort() {
  std::lock_guard<std::mutex> lock(mutex_);
  aborted_ = true;
  cv_.notify_all();
}

}  // namespace imitate::learning
