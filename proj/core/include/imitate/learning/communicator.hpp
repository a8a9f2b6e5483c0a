#pragma once

#include <condition_variable>
#include <mutex>
#include <vector>

#include <Eigen/Core>

namespace imitate::learning {

/// Elementwise mean of equally sized vectors, summed in index order.
Eigen::VectorXd average_gradients(const std::vector<Eigen::VectorXd>& grads);

/// Synchronous collectives between worker threads of one process.
///
/// Every rank calls the same sequence of collectives. Reductions are evaluated
/// by each rank over the gathered contributions in rank order, so all ranks
/// obtain bit-identical results.
class Communicator {
 public:
  explicit Communicator(int size);

  int size() const { return size_; }

  std::vector<Eigen::VectorXd> allgather(int rank, const Eigen::VectorXd& v);
  Eigen::VectorXd allreduce_mean(int rank, const Eigen::VectorXd& v);
  Eigen::VectorXd allreduce_sum(int rank, const Eigen::VectorXd& v);

  /// Wakes every waiting rank with an exception; later calls also throw.
  void abort();

 private:
  void barrier(std::unique_lock<std::mutex>& lock);

  int size_;
  std::mutex mutex_;
  std::condition_variable cv_;
  int arrived_ = 0;
  long generation_ = 0;
  bool aborted_ = false;
  std::vector<Eigen::VectorXd> slots_;
};

}  // namespace imitate::learning
