#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace bmatch {

/// Streaming batch-means estimator over a run of known length.
class BatchMeans {
 public:
  BatchMeans(std::uint64_t n_samples, int n_batches = 100);

  void add(double v) noexcept;

  double mean() const noexcept;
  /// Standard error of the mean from the spread of batch means.
  double stderr_of_mean() const noexcept;
  std::uint64_t count() const noexcept { return count_; }

 private:
  std::uint64_t batch_len_;
  std::vector<double> batch_sums_;
  std::vector<std::uint64_t> batch_counts_;
  std::uint64_t count_ = 0;
  double total_ = 0.0;
};

}  // namespace bmatch
