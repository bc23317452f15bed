#include "bmatch/stats.hpp"

#include <algorithm>
#include <cmath>

namespace bmatch {

BatchMeans::BatchMeans(std::uint64_t n_samples, int n_batches) {
  const std::uint64_t nb = std::max<std::uint64_t>(1, std::min<std::uint64_t>(n_batches, n_samples));
  batch_len_ = std::max<std::uint64_t>(1, n_samples / nb);
  batch_sums_.assign(nb, 0.0);
  batch_counts_.assign(nb, 0);
}

void BatchMeans::add(double v) noexcept {
  // Trailing samples beyond nb·len fold into the last batch.
  const std::uint64_t b = std::min<std::uint64_t>(count_ / batch_len_, batch_sums_.size() - 1);
  batch_sums_[b] += v;
  ++batch_counts_[b];
  ++count_;
  total_ += v;
}

double BatchMeans::mean() const noexcept {
  return count_ ? total_ / static_cast<double>(count_) : 0.0;
}

double BatchMeans::stderr_of_mean() const noexcept {
  std::vector<double> means;
  for (std::size_t b = 0; b < batch_sums_.size(); ++b) {
    if (batch_counts_[b]) means.push_back(batch_sums_[b] / static_cast<double>(batch_counts_[b]));
  }
  if (means.size() < 2) return 0.0;
  double m = 0.0;
  for (double v : means) m += v;
  m /= static_cast<double>(means.size());
  double ss = 0.0;
  for (double v : means) ss += (v - m) * (v - m);
  const double var = ss / static_cast<double>(means.size() - 1);
  return std::sqrt(var / static_cast<double>(means.size()));
}

}  // namespace bmatch
