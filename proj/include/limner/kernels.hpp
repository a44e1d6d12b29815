#pragma once

// Data-parallel inner loops. Every kernel has a serial *_reference twin that
// the tests hold the OpenMP version against; bench/ times the pair.

#include <cstddef>
#include <span>
#include <vector>

namespace limner::kernels {

/// Evaluates f at every point of `grid`. Output order matches `grid`.
template <typename F>
std::vector<double> grid_scan_reference(const F& f, std::span<const double> grid) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = f(grid[i]);
  return out;
}

template <typename F>
std::vector<double> grid_scan(const F& f, std::span<const double> grid) {
  std::vector<double> out(grid.size());
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = f(grid[i]);
  return out;
}

/// Index of the first minimum.
std::size_t argmin(std::span<const double> values);

/// Per-element compensated (Neumaier) running sum. Each element's sum is
/// independent of the others, so splitting the element range across threads
/// gives bit-identical results to the serial loop.
class CompensatedAccumulator {
 public:
  explicit CompensatedAccumulator(std::size_t size = 0) : sum_(size, 0.0), comp_(size, 0.0) {}

  std::size_t size() const { return sum_.size(); }
  std::size_t count() const { return count_; }

  void add_reference(std::span<const float> values);
  void add(std::span<const float> values);

  /// Adds a batch of equally sized buffers, pixel range split over threads.
  void add_batch(std::span<const std::vector<float>> batch);

  /// sum / count per element.
  std::vector<double> mean() const;

 private:
  std::vector<double> sum_;
  std::vector<double> comp_;
  std::size_t count_ = 0;
};

}  // namespace limner::kernels
