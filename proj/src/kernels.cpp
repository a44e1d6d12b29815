#include "limner/kernels.hpp"

#include <cmath>
#include <stdexcept>

namespace limner::kernels {

namespace {

inline void neumaier_add(double& sum, double& comp, double v) {
  const double t = sum + v;
  if (std::fabs(sum) >= std::fabs(v)) {
    comp += (sum - t) + v;
  } else {
    comp += (v - t) + sum;
  }
  sum = t;
}

}  // namespace

std::size_t argmin(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("argmin of empty range");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  return best;
}

void CompensatedAccumulator::add_reference(std::span<const float> values) {
  if (values.size() != sum_.size()) throw std::invalid_argument("accumulator size mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) neumaier_add(sum_[i], comp_[i], values[i]);
  ++count_;
}

void CompensatedAccumulator::add(std::span<const float> values) {
  if (values.size() != sum_.size()) throw std::invalid_argument("accumulator size mismatch");
  const auto n = static_cast<std::ptrdiff_t>(values.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) neumaier_add(sum_[i], comp_[i], values[i]);
  ++count_;
}

void CompensatedAccumulator::add_batch(std::span<const std::vector<float>> batch) {
  for (const auto& b : batch) {
    if (b.size() != sum_.size()) throw std::invalid_argument("accumulator size mismatch");
  }
  const auto n = static_cast<std::ptrdiff_t>(sum_.size());
  // Pixel-major: each thread walks the whole batch for its pixel range.
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    double s = sum_[i];
    double c = comp_[i];
    for (const auto& b : batch) neumaier_add(s, c, b[i]);
    sum_[i] = s;
    comp_[i] = c;
  }
  count_ += batch.size();
}

std::vector<double> CompensatedAccumulator::mean() const {
  std::vector<double> out(sum_.size(), 0.0);
  if (count_ == 0) return out;
  const double n = static_cast<double>(count_);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (sum_[i] + comp_[i]) / n;
  return out;
}

}  // namespace limner::kernels
