#pragma once

#include <cmath>
#include <span>

namespace mespec {

// Kahan-Babuska-Neumaier compensated accumulator. Unlike plain Kahan the
// correction term also survives summands larger than the running sum.
struct CompensatedSum {
  double sum = 0.0;
  double correction = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      correction += (sum - t) + x;
    } else {
      correction += (x - t) + sum;
    }
    sum = t;
  }

  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }

  double value() const { return sum + correction; }
};

// Sums back to front. Model sums store the term of largest index with the
// smallest magnitude, so this accumulates in increasing magnitude.
inline double sum_from_tail(std::span<const double> terms) {
  CompensatedSum acc;
  for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
    acc += *it;
  }
  return acc.value();
}

inline double compensated_dot(std::span<const double> a, std::span<const double> b) {
  CompensatedSum acc;
  for (std::size_t i = a.size(); i-- > 0;) {
    acc += a[i] * b[i];
  }
  return acc.value();
}

}  // namespace mespec
