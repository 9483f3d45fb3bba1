#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

namespace spingeo {

// Periodic grid on the unit torus [0,1)^m, row-major storage (last axis
// fastest). Axis sizes must be even and >= 4 so that spectral derivatives
// can drop the unpaired Nyquist mode.
struct TorusGrid {
  std::vector<int> sizes;

  TorusGrid() = default;
  explicit TorusGrid(std::vector<int> s) : sizes(std::move(s)) { validate(); }

  static constexpr long kMaxPoints = 1 << 24;

  int dim() const { return static_cast<int>(sizes.size()); }

  long total() const {
    long t = 1;
    for (int n : sizes) t *= n;
    return t;
  }

  void validate() const {
    if (sizes.empty()) throw std::invalid_argument("TorusGrid: empty sizes");
    for (int n : sizes) {
      if (n < 4 || n % 2 != 0)
        throw std::invalid_argument("TorusGrid: axis size " + std::to_string(n) +
                                    " must be even and >= 4");
    }
    if (total() > kMaxPoints)
      throw std::invalid_argument("TorusGrid: point count exceeds cap");
  }

  long stride(int axis) const {
    long s = 1;
    for (int a = dim() - 1; a > axis; --a) s *= sizes[a];
    return s;
  }

  void unflatten(long p, std::vector<int>& idx) const {
    idx.resize(dim());
    for (int a = dim() - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(p % sizes[a]);
      p /= sizes[a];
    }
  }

  long flatten(const std::vector<int>& idx) const {
    long p = 0;
    for (int a = 0; a < dim(); ++a) {
      int i = idx[a] % sizes[a];
      if (i < 0) i += sizes[a];
      p = p * sizes[a] + i;
    }
    return p;
  }

  double coord(long p, int axis) const {
    long s = stride(axis);
    long i = (p / s) % sizes[axis];
    return static_cast<double>(i) / sizes[axis];
  }

  void coords(long p, std::vector<double>& x) const {
    x.resize(dim());
    for (int a = dim() - 1; a >= 0; --a) {
      x[a] = static_cast<double>(p % sizes[a]) / sizes[a];
      p /= sizes[a];
    }
  }

  // signed integer frequency of FFT bin i along an axis
  static int freq(int i, int n) { return i < n / 2 ? i : i - n; }

  bool operator==(const TorusGrid& o) const { return sizes == o.sizes; }
};

}  // namespace spingeo
