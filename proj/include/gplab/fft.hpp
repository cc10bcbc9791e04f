#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "gplab/common.hpp"

namespace gplab {

// Iterative radix-2 FFT for power-of-two sizes.  Plans (bit-reversal and
// per-stage twiddle tables) are cached per size; execution is in-place and
// thread-safe on distinct buffers.
class Fft {
 public:
  static const Fft& plan(std::size_t n) {
    static std::mutex mu;
    static std::unordered_map<std::size_t, std::unique_ptr<Fft>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot) slot.reset(new Fft(n));
    return *slot;
  }

  // X_k = sum_x a_x e^{-2 pi i k x / n}, unscaled.
  void forward(cplx* a) const { transform(a, w_fwd_); }

  // x_j = (1/n) sum_k a_k e^{+2 pi i k j / n}.
  void inverse(cplx* a) const {
    transform(a, w_inv_);
    const double s = 1.0 / double(n_);
    for (std::size_t i = 0; i < n_; ++i) a[i] *= s;
  }

  std::size_t size() const { return n_; }

 private:
  explicit Fft(std::size_t n) : n_(n) {
    if (n == 0 || (n & (n - 1)) != 0)
      throw std::invalid_argument("Fft: size must be a power of two");
    log2n_ = 0;
    while ((std::size_t(1) << log2n_) < n) ++log2n_;
    rev_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (int b = 0; b < log2n_; ++b)
        if (i & (std::size_t(1) << b)) r |= std::size_t(1) << (log2n_ - 1 - b);
      rev_[i] = r;
    }
    w_fwd_.resize(n);
    w_inv_.resize(n);
    // stage with half-length m stores its m twiddles at offset m
    for (std::size_t m = 1; m < n; m <<= 1) {
      for (std::size_t j = 0; j < m; ++j) {
        const double ang = -kPi * double(j) / double(m);
        w_fwd_[m + j] = cplx(std::cos(ang), std::sin(ang));
        w_inv_[m + j] = cplx(std::cos(ang), -std::sin(ang));
      }
    }
  }

  void transform(cplx* a, const std::vector<cplx>& w) const {
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t r = rev_[i];
      if (i < r) std::swap(a[i], a[r]);
    }
    for (std::size_t m = 1; m < n_; m <<= 1) {
      const cplx* tw = w.data() + m;
      for (std::size_t base = 0; base < n_; base += 2 * m) {
        for (std::size_t j = 0; j < m; ++j) {
          const cplx t = tw[j] * a[base + m + j];
          const cplx u = a[base + j];
          a[base + j] = u + t;
          a[base + m + j] = u - t;
        }
      }
    }
  }

  std::size_t n_;
  int log2n_ = 0;
  std::vector<std::size_t> rev_;
  std::vector<cplx> w_fwd_, w_inv_;
};

// 1D transform along one axis of a flattened tensor: the array is viewed as
// [outer][n][stride]; every line of length n (step `stride`) is transformed.
// An optional multiplier of length n is applied mode-wise after a forward
// pass (or before an inverse pass), saving one sweep in split-step code.
inline void fft_axis(cplx* data, std::size_t total, std::size_t n,
                     std::size_t stride, bool inverse,
                     const cplx* multiplier = nullptr) {
  const Fft& plan = Fft::plan(n);
  const std::size_t block = n * stride;
  const std::size_t outer = total / block;
  thread_local std::vector<cplx> scratch;
  if (stride == 1) {
    for (std::size_t o = 0; o < outer; ++o) {
      cplx* line = data + o * block;
      if (inverse) {
        if (multiplier)
          for (std::size_t t = 0; t < n; ++t) line[t] *= multiplier[t];
        plan.inverse(line);
      } else {
        plan.forward(line);
        if (multiplier)
          for (std::size_t t = 0; t < n; ++t) line[t] *= multiplier[t];
      }
    }
    return;
  }
  scratch.resize(n);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t s = 0; s < stride; ++s) {
      cplx* base = data + o * block + s;
      for (std::size_t t = 0; t < n; ++t) scratch[t] = base[t * stride];
      if (inverse) {
        if (multiplier)
          for (std::size_t t = 0; t < n; ++t) scratch[t] *= multiplier[t];
        plan.inverse(scratch.data());
      } else {
        plan.forward(scratch.data());
        if (multiplier)
          for (std::size_t t = 0; t < n; ++t) scratch[t] *= multiplier[t];
      }
      for (std::size_t t = 0; t < n; ++t) base[t * stride] = scratch[t];
    }
  }
}

// data[..., t, ...] *= factors[t] along the given axis.
inline void multiply_axis(cplx* data, std::size_t total, std::size_t n,
                          std::size_t stride, const cplx* factors) {
  const std::size_t block = n * stride;
  const std::size_t outer = total / block;
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t t = 0; t < n; ++t) {
      cplx* base = data + o * block + t * stride;
      const cplx f = factors[t];
      for (std::size_t s = 0; s < stride; ++s) base[s] *= f;
    }
}

}  // namespace gplab
