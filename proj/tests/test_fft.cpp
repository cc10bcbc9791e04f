#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "gplab/fft.hpp"
#include "gplab/grid.hpp"

using namespace gplab;

namespace {

// O(n^2) reference transform
std::vector<cplx> naive_dft(const std::vector<cplx>& a) {
  const std::size_t n = a.size();
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc = 0.0;
    for (std::size_t x = 0; x < n; ++x)
      acc += a[x] * std::polar(1.0, -2.0 * kPi * double(k * x) / double(n));
    out[k] = acc;
  }
  return out;
}

std::vector<cplx> random_vector(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<cplx> v(n);
  for (auto& z : v) z = cplx(gauss(rng), gauss(rng));
  return v;
}

}  // namespace

TEST_CASE("FFT matches the naive DFT") {
  for (std::size_t n : {2, 4, 16, 64}) {
    auto a = random_vector(n, 17 + unsigned(n));
    const auto ref = naive_dft(a);
    Fft::plan(n).forward(a.data());
    for (std::size_t i = 0; i < n; ++i)
      CHECK(std::abs(a[i] - ref[i]) < 1e-11);
  }
}

TEST_CASE("inverse undoes forward") {
  auto a = random_vector(256, 3);
  const auto orig = a;
  Fft::plan(256).forward(a.data());
  Fft::plan(256).inverse(a.data());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(std::abs(a[i] - orig[i]) < 1e-13);
}

TEST_CASE("single Fourier mode transforms to a delta") {
  const std::size_t n = 32;
  std::vector<cplx> a(n);
  const int m = 5;
  for (std::size_t x = 0; x < n; ++x)
    a[x] = std::polar(1.0, 2.0 * kPi * m * double(x) / double(n));
  Fft::plan(n).forward(a.data());
  for (std::size_t k = 0; k < n; ++k) {
    const double expected = (k == m) ? double(n) : 0.0;
    CHECK(std::abs(a[k] - expected) < 1e-12 * n);
  }
}

TEST_CASE("axis transforms act independently per axis") {
  // 2D array 8x8, transform along axis 1 (stride 8), compare per line
  const std::size_t n = 8;
  auto flat = random_vector(n * n, 9);
  auto copy = flat;
  fft_axis(flat.data(), flat.size(), n, n, false);
  for (std::size_t line = 0; line < n; ++line) {
    std::vector<cplx> expect(n);
    for (std::size_t t = 0; t < n; ++t) expect[t] = copy[line + t * n];
    expect = naive_dft(expect);
    for (std::size_t t = 0; t < n; ++t)
      CHECK(std::abs(flat[line + t * n] - expect[t]) < 1e-12);
  }
}

TEST_CASE("grid wavenumbers cover [-n/2, n/2)") {
  GridSpec g(1, 8.0, 8);
  CHECK(g.wavenumber(0) == 0.0);
  CHECK(g.wavenumber(1) == Catch::Approx(2.0 * kPi / 8.0));
  CHECK(g.wavenumber(7) == Catch::Approx(-2.0 * kPi / 8.0));
  CHECK(g.wavenumber(4) == Catch::Approx(-kPi));
  CHECK(g.spacing() == 1.0);
  CHECK(g.total() == 8);
  CHECK_THROWS_AS(GridSpec(1, 8.0, 17), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(4, 8.0, 16), std::invalid_argument);
}

TEST_CASE("minimum image distance folds across the box") {
  GridSpec g(1, 16.0, 16);
  CHECK(g.min_image_distance(0, 1) == 1.0);
  CHECK(g.min_image_distance(0, 15) == 1.0);
  CHECK(g.min_image_distance(2, 10) == 8.0);
}
