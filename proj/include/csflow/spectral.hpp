#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "csflow/geometry.hpp"
#include "csflow/polyline.hpp"

namespace csflow {

using Complex = std::complex<double>;

namespace fft {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

/// Unnormalized transform sum_j x_j e^{sign 2 pi i k j / N}, in place.
/// Radix-2 when N is a power of two, direct summation otherwise.
inline void transform(std::vector<Complex>& data, int sign) {
  const std::size_t n = data.size();
  if (n <= 1) return;
  const double two_pi = 2.0 * std::numbers::pi;

  if (!is_power_of_two(n)) {
    std::vector<Complex> out(n);
    for (std::size_t k = 0; k < n; ++k) {
      Complex acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        // reduce k*j mod n first so the phase argument stays small
        const double phase = sign * two_pi * static_cast<double>((k * j) % n) / static_cast<double>(n);
        acc += data[j] * Complex(std::cos(phase), std::sin(phase));
      }
      out[k] = acc;
    }
    data = std::move(out);
    return;
  }

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  std::vector<Complex> twiddle(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double phase = sign * two_pi * static_cast<double>(k) / static_cast<double>(n);
    twiddle[k] = Complex(std::cos(phase), std::sin(phase));
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t half = len / 2;
    const std::size_t stride = n / len;
    for (std::size_t base = 0; base < n; base += len) {
      for (std::size_t k = 0; k < half; ++k) {
        const Complex t = twiddle[k * stride] * data[base + k + half];
        const Complex u = data[base + k];
        data[base + k] = u + t;
        data[base + k + half] = u - t;
      }
    }
  }
}

}  // namespace fft

/// Signed frequency of DFT slot `index`: 0, 1, ..., N/2-1, -N/2, ..., -1.
inline long frequency(std::size_t index, std::size_t count) {
  const auto i = static_cast<long>(index);
  const auto n = static_cast<long>(count);
  return i < n / 2 ? i : i - n;
}

/// Per-component DFT coefficients c_k = (1/N) sum_j x_j e^{-2 pi i k j/N},
/// stored in standard DFT slot order.
template <int Dim>
struct Spectrum {
  std::array<std::vector<Complex>, Dim> components;

  std::size_t size() const { return components[0].size(); }

  Complex& coeff(std::size_t slot, int c) { return components[c][slot]; }
  const Complex& coeff(std::size_t slot, int c) const { return components[c][slot]; }
};

namespace detail {

inline void require_even_count(std::size_t n) {
  if (n < 4 || n % 2 != 0) {
    throw GeometryError("spectral transforms need an even sample count N >= 4, got " + std::to_string(n));
  }
}

}  // namespace detail

template <int Dim>
Spectrum<Dim> dft(std::span<const Point<Dim>> samples) {
  const std::size_t n = samples.size();
  detail::require_even_count(n);
  Spectrum<Dim> spec;
  const double scale = 1.0 / static_cast<double>(n);
  for (int c = 0; c < Dim; ++c) {
    auto& comp = spec.components[c];
    comp.resize(n);
    for (std::size_t j = 0; j < n; ++j) comp[j] = samples[j][c];
    fft::transform(comp, -1);
    for (auto& v : comp) v *= scale;
  }
  return spec;
}

template <int Dim>
Spectrum<Dim> dft(const ClosedPolyline<Dim>& poly) {
  return dft<Dim>(poly.points());
}

/// Inverse of dft(); imaginary residue from round-off is dropped.
template <int Dim>
std::vector<Point<Dim>> idft(const Spectrum<Dim>& spec) {
  const std::size_t n = spec.size();
  std::vector<Point<Dim>> out(n);
  for (int c = 0; c < Dim; ++c) {
    auto comp = spec.components[c];
    fft::transform(comp, +1);
    for (std::size_t j = 0; j < n; ++j) out[j][c] = comp[j].real();
  }
  return out;
}

/// Decay factors m_k = exp(-4 pi^2 k^2 h / L^2) of one heat step of size h
/// at diffusivity 1/L^2, in DFT slot order.
struct HeatMultiplier {
  std::vector<double> factors;
  double h = 0.0;
  double length = 0.0;
};

inline HeatMultiplier heat_multiplier(double h, double length, std::size_t count) {
  if (!(h >= 0.0)) throw GeometryError("heat_multiplier: h must be >= 0");
  if (!(length > 0.0)) throw GeometryError("heat_multiplier: L must be > 0");
  HeatMultiplier m{std::vector<double>(count), h, length};
  const double rate = 4.0 * std::numbers::pi * std::numbers::pi * h / (length * length);
  for (std::size_t i = 0; i < count; ++i) {
    const auto k = static_cast<double>(frequency(i, count));
    m.factors[i] = std::exp(-rate * k * k);
  }
  return m;
}

template <int Dim>
void apply(const HeatMultiplier& m, Spectrum<Dim>& spec) {
  for (int c = 0; c < Dim; ++c) {
    for (std::size_t i = 0; i < spec.size(); ++i) spec.components[c][i] *= m.factors[i];
  }
}

/// One spectral heat step of size h at diffusivity 1/L^2 on uniformly spaced
/// samples. The sample mean (mode 0) is left untouched.
template <int Dim>
std::vector<Point<Dim>> heat_step(std::span<const Point<Dim>> samples, double h, double length) {
  auto spec = dft<Dim>(samples);
  apply(heat_multiplier(h, length, samples.size()), spec);
  return idft(spec);
}

template <int Dim>
ClosedPolyline<Dim> heat_step(const ClosedPolyline<Dim>& poly, double h, double length) {
  return ClosedPolyline<Dim>(heat_step<Dim>(poly.points(), h, length));
}

/// Discrete curvature vector (1/L^2) F^{-1} D_N^2 F X of a uniformly
/// resampled polygon, one vector per sample.
template <int Dim>
std::vector<Point<Dim>> spectral_curvature(const ClosedPolyline<Dim>& poly) {
  const double len = polygon_length(poly);
  auto spec = dft(poly);
  const std::size_t n = spec.size();
  const double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
  for (int c = 0; c < Dim; ++c) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto k = static_cast<double>(frequency(i, n));
      spec.components[c][i] *= -four_pi2 * k * k / (len * len);
    }
  }
  return idft(spec);
}

/// Energy of the non-constant modes, sum_{k != 0} |c_k|^2.
template <int Dim>
double oscillation_energy(const Spectrum<Dim>& spec) {
  double e = 0.0;
  for (int c = 0; c < Dim; ++c) {
    for (std::size_t i = 1; i < spec.size(); ++i) e += std::norm(spec.components[c][i]);
  }
  return e;
}

}  // namespace csflow
