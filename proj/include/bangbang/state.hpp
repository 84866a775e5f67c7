// state.hpp: 2x2 reduced density matrix and its eight real control components

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <string_view>

namespace bangbang {

using Complex = std::complex<double>;

// Real components of the density matrix in the fixed order in which the
// controller restores them. The numeric values are part of the CSV and
// Python interfaces; do not reorder.
enum class Component : std::size_t {
  Rho11R = 0,
  Rho11I = 1,
  Rho12R = 2,
  Rho12I = 3,
  Rho21R = 4,
  Rho21I = 5,
  Rho22R = 6,
  Rho22I = 7,
};

inline constexpr std::size_t kNumComponents = 8;

inline constexpr std::array<Component, kNumComponents> kComponentOrder = {
    Component::Rho11R, Component::Rho11I, Component::Rho12R, Component::Rho12I,
    Component::Rho21R, Component::Rho21I, Component::Rho22R, Component::Rho22I,
};

constexpr std::size_t index_of(Component c) noexcept { return static_cast<std::size_t>(c); }

// Throws ValidationError if idx >= 8.
Component component_from_index(std::size_t idx);

// "rho11R", "rho12I", ...
std::string_view component_label(Component c) noexcept;

// Elements are stored row-major: rho11, rho12, rho21, rho22.
class DensityMatrix {
 public:
  constexpr DensityMatrix() = default;
  constexpr DensityMatrix(Complex rho11, Complex rho12, Complex rho21, Complex rho22)
      : elements_{rho11, rho12, rho21, rho22} {}

  // Inverse of components(): element k takes (real, imag) from slots 2k, 2k+1.
  static DensityMatrix from_components(const std::array<double, kNumComponents>& parts);

  constexpr Complex rho11() const noexcept { return elements_[0]; }
  constexpr Complex rho12() const noexcept { return elements_[1]; }
  constexpr Complex rho21() const noexcept { return elements_[2]; }
  constexpr Complex rho22() const noexcept { return elements_[3]; }

  constexpr const std::array<Complex, 4>& elements() const noexcept { return elements_; }

  double component(Component c) const noexcept;
  std::array<double, kNumComponents> components() const noexcept;

  Complex trace() const noexcept { return elements_[0] + elements_[3]; }

  friend bool operator==(const DensityMatrix&, const DensityMatrix&) = default;

 private:
  std::array<Complex, 4> elements_{};
};

// Pure state c1|1> + c2|2>. Amplitudes must already be normalized to 1e-12;
// otherwise ValidationError reports the deviation.
DensityMatrix from_pure_state(Complex c1, Complex c2);

inline double component(const DensityMatrix& rho, Component c) noexcept { return rho.component(c); }

}  // namespace bangbang
