// state.cpp

#include "bangbang/state.hpp"

#include <cmath>
#include <sstream>

#include "bangbang/errors.hpp"

namespace bangbang {

namespace {

constexpr std::array<std::string_view, kNumComponents> kLabels = {
    "rho11R", "rho11I", "rho12R", "rho12I", "rho21R", "rho21I", "rho22R", "rho22I",
};

constexpr double kNormTolerance = 1e-12;

}  // namespace

Component component_from_index(std::size_t idx) {
  if (idx >= kNumComponents) {
    std::ostringstream msg;
    msg << "component index " << idx << " out of range 0..7";
    throw ValidationError(msg.str());
  }
  return static_cast<Component>(idx);
}

std::string_view component_label(Component c) noexcept { return kLabels[index_of(c)]; }

DensityMatrix DensityMatrix::from_components(const std::array<double, kNumComponents>& parts) {
  return DensityMatrix({parts[0], parts[1]}, {parts[2], parts[3]}, {parts[4], parts[5]},
                       {parts[6], parts[7]});
}

double DensityMatrix::component(Component c) const noexcept {
  const std::size_t k = index_of(c);
  const Complex& z = elements_[k / 2];
  return (k % 2 == 0) ? z.real() : z.imag();
}

std::array<double, kNumComponents> DensityMatrix::components() const noexcept {
  std::array<double, kNumComponents> out{};
  for (std::size_t k = 0; k < kNumComponents; ++k) out[k] = component(kComponentOrder[k]);
  return out;
}

DensityMatrix from_pure_state(Complex c1, Complex c2) {
  const double norm = std::norm(c1) + std::norm(c2);
  const double deviation = norm - 1.0;
  if (!std::isfinite(norm) || std::abs(deviation) > kNormTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "initial amplitudes not normalized: |c1|^2 + |c2|^2 = " << norm << " (deviation "
        << deviation << ", tolerance " << kNormTolerance << ")";
    throw ValidationError(msg.str());
  }
  const Complex rho12 = c1 * std::conj(c2);
  // Populations are renormalized so the trace is exactly 1.
  const double p1 = std::norm(c1) / norm;
  const double p2 = 1.0 - p1;
  return DensityMatrix(Complex(p1, 0.0), rho12, std::conj(rho12), Complex(p2, 0.0));
}

}  // namespace bangbang
