// kernels.hpp: Spectral function and the adiabatic / thermal decoherence functions
//
// All frequencies and times are in dimensionless Rabi units. The decoherence
// functions are improper integrals over bath frequencies, truncated at
// upper_cut_multiplier * omega_c and evaluated panel by panel with
// Gauss-Kronrod quadrature.

#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace bangbang {

enum class Regime { Adiabatic, Thermal };

std::string_view regime_name(Regime r) noexcept;
// Accepts "adiabatic" / "thermal" (case-insensitive). Throws ValidationError.
Regime parse_regime(std::string_view text);

struct ModelParams {
  Regime regime = Regime::Adiabatic;
  double gamma = 0.0;    // decoherence strength
  int n = 3;             // bath dimensionality
  double omega_c = 10.0; // cutoff frequency
  double beta0 = 1.0;    // dimensionless inverse temperature
  double omega12 = 1.0;  // transition frequency, thermal regime only

  // Throws ValidationError naming the offending field.
  void validate() const;
};

struct QuadratureConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double upper_cut_multiplier = 40.0;
  // Half-width of the Taylor window around omega12 in the thermal integrand;
  // unset means 1e-3 * omega12.
  std::optional<double> singular_halfwidth;

  void validate() const;
  double resolved_halfwidth(double omega12) const noexcept;
};

// G(w) = w^(n-2) exp(-w / omega_c). DomainError for w < 0 or (w == 0, n < 2).
double spectral_function(double omega, int n, double omega_c);

// coth(beta0 * w / 2), switching to its Laurent form for tiny arguments.
double thermal_factor(double omega, double beta0);

// Integrand of g_ad without the gamma prefactor.
double adiabatic_integrand(double omega, double tau, const ModelParams& params);

// Integrand of g_th without the gamma prefactor; uses the removable-singularity
// series within `halfwidth` of omega12.
double thermal_integrand(double omega, double tau, const ModelParams& params, double halfwidth);

// (1 - cos(x tau)) / x^2, with the Taylor series tau^2/2 - x^2 tau^4/24 + x^4 tau^6/720
// for |x| <= halfwidth.
double detuning_factor(double x, double tau, double halfwidth) noexcept;

double g_adiabatic(double tau, const ModelParams& params, const QuadratureConfig& quad = {});
double g_thermal(double tau, const ModelParams& params, const QuadratureConfig& quad = {});

// Dispatches on params.regime.
double decoherence(double tau, const ModelParams& params, const QuadratureConfig& quad = {});

// Kernel values sampled at an increasing list of times. Immutable once built.
class KernelTable {
 public:
  KernelTable() = default;
  // taus must be strictly increasing with taus[0] >= 0.
  KernelTable(std::vector<double> taus, const ModelParams& params, const QuadratureConfig& quad);

  // Table for tau_k = k * step_T, k = 0..num_steps (multiplied, not accumulated).
  static KernelTable uniform(double step_T, int num_steps, const ModelParams& params,
                             const QuadratureConfig& quad);

  std::span<const double> taus() const noexcept { return taus_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  // Throws DomainError when k is beyond the tabulated horizon.
  double at(std::size_t k) const;

 private:
  std::vector<double> taus_;
  std::vector<double> values_;
};

// Pointwise evaluation over taus; errors name the offending tau.
std::vector<double> tabulate_kernel(std::span<const double> taus, const ModelParams& params,
                                    const QuadratureConfig& quad = {});

}  // namespace bangbang
