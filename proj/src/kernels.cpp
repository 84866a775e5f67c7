// kernels.cpp

#include "bangbang/kernels.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bangbang/errors.hpp"

namespace bangbang {

namespace {

constexpr std::size_t kRefinementBudget = 20000;
constexpr double kLaurentThreshold = 1e-4;

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

void require(bool ok, const char* field, const char* constraint, double value) {
  if (ok) return;
  std::ostringstream msg;
  msg.precision(17);
  msg << field << " must be " << constraint << " (got " << value << ")";
  throw ValidationError(msg.str());
}

struct Integral {
  double value = 0.0;
  double error = 0.0;
};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

// Integrates f over [lo, hi] split at `breaks`, every initial panel no wider
// than max_width. Panels are refined worst-first until the summed error bound
// meets max(abs_tol, rel_tol * |total|) or the panel budget is spent.
template <class F>
Integral integrate_panels(const F& f, double lo, double hi, std::vector<double> breaks,
                          double max_width, const QuadratureConfig& quad) {
  breaks.push_back(lo);
  breaks.push_back(hi);
  std::erase_if(breaks, [&](double b) { return b < lo || b > hi; });
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

  using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
  auto make_panel = [&](double a, double b) {
    double err = 0.0;
    const double v = Rule::integrate(f, a, b, 0, 0.0, &err);
    return Panel{a, b, v, err};
  };

  std::vector<Panel> heap;
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double a = breaks[s];
    const double b = breaks[s + 1];
    const std::size_t panels =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((b - a) / max_width)));
    const double width = (b - a) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
      const double pa = a + static_cast<double>(p) * width;
      const double pb = (p + 1 == panels) ? b : a + static_cast<double>(p + 1) * width;
      heap.push_back(make_panel(pa, pb));
    }
  }

  Integral total;
  for (const Panel& p : heap) {
    total.value += p.value;
    total.error += p.error;
  }
  std::make_heap(heap.begin(), heap.end());
  const std::size_t budget = heap.size() + kRefinementBudget;
  while (heap.size() < budget &&
         total.error > std::max(quad.abs_tol, quad.rel_tol * std::abs(total.value))) {
    std::pop_heap(heap.begin(), heap.end());
    const Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;
    const Panel left = make_panel(worst.a, mid);
    const Panel right = make_panel(mid, worst.b);
    total.value += left.value + right.value - worst.value;
    total.error += left.error + right.error - worst.error;
    for (const Panel& p : {left, right}) {
      heap.push_back(p);
      std::push_heap(heap.begin(), heap.end());
    }
  }
  // Re-sum to drop the drift of the running updates.
  total = {};
  for (const Panel& p : heap) {
    total.value += p.value;
    total.error += p.error;
  }
  return total;
}

double check_converged(const Integral& r, const char* name, double tau,
                       const QuadratureConfig& quad) {
  const double allowed = std::max(quad.abs_tol, quad.rel_tol * std::abs(r.value));
  if (!std::isfinite(r.value) || r.error > allowed) {
    std::ostringstream msg;
    msg.precision(17);
    msg << name << "(tau=" << tau << ") did not converge: estimate " << r.value
        << ", error bound " << r.error << " > " << allowed;
    throw QuadratureError(msg.str(), r.value, r.error);
  }
  return r.value;
}

double max_panel_width(double tau, double omega_c) {
  return std::min(omega_c, std::numbers::pi / tau) / 4.0;
}

void check_tau(double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) {
    std::ostringstream msg;
    msg << "tau must be finite and >= 0 (got " << tau << ")";
    throw DomainError(msg.str());
  }
}

}  // namespace

std::string_view regime_name(Regime r) noexcept {
  return r == Regime::Adiabatic ? "adiabatic" : "thermal";
}

Regime parse_regime(std::string_view text) {
  const std::string t = lower(text);
  if (t == "adiabatic") return Regime::Adiabatic;
  if (t == "thermal") return Regime::Thermal;
  throw ValidationError("regime must be 'adiabatic' or 'thermal' (got '" + std::string(text) + "')");
}

void ModelParams::validate() const {
  require(std::isfinite(gamma) && gamma >= 0.0, "gamma", "finite and >= 0", gamma);
  require(n >= 1, "n", ">= 1", n);
  require(std::isfinite(omega_c) && omega_c > 0.0, "omega_c", "finite and > 0", omega_c);
  require(std::isfinite(beta0) && beta0 > 0.0, "beta0", "finite and > 0", beta0);
  require(std::isfinite(omega12) && omega12 > 0.0, "omega12", "finite and > 0", omega12);
}

void QuadratureConfig::validate() const {
  require(rel_tol > 0.0, "rel_tol", "> 0", rel_tol);
  require(abs_tol > 0.0, "abs_tol", "> 0", abs_tol);
  require(upper_cut_multiplier > 0.0, "upper_cut_multiplier", "> 0", upper_cut_multiplier);
  if (singular_halfwidth) {
    require(*singular_halfwidth > 0.0, "singular_halfwidth", "> 0", *singular_halfwidth);
  }
}

double QuadratureConfig::resolved_halfwidth(double omega12) const noexcept {
  return singular_halfwidth.value_or(1e-3 * omega12);
}

double spectral_function(double omega, int n, double omega_c) {
  if (!(omega >= 0.0)) throw DomainError("spectral_function: omega must be >= 0");
  if (omega == 0.0) {
    if (n < 2) throw DomainError("spectral_function: divergent at omega = 0 for n < 2");
    return n == 2 ? 1.0 : 0.0;
  }
  double power = 1.0;
  for (int k = 0; k < n - 2; ++k) power *= omega;
  if (n < 2) power = std::pow(omega, n - 2);
  return power * std::exp(-omega / omega_c);
}

double thermal_factor(double omega, double beta0) {
  const double half = 0.5 * beta0 * omega;
  if (half < kLaurentThreshold) return 2.0 / (beta0 * omega) + beta0 * omega / 6.0;
  return 1.0 / std::tanh(half);
}

double detuning_factor(double x, double tau, double halfwidth) noexcept {
  if (std::abs(x) <= halfwidth) {
    const double x2 = x * x;
    const double t2 = tau * tau;
    return t2 / 2.0 - x2 * t2 * t2 / 24.0 + x2 * x2 * t2 * t2 * t2 / 720.0;
  }
  const double s = std::sin(0.5 * x * tau);
  return 2.0 * s * s / (x * x);
}

double adiabatic_integrand(double omega, double tau, const ModelParams& params) {
  const double s = std::sin(0.5 * omega * tau);
  return spectral_function(omega, params.n, params.omega_c) * (2.0 * s * s) *
         thermal_factor(omega, params.beta0);
}

double thermal_integrand(double omega, double tau, const ModelParams& params, double halfwidth) {
  return detuning_factor(params.omega12 - omega, tau, halfwidth) * omega * omega * omega *
         thermal_factor(omega, params.beta0) * std::exp(-omega / params.omega_c);
}

double g_adiabatic(double tau, const ModelParams& params, const QuadratureConfig& quad) {
  check_tau(tau);
  if (tau == 0.0 || params.gamma == 0.0) return 0.0;
  const double upper = quad.upper_cut_multiplier * params.omega_c;
  auto f = [&](double w) { return adiabatic_integrand(w, tau, params); };
  const Integral r =
      integrate_panels(f, 0.0, upper, {}, max_panel_width(tau, params.omega_c), quad);
  return params.gamma * check_converged(r, "g_adiabatic", tau, quad);
}

double g_thermal(double tau, const ModelParams& params, const QuadratureConfig& quad) {
  check_tau(tau);
  if (tau == 0.0 || params.gamma == 0.0) return 0.0;
  const double upper = quad.upper_cut_multiplier * params.omega_c;
  const double h = quad.resolved_halfwidth(params.omega12);
  const double w12 = params.omega12;
  auto f = [&](double w) { return thermal_integrand(w, tau, params, h); };
  const Integral r = integrate_panels(f, 0.0, upper, {w12 - h, w12, w12 + h},
                                      max_panel_width(tau, params.omega_c), quad);
  return params.gamma * check_converged(r, "g_thermal", tau, quad);
}

double decoherence(double tau, const ModelParams& params, const QuadratureConfig& quad) {
  return params.regime == Regime::Adiabatic ? g_adiabatic(tau, params, quad)
                                            : g_thermal(tau, params, quad);
}

std::vector<double> tabulate_kernel(std::span<const double> taus, const ModelParams& params,
                                    const QuadratureConfig& quad) {
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const bool ok = (i == 0) ? taus[0] >= 0.0 : taus[i] > taus[i - 1];
    if (!ok) {
      std::ostringstream msg;
      msg << "tabulate_kernel: taus must be strictly increasing from >= 0 (index " << i
          << ", tau=" << taus[i] << ")";
      throw ValidationError(msg.str());
    }
  }

  std::vector<double> values(taus.size(), 0.0);
  std::vector<std::exception_ptr> failures(taus.size());
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(taus.size(), 1));

  auto work = [&](std::size_t first) {
    for (std::size_t i = first; i < taus.size(); i += workers) {
      try {
        values[i] = decoherence(taus[i], params, quad);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
  }

  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const QuadratureError& e) {
      throw;  // already names tau
    } catch (const Error& e) {
      std::ostringstream msg;
      msg << "kernel evaluation failed at tau=" << taus[i] << ": " << e.what();
      throw DomainError(msg.str());
    }
  }
  return values;
}

KernelTable::KernelTable(std::vector<double> taus, const ModelParams& params,
                         const QuadratureConfig& quad)
    : taus_(std::move(taus)) {
  params.validate();
  quad.validate();
  values_ = tabulate_kernel(taus_, params, quad);
}

KernelTable KernelTable::uniform(double step_T, int num_steps, const ModelParams& params,
                                 const QuadratureConfig& quad) {
  if (!(step_T > 0.0) || num_steps < 0) {
    throw ValidationError("KernelTable::uniform requires step_T > 0 and num_steps >= 0");
  }
  std::vector<double> taus(static_cast<std::size_t>(num_steps) + 1);
  for (std::size_t k = 0; k < taus.size(); ++k) taus[k] = static_cast<double>(k) * step_T;
  return KernelTable(std::move(taus), params, quad);
}

double KernelTable::at(std::size_t k) const {
  if (k >= values_.size()) {
    std::ostringstream msg;
    msg << "kernel table has " << values_.size() << " entries; age " << k << " requested";
    throw DomainError(msg.str());
  }
  return values_[k];
}

}  // namespace bangbang
