#pragma once

#include <complex>
#include <span>
#include <vector>

namespace twinstat::cells {

enum class ElementKind { Resistor, Capacitor, Series, Parallel };

/// Composable R/C one-port standing in for the electrochemical cell.
/// Leaves carry the element value (ohms or farads); Series/Parallel carry
/// children. Built through the factory functions below, which validate as
/// they go.
struct CellNetwork {
  ElementKind kind = ElementKind::Resistor;
  double value = 0.0;
  std::vector<CellNetwork> children;

  static CellNetwork resistor(double ohms);
  static CellNetwork capacitor(double farads);
  static CellNetwork series(std::vector<CellNetwork> parts);
  static CellNetwork parallel(std::vector<CellNetwork> parts);
};

/// Throws InvalidInput unless every leaf value is finite and > 0 and every
/// composite node has at least one child.
void validate(const CellNetwork& net);

/// True if a terminal-to-terminal conduction path exists that passes through
/// resistors only (a DC path). Networks without one cannot be swept in the
/// time domain.
bool has_resistive_path(const CellNetwork& net);

/// Number of capacitor leaves, in depth-first order. This is also the order
/// in which initial capacitor voltages are consumed by time_domain_current.
int capacitor_count(const CellNetwork& net);

struct ComplexImpedance {
  std::complex<double> value;

  double magnitude() const { return std::abs(value); }
  double phase_deg() const;  // [-180, 180)
  double real() const { return value.real(); }
  double imag() const { return value.imag(); }
};

/// Complex impedance of the network at f > 0, by recursive complex
/// arithmetic over the tree.
ComplexImpedance impedance_at(const CellNetwork& net, double f_hz);

/// |Z| of R parallel C: 1 / sqrt(1/R^2 + (2*pi*f*C)^2).
double parallel_rc_magnitude(double r_ohm, double c_farad, double f_hz);

/// Phase of R parallel C in degrees: atan(-2*pi*f*R*C), in (-90, 0].
double parallel_rc_phase(double r_ohm, double c_farad, double f_hz);

/// Current through the network when the sampled voltage waveform is applied
/// across its terminals. The waveform is treated as piecewise-linear between
/// samples.
///
/// Discretization: a capacitance sitting directly across the terminals is
/// integrated as c * dv/dt with central differences; a network with a single
/// remaining capacitor uses the exact first-order-hold solution of its state
/// equation; multi-capacitor networks fall back to trapezoidal companion
/// models with step 1/sample_rate.
///
/// initial_capacitor_voltages, when non-empty, must supply one entry per
/// capacitor leaf in depth-first order; missing entries default to 0 V.
std::vector<double> time_domain_current(
    const CellNetwork& net, std::span<const double> voltage_v,
    double sample_rate_hz,
    std::span<const double> initial_capacitor_voltages = {});

}  // namespace twinstat::cells
