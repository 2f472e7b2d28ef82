#pragma once

#include <string>

#include "cascade/report.hpp"

// Lumped LC oscillator coupled to a line of real impedance R.
namespace cascade::circuit {

enum class Topology { SeriesLC, ParallelLC };

struct CircuitSpec {
  Topology topology = Topology::SeriesLC;
  double resistance = 50.0;    // ohm
  double inductance = 1e-9;    // henry
  double capacitance = 1e-12;  // farad

  friend bool operator==(const CircuitSpec&, const CircuitSpec&) = default;
};

inline constexpr double kHbarSI = 1.054571817e-34;  // J s

struct CircuitRates {
  double gamma = 0.0;   // 1/s
  double omega0 = 0.0;  // rad/s
  // Ground-state fluctuation: charge (C) for series, voltage (V) for parallel.
  double dx0 = 0.0;
  double q = 0.0;  // omega0 / gamma
};

/// series:   gamma = R/(2L),    dx0 = sqrt(hbar / (2 omega0 L))
/// parallel: gamma = 1/(2RC),   dx0 = sqrt(hbar omega0 / (2 C))
/// omega0 = 1/sqrt(LC) in both cases.
CircuitRates circuit_to_rates(const CircuitSpec& spec, double hbar = kHbarSI);

/// Relative omega0 mismatch above which two oscillators count as different.
inline constexpr double kIdenticalTolerance = 1e-6;

/// Quality-factor window check for oscillator 1 (switched, capped at
/// gamma1_max) and oscillator 2 (fixed). Throws DomainError when the two
/// resonance frequencies differ by more than 1 ppm.
ValidityFlags rates_to_validity(double gamma1_max, const CircuitSpec& osc1, const CircuitSpec& osc2,
                                double target_fidelity, double margin = kDefaultWindowMargin);

/// "series:R:L:C" / "parallel:R:L:C".
CircuitSpec parse_circuit(const std::string& text);
std::string format_circuit(const CircuitSpec& spec);

}  // namespace cascade::circuit
