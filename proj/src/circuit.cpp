#include "cascade/circuit.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "cascade/core.hpp"
#include "cascade/oracles.hpp"

namespace cascade::circuit {

namespace {

void require_positive(const CircuitSpec& s) {
  auto ok = [](double x) { return std::isfinite(x) && x > 0.0; };
  if (!ok(s.resistance) || !ok(s.inductance) || !ok(s.capacitance))
    throw DomainError("circuit R, L, C must be finite and > 0");
}

}  // namespace

CircuitRates circuit_to_rates(const CircuitSpec& spec, double hbar) {
  require_positive(spec);
  CircuitRates r;
  r.omega0 = 1.0 / std::sqrt(spec.inductance * spec.capacitance);
  if (spec.topology == Topology::SeriesLC) {
    r.gamma = spec.resistance / (2.0 * spec.inductance);
    r.dx0 = std::sqrt(hbar / (2.0 * r.omega0 * spec.inductance));
  } else {
    r.gamma = 1.0 / (2.0 * spec.resistance * spec.capacitance);
    r.dx0 = std::sqrt(hbar * r.omega0 / (2.0 * spec.capacitance));
  }
  r.q = r.omega0 / r.gamma;
  return r;
}

ValidityFlags rates_to_validity(double gamma1_max, const CircuitSpec& osc1, const CircuitSpec& osc2,
                                double target_fidelity, double margin) {
  const auto r1 = circuit_to_rates(osc1);
  const auto r2 = circuit_to_rates(osc2);
  if (std::abs(r1.omega0 - r2.omega0) > kIdenticalTolerance * r2.omega0) {
    std::ostringstream os;
    os << "non-identical oscillators: omega0 = " << r1.omega0 << " vs " << r2.omega0;
    throw DomainError(os.str());
  }
  SystemParams p;
  p.gamma = r2.gamma;
  p.omega0 = r2.omega0;
  return oracles::validity_windows(p, gamma1_max, target_fidelity, margin);
}

CircuitSpec parse_circuit(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 4) throw DomainError("circuit spec must look like series:R:L:C or parallel:R:L:C");
  CircuitSpec s;
  if (parts[0] == "series")
    s.topology = Topology::SeriesLC;
  else if (parts[0] == "parallel")
    s.topology = Topology::ParallelLC;
  else
    throw DomainError("unknown circuit topology '" + parts[0] + "'");
  try {
    s.resistance = std::stod(parts[1]);
    s.inductance = std::stod(parts[2]);
    s.capacitance = std::stod(parts[3]);
  } catch (const std::exception&) {
    throw DomainError("circuit spec values must be numbers: " + text);
  }
  require_positive(s);
  return s;
}

std::string format_circuit(const CircuitSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  os << (spec.topology == Topology::SeriesLC ? "series" : "parallel") << ':' << spec.resistance << ':'
     << spec.inductance << ':' << spec.capacitance;
  return os.str();
}

}  // namespace cascade::circuit
