#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "shiftgrad/pascal.hpp"
#include "shiftgrad/simulator.hpp"

namespace shiftgrad {

using ParameterVector = std::vector<double>;

/// exp(-i theta_param word / 2)
struct Rotation {
    PauliWord word;
    std::size_t param;
    friend bool operator==(const Rotation&, const Rotation&) = default;
};

using Gate = std::variant<Rotation, FixedGate>;

/**
 * Parameterized circuit V(theta).
 *
 * Every parameter index in [0, p) drives exactly one rotation. Shared
 * parameters are rejected: the two-point shift rule needs one generator per
 * angle.
 */
class ParamCircuit {
public:
    /// Throws std::invalid_argument on any invariant violation.
    ParamCircuit(int qubits, std::size_t params, std::vector<Gate> gates);

    int qubits() const noexcept { return n_; }
    std::size_t parameter_count() const noexcept { return p_; }
    const std::vector<Gate>& gates() const noexcept { return gates_; }

    /// Evolves `state` in place under V(theta).
    void apply(StateVector& state, std::span<const double> theta) const;

    friend bool operator==(const ParamCircuit&, const ParamCircuit&) = default;

private:
    int n_;
    std::size_t p_;
    std::vector<Gate> gates_;
};

struct WeightedState {
    double weight;
    StateSpec state;
};

/// A pure state, or a mixed input written as a probability-weighted ensemble.
using InputState = std::variant<StateSpec, std::vector<WeightedState>>;

struct CostTerm {
    InputState input;
    Observable observable;
};

/// C(theta) = sum_x Tr[O_x V(theta) rho_x V(theta)^dagger].
class CostSpec {
public:
    CostSpec(ParamCircuit circuit, std::vector<CostTerm> terms);

    const ParamCircuit& circuit() const noexcept { return circuit_; }
    const std::vector<CostTerm>& terms() const noexcept { return terms_; }
    std::size_t parameter_count() const noexcept { return circuit_.parameter_count(); }

private:
    ParamCircuit circuit_;
    std::vector<CostTerm> terms_;
};

double evaluate_cost(const CostSpec& spec, std::span<const double> theta);

/// Copy of theta with theta[distinct[k]] += omegas[k] * pi.
ParameterVector shifted_parameters(std::span<const double> theta, std::span<const std::size_t> distinct,
                                   std::span<const HalfShift> omegas);

enum class AnsatzFlavor { ry, ryz, haar_brick };

AnsatzFlavor parse_flavor(std::string_view name);
std::string_view flavor_name(AnsatzFlavor flavor);

/**
 * Layered hardware-efficient ansatz.
 *
 * Layer l (1-based) is a sublayer of single-qubit rotations followed by an
 * entangling brick on pairs (q, q+1) with q even for odd l and q odd for even
 * l. `ry` and `ryz` use CZ bricks; `haar_brick` uses RY rotations and seeded
 * Haar-random two-qubit blocks.
 */
ParamCircuit build_hea(int qubits, int layers, std::uint64_t seed, AnsatzFlavor flavor);

/// Text circuit format; see README for the grammar.
ParamCircuit parse_circuit(std::string_view text);
std::string serialize_circuit(const ParamCircuit& circuit);

/// Parses a cost file against an already loaded circuit. Errors carry line numbers.
std::vector<CostTerm> parse_cost_terms(std::string_view text, int qubits);
/// Path named by the cost file's `circuit` line, or empty.
std::string cost_circuit_path(std::string_view text);

StateSpec parse_state_spec(std::string_view text, int qubits);
InputState parse_input_state(std::string_view text, int qubits);
Observable parse_observable(std::string_view text, int qubits);

}  // namespace shiftgrad
