#include "shiftgrad/circuit.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <type_traits>

#include "shiftgrad/random.hpp"

namespace shiftgrad {

namespace {

constexpr double kWeightTol = 1e-10;

std::vector<int> gate_qubits(const FixedGate& g) {
    return std::visit(
        [](const auto& x) -> std::vector<int> {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, gate::CZ>) return {x.a, x.b};
            else if constexpr (std::is_same_v<T, gate::CNOT>) return {x.control, x.target};
            else if constexpr (std::is_same_v<T, gate::Unitary2>) return {x.q1, x.q2};
            else return {x.q};
        },
        g);
}

void check_observable(const Observable& obs, int n) {
    if (const auto* p = std::get_if<BasisProjector>(&obs)) {
        if (static_cast<int>(p->bits.size()) != n) throw std::invalid_argument("projector dimension mismatch");
        basis_index(p->bits);
        return;
    }
    const auto& sum = std::get<PauliSum>(obs);
    if (sum.terms.empty()) throw std::invalid_argument("Pauli sum has no terms");
    for (const auto& t : sum.terms) {
        if (t.word.qubits() != n) throw std::invalid_argument("observable dimension mismatch");
    }
}

double term_value(const ParamCircuit& circuit, const StateSpec& input, const Observable& obs,
                  std::span<const double> theta) {
    StateVector psi = prepare(input);
    circuit.apply(psi, theta);
    return expectation(psi, obs);
}

}  // namespace

ParamCircuit::ParamCircuit(int qubits, std::size_t params, std::vector<Gate> gates)
    : n_(qubits), p_(params), gates_(std::move(gates)) {
    if (n_ < 1 || n_ > kMaxQubits) throw std::invalid_argument("qubit count out of range");
    std::vector<bool> used(p_, false);
    for (const auto& g : gates_) {
        if (const auto* r = std::get_if<Rotation>(&g)) {
            if (r->word.qubits() != n_) throw std::invalid_argument("rotation word has wrong qubit count");
            if (r->word.is_identity()) throw std::invalid_argument("rotation generator must not be the identity");
            if (r->param >= p_) {
                throw std::invalid_argument("parameter index " + std::to_string(r->param) + " out of range");
            }
            if (used[r->param]) throw std::invalid_argument("parameter reused: p" + std::to_string(r->param));
            used[r->param] = true;
        } else {
            const auto qubits = gate_qubits(std::get<FixedGate>(g));
            for (int q : qubits) {
                if (q < 0 || q >= n_) throw std::invalid_argument("fixed gate qubit out of range");
            }
            if (qubits.size() == 2 && qubits[0] == qubits[1]) {
                throw std::invalid_argument("two-qubit gate needs distinct qubits");
            }
        }
    }
    for (std::size_t i = 0; i < p_; ++i) {
        if (!used[i]) throw std::invalid_argument("parameter p" + std::to_string(i) + " drives no rotation");
    }
}

void ParamCircuit::apply(StateVector& state, std::span<const double> theta) const {
    if (theta.size() != p_) {
        throw std::invalid_argument("expected " + std::to_string(p_) + " parameters, got " +
                                    std::to_string(theta.size()));
    }
    if (state.qubits() != n_) throw std::invalid_argument("state dimension mismatch");
    for (const auto& g : gates_) {
        if (const auto* r = std::get_if<Rotation>(&g)) {
            apply_rotation(state, r->word, theta[r->param]);
        } else {
            apply_fixed(state, std::get<FixedGate>(g));
        }
    }
}

CostSpec::CostSpec(ParamCircuit circuit, std::vector<CostTerm> terms)
    : circuit_(std::move(circuit)), terms_(std::move(terms)) {
    if (terms_.empty()) throw std::invalid_argument("cost needs at least one term");
    const int n = circuit_.qubits();
    for (const auto& t : terms_) {
        check_observable(t.observable, n);
        if (const auto* s = std::get_if<StateSpec>(&t.input)) {
            if (spec_qubits(*s) != n) throw std::invalid_argument("input state dimension mismatch");
            continue;
        }
        const auto& ensemble = std::get<std::vector<WeightedState>>(t.input);
        if (ensemble.empty()) throw std::invalid_argument("empty ensemble");
        double total = 0.0;
        for (const auto& w : ensemble) {
            if (!(w.weight >= 0.0)) throw std::invalid_argument("ensemble weights must be non-negative");
            if (spec_qubits(w.state) != n) throw std::invalid_argument("input state dimension mismatch");
            total += w.weight;
        }
        if (std::abs(total - 1.0) > kWeightTol) throw std::invalid_argument("ensemble weights must sum to 1");
    }
}

double evaluate_cost(const CostSpec& spec, std::span<const double> theta) {
    const auto& circuit = spec.circuit();
    if (theta.size() != circuit.parameter_count()) {
        throw std::invalid_argument("expected " + std::to_string(circuit.parameter_count()) +
                                    " parameters, got " + std::to_string(theta.size()));
    }
    double total = 0.0;
    for (const auto& t : spec.terms()) {
        if (const auto* s = std::get_if<StateSpec>(&t.input)) {
            total += term_value(circuit, *s, t.observable, theta);
        } else {
            // cost is linear in rho, so a mixed input is the weighted ensemble average
            for (const auto& w : std::get<std::vector<WeightedState>>(t.input)) {
                total += w.weight * term_value(circuit, w.state, t.observable, theta);
            }
        }
    }
    return total;
}

ParameterVector shifted_parameters(std::span<const double> theta, std::span<const std::size_t> distinct,
                                   std::span<const HalfShift> omegas) {
    if (distinct.size() != omegas.size()) throw std::invalid_argument("index/shift length mismatch");
    ParameterVector out(theta.begin(), theta.end());
    std::vector<bool> seen(theta.size(), false);
    for (std::size_t k = 0; k < distinct.size(); ++k) {
        const std::size_t i = distinct[k];
        if (i >= theta.size()) throw std::out_of_range("parameter index " + std::to_string(i) + " out of range");
        if (seen[i]) throw std::invalid_argument("duplicate parameter index " + std::to_string(i));
        seen[i] = true;
        out[i] += omegas[k].radians_over_pi() * std::numbers::pi;
    }
    return out;
}

AnsatzFlavor parse_flavor(std::string_view name) {
    if (name == "ry") return AnsatzFlavor::ry;
    if (name == "ryz") return AnsatzFlavor::ryz;
    if (name == "haar-brick") return AnsatzFlavor::haar_brick;
    throw std::invalid_argument("unknown ansatz flavor '" + std::string(name) + "'");
}

std::string_view flavor_name(AnsatzFlavor flavor) {
    switch (flavor) {
        case AnsatzFlavor::ry: return "ry";
        case AnsatzFlavor::ryz: return "ryz";
        case AnsatzFlavor::haar_brick: return "haar-brick";
    }
    return "?";
}

ParamCircuit build_hea(int qubits, int layers, std::uint64_t seed, AnsatzFlavor flavor) {
    if (qubits < 2) throw std::invalid_argument("ansatz needs at least 2 qubits");
    if (layers < 1) throw std::invalid_argument("ansatz needs at least 1 layer");

    std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(qubits), static_cast<std::uint64_t>(layers)));
    std::vector<Gate> gates;
    std::size_t next_param = 0;
    const auto rotation = [&](char letter, int q) {
        const int qs[1] = {q};
        const char ls[2] = {letter, '\0'};
        gates.push_back(Rotation{PauliWord::on_qubits(qubits, ls, qs), next_param++});
    };

    for (int l = 0; l < layers; ++l) {
        for (int q = 0; q < qubits; ++q) {
            rotation('Y', q);
            if (flavor == AnsatzFlavor::ryz) rotation('Z', q);
        }
        // 0-based even l is an odd layer: pairs start at qubit 0
        for (int q = (l % 2 == 0) ? 0 : 1; q + 1 < qubits; q += 2) {
            if (flavor == AnsatzFlavor::haar_brick) {
                gates.push_back(FixedGate{gate::Unitary2{q, q + 1, haar_unitary4(rng)}});
            } else {
                gates.push_back(FixedGate{gate::CZ{q, q + 1}});
            }
        }
    }
    return ParamCircuit(qubits, next_param, std::move(gates));
}

}  // namespace shiftgrad
