#include "shiftgrad/simulator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <type_traits>

namespace shiftgrad {

namespace {

constexpr double kUnitarityTol = 1e-10;
constexpr double kNormTol = 1e-10;

std::uint64_t qubit_bit(int n, int q) { return std::uint64_t{1} << (n - 1 - q); }

void check_qubit(const StateVector& s, int q) {
    if (q < 0 || q >= s.qubits()) {
        throw std::out_of_range("qubit index " + std::to_string(q) + " out of range for " +
                                std::to_string(s.qubits()) + " qubits");
    }
}

void check_distinct(int a, int b) {
    if (a == b) throw std::invalid_argument("two-qubit gate needs distinct qubits");
}

template <std::size_t D>
void check_unitary(const std::array<Complex, D * D>& m) {
    for (std::size_t r = 0; r < D; ++r) {
        for (std::size_t c = 0; c < D; ++c) {
            Complex acc{0.0, 0.0};
            for (std::size_t k = 0; k < D; ++k) acc += std::conj(m[k * D + r]) * m[k * D + c];
            const Complex expected = (r == c) ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
            if (std::abs(acc - expected) > kUnitarityTol) {
                throw std::invalid_argument("matrix is not unitary within 1e-10");
            }
        }
    }
}

double parity_sign(std::uint64_t b, std::uint64_t z) {
    return (std::popcount(b & z) & 1) ? -1.0 : 1.0;
}

struct Visitor {
    StateVector& s;

    void operator()(const gate::CZ& g) const {
        check_qubit(s, g.a);
        check_qubit(s, g.b);
        check_distinct(g.a, g.b);
        const auto mask = qubit_bit(s.qubits(), g.a) | qubit_bit(s.qubits(), g.b);
        auto amps = s.amplitudes();
        for (std::size_t i = 0; i < amps.size(); ++i)
            if ((i & mask) == mask) amps[i] = -amps[i];
    }

    void operator()(const gate::CNOT& g) const {
        check_qubit(s, g.control);
        check_qubit(s, g.target);
        check_distinct(g.control, g.target);
        const auto cbit = qubit_bit(s.qubits(), g.control);
        const auto tbit = qubit_bit(s.qubits(), g.target);
        auto amps = s.amplitudes();
        for (std::size_t i = 0; i < amps.size(); ++i)
            if ((i & cbit) && !(i & tbit)) std::swap(amps[i], amps[i | tbit]);
    }

    void operator()(const gate::H& g) const {
        const double r = 1.0 / std::sqrt(2.0);
        (*this)(gate::Unitary1{g.q, {r, r, r, -r}});
    }

    void operator()(const gate::S& g) const {
        check_qubit(s, g.q);
        const auto bit = qubit_bit(s.qubits(), g.q);
        auto amps = s.amplitudes();
        for (std::size_t i = 0; i < amps.size(); ++i)
            if (i & bit) amps[i] *= Complex(0.0, 1.0);
    }

    void operator()(const gate::Unitary1& g) const {
        check_qubit(s, g.q);
        const auto bit = qubit_bit(s.qubits(), g.q);
        auto amps = s.amplitudes();
        for (std::size_t i = 0; i < amps.size(); ++i) {
            if (i & bit) continue;
            const Complex a0 = amps[i];
            const Complex a1 = amps[i | bit];
            amps[i] = g.m[0] * a0 + g.m[1] * a1;
            amps[i | bit] = g.m[2] * a0 + g.m[3] * a1;
        }
    }

    void operator()(const gate::Unitary2& g) const {
        check_qubit(s, g.q1);
        check_qubit(s, g.q2);
        check_distinct(g.q1, g.q2);
        const auto hi = qubit_bit(s.qubits(), g.q1);
        const auto lo = qubit_bit(s.qubits(), g.q2);
        auto amps = s.amplitudes();
        for (std::size_t i = 0; i < amps.size(); ++i) {
            if (i & (hi | lo)) continue;
            const std::size_t idx[4] = {i, i | lo, i | hi, i | hi | lo};
            Complex in[4];
            for (int k = 0; k < 4; ++k) in[k] = amps[idx[k]];
            for (int r = 0; r < 4; ++r) {
                Complex acc{0.0, 0.0};
                for (int c = 0; c < 4; ++c) acc += g.m[r * 4 + c] * in[c];
                amps[idx[r]] = acc;
            }
        }
    }
};

void check_word(const StateVector& s, const PauliWord& w) {
    if (w.qubits() != s.qubits()) {
        throw std::invalid_argument("Pauli word has " + std::to_string(w.qubits()) +
                                    " qubits, state has " + std::to_string(s.qubits()));
    }
}

}  // namespace

StateVector::StateVector(int n) : n_(n) {
    if (n < 1 || n > kMaxQubits) throw std::invalid_argument("qubit count out of range");
    amps_.assign(std::size_t{1} << n, Complex(0.0, 0.0));
    amps_[0] = 1.0;
}

StateVector::StateVector(int n, std::vector<Complex> amplitudes) : n_(n), amps_(std::move(amplitudes)) {
    if (n < 1 || n > kMaxQubits) throw std::invalid_argument("qubit count out of range");
    if (amps_.size() != (std::size_t{1} << n)) throw std::invalid_argument("amplitude count mismatch");
}

double StateVector::norm() const {
    double acc = 0.0;
    for (const auto& a : amps_) acc += std::norm(a);
    return std::sqrt(acc);
}

PauliWord::PauliWord(std::string_view letters) : letters_(letters) {
    const int n = static_cast<int>(letters.size());
    if (n < 1 || n > kMaxQubits) throw std::invalid_argument("Pauli word length out of range");
    int y_count = 0;
    for (int q = 0; q < n; ++q) {
        const auto bit = qubit_bit(n, q);
        switch (letters[q]) {
            case 'I': break;
            case 'X': x_mask_ |= bit; break;
            case 'Z': z_mask_ |= bit; break;
            case 'Y':
                x_mask_ |= bit;
                z_mask_ |= bit;
                ++y_count;
                break;
            default:
                throw std::invalid_argument(std::string("invalid Pauli letter '") + letters[q] + "'");
        }
    }
    static const Complex kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    y_phase_ = kIPow[y_count % 4];
}

PauliWord PauliWord::on_qubits(int n, std::string_view letters, std::span<const int> qubits) {
    if (letters.size() != qubits.size()) throw std::invalid_argument("letter/qubit count mismatch");
    std::string full(static_cast<std::size_t>(n), 'I');
    for (std::size_t k = 0; k < qubits.size(); ++k) {
        const int q = qubits[k];
        if (q < 0 || q >= n) throw std::out_of_range("qubit index " + std::to_string(q) + " out of range");
        if (full[q] != 'I') throw std::invalid_argument("qubit " + std::to_string(q) + " listed twice");
        full[q] = letters[k];
    }
    return PauliWord(full);
}

std::size_t basis_index(std::string_view bits) {
    std::size_t idx = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') throw std::invalid_argument("basis label must be a bit string");
        idx = (idx << 1) | static_cast<std::size_t>(c == '1');
    }
    return idx;
}

int spec_qubits(const StateSpec& spec) {
    if (const auto* b = std::get_if<BasisState>(&spec)) return static_cast<int>(b->bits.size());
    return static_cast<int>(std::get<ProductState>(spec).factors.size());
}

StateVector prepare(const StateSpec& spec) {
    const int n = spec_qubits(spec);
    if (n < 1 || n > kMaxQubits) throw std::invalid_argument("state qubit count out of range");
    if (const auto* b = std::get_if<BasisState>(&spec)) {
        std::vector<Complex> amps(std::size_t{1} << n, Complex(0.0, 0.0));
        amps[basis_index(b->bits)] = 1.0;
        return StateVector(n, std::move(amps));
    }
    const auto& factors = std::get<ProductState>(spec).factors;
    for (std::size_t q = 0; q < factors.size(); ++q) {
        const double nrm = std::norm(factors[q][0]) + std::norm(factors[q][1]);
        if (std::abs(nrm - 1.0) > kNormTol) {
            throw std::invalid_argument("product factor for qubit " + std::to_string(q) +
                                        " is not normalized");
        }
    }
    std::vector<Complex> amps(std::size_t{1} << n);
    for (std::size_t i = 0; i < amps.size(); ++i) {
        Complex a{1.0, 0.0};
        for (int q = 0; q < n; ++q) a *= factors[q][(i & qubit_bit(n, q)) ? 1 : 0];
        amps[i] = a;
    }
    return StateVector(n, std::move(amps));
}

gate::Unitary1 make_unitary1(int q, const Matrix2& m) {
    check_unitary<2>(m);
    return {q, m};
}

gate::Unitary2 make_unitary2(int q1, int q2, const Matrix4& m) {
    check_distinct(q1, q2);
    check_unitary<4>(m);
    return {q1, q2, m};
}

int max_qubit(const FixedGate& g) {
    return std::visit(
        [](const auto& x) -> int {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, gate::CZ>) return std::max(x.a, x.b);
            else if constexpr (std::is_same_v<T, gate::CNOT>) return std::max(x.control, x.target);
            else if constexpr (std::is_same_v<T, gate::Unitary2>) return std::max(x.q1, x.q2);
            else return x.q;
        },
        g);
}

void apply_rotation(StateVector& state, const PauliWord& word, double angle) {
    check_word(state, word);
    if (word.is_identity()) throw std::invalid_argument("rotation generator must not be the identity");
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    const Complex minus_is(0.0, -s);
    const auto x = word.x_mask();
    const auto z = word.z_mask();
    auto amps = state.amplitudes();

    if (x == 0) {
        // diagonal: eigenvalue +-1 per basis state
        const Complex plus = c + minus_is;
        const Complex minus = c - minus_is;
        for (std::size_t b = 0; b < amps.size(); ++b) amps[b] *= parity_sign(b, z) > 0 ? plus : minus;
        return;
    }

    const std::uint64_t top = std::bit_floor(x);
    const Complex ph = word.y_phase();
    for (std::size_t b = 0; b < amps.size(); ++b) {
        if (b & top) continue;
        const std::size_t bp = b ^ x;
        const Complex a = amps[b];
        const Complex ap = amps[bp];
        // (P psi)_b = phase(b') psi_b'
        const Complex pa = ph * parity_sign(bp, z) * ap;
        const Complex pap = ph * parity_sign(b, z) * a;
        amps[b] = c * a + minus_is * pa;
        amps[bp] = c * ap + minus_is * pap;
    }
}

void apply_pauli(StateVector& state, const PauliWord& word) {
    check_word(state, word);
    const auto x = word.x_mask();
    const auto z = word.z_mask();
    const Complex ph = word.y_phase();
    auto amps = state.amplitudes();
    std::vector<Complex> out(amps.size());
    for (std::size_t b = 0; b < amps.size(); ++b) out[b ^ x] = ph * parity_sign(b, z) * amps[b];
    std::copy(out.begin(), out.end(), amps.begin());
}

void apply_fixed(StateVector& state, const FixedGate& g) { std::visit(Visitor{state}, g); }

int observable_qubits(const Observable& obs) {
    if (const auto* p = std::get_if<BasisProjector>(&obs)) return static_cast<int>(p->bits.size());
    const auto& sum = std::get<PauliSum>(obs);
    if (sum.terms.empty()) throw std::invalid_argument("Pauli sum has no terms");
    return sum.terms.front().word.qubits();
}

double expectation(const StateVector& state, const PauliWord& word) {
    check_word(state, word);
    const auto x = word.x_mask();
    const auto z = word.z_mask();
    const Complex ph = word.y_phase();
    auto amps = state.amplitudes();
    Complex acc{0.0, 0.0};
    for (std::size_t b = 0; b < amps.size(); ++b) {
        const std::size_t bp = b ^ x;
        acc += std::conj(amps[b]) * ph * parity_sign(bp, z) * amps[bp];
    }
    return acc.real();
}

double expectation(const StateVector& state, const Observable& obs) {
    if (const auto* p = std::get_if<BasisProjector>(&obs)) {
        if (static_cast<int>(p->bits.size()) != state.qubits())
            throw std::invalid_argument("projector dimension mismatch");
        return std::norm(state[basis_index(p->bits)]);
    }
    double acc = 0.0;
    for (const auto& t : std::get<PauliSum>(obs).terms) acc += t.coefficient * expectation(state, t.word);
    return acc;
}

Observable global_projector(int n) { return BasisProjector{std::string(static_cast<std::size_t>(n), '0')}; }

Observable local_z_average(int n) {
    PauliSum sum;
    for (int q = 0; q < n; ++q) {
        std::string letters(static_cast<std::size_t>(n), 'I');
        letters[q] = 'Z';
        sum.terms.push_back({1.0 / n, PauliWord(letters)});
    }
    return sum;
}

}  // namespace shiftgrad
