#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace shiftgrad {

using Complex = std::complex<double>;

// Qubit 0 is the leftmost Pauli letter and the most significant bit of a
// basis label / amplitude index.

inline constexpr int kMaxQubits = 24;

class StateVector {
public:
    explicit StateVector(int n);  // |0...0>
    StateVector(int n, std::vector<Complex> amplitudes);

    int qubits() const noexcept { return n_; }
    std::size_t dimension() const noexcept { return amps_.size(); }
    std::span<Complex> amplitudes() noexcept { return amps_; }
    std::span<const Complex> amplitudes() const noexcept { return amps_; }
    Complex operator[](std::size_t i) const { return amps_[i]; }
    double norm() const;

private:
    int n_;
    std::vector<Complex> amps_;
};

/// Tensor product of Pauli letters. Stored as bit masks over amplitude indices.
class PauliWord {
public:
    /// `letters` over {I,X,Y,Z}, one per qubit.
    explicit PauliWord(std::string_view letters);
    /// Letters placed on the given qubits of an n-qubit register, identity elsewhere.
    static PauliWord on_qubits(int n, std::string_view letters, std::span<const int> qubits);

    int qubits() const noexcept { return static_cast<int>(letters_.size()); }
    const std::string& letters() const noexcept { return letters_; }
    bool is_identity() const noexcept { return x_mask_ == 0 && z_mask_ == 0; }
    std::uint64_t x_mask() const noexcept { return x_mask_; }
    std::uint64_t z_mask() const noexcept { return z_mask_; }
    /// i^(#Y): P|b> = i^{#Y} (-1)^{popcount(b & z)} |b ^ x>.
    Complex y_phase() const noexcept { return y_phase_; }

    friend bool operator==(const PauliWord& a, const PauliWord& b) { return a.letters_ == b.letters_; }

private:
    std::string letters_;
    std::uint64_t x_mask_ = 0;
    std::uint64_t z_mask_ = 0;
    Complex y_phase_{1.0, 0.0};
};

using Matrix2 = std::array<Complex, 4>;   // row-major
using Matrix4 = std::array<Complex, 16>;  // row-major, first qubit is the high bit

struct BasisState {
    std::string bits;
};

/// Single-qubit factors (amp of |0>, amp of |1>), qubit 0 first.
struct ProductState {
    std::vector<std::array<Complex, 2>> factors;
};

using StateSpec = std::variant<BasisState, ProductState>;

int spec_qubits(const StateSpec& spec);
/// Throws std::invalid_argument for malformed labels or non-normalized factors.
StateVector prepare(const StateSpec& spec);

namespace gate {
struct CZ {
    int a, b;
    friend bool operator==(const CZ&, const CZ&) = default;
};
struct CNOT {
    int control, target;
    friend bool operator==(const CNOT&, const CNOT&) = default;
};
struct H {
    int q;
    friend bool operator==(const H&, const H&) = default;
};
struct S {
    int q;
    friend bool operator==(const S&, const S&) = default;
};
struct Unitary1 {
    int q;
    Matrix2 m;
    friend bool operator==(const Unitary1&, const Unitary1&) = default;
};
struct Unitary2 {
    int q1, q2;
    Matrix4 m;
    friend bool operator==(const Unitary2&, const Unitary2&) = default;
};
}  // namespace gate

using FixedGate = std::variant<gate::CZ, gate::CNOT, gate::H, gate::S, gate::Unitary1, gate::Unitary2>;

/// Checked constructors; throw std::invalid_argument if U^dagger U != I within 1e-10.
gate::Unitary1 make_unitary1(int q, const Matrix2& m);
gate::Unitary2 make_unitary2(int q1, int q2, const Matrix4& m);

/// Largest qubit referenced by the gate.
int max_qubit(const FixedGate& g);

/// psi <- exp(-i angle P / 2) psi = cos(angle/2) psi - i sin(angle/2) P psi.
void apply_rotation(StateVector& state, const PauliWord& word, double angle);
/// psi <- P psi.
void apply_pauli(StateVector& state, const PauliWord& word);
void apply_fixed(StateVector& state, const FixedGate& g);

struct PauliTerm {
    double coefficient;
    PauliWord word;
};

struct PauliSum {
    std::vector<PauliTerm> terms;
};

/// |bits><bits|
struct BasisProjector {
    std::string bits;
};

using Observable = std::variant<PauliSum, BasisProjector>;

int observable_qubits(const Observable& obs);
double expectation(const StateVector& state, const PauliWord& word);
double expectation(const StateVector& state, const Observable& obs);

/// All-zero projector on n qubits.
Observable global_projector(int n);
/// (1/n) sum_j Z_j.
Observable local_z_average(int n);

std::size_t basis_index(std::string_view bits);

}  // namespace shiftgrad
