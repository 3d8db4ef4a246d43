#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "shiftgrad/random.hpp"
#include "shiftgrad/simulator.hpp"

using namespace shiftgrad;
using std::numbers::pi;

namespace {

void expect_amplitudes(const StateVector& s, std::initializer_list<Complex> want, double tol = 1e-14) {
    ASSERT_EQ(s.dimension(), want.size());
    std::size_t i = 0;
    for (Complex w : want) {
        EXPECT_NEAR(s[i].real(), w.real(), tol) << "index " << i;
        EXPECT_NEAR(s[i].imag(), w.imag(), tol) << "index " << i;
        ++i;
    }
}

}  // namespace

TEST(Prepare, BasisAndProduct) {
    expect_amplitudes(prepare(BasisState{"00"}), {1, 0, 0, 0});
    expect_amplitudes(prepare(BasisState{"1"}), {0, 1});
    const double r = 1.0 / std::sqrt(2.0);
    expect_amplitudes(prepare(ProductState{{{r, r}, {r, r}}}), {0.5, 0.5, 0.5, 0.5});
}

TEST(Prepare, QubitZeroIsMostSignificant) {
    expect_amplitudes(prepare(BasisState{"10"}), {0, 0, 1, 0});
}

TEST(Prepare, Rejects) {
    EXPECT_THROW(prepare(BasisState{"0a"}), std::invalid_argument);
    EXPECT_THROW(prepare(BasisState{""}), std::invalid_argument);
    EXPECT_THROW(prepare(ProductState{{{1.0, 1.0}}}), std::invalid_argument);
}

TEST(PauliWord, Masks) {
    const PauliWord w("XYZI");
    EXPECT_EQ(w.x_mask(), 0b1100u);
    EXPECT_EQ(w.z_mask(), 0b0110u);
    EXPECT_FALSE(w.is_identity());
    EXPECT_TRUE(PauliWord("II").is_identity());
    EXPECT_THROW(PauliWord("XQ"), std::invalid_argument);

    const int qubits[] = {0, 2};
    EXPECT_EQ(PauliWord::on_qubits(3, "ZZ", qubits).letters(), "ZIZ");
}

TEST(ApplyRotation, XByPi) {
    StateVector s(1);
    apply_rotation(s, PauliWord("X"), pi);
    expect_amplitudes(s, {0, Complex(0, -1)});
}

TEST(ApplyRotation, ZeroAngleIsIdentity) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 20; ++trial) {
        StateVector s = oracle::random_state(3, rng);
        const StateVector before = s;
        apply_rotation(s, PauliWord(oracle::random_word(3, rng)), 0.0);
        for (std::size_t i = 0; i < s.dimension(); ++i) EXPECT_EQ(s[i], before[i]);
    }
}

TEST(ApplyRotation, ZZEigenphase) {
    const double theta = 0.37;
    StateVector s = prepare(BasisState{"01"});
    apply_rotation(s, PauliWord("ZZ"), theta);
    const Complex phase = std::exp(Complex(0, theta / 2));
    expect_amplitudes(s, {0, phase, 0, 0});
}

TEST(ApplyRotation, RejectsIdentityAndWidthMismatch) {
    StateVector s(2);
    EXPECT_THROW(apply_rotation(s, PauliWord("II"), 1.0), std::invalid_argument);
    EXPECT_THROW(apply_rotation(s, PauliWord("X"), 1.0), std::invalid_argument);
}

TEST(ApplyRotation, MatchesDenseExponential) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-pi, pi);
    for (int n = 1; n <= 3; ++n) {
        for (int trial = 0; trial < 30; ++trial) {
            const std::string w = oracle::random_word(n, rng);
            const double angle = u(rng);
            StateVector s = oracle::random_state(n, rng);
            const Eigen::VectorXcd v = oracle::to_eigen(s);
            const Eigen::MatrixXcd p = oracle::pauli_matrix(w);
            const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(p.rows(), p.cols());
            const Eigen::VectorXcd want = (std::cos(angle / 2) * id - Complex(0, std::sin(angle / 2)) * p) * v;
            apply_rotation(s, PauliWord(w), angle);
            EXPECT_LT((oracle::to_eigen(s) - want).norm(), 1e-13) << w;
        }
    }
}

TEST(ApplyPauli, MatchesDenseMatrix) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::string w = oracle::random_word(3, rng, true);
        StateVector s = oracle::random_state(3, rng);
        const Eigen::VectorXcd want = oracle::pauli_matrix(w) * oracle::to_eigen(s);
        apply_pauli(s, PauliWord(w));
        EXPECT_LT((oracle::to_eigen(s) - want).norm(), 1e-13) << w;
    }
}

TEST(ApplyRotation, PreservesNormAndIsPeriodic) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int trial = 0; trial < 30; ++trial) {
        const PauliWord w(oracle::random_word(4, rng));
        const double angle = u(rng);
        StateVector a = oracle::random_state(4, rng);
        StateVector b = a;
        apply_rotation(a, w, angle);
        EXPECT_NEAR(a.norm(), 1.0, 1e-12);
        // exp(-i (angle + 4 pi) P / 2) = exp(-i angle P / 2); a 2 pi shift only flips the global sign.
        apply_rotation(b, w, angle + 2 * pi);
        for (std::size_t i = 0; i < a.dimension(); ++i) EXPECT_LT(std::abs(a[i] + b[i]), 1e-12);
    }
}

TEST(ApplyRotation, ComposesAdditively) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const PauliWord w(oracle::random_word(3, rng));
        StateVector a = oracle::random_state(3, rng);
        StateVector b = a;
        apply_rotation(a, w, 0.4);
        apply_rotation(a, w, 1.1);
        apply_rotation(b, w, 1.5);
        for (std::size_t i = 0; i < a.dimension(); ++i) EXPECT_LT(std::abs(a[i] - b[i]), 1e-13);
    }
}

TEST(ApplyFixed, BasicGates) {
    StateVector s = prepare(BasisState{"11"});
    apply_fixed(s, gate::CZ{0, 1});
    expect_amplitudes(s, {0, 0, 0, -1});

    StateVector h(1);
    apply_fixed(h, gate::H{0});
    const double r = 1.0 / std::sqrt(2.0);
    expect_amplitudes(h, {r, r});

    StateVector c = prepare(BasisState{"10"});
    apply_fixed(c, gate::CNOT{0, 1});
    expect_amplitudes(c, {0, 0, 0, 1});

    StateVector p = prepare(BasisState{"1"});
    apply_fixed(p, gate::S{0});
    expect_amplitudes(p, {0, Complex(0, 1)});
}

TEST(ApplyFixed, HaarBlockIsUnitary) {
    std::mt19937_64 rng(7);
    const auto u = haar_unitary4(rng);
    StateVector s(2);
    apply_fixed(s, make_unitary2(0, 1, u));
    EXPECT_NEAR(s.norm(), 1.0, 1e-10);

    // U^dagger U = I
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            Complex acc = 0;
            for (int k = 0; k < 4; ++k) acc += std::conj(u[k * 4 + r]) * u[k * 4 + c];
            EXPECT_NEAR(std::abs(acc - (r == c ? 1.0 : 0.0)), 0.0, 1e-12);
        }
    }
}

TEST(ApplyFixed, Unitary2OnNonAdjacentQubitsMatchesDense) {
    std::mt19937_64 rng(8);
    const auto u = haar_unitary4(rng);
    StateVector s = oracle::random_state(3, rng);
    const Eigen::VectorXcd v = oracle::to_eigen(s);
    apply_fixed(s, make_unitary2(2, 0, u));

    // Dense action: amplitude index bits (q0 q1 q2); the block's high bit is q2, low bit q0.
    Eigen::VectorXcd want = Eigen::VectorXcd::Zero(8);
    for (int out = 0; out < 8; ++out) {
        for (int in = 0; in < 8; ++in) {
            if (((out >> 1) & 1) != ((in >> 1) & 1)) continue;
            const int row = ((out & 1) << 1) | (out >> 2);
            const int col = ((in & 1) << 1) | (in >> 2);
            want(out) += u[static_cast<std::size_t>(row * 4 + col)] * v(in);
        }
    }
    EXPECT_LT((oracle::to_eigen(s) - want).norm(), 1e-13);
}

TEST(ApplyFixed, RejectsNonUnitaryAndBadQubits) {
    Matrix2 bad{1, 1, 0, 1};
    EXPECT_THROW(make_unitary1(0, bad), std::invalid_argument);
    StateVector s(2);
    EXPECT_THROW(apply_fixed(s, gate::CZ{0, 2}), std::out_of_range);
    EXPECT_THROW(apply_fixed(s, gate::CZ{1, 1}), std::invalid_argument);
}

TEST(Expectation, Examples) {
    EXPECT_DOUBLE_EQ(expectation(StateVector(1), PauliWord("Z")), 1.0);

    for (int n = 1; n <= 5; ++n) {
        StateVector s(n);
        for (int q = 0; q < n; ++q) apply_fixed(s, gate::H{q});
        EXPECT_NEAR(expectation(s, global_projector(n)), std::ldexp(1.0, -n), 1e-14);
    }

    for (double theta : {0.0, 0.3, 1.7, -2.2, 5.0}) {
        StateVector s(1);
        apply_rotation(s, PauliWord("X"), theta);
        EXPECT_NEAR(expectation(s, PauliWord("Z")), std::cos(theta), 1e-14);
    }
}

TEST(Expectation, MatchesDenseQuadraticForm) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 40; ++trial) {
        const std::string w = oracle::random_word(3, rng, true);
        const StateVector s = oracle::random_state(3, rng);
        const Eigen::VectorXcd v = oracle::to_eigen(s);
        const Complex want = v.adjoint() * oracle::pauli_matrix(w) * v;
        EXPECT_NEAR(expectation(s, PauliWord(w)), want.real(), 1e-13) << w;
        EXPECT_NEAR(want.imag(), 0.0, 1e-13);
    }
}

TEST(Expectation, LocalAverageAndProjector) {
    const StateVector s = prepare(BasisState{"010"});
    EXPECT_NEAR(expectation(s, local_z_average(3)), 1.0 / 3.0, 1e-15);
    EXPECT_DOUBLE_EQ(expectation(s, BasisProjector{"010"}), 1.0);
    EXPECT_DOUBLE_EQ(expectation(s, global_projector(3)), 0.0);
    EXPECT_THROW(expectation(s, global_projector(2)), std::invalid_argument);
}
