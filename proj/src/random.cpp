#include "shiftgrad/random.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>

namespace shiftgrad {

std::vector<Complex> haar_unitary(int dim, std::mt19937_64& rng) {
    if (dim < 1) throw std::invalid_argument("unitary dimension must be positive");
    std::normal_distribution<double> normal(0.0, 1.0);

    Eigen::MatrixXcd z(dim, dim);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            const double re = normal(rng);
            const double im = normal(rng);
            z(r, c) = Complex(re, im);
        }
    }
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(z);
    Eigen::MatrixXcd q = qr.householderQ();
    const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < dim; ++c) {
        const Complex d = r(c, c);
        const double mag = std::abs(d);
        const Complex phase = mag > 0.0 ? d / mag : Complex(1.0, 0.0);
        q.col(c) *= phase;
    }

    std::vector<Complex> out(static_cast<std::size_t>(dim) * dim);
    for (int r0 = 0; r0 < dim; ++r0)
        for (int c = 0; c < dim; ++c) out[static_cast<std::size_t>(r0) * dim + c] = q(r0, c);
    return out;
}

Matrix4 haar_unitary4(std::mt19937_64& rng) {
    const auto u = haar_unitary(4, rng);
    Matrix4 m;
    std::copy(u.begin(), u.end(), m.begin());
    return m;
}

}  // namespace shiftgrad
