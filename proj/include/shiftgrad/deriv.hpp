#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "shiftgrad/circuit.hpp"
#include "shiftgrad/pascal.hpp"

namespace shiftgrad {

/**
 * A scalar function of p angles with an evaluation counter.
 *
 * The callable must be safe to invoke concurrently; the counter is atomic.
 */
class Objective {
public:
    using Function = std::function<double(std::span<const double>)>;

    Objective(std::size_t params, Function f);
    /// Copies the spec; evaluation is evaluate_cost.
    explicit Objective(const CostSpec& spec);

    Objective(const Objective& other);
    Objective& operator=(const Objective&) = delete;

    double operator()(std::span<const double> theta) const;
    std::size_t parameter_count() const noexcept { return params_; }
    std::size_t evaluations() const noexcept { return count_.load(); }
    void reset_evaluations() noexcept { count_.store(0); }

private:
    std::size_t params_;
    Function f_;
    mutable std::atomic<std::size_t> count_{0};
};

/// Row-major p x p.
struct HessianMatrix {
    std::size_t size = 0;
    std::vector<double> values;

    double operator()(std::size_t i, std::size_t j) const { return values[i * size + j]; }
    double& operator()(std::size_t i, std::size_t j) { return values[i * size + j]; }
};

/// Two-point shift rule: (C(theta_i + pi/2) - C(theta_i - pi/2)) / 2.
double partial(const Objective& cost, std::span<const double> theta, std::size_t i);
std::vector<double> gradient(const Objective& cost, std::span<const double> theta);

/// Four-point rule for i != j, three-point row-2 rule for i == j.
double hessian_element(const Objective& cost, std::span<const double> theta, std::size_t i, std::size_t j);

/// Upper triangle filled in parallel (OpenMP) and mirrored.
HessianMatrix hessian(const Objective& cost, std::span<const double> theta);

/// (1/2^|alpha|) sum_terms W * C(shifted theta), summed in plan order.
double higher_derivative(const Objective& cost, std::span<const double> theta, const MultiIndex& alpha);
double higher_derivative(const Objective& cost, std::span<const double> theta, const ShiftPlan& plan);

/// 1e-4 for order 1, 1e-3 for order 2, 1e-2 above.
double default_fd_step(std::size_t order);

/// Nested central differences, one Richardson step combining h and h/2.
double finite_difference(const Objective& cost, std::span<const double> theta, const MultiIndex& alpha,
                         std::optional<double> step = std::nullopt);

/// N-th derivative of the exact sinusoid a cos + b sin + c fitted through
/// theta_i and theta_i +- pi/2.
double sinusoid_derivative(const Objective& cost, std::span<const double> theta, std::size_t i, int order);

namespace reference {
/// Single-threaded Hessian fill; bitwise equal to shiftgrad::hessian.
HessianMatrix hessian_serial(const Objective& cost, std::span<const double> theta);
}  // namespace reference

}  // namespace shiftgrad
