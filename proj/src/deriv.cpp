#include "shiftgrad/deriv.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace shiftgrad {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

void check_index(const Objective& cost, std::size_t i) {
    if (i >= cost.parameter_count()) {
        throw std::out_of_range("parameter index " + std::to_string(i) + " out of range (p=" +
                                std::to_string(cost.parameter_count()) + ")");
    }
}

void check_theta(const Objective& cost, std::span<const double> theta) {
    if (theta.size() != cost.parameter_count()) {
        throw std::invalid_argument("expected " + std::to_string(cost.parameter_count()) + " parameters, got " +
                                    std::to_string(theta.size()));
    }
}

void check_alpha(const Objective& cost, const MultiIndex& alpha) {
    if (alpha.order() > kMaxDerivativeOrder) throw std::invalid_argument("derivative order exceeds cap");
    check_index(cost, alpha.max_index());
}

double eval_shifted(const Objective& cost, std::vector<double>& work, std::size_t i, double delta) {
    const double saved = work[i];
    work[i] = saved + delta;
    const double value = cost(work);
    work[i] = saved;
    return value;
}

}  // namespace

Objective::Objective(std::size_t params, Function f) : params_(params), f_(std::move(f)) {
    if (!f_) throw std::invalid_argument("objective needs a callable");
}

Objective::Objective(const CostSpec& spec) : params_(spec.parameter_count()) {
    auto owned = std::make_shared<const CostSpec>(spec);
    f_ = [owned](std::span<const double> theta) { return evaluate_cost(*owned, theta); };
}

Objective::Objective(const Objective& other) : params_(other.params_), f_(other.f_), count_(other.count_.load()) {}

double Objective::operator()(std::span<const double> theta) const {
    count_.fetch_add(1, std::memory_order_relaxed);
    return f_(theta);
}

double partial(const Objective& cost, std::span<const double> theta, std::size_t i) {
    check_theta(cost, theta);
    check_index(cost, i);
    std::vector<double> work(theta.begin(), theta.end());
    const double plus = eval_shifted(cost, work, i, kHalfPi);
    const double minus = eval_shifted(cost, work, i, -kHalfPi);
    return 0.5 * (plus - minus);
}

std::vector<double> gradient(const Objective& cost, std::span<const double> theta) {
    std::vector<double> g(cost.parameter_count());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = partial(cost, theta, i);
    return g;
}

double hessian_element(const Objective& cost, std::span<const double> theta, std::size_t i, std::size_t j) {
    check_theta(cost, theta);
    check_index(cost, i);
    check_index(cost, j);
    std::vector<double> work(theta.begin(), theta.end());
    if (i == j) {
        const double up = eval_shifted(cost, work, i, std::numbers::pi);
        const double down = eval_shifted(cost, work, i, -std::numbers::pi);
        const double centre = cost(work);
        return 0.25 * (up + down - 2.0 * centre);
    }
    const auto at = [&](double di, double dj) {
        work[i] = theta[i] + di;
        work[j] = theta[j] + dj;
        return cost(work);
    };
    const double pp = at(kHalfPi, kHalfPi);
    const double mm = at(-kHalfPi, -kHalfPi);
    const double pm = at(kHalfPi, -kHalfPi);
    const double mp = at(-kHalfPi, kHalfPi);
    return 0.25 * (pp + mm - pm - mp);
}

HessianMatrix hessian(const Objective& cost, std::span<const double> theta) {
    check_theta(cost, theta);
    const std::size_t p = cost.parameter_count();
    HessianMatrix h{p, std::vector<double>(p * p, 0.0)};
    const long long entries = static_cast<long long>(p * (p + 1) / 2);

    // flat upper-triangle index -> (i, j), each entry written by exactly one thread
#pragma omp parallel for schedule(dynamic)
    for (long long e = 0; e < entries; ++e) {
        std::size_t i = 0;
        std::size_t remaining = static_cast<std::size_t>(e);
        while (remaining >= p - i) {
            remaining -= p - i;
            ++i;
        }
        const std::size_t j = i + remaining;
        const double v = hessian_element(cost, theta, i, j);
        h(i, j) = v;
        h(j, i) = v;
    }
    return h;
}

HessianMatrix reference::hessian_serial(const Objective& cost, std::span<const double> theta) {
    check_theta(cost, theta);
    const std::size_t p = cost.parameter_count();
    HessianMatrix h{p, std::vector<double>(p * p, 0.0)};
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = i; j < p; ++j) {
            const double v = hessian_element(cost, theta, i, j);
            h(i, j) = v;
            h(j, i) = v;
        }
    }
    return h;
}

double higher_derivative(const Objective& cost, std::span<const double> theta, const ShiftPlan& plan) {
    check_theta(cost, theta);
    check_alpha(cost, plan.alpha);
    const auto distinct = plan.alpha.distinct_indices();
    double acc = 0.0;
    for (const auto& term : plan.terms) {
        const auto shifted = shifted_parameters(theta, distinct, term.omegas);
        acc += static_cast<double>(term.weight) * cost(shifted);
    }
    return acc / static_cast<double>(plan.normalizer);
}

double higher_derivative(const Objective& cost, std::span<const double> theta, const MultiIndex& alpha) {
    check_alpha(cost, alpha);
    return higher_derivative(cost, theta, shift_terms(alpha));
}

double default_fd_step(std::size_t order) {
    if (order <= 1) return 1e-4;
    if (order == 2) return 1e-3;
    return 1e-2;
}

double finite_difference(const Objective& cost, std::span<const double> theta, const MultiIndex& alpha,
                         std::optional<double> step) {
    check_theta(cost, theta);
    check_alpha(cost, alpha);
    const double h = step.value_or(default_fd_step(alpha.order()));
    if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");

    const auto& raw = alpha.raw();
    const std::size_t k = raw.size();
    // sum over sign patterns of prod(signs) * C(theta + step * sum signs e_raw) / (2 step)^k
    const auto nested = [&](double hh) {
        std::vector<double> work(theta.begin(), theta.end());
        double acc = 0.0;
        for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
            std::copy(theta.begin(), theta.end(), work.begin());
            double sign = 1.0;
            for (std::size_t m = 0; m < k; ++m) {
                const bool negative = (mask >> m) & 1U;
                work[raw[m]] += negative ? -hh : hh;
                if (negative) sign = -sign;
            }
            acc += sign * cost(work);
        }
        return acc / std::pow(2.0 * hh, static_cast<double>(k));
    };
    const double coarse = nested(h);
    const double fine = nested(h / 2.0);
    return (4.0 * fine - coarse) / 3.0;
}

double sinusoid_derivative(const Objective& cost, std::span<const double> theta, std::size_t i, int order) {
    check_theta(cost, theta);
    check_index(cost, i);
    if (order < 1) throw std::invalid_argument("derivative order must be at least 1");
    std::vector<double> work(theta.begin(), theta.end());
    const double f0 = cost(work);
    const double fp = eval_shifted(cost, work, i, kHalfPi);
    const double fm = eval_shifted(cost, work, i, -kHalfPi);
    // C(theta_i + s) = a cos s + b sin s + c
    const double b = 0.5 * (fp - fm);
    const double c = 0.5 * (fp + fm);
    const double a = f0 - c;
    // d^N/ds^N at s = 0: cos -> cos(N pi/2), sin -> sin(N pi/2)
    switch (order % 4) {
        case 0: return a;
        case 1: return b;
        case 2: return -a;
        default: return -b;
    }
}

}  // namespace shiftgrad
