#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "shiftgrad/circuit.hpp"
#include "shiftgrad/deriv.hpp"
#include "shiftgrad/pascal.hpp"

namespace shiftgrad {

// ---- quantities -----------------------------------------------------------

struct GradientQuantity {
    std::size_t index;
};
struct HessianQuantity {
    std::size_t i, j;
};
struct DerivativeQuantity {
    MultiIndex alpha;
};

/// What is sampled per parameter draw.
using Quantity = std::variant<GradientQuantity, HessianQuantity, DerivativeQuantity>;

/// `grad:i`, `hess:i,j` or `alpha:i,j,...`.
Quantity parse_quantity(std::string_view text);
std::string quantity_label(const Quantity& q);
/// Total derivative order (1 for a gradient, 2 for a Hessian element).
std::size_t quantity_order(const Quantity& q);
/// Index i whose gradient variance bounds the quantity's tails (the first index).
std::size_t reference_index(const Quantity& q);
std::size_t max_parameter_index(const Quantity& q);

double evaluate_quantity(const Objective& cost, std::span<const double> theta, const Quantity& q);

// ---- estimates ------------------------------------------------------------

struct VarianceEstimate {
    std::size_t samples = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double stderr_mean = 0.0;
    double stderr_variance = 0.0;  // delete-1 jackknife
};

/// Needs at least 2 values. With exactly 2 the variance error falls back to
/// the normal-theory value variance * sqrt(2/(n-1)).
VarianceEstimate estimate(std::span<const double> values);

// ---- families and sampling ------------------------------------------------

/// Builds the cost for a given (qubits, layers).
using SpecFamily = std::function<CostSpec(int qubits, int layers)>;

enum class ObservableKind { global, local };

ObservableKind parse_observable_kind(std::string_view name);
std::string_view observable_kind_name(ObservableKind kind);

/// HEA of the given flavor on |0...0>, global projector or (1/n) sum Z_j.
SpecFamily hea_family(AnsatzFlavor flavor, ObservableKind observable, std::uint64_t circuit_seed);
/// One qubit, RX(theta_0), observable Z: C = cos(theta_0). Ignores its arguments.
SpecFamily cosine_family();

struct SampleSet {
    VarianceEstimate estimate;
    std::vector<double> values;
    /// d_i C at the same draws, i = reference_index(quantity).
    std::vector<double> reference_gradient;
};

/**
 * Draws theta ~ U[0, 2 pi)^p per sample and evaluates the quantity.
 *
 * Sample k at qubit count n uses its own generator seeded from (seed, n, k),
 * so results do not depend on `threads` (0 = OpenMP default).
 */
SampleSet sample_quantity(const SpecFamily& family, int qubits, int layers, const Quantity& quantity,
                          std::size_t samples, std::uint64_t seed, int threads = 0);

/// Parameter draw used for sample k.
ParameterVector draw_parameters(std::size_t params, int qubits, std::size_t sample, std::uint64_t seed);

namespace reference {
/// Single-threaded loop over samples; bitwise equal to shiftgrad::sample_quantity.
SampleSet sample_quantity_serial(const SpecFamily& family, int qubits, int layers, const Quantity& quantity,
                                 std::size_t samples, std::uint64_t seed);
}  // namespace reference

// ---- scans ----------------------------------------------------------------

/// `fixed:L` (constant depth) or `linear:c` (layers = round(c * n), at least 1).
struct LayerRule {
    enum class Kind { fixed, linear };
    Kind kind = Kind::linear;
    double value = 1.0;

    static LayerRule parse(std::string_view text);
    int layers_for(int qubits) const;
    std::string to_string() const;
};

struct ScanConfig {
    AnsatzFlavor flavor = AnsatzFlavor::ry;
    ObservableKind observable = ObservableKind::global;
    LayerRule layers;
    std::vector<int> qubits{2, 4, 6, 8, 10};
    Quantity quantity = GradientQuantity{0};
    std::size_t samples = 500;
    std::uint64_t seed = 0;
    int threads = 0;
};

struct ScanRow {
    int qubits;
    int layers;
    SampleSet samples;
};

struct ScanResult {
    std::string quantity;
    std::size_t order = 1;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::vector<ScanRow> rows;  // ascending qubits
};

/// Needs at least 3 ascending qubit counts.
ScanResult variance_scan(const ScanConfig& config);

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double b_hat = 1.0;  // exp(-slope)
    double r_squared = 0.0;
    std::size_t points = 0;
};

/// OLS of ln(variance) on n. Throws NumericError on a non-positive variance.
DecayFit fit_decay(std::span<const int> qubits, std::span<const double> variances);
DecayFit fit_decay(const ScanResult& result);

// ---- tail and mean checks -------------------------------------------------

struct TailReport {
    double threshold = 0.0;
    double empirical_frequency = 0.0;
    double bound_value = 0.0;
    double sampling_slack = 0.0;  // 3 sqrt(f (1 - f) / samples)
    bool passes = false;
};

/// Chebyshev multiplier for a derivative of the given order: 2^(order - 1).
/// Order 1 gives Var/c^2, order 2 the Hessian bound 2 Var/c^2.
double tail_multiplier(std::size_t order);

/// `reference_variance` is Var[d_i C]; bound = tail_multiplier(order) * Var / c^2.
std::vector<TailReport> tail_check(std::span<const double> values, double reference_variance,
                                   std::span<const double> thresholds, std::size_t order);

struct MeanZeroReport {
    std::size_t index = 0;
    double mean = 0.0;
    double stderr_mean = 0.0;
    bool passes = false;  // |mean| <= 3 stderr
};

MeanZeroReport mean_zero_check(std::span<const double> gradient_samples, std::size_t index);

// ---- files ----------------------------------------------------------------

/// n,layers,quantity,samples,mean,variance,stderr_mean,stderr_variance,seed
void write_scan_csv(std::ostream& os, const ScanResult& result);

/// One `block ...` header per row followed by one quantity value per line.
void write_raw(std::ostream& os, const ScanResult& result);

struct RawBlock {
    int qubits = 0;
    int layers = 0;
    std::string quantity;
    std::size_t order = 1;
    double reference_variance = 0.0;
    std::vector<double> values;
};

/// Throws FormatError with a line number on malformed input.
std::vector<RawBlock> read_raw(std::istream& is);

void write_tail_csv(std::ostream& os, const std::vector<RawBlock>& blocks, std::span<const double> thresholds);

}  // namespace shiftgrad
