#include "shiftgrad/bpscan.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "shiftgrad/errors.hpp"
#include "shiftgrad/format.hpp"
#include "shiftgrad/random.hpp"

namespace shiftgrad {

namespace {

std::vector<std::size_t> parse_index_list(std::string_view text) {
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t next = text.find(',', pos);
        if (next == std::string_view::npos) next = text.size();
        const std::string tok(text.substr(pos, next - pos));
        const long long v = parse_integer(tok);
        if (v < 0) throw std::invalid_argument("negative parameter index '" + tok + "'");
        out.push_back(static_cast<std::size_t>(v));
        pos = next + 1;
    }
    return out;
}

std::string join_indices(std::span<const std::size_t> idx) {
    std::string s;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (k) s += ',';
        s += std::to_string(idx[k]);
    }
    return s;
}

std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

double unbiased_variance(std::span<const double> values) {
    if (values.size() < 2) throw std::invalid_argument("variance needs at least 2 samples");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return ss / static_cast<double>(values.size() - 1);
}

CostSpec checked_spec(const SpecFamily& family, int qubits, int layers, const Quantity& quantity,
                      std::size_t samples) {
    if (samples < 2) throw std::invalid_argument("need at least 2 samples");
    CostSpec spec = family(qubits, layers);
    if (max_parameter_index(quantity) >= spec.parameter_count()) {
        throw std::invalid_argument("quantity " + quantity_label(quantity) + " references a parameter beyond p=" +
                                    std::to_string(spec.parameter_count()));
    }
    return spec;
}

struct SampleKernel {
    const Objective& cost;
    const Quantity& quantity;
    bool separate_reference;
    std::size_t ref_index;
    int qubits;
    std::uint64_t seed;

    void operator()(std::size_t k, double& value, double& reference) const {
        const auto theta = draw_parameters(cost.parameter_count(), qubits, k, seed);
        value = evaluate_quantity(cost, theta, quantity);
        reference = separate_reference ? partial(cost, theta, ref_index) : value;
    }
};

SampleSet finish(std::vector<double> values, std::vector<double> reference) {
    SampleSet out;
    out.estimate = estimate(values);
    out.values = std::move(values);
    out.reference_gradient = std::move(reference);
    return out;
}

}  // namespace

// ---- quantities -----------------------------------------------------------

Quantity parse_quantity(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw std::invalid_argument("quantity must be grad:i, hess:i,j or alpha:...");
    const auto kind = text.substr(0, colon);
    const auto idx = parse_index_list(text.substr(colon + 1));
    if (kind == "grad") {
        if (idx.size() != 1) throw std::invalid_argument("grad takes one index");
        return GradientQuantity{idx[0]};
    }
    if (kind == "hess") {
        if (idx.size() != 2) throw std::invalid_argument("hess takes two indices");
        return HessianQuantity{idx[0], idx[1]};
    }
    if (kind == "alpha") return DerivativeQuantity{normalize(idx)};
    throw std::invalid_argument("unknown quantity kind '" + std::string(kind) + "'");
}

std::string quantity_label(const Quantity& q) {
    if (const auto* g = std::get_if<GradientQuantity>(&q)) return "grad:" + std::to_string(g->index);
    if (const auto* h = std::get_if<HessianQuantity>(&q)) return "hess:" + std::to_string(h->i) + "," + std::to_string(h->j);
    return "alpha:" + join_indices(std::get<DerivativeQuantity>(q).alpha.raw());
}

std::size_t quantity_order(const Quantity& q) {
    if (std::holds_alternative<GradientQuantity>(q)) return 1;
    if (std::holds_alternative<HessianQuantity>(q)) return 2;
    return std::get<DerivativeQuantity>(q).alpha.order();
}

std::size_t reference_index(const Quantity& q) {
    if (const auto* g = std::get_if<GradientQuantity>(&q)) return g->index;
    if (const auto* h = std::get_if<HessianQuantity>(&q)) return h->i;
    return std::get<DerivativeQuantity>(q).alpha.raw().front();
}

std::size_t max_parameter_index(const Quantity& q) {
    if (const auto* g = std::get_if<GradientQuantity>(&q)) return g->index;
    if (const auto* h = std::get_if<HessianQuantity>(&q)) return std::max(h->i, h->j);
    return std::get<DerivativeQuantity>(q).alpha.max_index();
}

double evaluate_quantity(const Objective& cost, std::span<const double> theta, const Quantity& q) {
    if (const auto* g = std::get_if<GradientQuantity>(&q)) return partial(cost, theta, g->index);
    if (const auto* h = std::get_if<HessianQuantity>(&q)) return hessian_element(cost, theta, h->i, h->j);
    return higher_derivative(cost, theta, std::get<DerivativeQuantity>(q).alpha);
}

// ---- estimates ------------------------------------------------------------

VarianceEstimate estimate(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n < 2) throw std::invalid_argument("estimate needs at least 2 samples");
    const double nd = static_cast<double>(n);

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= nd;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double variance = ss / (nd - 1.0);

    VarianceEstimate e;
    e.samples = n;
    e.mean = mean;
    e.variance = variance;
    e.stderr_mean = std::sqrt(variance / nd);

    if (n == 2) {
        e.stderr_variance = variance * std::sqrt(2.0 / (nd - 1.0));
        return e;
    }
    // leave-one-out variance: (SS - n/(n-1) (x_k - mean)^2) / (n - 2)
    std::vector<double> loo(n);
    double loo_mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double d = values[k] - mean;
        loo[k] = std::max(0.0, (ss - nd / (nd - 1.0) * d * d) / (nd - 2.0));
        loo_mean += loo[k];
    }
    loo_mean /= nd;
    double spread = 0.0;
    for (double v : loo) spread += (v - loo_mean) * (v - loo_mean);
    e.stderr_variance = std::sqrt((nd - 1.0) / nd * spread);
    return e;
}

// ---- families and sampling ------------------------------------------------

ObservableKind parse_observable_kind(std::string_view name) {
    if (name == "global") return ObservableKind::global;
    if (name == "local") return ObservableKind::local;
    throw std::invalid_argument("observable must be global or local, got '" + std::string(name) + "'");
}

std::string_view observable_kind_name(ObservableKind kind) {
    return kind == ObservableKind::global ? "global" : "local";
}

SpecFamily hea_family(AnsatzFlavor flavor, ObservableKind observable, std::uint64_t circuit_seed) {
    return [=](int qubits, int layers) {
        ParamCircuit circuit = build_hea(qubits, layers, circuit_seed, flavor);
        Observable obs = observable == ObservableKind::global ? global_projector(qubits) : local_z_average(qubits);
        std::vector<CostTerm> terms;
        terms.push_back({StateSpec{BasisState{std::string(static_cast<std::size_t>(qubits), '0')}}, std::move(obs)});
        return CostSpec(std::move(circuit), std::move(terms));
    };
}

SpecFamily cosine_family() {
    return [](int, int) {
        ParamCircuit circuit(1, 1, {Rotation{PauliWord("X"), 0}});
        std::vector<CostTerm> terms;
        terms.push_back({StateSpec{BasisState{"0"}}, Observable{PauliSum{{{1.0, PauliWord("Z")}}}}});
        return CostSpec(std::move(circuit), std::move(terms));
    };
}

ParameterVector draw_parameters(std::size_t params, int qubits, std::size_t sample, std::uint64_t seed) {
    std::mt19937_64 rng(stream_seed(seed, static_cast<std::uint64_t>(qubits), static_cast<std::uint64_t>(sample)));
    ParameterVector theta(params);
    for (auto& t : theta) t = 2.0 * std::numbers::pi * uniform01(rng);
    return theta;
}

SampleSet sample_quantity(const SpecFamily& family, int qubits, int layers, const Quantity& quantity,
                          std::size_t samples, std::uint64_t seed, int threads) {
    const Objective cost(checked_spec(family, qubits, layers, quantity, samples));
    const bool separate = !std::holds_alternative<GradientQuantity>(quantity);
    const SampleKernel kernel{cost, quantity, separate, reference_index(quantity), qubits, seed};

    std::vector<double> values(samples);
    std::vector<double> reference(samples);
    const long long count = static_cast<long long>(samples);
    const int workers = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(static) num_threads(workers)
    for (long long k = 0; k < count; ++k) {
        kernel(static_cast<std::size_t>(k), values[static_cast<std::size_t>(k)],
               reference[static_cast<std::size_t>(k)]);
    }
    return finish(std::move(values), std::move(reference));
}

SampleSet reference::sample_quantity_serial(const SpecFamily& family, int qubits, int layers, const Quantity& quantity,
                                            std::size_t samples, std::uint64_t seed) {
    const Objective cost(checked_spec(family, qubits, layers, quantity, samples));
    const bool separate = !std::holds_alternative<GradientQuantity>(quantity);
    const SampleKernel kernel{cost, quantity, separate, reference_index(quantity), qubits, seed};

    std::vector<double> values(samples);
    std::vector<double> reference(samples);
    for (std::size_t k = 0; k < samples; ++k) kernel(k, values[k], reference[k]);
    return finish(std::move(values), std::move(reference));
}

// ---- scans ----------------------------------------------------------------

LayerRule LayerRule::parse(std::string_view text) {
    LayerRule rule;
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) throw std::invalid_argument("layer rule must be fixed:L or linear:c");
    const auto kind = text.substr(0, colon);
    const std::string arg(text.substr(colon + 1));
    if (kind == "fixed") {
        rule.kind = Kind::fixed;
        const long long l = parse_integer(arg);
        if (l < 1) throw std::invalid_argument("fixed layer count must be at least 1");
        rule.value = static_cast<double>(l);
    } else if (kind == "linear") {
        rule.kind = Kind::linear;
        rule.value = parse_double(arg);
        if (!(rule.value > 0.0)) throw std::invalid_argument("linear layer factor must be positive");
    } else {
        throw std::invalid_argument("unknown layer rule '" + std::string(kind) + "'");
    }
    return rule;
}

int LayerRule::layers_for(int qubits) const {
    if (kind == Kind::fixed) return static_cast<int>(value);
    return std::max(1, static_cast<int>(std::lround(value * qubits)));
}

std::string LayerRule::to_string() const {
    if (kind == Kind::fixed) return "fixed:" + std::to_string(static_cast<int>(value));
    return "linear:" + format_shortest(value);
}

ScanResult variance_scan(const ScanConfig& config) {
    if (config.qubits.size() < 3) throw std::invalid_argument("scan needs at least 3 qubit counts");
    for (std::size_t k = 1; k < config.qubits.size(); ++k) {
        if (config.qubits[k] <= config.qubits[k - 1]) throw std::invalid_argument("qubit counts must be ascending");
    }
    const auto family = hea_family(config.flavor, config.observable, splitmix64(config.seed ^ 0xc1c0ffeeULL));

    ScanResult result;
    result.quantity = quantity_label(config.quantity);
    result.order = quantity_order(config.quantity);
    result.samples = config.samples;
    result.seed = config.seed;
    for (int n : config.qubits) {
        const int layers = config.layers.layers_for(n);
        result.rows.push_back(
            {n, layers, sample_quantity(family, n, layers, config.quantity, config.samples, config.seed, config.threads)});
    }
    return result;
}

DecayFit fit_decay(std::span<const int> qubits, std::span<const double> variances) {
    if (qubits.size() != variances.size()) throw std::invalid_argument("fit input length mismatch");
    if (qubits.size() < 3) throw NumericError("decay fit needs at least 3 points");
    const double m = static_cast<double>(qubits.size());
    std::vector<double> y(qubits.size());
    double xbar = 0.0;
    double ybar = 0.0;
    for (std::size_t k = 0; k < qubits.size(); ++k) {
        if (!(variances[k] > 0.0) || !std::isfinite(variances[k])) {
            throw NumericError("variance at n=" + std::to_string(qubits[k]) + " is " + format_shortest(variances[k]) +
                               "; cannot take its logarithm");
        }
        y[k] = std::log(variances[k]);
        xbar += qubits[k];
        ybar += y[k];
    }
    xbar /= m;
    ybar /= m;
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t k = 0; k < qubits.size(); ++k) {
        const double dx = qubits[k] - xbar;
        const double dy = y[k] - ybar;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw NumericError("decay fit needs distinct qubit counts");

    DecayFit fit;
    fit.points = qubits.size();
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    fit.b_hat = std::exp(-fit.slope);
    double ss_res = 0.0;
    for (std::size_t k = 0; k < qubits.size(); ++k) {
        const double r = y[k] - (fit.intercept + fit.slope * qubits[k]);
        ss_res += r * r;
    }
    fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
    return fit;
}

DecayFit fit_decay(const ScanResult& result) {
    std::vector<int> n;
    std::vector<double> v;
    for (const auto& row : result.rows) {
        n.push_back(row.qubits);
        v.push_back(row.samples.estimate.variance);
    }
    return fit_decay(n, v);
}

// ---- tail and mean checks -------------------------------------------------

double tail_multiplier(std::size_t order) {
    if (order < 1) throw std::invalid_argument("order must be at least 1");
    return std::ldexp(1.0, static_cast<int>(order) - 1);
}

std::vector<TailReport> tail_check(std::span<const double> values, double reference_variance,
                                   std::span<const double> thresholds, std::size_t order) {
    if (values.empty()) throw std::invalid_argument("tail check needs samples");
    const double multiplier = tail_multiplier(order);
    const double count = static_cast<double>(values.size());
    std::vector<TailReport> out;
    for (double c : thresholds) {
        if (!(c > 0.0)) throw std::invalid_argument("tail thresholds must be positive");
        const auto hits = std::count_if(values.begin(), values.end(), [c](double v) { return std::abs(v) >= c; });
        TailReport r;
        r.threshold = c;
        r.empirical_frequency = static_cast<double>(hits) / count;
        r.bound_value = multiplier * reference_variance / (c * c);
        r.sampling_slack = 3.0 * std::sqrt(r.empirical_frequency * (1.0 - r.empirical_frequency) / count);
        r.passes = r.empirical_frequency <= r.bound_value + r.sampling_slack;
        out.push_back(r);
    }
    return out;
}

MeanZeroReport mean_zero_check(std::span<const double> gradient_samples, std::size_t index) {
    const auto e = estimate(gradient_samples);
    return {index, e.mean, e.stderr_mean, std::abs(e.mean) <= 3.0 * e.stderr_mean};
}

// ---- files ----------------------------------------------------------------

void write_scan_csv(std::ostream& os, const ScanResult& result) {
    os << "n,layers,quantity,samples,mean,variance,stderr_mean,stderr_variance,seed\n";
    for (const auto& row : result.rows) {
        const auto& e = row.samples.estimate;
        os << row.qubits << ',' << row.layers << ',' << csv_quote(result.quantity) << ',' << e.samples << ','
           << format_shortest(e.mean) << ',' << format_shortest(e.variance) << ',' << format_shortest(e.stderr_mean)
           << ',' << format_shortest(e.stderr_variance) << ',' << result.seed << '\n';
    }
}

void write_raw(std::ostream& os, const ScanResult& result) {
    os << "# shiftgrad raw samples\n";
    for (const auto& row : result.rows) {
        const double ref_var = unbiased_variance(row.samples.reference_gradient);
        os << "block n=" << row.qubits << " layers=" << row.layers << " quantity=" << result.quantity
           << " order=" << result.order << " samples=" << row.samples.values.size()
           << " reference_variance=" << format_shortest(ref_var) << " seed=" << result.seed << '\n';
        for (double v : row.samples.values) os << format_shortest(v) << '\n';
    }
}

std::vector<RawBlock> read_raw(std::istream& is) {
    std::vector<RawBlock> blocks;
    std::vector<std::size_t> expected;
    std::string line;
    std::size_t number = 0;
    while (std::getline(is, line)) {
        ++number;
        if (line.empty() || line[0] == '#') continue;
        if (line.starts_with("block ")) {
            RawBlock b;
            std::size_t samples = 0;
            bool have_n = false;
            bool have_ref = false;
            std::istringstream ls(line.substr(6));
            for (std::string kv; ls >> kv;) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos) throw FormatError("expected key=value, got '" + kv + "'", number);
                const std::string key = kv.substr(0, eq);
                const std::string val = kv.substr(eq + 1);
                try {
                    if (key == "n") {
                        b.qubits = static_cast<int>(parse_integer(val));
                        have_n = true;
                    } else if (key == "layers") {
                        b.layers = static_cast<int>(parse_integer(val));
                    } else if (key == "quantity") {
                        b.quantity = val;
                    } else if (key == "order") {
                        b.order = static_cast<std::size_t>(parse_integer(val));
                    } else if (key == "samples") {
                        samples = static_cast<std::size_t>(parse_integer(val));
                    } else if (key == "reference_variance") {
                        b.reference_variance = parse_double(val);
                        have_ref = true;
                    }
                } catch (const std::invalid_argument& e) {
                    throw FormatError(e.what(), number);
                }
            }
            if (!have_n || !have_ref || b.order < 1) {
                throw FormatError("block header needs n, order and reference_variance", number);
            }
            if (!blocks.empty() && blocks.back().values.size() != expected.back()) {
                throw FormatError("previous block has " + std::to_string(blocks.back().values.size()) +
                                      " values, header promised " + std::to_string(expected.back()),
                                  number);
            }
            b.values.reserve(samples);
            blocks.push_back(std::move(b));
            expected.push_back(samples);
            continue;
        }
        if (blocks.empty()) throw FormatError("value before first block header", number);
        try {
            blocks.back().values.push_back(parse_double(line));
        } catch (const std::invalid_argument& e) {
            throw FormatError(e.what(), number);
        }
    }
    if (blocks.empty()) throw FormatError("raw file has no blocks");
    if (blocks.back().values.size() != expected.back()) {
        throw FormatError("last block has " + std::to_string(blocks.back().values.size()) +
                          " values, header promised " + std::to_string(expected.back()));
    }
    return blocks;
}

void write_tail_csv(std::ostream& os, const std::vector<RawBlock>& blocks, std::span<const double> thresholds) {
    os << "n,layers,quantity,order,samples,c,empirical_frequency,bound,slack,pass\n";
    for (const auto& b : blocks) {
        for (const auto& r : tail_check(b.values, b.reference_variance, thresholds, b.order)) {
            os << b.qubits << ',' << b.layers << ',' << csv_quote(b.quantity) << ',' << b.order << ','
               << b.values.size() << ',' << format_shortest(r.threshold) << ','
               << format_shortest(r.empirical_frequency) << ',' << format_shortest(r.bound_value) << ','
               << format_shortest(r.sampling_slack) << ',' << (r.passes ? "true" : "false") << '\n';
        }
    }
}

}  // namespace shiftgrad
