#include "shiftgrad/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "shiftgrad/bpscan.hpp"
#include "shiftgrad/circuit.hpp"
#include "shiftgrad/deriv.hpp"
#include "shiftgrad/errors.hpp"
#include "shiftgrad/format.hpp"
#include "shiftgrad/pascal.hpp"

namespace shiftgrad::cli {

namespace {

namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// FormatError or I/O failure tied to a file.
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string tok; std::getline(ss, tok, ',');) out.push_back(tok);
    if (out.empty()) throw UsageError("empty list");
    return out;
}

std::vector<double> parse_real_list(const std::string& flag, const std::string& text) {
    std::vector<double> out;
    try {
        for (const auto& tok : split_list(text)) out.push_back(parse_double(tok));
    } catch (const std::exception& e) {
        throw UsageError(flag + ": " + e.what());
    }
    return out;
}

std::vector<std::size_t> parse_index_list(const std::string& flag, const std::string& text) {
    std::vector<std::size_t> out;
    try {
        for (const auto& tok : split_list(text)) {
            const long long v = parse_integer(tok);
            if (v < 0) throw std::invalid_argument("negative index " + tok);
            out.push_back(static_cast<std::size_t>(v));
        }
    } catch (const std::exception& e) {
        throw UsageError(flag + ": " + e.what());
    }
    return out;
}

/// `a:b:s` inclusive range or comma list.
std::vector<int> parse_qubit_list(const std::string& text) {
    std::vector<int> out;
    try {
        if (text.find(':') != std::string::npos) {
            std::vector<std::string> parts;
            std::stringstream ss(text);
            for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(tok);
            if (parts.size() != 3) throw std::invalid_argument("range must be start:stop:step");
            const long long a = parse_integer(parts[0]);
            const long long b = parse_integer(parts[1]);
            const long long s = parse_integer(parts[2]);
            if (s < 1) throw std::invalid_argument("step must be positive");
            for (long long n = a; n <= b; n += s) out.push_back(static_cast<int>(n));
        } else {
            for (const auto& tok : split_list(text)) out.push_back(static_cast<int>(parse_integer(tok)));
        }
    } catch (const std::exception& e) {
        throw UsageError(std::string("--qubits: ") + e.what());
    }
    return out;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path.string() + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CostSpec load_cost(const std::string& circuit_flag, const std::string& cost_flag) {
    const fs::path cost_path = fs::absolute(cost_flag);
    const std::string cost_text = read_file(cost_path);
    fs::path circuit_path;
    if (!circuit_flag.empty()) {
        circuit_path = fs::absolute(circuit_flag);
    } else {
        std::string named;
        try {
            named = cost_circuit_path(cost_text);
        } catch (const FormatError& e) {
            throw InputError(cost_path.string() + ": " + e.what());
        }
        if (named.empty()) throw UsageError("--circuit not given and cost file names no circuit");
        circuit_path = fs::path(named).is_absolute() ? fs::path(named) : cost_path.parent_path() / named;
    }
    const std::string circuit_text = read_file(circuit_path);

    ParamCircuit circuit = [&] {
        try {
            return parse_circuit(circuit_text);
        } catch (const FormatError& e) {
            throw InputError(circuit_path.string() + ": " + e.what());
        }
    }();
    std::vector<CostTerm> terms;
    try {
        terms = parse_cost_terms(cost_text, circuit.qubits());
    } catch (const FormatError& e) {
        throw InputError(cost_path.string() + ": " + e.what());
    }
    try {
        return CostSpec(std::move(circuit), std::move(terms));
    } catch (const std::invalid_argument& e) {
        throw InputError(cost_path.string() + ": " + e.what());
    }
}

ParameterVector theta_for(const CostSpec& spec, const std::string& text) {
    auto theta = parse_real_list("--theta", text);
    if (theta.size() != spec.parameter_count()) {
        throw UsageError("--theta has " + std::to_string(theta.size()) + " values, circuit has " +
                         std::to_string(spec.parameter_count()) + " parameters");
    }
    return theta;
}

/// Writes to `path`, or to `fallback` when path is empty.
template <typename Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& writer) {
    if (path.empty()) {
        writer(fallback);
        return;
    }
    std::ofstream f(fs::absolute(path), std::ios::binary);
    if (!f) throw InputError(path + ": cannot open for writing");
    writer(f);
    if (!f) throw InputError(path + ": write failed");
}

int threads_from_env() {
    const char* env = std::getenv("SHIFTGRAD_THREADS");
    if (!env || !*env) return 0;
    try {
        const long long v = parse_integer(env);
        if (v < 0) throw std::invalid_argument("negative");
        return static_cast<int>(v);
    } catch (const std::exception&) {
        throw UsageError(std::string("SHIFTGRAD_THREADS must be a non-negative integer, got '") + env + "'");
    }
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact parameter-shift derivatives and barren-plateau variance scans", "shiftgrad"};
    app.require_subcommand(1);

    // pascal
    auto* pascal_cmd = app.add_subcommand("pascal", "Print rows of the Pascal tree");
    int max_order = 0;
    bool signed_rows = false;
    pascal_cmd->add_option("--max-order", max_order, "Last row")->required()->check(CLI::NonNegativeNumber);
    pascal_cmd->add_flag("--signed", signed_rows, "Print signed shift coefficients");

    // shift-terms
    auto* terms_cmd = app.add_subcommand("shift-terms", "Print the weighted shift plan of a multi-index");
    std::string alpha_text;
    terms_cmd->add_option("--alpha", alpha_text, "Comma-separated parameter indices")->required();

    // eval / deriv / hessian share circuit, cost and theta
    std::string circuit_file;
    std::string cost_file;
    std::string theta_text;
    const auto add_cost_flags = [&](CLI::App* cmd) {
        cmd->add_option("--circuit", circuit_file, "Circuit file");
        cmd->add_option("--cost", cost_file, "Cost file")->required();
        cmd->add_option("--theta", theta_text, "Comma-separated angles (radians)")->required();
    };
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate the cost");
    add_cost_flags(eval_cmd);

    auto* deriv_cmd = app.add_subcommand("deriv", "Evaluate a partial derivative of any order");
    add_cost_flags(deriv_cmd);
    std::string method = "shift";
    double fd_step = 0.0;
    deriv_cmd->add_option("--alpha", alpha_text, "Comma-separated parameter indices")->required();
    deriv_cmd->add_option("--method", method, "shift, fd or sinusoid")
        ->check(CLI::IsMember({"shift", "fd", "sinusoid"}));
    auto* fd_opt = deriv_cmd->add_option("--fd-step", fd_step, "Finite-difference step")->check(CLI::PositiveNumber);

    auto* hess_cmd = app.add_subcommand("hessian", "Write the full Hessian as CSV");
    add_cost_flags(hess_cmd);
    std::string out_path;
    hess_cmd->add_option("--out", out_path, "Output CSV (default stdout)");

    // bp-scan
    auto* scan_cmd = app.add_subcommand("bp-scan", "Monte-Carlo derivative variance scan over qubit counts");
    std::string flavor = "ry";
    std::string observable = "global";
    std::string qubits_text = "2:10:2";
    std::string layers_text = "linear:1";
    std::size_t samples = 500;
    std::string quantity_text = "grad:0";
    std::uint64_t seed = 0;
    std::string raw_path;
    scan_cmd->add_option("--flavor", flavor, "ry, ryz or haar-brick")->check(CLI::IsMember({"ry", "ryz", "haar-brick"}));
    scan_cmd->add_option("--observable", observable, "global or local")->check(CLI::IsMember({"global", "local"}));
    scan_cmd->add_option("--qubits", qubits_text, "start:stop:step or comma list");
    scan_cmd->add_option("--layers", layers_text, "linear:c or fixed:L");
    scan_cmd->add_option("--samples", samples, "Parameter draws per qubit count");
    scan_cmd->add_option("--quantity", quantity_text, "grad:i, hess:i,j or alpha:i,j,...");
    scan_cmd->add_option("--seed", seed, "Sampling seed (default 0)");
    scan_cmd->add_option("--out", out_path, "Output CSV (default stdout)");
    scan_cmd->add_option("--raw", raw_path, "Raw sample sidecar (default <out>.raw)");

    // tail-check
    auto* tail_cmd = app.add_subcommand("tail-check", "Compare exceedance frequencies with Chebyshev bounds");
    std::string from_path;
    std::string c_text = "0.01,0.05,0.1";
    tail_cmd->add_option("--from", from_path, "Raw sample file written by bp-scan")->required();
    tail_cmd->add_option("--c", c_text, "Comma-separated thresholds");
    tail_cmd->add_option("--out", out_path, "Output CSV (default stdout)");

    std::vector<const char*> argv;
    argv.push_back("shiftgrad");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return usage_error;
    }

    try {
        if (pascal_cmd->parsed()) {
            if (max_order > kMaxTreeOrder) throw UsageError("--max-order exceeds " + std::to_string(kMaxTreeOrder));
            const auto table = build_tree(max_order);
            for (int n = 0; n <= table.max_order(); ++n) {
                std::string omegas;
                std::string values;
                for (const auto& [omega, d] : table.row(n)) {
                    if (!omegas.empty()) {
                        omegas += ',';
                        values += ',';
                    }
                    omegas += omega.to_string();
                    values += std::to_string(signed_rows ? d : (d < 0 ? -d : d));
                }
                out << "N=" << n << " omega=" << omegas << " d=" << values << '\n';
            }
            return ok;
        }

        if (terms_cmd->parsed()) {
            MultiIndex alpha = [&] {
                try {
                    return normalize(parse_index_list("--alpha", alpha_text));
                } catch (const std::invalid_argument& e) {
                    throw UsageError(std::string("--alpha: ") + e.what());
                }
            }();
            out << serialize_plan(shift_terms(alpha));
            return ok;
        }

        if (eval_cmd->parsed()) {
            const CostSpec spec = load_cost(circuit_file, cost_file);
            const auto theta = theta_for(spec, theta_text);
            out << format_g15(evaluate_cost(spec, theta)) << '\n';
            return ok;
        }

        if (deriv_cmd->parsed()) {
            const CostSpec spec = load_cost(circuit_file, cost_file);
            const auto theta = theta_for(spec, theta_text);
            MultiIndex alpha = [&] {
                try {
                    return normalize(parse_index_list("--alpha", alpha_text));
                } catch (const std::invalid_argument& e) {
                    throw UsageError(std::string("--alpha: ") + e.what());
                }
            }();
            if (alpha.max_index() >= spec.parameter_count()) {
                throw UsageError("--alpha index " + std::to_string(alpha.max_index()) + " out of range (p=" +
                                 std::to_string(spec.parameter_count()) + ")");
            }
            if (fd_opt->count() && method != "fd") throw UsageError("--fd-step only applies to --method fd");
            const Objective cost(spec);
            double value = 0.0;
            if (method == "shift") {
                value = higher_derivative(cost, theta, alpha);
            } else if (method == "fd") {
                value = finite_difference(cost, theta, alpha,
                                          fd_opt->count() ? std::optional<double>(fd_step) : std::nullopt);
            } else {
                if (alpha.distinct_count() != 1) throw UsageError("--method sinusoid needs a single repeated index");
                value = sinusoid_derivative(cost, theta, alpha.groups()[0].index, alpha.groups()[0].multiplicity);
            }
            out << format_g15(value) << '\n' << "evaluations=" << cost.evaluations() << '\n';
            return ok;
        }

        if (hess_cmd->parsed()) {
            const CostSpec spec = load_cost(circuit_file, cost_file);
            const auto theta = theta_for(spec, theta_text);
            const auto h = reference::hessian_serial(Objective(spec), theta);
            emit(out_path, out, [&](std::ostream& os) {
                for (std::size_t i = 0; i < h.size; ++i) {
                    for (std::size_t j = 0; j < h.size; ++j) os << (j ? "," : "") << format_shortest(h(i, j));
                    os << '\n';
                }
            });
            return ok;
        }

        if (scan_cmd->parsed()) {
            ScanConfig config;
            config.flavor = parse_flavor(flavor);
            config.observable = parse_observable_kind(observable);
            config.qubits = parse_qubit_list(qubits_text);
            try {
                config.layers = LayerRule::parse(layers_text);
            } catch (const std::invalid_argument& e) {
                throw UsageError(std::string("--layers: ") + e.what());
            }
            try {
                config.quantity = parse_quantity(quantity_text);
            } catch (const std::invalid_argument& e) {
                throw UsageError(std::string("--quantity: ") + e.what());
            }
            if (samples < 2) throw UsageError("--samples must be at least 2");
            config.samples = samples;
            config.seed = seed;
            config.threads = threads_from_env();

            ScanResult result;
            try {
                result = variance_scan(config);
            } catch (const std::invalid_argument& e) {
                throw UsageError(e.what());
            }
            emit(out_path, out, [&](std::ostream& os) { write_scan_csv(os, result); });
            const std::string sidecar = !raw_path.empty() ? raw_path : (out_path.empty() ? "" : out_path + ".raw");
            if (!sidecar.empty()) emit(sidecar, out, [&](std::ostream& os) { write_raw(os, result); });

            const DecayFit fit = fit_decay(result);
            out << "slope=" << format_shortest(fit.slope) << " b_hat=" << format_shortest(fit.b_hat)
                << " r2=" << format_shortest(fit.r_squared) << '\n';
            return ok;
        }

        if (tail_cmd->parsed()) {
            const auto thresholds = parse_real_list("--c", c_text);
            for (double c : thresholds) {
                if (!(c > 0.0)) throw UsageError("--c thresholds must be positive");
            }
            const fs::path path = fs::absolute(from_path);
            std::ifstream in(path, std::ios::binary);
            if (!in) throw InputError(path.string() + ": cannot open file");
            std::vector<RawBlock> blocks;
            try {
                blocks = read_raw(in);
            } catch (const FormatError& e) {
                throw InputError(path.string() + ": " + e.what());
            }
            emit(out_path, out, [&](std::ostream& os) { write_tail_csv(os, blocks, thresholds); });
            return ok;
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return input_error;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << '\n';
        return input_error;
    } catch (const NumericError& e) {
        err << "error: " << e.what() << '\n';
        return numeric_error;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const std::out_of_range& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return numeric_error;
    }
    return usage_error;
}

}  // namespace shiftgrad::cli
