#include <array>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <type_traits>
#include <utility>

#include "shiftgrad/circuit.hpp"
#include "shiftgrad/errors.hpp"
#include "shiftgrad/format.hpp"

namespace shiftgrad {

namespace {

struct Line {
    std::size_t number;
    std::vector<std::string> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
    std::vector<Line> out;
    std::size_t number = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        ++number;
        std::string_view raw = text.substr(pos, end - pos);
        if (auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        std::istringstream is{std::string(raw)};
        Line line{number, {}};
        for (std::string tok; is >> tok;) line.tokens.push_back(tok);
        if (!line.tokens.empty()) out.push_back(std::move(line));
        pos = end + 1;
    }
    return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = s.find(sep, pos);
        out.emplace_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
        if (next == std::string_view::npos) return out;
        pos = next + 1;
    }
}

int to_qubit(const std::string& tok, std::size_t line) {
    try {
        const long long q = parse_integer(tok);
        if (q < 0 || q >= kMaxQubits) throw FormatError("qubit index out of range: " + tok, line);
        return static_cast<int>(q);
    } catch (const std::invalid_argument&) {
        throw FormatError("expected qubit index, got '" + tok + "'", line);
    }
}

Complex to_complex(const std::string& tok, std::size_t line) {
    const auto parts = split(tok, ',');
    if (parts.size() != 2) throw FormatError("complex entry must be 're,im': '" + tok + "'", line);
    try {
        return {parse_double(parts[0]), parse_double(parts[1])};
    } catch (const std::invalid_argument& e) {
        throw FormatError(e.what(), line);
    }
}

std::string complex_token(Complex c) { return format_shortest(c.real()) + "," + format_shortest(c.imag()); }

std::size_t header_value(const Line& line, const char* key) {
    if (line.tokens.size() != 2) throw FormatError(std::string("expected '") + key + " <count>'", line.number);
    try {
        const long long v = parse_integer(line.tokens[1]);
        if (v < 0) throw std::invalid_argument("negative");
        return static_cast<std::size_t>(v);
    } catch (const std::invalid_argument&) {
        throw FormatError(std::string("invalid ") + key + " count '" + line.tokens[1] + "'", line.number);
    }
}

Gate parse_rotation(const Line& line, int n) {
    const auto& t = line.tokens;
    if (t.size() < 3) throw FormatError("rot needs a Pauli word and a parameter", line.number);
    const std::string& head = t[1];
    std::size_t split_at = 0;
    while (split_at < head.size() && std::isalpha(static_cast<unsigned char>(head[split_at]))) ++split_at;
    const std::string letters = head.substr(0, split_at);
    if (letters.empty()) throw FormatError("rot needs Pauli letters, got '" + head + "'", line.number);
    for (char c : letters) {
        if (c != 'X' && c != 'Y' && c != 'Z' && c != 'I') {
            throw FormatError(std::string("invalid Pauli letter '") + c + "'", line.number);
        }
    }
    std::vector<int> qubits;
    if (split_at < head.size()) qubits.push_back(to_qubit(head.substr(split_at), line.number));
    for (std::size_t k = 2; k + 1 < t.size(); ++k) qubits.push_back(to_qubit(t[k], line.number));
    if (qubits.size() != letters.size()) {
        throw FormatError("rot word '" + letters + "' needs " + std::to_string(letters.size()) + " qubits, got " +
                              std::to_string(qubits.size()),
                          line.number);
    }
    const std::string& ptok = t.back();
    if (ptok.size() < 2 || ptok[0] != 'p') throw FormatError("expected parameter 'p<index>', got '" + ptok + "'", line.number);
    std::size_t param = 0;
    try {
        const long long v = parse_integer(ptok.substr(1));
        if (v < 0) throw std::invalid_argument("negative");
        param = static_cast<std::size_t>(v);
    } catch (const std::invalid_argument&) {
        throw FormatError("invalid parameter '" + ptok + "'", line.number);
    }
    try {
        return Rotation{PauliWord::on_qubits(n, letters, qubits), param};
    } catch (const std::exception& e) {
        throw FormatError(e.what(), line.number);
    }
}

Gate parse_gate(const Line& line, int n) {
    const auto& t = line.tokens;
    const std::string& name = t[0];
    const auto expect = [&](std::size_t count) {
        if (t.size() != count) {
            throw FormatError(name + " expects " + std::to_string(count - 1) + " operands", line.number);
        }
    };
    const auto pair = [&]() {
        const int a = to_qubit(t[1], line.number);
        const int b = to_qubit(t[2], line.number);
        if (a == b) throw FormatError(name + " needs two distinct qubits", line.number);
        return std::pair{a, b};
    };
    try {
        if (name == "rot") return parse_rotation(line, n);
        if (name == "cz") {
            expect(3);
            const auto [a, b] = pair();
            return FixedGate{gate::CZ{a, b}};
        }
        if (name == "cnot") {
            expect(3);
            const auto [c, target] = pair();
            return FixedGate{gate::CNOT{c, target}};
        }
        if (name == "h") {
            expect(2);
            return FixedGate{gate::H{to_qubit(t[1], line.number)}};
        }
        if (name == "s") {
            expect(2);
            return FixedGate{gate::S{to_qubit(t[1], line.number)}};
        }
        if (name == "u2") {
            expect(6);
            Matrix2 m;
            for (int k = 0; k < 4; ++k) m[k] = to_complex(t[2 + k], line.number);
            return FixedGate{make_unitary1(to_qubit(t[1], line.number), m)};
        }
        if (name == "u4") {
            expect(19);
            Matrix4 m;
            for (int k = 0; k < 16; ++k) m[k] = to_complex(t[3 + k], line.number);
            const auto [a, b] = pair();
            return FixedGate{make_unitary2(a, b, m)};
        }
    } catch (const FormatError&) {
        throw;
    } catch (const std::exception& e) {
        throw FormatError(e.what(), line.number);
    }
    throw FormatError("unknown gate '" + name + "'", line.number);
}

std::array<Complex, 2> parse_factor(const std::string& tok) {
    const double r = 1.0 / std::sqrt(2.0);
    if (tok == "0") return {Complex(1, 0), Complex(0, 0)};
    if (tok == "1") return {Complex(0, 0), Complex(1, 0)};
    if (tok == "+") return {Complex(r, 0), Complex(r, 0)};
    if (tok == "-") return {Complex(r, 0), Complex(-r, 0)};
    if (tok == "+i") return {Complex(r, 0), Complex(0, r)};
    if (tok == "-i") return {Complex(r, 0), Complex(0, -r)};
    const auto parts = split(tok, ',');
    if (parts.size() != 4) throw std::invalid_argument("product factor must be a label or 're0,im0,re1,im1': '" + tok + "'");
    return {Complex(parse_double(parts[0]), parse_double(parts[1])),
            Complex(parse_double(parts[2]), parse_double(parts[3]))};
}

std::string_view strip_prefix(std::string_view text, std::string_view prefix) {
    return text.substr(prefix.size());
}

}  // namespace

ParamCircuit parse_circuit(std::string_view text) {
    const auto lines = tokenize(text);
    int n = -1;
    long long p = -1;
    std::vector<Gate> gates;
    std::vector<std::size_t> rotation_line;
    for (const auto& line : lines) {
        const auto& key = line.tokens[0];
        if (key == "qubits") {
            if (n >= 0) throw FormatError("duplicate 'qubits' header", line.number);
            const auto v = header_value(line, "qubits");
            if (v < 1 || v > static_cast<std::size_t>(kMaxQubits)) throw FormatError("qubit count out of range", line.number);
            n = static_cast<int>(v);
            continue;
        }
        if (key == "params") {
            if (p >= 0) throw FormatError("duplicate 'params' header", line.number);
            p = static_cast<long long>(header_value(line, "params"));
            continue;
        }
        if (n < 0 || p < 0) throw FormatError("'qubits' and 'params' headers must precede gates", line.number);
        Gate g = parse_gate(line, n);
        if (const auto* r = std::get_if<Rotation>(&g)) {
            if (r->param >= static_cast<std::size_t>(p)) {
                throw FormatError("parameter p" + std::to_string(r->param) + " out of range", line.number);
            }
            for (std::size_t k = 0; k < gates.size(); ++k) {
                const auto* prev = std::get_if<Rotation>(&gates[k]);
                if (prev && prev->param == r->param) {
                    throw FormatError("parameter reused: p" + std::to_string(r->param) + " (first used on line " +
                                          std::to_string(rotation_line[k]) + ")",
                                      line.number);
                }
            }
        } else if (max_qubit(std::get<FixedGate>(g)) >= n) {
            throw FormatError("qubit index out of range", line.number);
        }
        gates.push_back(std::move(g));
        rotation_line.push_back(line.number);
    }
    if (n < 0) throw FormatError("missing 'qubits' header");
    if (p < 0) throw FormatError("missing 'params' header");
    try {
        return ParamCircuit(n, static_cast<std::size_t>(p), std::move(gates));
    } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
    }
}

std::string serialize_circuit(const ParamCircuit& circuit) {
    std::ostringstream os;
    os << "qubits " << circuit.qubits() << '\n';
    os << "params " << circuit.parameter_count() << '\n';
    for (const auto& g : circuit.gates()) {
        if (const auto* r = std::get_if<Rotation>(&g)) {
            std::string letters;
            std::vector<int> qubits;
            const auto& word = r->word.letters();
            for (std::size_t q = 0; q < word.size(); ++q) {
                if (word[q] == 'I') continue;
                letters.push_back(word[q]);
                qubits.push_back(static_cast<int>(q));
            }
            os << "rot " << letters;
            if (qubits.size() == 1) {
                os << qubits[0];
            } else {
                for (int q : qubits) os << ' ' << q;
            }
            os << " p" << r->param << '\n';
            continue;
        }
        std::visit(
            [&os](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, gate::CZ>) {
                    os << "cz " << x.a << ' ' << x.b;
                } else if constexpr (std::is_same_v<T, gate::CNOT>) {
                    os << "cnot " << x.control << ' ' << x.target;
                } else if constexpr (std::is_same_v<T, gate::H>) {
                    os << "h " << x.q;
                } else if constexpr (std::is_same_v<T, gate::S>) {
                    os << "s " << x.q;
                } else if constexpr (std::is_same_v<T, gate::Unitary1>) {
                    os << "u2 " << x.q;
                    for (const auto& c : x.m) os << ' ' << complex_token(c);
                } else {
                    os << "u4 " << x.q1 << ' ' << x.q2;
                    for (const auto& c : x.m) os << ' ' << complex_token(c);
                }
            },
            std::get<FixedGate>(g));
        os << '\n';
    }
    return os.str();
}

StateSpec parse_state_spec(std::string_view text, int qubits) {
    StateSpec spec;
    if (text.starts_with("basis:")) {
        const std::string bits(strip_prefix(text, "basis:"));
        basis_index(bits);
        spec = BasisState{bits};
    } else if (text.starts_with("product:")) {
        ProductState product;
        for (const auto& f : split(strip_prefix(text, "product:"), ';')) product.factors.push_back(parse_factor(f));
        spec = std::move(product);
    } else {
        throw std::invalid_argument("state spec must start with 'basis:' or 'product:': '" + std::string(text) + "'");
    }
    if (spec_qubits(spec) != qubits) {
        throw std::invalid_argument("state spec has " + std::to_string(spec_qubits(spec)) + " qubits, circuit has " +
                                    std::to_string(qubits));
    }
    prepare(spec);  // validates normalization
    return spec;
}

InputState parse_input_state(std::string_view text, int qubits) {
    if (!text.starts_with("ensemble:")) return parse_state_spec(text, qubits);
    std::vector<WeightedState> ensemble;
    for (const auto& member : split(strip_prefix(text, "ensemble:"), '|')) {
        const auto at = member.find('@');
        if (at == std::string::npos) throw std::invalid_argument("ensemble member must be '<weight>@<state>'");
        ensemble.push_back({parse_double(member.substr(0, at)), parse_state_spec(member.substr(at + 1), qubits)});
    }
    return ensemble;
}

Observable parse_observable(std::string_view text, int qubits) {
    if (text == "global") return global_projector(qubits);
    if (text == "local") return local_z_average(qubits);
    if (text.starts_with("projector:")) {
        const std::string bits(strip_prefix(text, "projector:"));
        basis_index(bits);
        if (static_cast<int>(bits.size()) != qubits) throw std::invalid_argument("projector dimension mismatch");
        return BasisProjector{bits};
    }
    if (text.starts_with("pauli:")) {
        PauliSum sum;
        for (const auto& term : split(strip_prefix(text, "pauli:"), ';')) {
            const auto star = term.find('*');
            if (star == std::string::npos) throw std::invalid_argument("Pauli term must be '<coef>*<word>'");
            PauliWord word(term.substr(star + 1));
            if (word.qubits() != qubits) throw std::invalid_argument("Pauli word dimension mismatch");
            sum.terms.push_back({parse_double(term.substr(0, star)), std::move(word)});
        }
        return sum;
    }
    throw std::invalid_argument("unknown observable '" + std::string(text) + "'");
}

std::vector<CostTerm> parse_cost_terms(std::string_view text, int qubits) {
    std::vector<CostTerm> terms;
    for (const auto& line : tokenize(text)) {
        const auto& key = line.tokens[0];
        if (key == "circuit") {
            if (line.tokens.size() != 2) throw FormatError("expected 'circuit <path>'", line.number);
            continue;
        }
        if (key != "term") throw FormatError("unknown cost directive '" + key + "'", line.number);
        if (line.tokens.size() != 3) throw FormatError("expected 'term <state> <observable>'", line.number);
        try {
            terms.push_back({parse_input_state(line.tokens[1], qubits), parse_observable(line.tokens[2], qubits)});
        } catch (const std::exception& e) {
            throw FormatError(e.what(), line.number);
        }
    }
    if (terms.empty()) throw FormatError("cost file has no 'term' lines");
    return terms;
}

std::string cost_circuit_path(std::string_view text) {
    for (const auto& line : tokenize(text)) {
        if (line.tokens[0] == "circuit" && line.tokens.size() == 2) return line.tokens[1];
    }
    return {};
}

}  // namespace shiftgrad
