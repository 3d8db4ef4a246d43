#include "shiftgrad/pascal.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace shiftgrad {

namespace {

constexpr int kHalfWidth = 3;  // |numerator| <= 3, i.e. |omega| <= 3/2

std::int64_t pow2(int k) { return std::int64_t{1} << k; }

int minus_one_pow(int k) { return (k % 2 == 0) ? 1 : -1; }

}  // namespace

HalfShift::HalfShift(int numerator) : numerator_(numerator) {
    if (numerator < -kHalfWidth || numerator > kHalfWidth) {
        throw std::invalid_argument("half shift numerator out of range: " +
                                    std::to_string(numerator));
    }
}

std::string HalfShift::to_string() const {
    if (numerator_ % 2 == 0) return std::to_string(numerator_ / 2);
    return std::to_string(numerator_) + "/2";
}

std::int64_t coefficient(HalfShift omega, int n) {
    if (n < 0) throw std::invalid_argument("negative multiplicity");
    const int w = omega.numerator();
    // parity: even n pairs with integer omega, odd n with half-integer omega
    if ((w % 2 == 0) != (n % 2 == 0)) return 0;

    if (n == 0) return w == 0 ? 1 : 0;
    if (n == 1) {
        if (w == 1) return 1;
        if (w == -1) return -1;
        return 0;
    }
    if (n % 2 == 0) {
        if (w == 0) return minus_one_pow(n / 2) * pow2(n - 1);
        if (w == 2 || w == -2) return minus_one_pow((n - 2) / 2) * pow2(n - 2);
        return 0;
    }
    const int sign = minus_one_pow((n - 1) / 2);
    switch (w) {
        case 1: return sign * 3 * pow2(n - 3);
        case -1: return -sign * 3 * pow2(n - 3);
        case 3: return -sign * pow2(n - 3);
        case -3: return sign * pow2(n - 3);
        default: return 0;
    }
}

std::vector<HalfShift> row_support(int n) {
    if (n < 0) throw std::invalid_argument("negative multiplicity");
    if (n == 0) return {HalfShift(0)};
    if (n == 1) return {HalfShift(-1), HalfShift(1)};
    if (n % 2 == 0) return {HalfShift(-2), HalfShift(0), HalfShift(2)};
    return {HalfShift(-3), HalfShift(-1), HalfShift(1), HalfShift(3)};
}

std::int64_t CoefficientTable::at(HalfShift omega, int n) const {
    const auto& r = row(n);
    auto it = r.find(omega);
    return it == r.end() ? 0 : it->second;
}

CoefficientTable build_tree(int max_order) {
    if (max_order < 0) throw std::invalid_argument("max_order must be non-negative");
    if (max_order > kMaxTreeOrder) {
        throw std::invalid_argument("max_order " + std::to_string(max_order) +
                                    " exceeds cap " + std::to_string(kMaxTreeOrder));
    }

    // Unsigned entries indexed by numerator + 4, so the omega = +-2 overflow of
    // a step has a slot before it is folded.
    constexpr int kOffset = 4;
    std::vector<std::int64_t> current(2 * kOffset + 1, 0);
    current[kOffset] = 1;

    std::vector<CoefficientTable::Row> rows;
    rows.reserve(static_cast<std::size_t>(max_order) + 1);
    for (int n = 0;; ++n) {
        CoefficientTable::Row row;
        for (HalfShift omega : row_support(n)) {
            const std::int64_t magnitude = current[omega.numerator() + kOffset];
            const std::int64_t signed_value = coefficient(omega, n);
            row[omega] = signed_value < 0 ? -magnitude : magnitude;
        }
        rows.push_back(std::move(row));
        if (n == max_order) break;

        std::vector<std::int64_t> next(current.size(), 0);
        for (int w = -kHalfWidth - 1; w <= kHalfWidth + 1; ++w) {
            const int i = w + kOffset;
            const std::int64_t left = (i - 1 >= 0) ? current[i - 1] : 0;
            const std::int64_t right = (i + 1 < static_cast<int>(current.size())) ? current[i + 1] : 0;
            next[i] = left + right;
        }
        // theta + 2 pi equals theta up to a global phase: fold |omega| = 2 into the centre
        next[kOffset] += next[kOffset - 4] + next[kOffset + 4];
        next[kOffset - 4] = 0;
        next[kOffset + 4] = 0;
        current = std::move(next);
    }
    return CoefficientTable(std::move(rows));
}

std::vector<std::size_t> MultiIndex::distinct_indices() const {
    std::vector<std::size_t> out;
    out.reserve(groups_.size());
    for (const auto& g : groups_) out.push_back(g.index);
    return out;
}

std::size_t MultiIndex::max_index() const { return groups_.back().index; }

MultiIndex normalize(std::vector<std::size_t> raw, std::size_t cap) {
    if (raw.empty()) throw std::invalid_argument("multi-index must be nonempty");
    if (raw.size() > cap) {
        throw std::invalid_argument("derivative order " + std::to_string(raw.size()) +
                                    " exceeds cap " + std::to_string(cap));
    }
    std::vector<std::size_t> sorted = raw;
    std::sort(sorted.begin(), sorted.end());

    MultiIndex out;
    out.raw_ = std::move(raw);
    for (std::size_t idx : sorted) {
        if (!out.groups_.empty() && out.groups_.back().index == idx) {
            ++out.groups_.back().multiplicity;
        } else {
            out.groups_.push_back({idx, 1});
        }
    }
    return out;
}

ShiftPlan shift_terms(const MultiIndex& alpha) {
    ShiftPlan plan{alpha, {}, std::int64_t{1} << alpha.order()};

    // nonzero entries per group, most positive shift first
    std::vector<std::vector<std::pair<HalfShift, std::int64_t>>> choices;
    for (const auto& g : alpha.groups()) {
        auto support = row_support(g.multiplicity);
        std::vector<std::pair<HalfShift, std::int64_t>> row;
        for (auto it = support.rbegin(); it != support.rend(); ++it) {
            const std::int64_t d = coefficient(*it, g.multiplicity);
            if (d != 0) row.emplace_back(*it, d);
        }
        choices.push_back(std::move(row));
    }

    const std::size_t m = choices.size();
    std::vector<std::size_t> cursor(m, 0);
    while (true) {
        ShiftTerm term;
        term.omegas.reserve(m);
        term.weight = 1;
        for (std::size_t k = 0; k < m; ++k) {
            term.omegas.push_back(choices[k][cursor[k]].first);
            term.weight *= choices[k][cursor[k]].second;
        }
        plan.terms.push_back(std::move(term));

        // odometer, last group fastest
        std::size_t k = m;
        while (k > 0) {
            --k;
            if (++cursor[k] < choices[k].size()) break;
            cursor[k] = 0;
            if (k == 0) return plan;
        }
    }
}

std::string serialize_plan(const ShiftPlan& plan) {
    std::ostringstream os;
    os << "alpha=";
    for (std::size_t i = 0; i < plan.alpha.raw().size(); ++i) {
        if (i) os << ',';
        os << plan.alpha.raw()[i];
    }
    os << " normalizer=" << plan.normalizer << '\n';
    for (const auto& term : plan.terms) {
        for (std::size_t k = 0; k < term.omegas.size(); ++k) {
            if (k) os << ',';
            os << term.omegas[k].numerator();
        }
        os << ' ' << term.weight << '\n';
    }
    return os.str();
}

}  // namespace shiftgrad
