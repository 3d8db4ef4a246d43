#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace shiftgrad {

/// Largest derivative order accepted by normalize() and build_tree().
inline constexpr std::size_t kMaxDerivativeOrder = 16;
/// Row cap for build_tree(); coefficients stay far below 2^63 here.
inline constexpr int kMaxTreeOrder = 60;

/**
 * A shift of `numerator/2 * pi` applied to one angle.
 *
 * Stored as an exact integer so coefficient lookup and term deduplication
 * never compare floating point values.
 */
class HalfShift {
public:
    constexpr HalfShift() = default;
    explicit HalfShift(int numerator);

    constexpr int numerator() const noexcept { return numerator_; }
    constexpr double radians_over_pi() const noexcept { return numerator_ / 2.0; }

    /// "1/2", "-3/2", "0", "1", ...
    std::string to_string() const;

    friend constexpr auto operator<=>(HalfShift, HalfShift) = default;

private:
    int numerator_ = 0;
};

/// Signed shift coefficient d_(omega, n) from the closed form. Zero off-support.
std::int64_t coefficient(HalfShift omega, int n);

/// Shifts of row n in left-to-right tree order (most negative first).
std::vector<HalfShift> row_support(int n);

class CoefficientTable {
public:
    using Row = std::map<HalfShift, std::int64_t>;

    explicit CoefficientTable(std::vector<Row> rows) : rows_(std::move(rows)) {}

    int max_order() const noexcept { return static_cast<int>(rows_.size()) - 1; }
    const Row& row(int n) const { return rows_.at(static_cast<std::size_t>(n)); }
    /// Zero for shifts outside the row.
    std::int64_t at(HalfShift omega, int n) const;

private:
    std::vector<Row> rows_;
};

/**
 * Builds rows 0..max_order of the width-four Pascal tree.
 *
 * Magnitudes come from the additive recursion with |omega| = 2 folded into
 * the central entry; signs come from the closed form.
 */
CoefficientTable build_tree(int max_order);

/// Derivative multi-index: raw ordered indices plus (index, multiplicity) groups.
class MultiIndex {
public:
    struct Group {
        std::size_t index;
        int multiplicity;
        friend bool operator==(const Group&, const Group&) = default;
    };

    const std::vector<std::size_t>& raw() const noexcept { return raw_; }
    const std::vector<Group>& groups() const noexcept { return groups_; }
    std::size_t order() const noexcept { return raw_.size(); }
    std::size_t distinct_count() const noexcept { return groups_.size(); }
    std::vector<std::size_t> distinct_indices() const;
    /// Largest parameter index referenced.
    std::size_t max_index() const;

    friend MultiIndex normalize(std::vector<std::size_t> raw, std::size_t cap);

private:
    std::vector<std::size_t> raw_;
    std::vector<Group> groups_;
};

/// Throws std::invalid_argument for empty input or order above `cap`.
MultiIndex normalize(std::vector<std::size_t> raw, std::size_t cap = kMaxDerivativeOrder);

struct ShiftTerm {
    std::vector<HalfShift> omegas;  // one per distinct index, in group order
    std::int64_t weight = 0;
};

struct ShiftPlan {
    MultiIndex alpha;
    std::vector<ShiftTerm> terms;
    std::int64_t normalizer = 1;  // 2^|alpha|
};

/// Cartesian product of the nonzero row entries for each distinct index.
ShiftPlan shift_terms(const MultiIndex& alpha);

/// Header `alpha=... normalizer=...` then `<numerators> <weight>` per term.
std::string serialize_plan(const ShiftPlan& plan);

}  // namespace shiftgrad
