#pragma once

#include "hvlgp/tree.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace hvlgp {

enum class ProblemKind : std::uint8_t { Order, Majority };

std::string_view to_string(ProblemKind kind);
ProblemKind parse_problem_kind(std::string_view s);

struct Problem {
    ProblemKind kind = ProblemKind::Order;
    std::uint32_t n = 1;
};

struct OrderResult {
    int fitness = 0;
    /// Expressed terminals in first-occurrence order; no index repeats.
    std::vector<Terminal> path;
};

/// ORDER: scan leaves left to right, expressing a terminal only if neither
/// it nor its complement was expressed before; count positive expressions.
OrderResult order_fitness(std::span<const Terminal> leaves, std::uint32_t n);

/// Fitness-only ORDER evaluation with a caller-owned scratch buffer.
int order_fitness_value(std::span<const Terminal> leaves, std::uint32_t n, std::vector<std::uint8_t>& seen);

/// Per-variable terminal counts for MAJORITY, indexed 1..n.
class DeficitProfile {
public:
    explicit DeficitProfile(std::uint32_t n);
    static DeficitProfile from_leaves(std::span<const Terminal> leaves, std::uint32_t n);

    std::uint32_t n() const noexcept { return static_cast<std::uint32_t>(pos_.size() - 1); }
    int positive_count(std::uint32_t i) const { return pos_.at(i); }
    int negated_count(std::uint32_t i) const { return neg_.at(i); }
    int deficit(std::uint32_t i) const { return neg_.at(i) - pos_.at(i); }
    /// max_i D_i
    int max_deficit() const;
    std::size_t total() const;

    /// x_i is expressed iff D_i <= 0 and c(x_i) > 0. Throws on bad index.
    bool expressed(std::uint32_t i) const;
    int fitness() const;

    void add(Terminal t);
    void remove(Terminal t);

    /// Applies the leaf-multiset change of a record; returns the fitness
    /// change it causes.
    int apply(const MutationRecord& r);

    friend bool operator==(const DeficitProfile&, const DeficitProfile&) = default;

private:
    void check_index(std::uint32_t i) const;
    bool expressed_unchecked(std::uint32_t i) const noexcept { return pos_[i] > 0 && neg_[i] <= pos_[i]; }

    std::vector<int> pos_;
    std::vector<int> neg_;
};

struct MajorityResult {
    int fitness = 0;
    DeficitProfile profile;
    /// Expressed positive terminals in index order.
    std::vector<Terminal> statements;
};

/// MAJORITY: x_i counts iff c(x_i) >= c(~x_i) and c(x_i) >= 1.
MajorityResult majority_fitness(std::span<const Terminal> leaves, std::uint32_t n);

/// Exact stuck test for strict-acceptance single-step search on MAJORITY:
/// one step moves any deficit by at most 2, so the run can never improve
/// again iff some variable is unexpressed and every unexpressed one has
/// deficit at least 3.
bool is_stuck_gpstar_single_majority(const DeficitProfile& profile);

/// From-scratch fitness of a tree.
int evaluate(const Problem& problem, const GpTree& tree);

} // namespace hvlgp
