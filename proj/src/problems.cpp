#include "hvlgp/problems.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace hvlgp {

std::string_view to_string(ProblemKind kind)
{
    return kind == ProblemKind::Order ? "order" : "majority";
}

ProblemKind parse_problem_kind(std::string_view s)
{
    if (s == "order" || s == "ORDER") {
        return ProblemKind::Order;
    }
    if (s == "majority" || s == "MAJORITY") {
        return ProblemKind::Majority;
    }
    throw std::invalid_argument("unknown problem '" + std::string(s) + "'");
}

OrderResult order_fitness(std::span<const Terminal> leaves, std::uint32_t n)
{
    OrderResult result;
    std::vector<std::uint8_t> seen(n + 1, 0);
    for (const auto t : leaves) {
        if (seen.at(t.index)) {
            continue;
        }
        seen[t.index] = 1;
        result.path.push_back(t);
        result.fitness += t.positive() ? 1 : 0;
    }
    return result;
}

int order_fitness_value(std::span<const Terminal> leaves, std::uint32_t n, std::vector<std::uint8_t>& seen)
{
    seen.assign(n + 1, 0);
    int fitness = 0;
    std::uint32_t expressed = 0;
    for (const auto t : leaves) {
        if (seen[t.index]) {
            continue;
        }
        seen[t.index] = 1;
        fitness += t.positive() ? 1 : 0;
        if (++expressed == n) {
            break;
        }
    }
    return fitness;
}

// ---------------------------------------------------------------------------

DeficitProfile::DeficitProfile(std::uint32_t n) : pos_(n + 1, 0), neg_(n + 1, 0)
{
    if (n < 1) {
        throw std::invalid_argument("n must be at least 1");
    }
}

DeficitProfile DeficitProfile::from_leaves(std::span<const Terminal> leaves, std::uint32_t n)
{
    DeficitProfile p(n);
    for (const auto t : leaves) {
        p.add(t);
    }
    return p;
}

void DeficitProfile::check_index(std::uint32_t i) const
{
    if (i < 1 || i >= pos_.size()) {
        throw std::out_of_range("variable index " + std::to_string(i) + " outside [1, n]");
    }
}

int DeficitProfile::max_deficit() const
{
    int d = neg_[1] - pos_[1];
    for (std::size_t i = 2; i < pos_.size(); ++i) {
        d = std::max(d, neg_[i] - pos_[i]);
    }
    return d;
}

std::size_t DeficitProfile::total() const
{
    std::size_t sum = 0;
    for (std::size_t i = 1; i < pos_.size(); ++i) {
        sum += static_cast<std::size_t>(pos_[i] + neg_[i]);
    }
    return sum;
}

bool DeficitProfile::expressed(std::uint32_t i) const
{
    check_index(i);
    return expressed_unchecked(i);
}

int DeficitProfile::fitness() const
{
    int f = 0;
    for (std::uint32_t i = 1; i < pos_.size(); ++i) {
        f += expressed_unchecked(i) ? 1 : 0;
    }
    return f;
}

void DeficitProfile::add(Terminal t)
{
    check_index(t.index);
    ++(t.positive() ? pos_ : neg_)[t.index];
}

void DeficitProfile::remove(Terminal t)
{
    check_index(t.index);
    auto& c = (t.positive() ? pos_ : neg_)[t.index];
    if (c == 0) {
        throw std::logic_error("removing absent terminal " + to_string(t));
    }
    --c;
}

int DeficitProfile::apply(const MutationRecord& r)
{
    int delta = 0;
    auto update = [&](Terminal t, bool adding) {
        const bool before = expressed_unchecked(t.index);
        adding ? add(t) : remove(t);
        delta += static_cast<int>(expressed_unchecked(t.index)) - static_cast<int>(before);
    };
    if (r.has_removed) {
        update(r.removed, false);
    }
    if (r.has_added) {
        update(r.added, true);
    }
    return delta;
}

MajorityResult majority_fitness(std::span<const Terminal> leaves, std::uint32_t n)
{
    MajorityResult result{.profile = DeficitProfile::from_leaves(leaves, n), .statements = {}};
    for (std::uint32_t i = 1; i <= n; ++i) {
        if (result.profile.expressed(i)) {
            result.statements.push_back({i, Sign::Positive});
        }
    }
    result.fitness = static_cast<int>(result.statements.size());
    return result;
}

bool is_stuck_gpstar_single_majority(const DeficitProfile& profile)
{
    bool any_unexpressed = false;
    for (std::uint32_t i = 1; i <= profile.n(); ++i) {
        if (profile.expressed(i)) {
            continue;
        }
        any_unexpressed = true;
        if (profile.deficit(i) < 3) {
            return false;
        }
    }
    return any_unexpressed;
}

int evaluate(const Problem& problem, const GpTree& tree)
{
    const auto leaves = tree.inorder_leaves();
    if (problem.kind == ProblemKind::Order) {
        std::vector<std::uint8_t> seen;
        return order_fitness_value(leaves, problem.n, seen);
    }
    return majority_fitness(leaves, problem.n).fitness;
}

} // namespace hvlgp
