#pragma once

#include "hvlgp/problems.hpp"
#include "hvlgp/tree.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hvlgp {

using Rational = boost::multiprecision::cpp_rational;

class InstanceTooLarge : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Enumeration refuses trees with S * n above this.
inline constexpr std::size_t enumeration_limit = 1'000'000;

/// Probability of one outcome as num/den. Kept as machine integers on the
/// hot path; lifted to Rational when a distribution is materialized.
struct OutcomeWeight {
    std::uint64_t num = 1;
    std::uint64_t den = 1;

    Rational exact() const { return Rational(num) / Rational(den); }
};

/// Visits every outcome of one HVL-Mutate' step on `tree`: each
/// (operation, position, terminal, side) with its exact probability and
/// the resulting tree. The visitor returns false to stop early.
using OutcomeVisitor = std::function<bool(const MutationRecord&, OutcomeWeight, const GpTree&)>;
void for_each_single_mutation(const GpTree& tree, std::uint32_t n, const OutcomeVisitor& visit);

struct MutationOutcome {
    MutationRecord record;
    Rational probability;
    int fitness = 0;
};

struct MutationDistribution {
    int base_fitness = 0;
    std::vector<MutationOutcome> outcomes;

    Rational total() const;
    /// Mass of outcomes with fitness strictly above the base.
    Rational improving_mass() const;
    Rational improving_mass(MutationOp op) const;
};

MutationDistribution enumerate_single_mutations(const GpTree& tree, ProblemKind problem, std::uint32_t n);

/// Rational strictly above 1/e, used to round bounds up.
Rational inverse_e_upper();

struct BoundReport {
    int k = 0;
    std::size_t leaves = 0;
    std::size_t nodes = 0;
    /// Whether T >= n - k, where the explicit constant applies.
    bool applicable = false;
    Rational insertion_mass;
    /// (1/(6en)) (n-k)(n-k+1) / (4S), with 1/e rounded up.
    Rational bound;
    bool pass = false;

    std::string describe() const;
};

/// Checks the exact insertion-improving mass of an ORDER instance against
/// the explicit lower-bound constant. Outside its range (T < n - k) the
/// report is marked not applicable and passes vacuously.
BoundReport check_lemma1(const GpTree& tree, std::uint32_t n);

using DeltaDistribution = std::map<int, Rational>;

/// Fitness deltas of a substitution (leaf and terminal uniform).
DeltaDistribution substitution_deltas(const GpTree& tree, ProblemKind problem, std::uint32_t n);
/// Fitness deltas of a deletion (leaf uniform) followed by an insertion
/// (node, terminal and side uniform) on the intermediate tree.
DeltaDistribution delete_insert_deltas(const GpTree& tree, ProblemKind problem, std::uint32_t n);

/// Substitution decomposability: both delta distributions agree exactly.
bool check_sdp(const GpTree& tree, std::uint32_t n, ProblemKind problem = ProblemKind::Majority);

struct StuckCrosscheck {
    bool predicted = false;  // is_stuck_gpstar_single_majority
    bool enumerated = false; // f < n and no single outcome improves
    bool agree() const noexcept { return predicted == enumerated; }
};

StuckCrosscheck crosscheck_stuck(const GpTree& tree, std::uint32_t n);

// --- sweeps ---------------------------------------------------------------

struct SweepReport {
    std::size_t instances = 0;
    std::size_t failures = 0;
    std::string first_failure;
    bool pass() const noexcept { return instances > 0 && failures == 0; }
};

/// check_sdp over every shape and leaf multiset with 2 <= T <= max_leaves,
/// 1 <= n <= max_n. Single-leaf trees are excluded: deleting the only leaf
/// is vacuous, so substitution and delete-then-insert differ there.
SweepReport sweep_sdp(std::size_t max_leaves, std::uint32_t max_n);

/// crosscheck_stuck over every shape and leaf multiset with
/// 1 <= T <= max_leaves, 1 <= n <= max_n.
SweepReport sweep_stuck(std::size_t max_leaves, std::uint32_t max_n);

/// check_lemma1 on `cases` random ORDER trees, n uniform in [1, max_n] and
/// T uniform in [n, 4n].
SweepReport sweep_lemma1(std::size_t cases, std::uint32_t max_n, std::uint64_t seed);

// --- exhaustive instance generation ---------------------------------------

/// Tree shape in preorder: 1 = join, 0 = leaf.
using Shape = std::vector<std::uint8_t>;

/// Every full binary tree shape with `leaves` leaves (Catalan(leaves - 1)).
std::vector<Shape> all_shapes(std::size_t leaves);

/// Builds a tree of the given shape with leaves assigned in inorder.
GpTree build_tree(const Shape& shape, std::span<const Terminal> leaves);

/// Every non-decreasing terminal sequence (by ordinal) of the given
/// length, i.e. one representative per leaf multiset.
std::vector<std::vector<Terminal>> all_multisets(std::size_t length, std::uint32_t n);

/// Every terminal sequence of the given length.
std::vector<std::vector<Terminal>> all_sequences(std::size_t length, std::uint32_t n);

} // namespace hvlgp
