#pragma once

#include "hvlgp/rng.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hvlgp {

enum class Sign : std::uint8_t { Positive, Negated };

/// A leaf symbol: variable x_index or its complement.
struct Terminal {
    std::uint32_t index = 1;
    Sign sign = Sign::Positive;

    constexpr bool positive() const noexcept { return sign == Sign::Positive; }
    constexpr Terminal complement() const noexcept
    {
        return {index, positive() ? Sign::Negated : Sign::Positive};
    }

    /// Terminal number t in [0, 2n) in the order x1, ~x1, x2, ~x2, ...
    static constexpr Terminal from_ordinal(std::uint64_t t) noexcept
    {
        return {static_cast<std::uint32_t>(t / 2 + 1), (t % 2) != 0 ? Sign::Negated : Sign::Positive};
    }
    constexpr std::uint64_t ordinal() const noexcept { return 2 * (index - 1) + (positive() ? 0 : 1); }

    friend constexpr bool operator==(Terminal, Terminal) = default;
};

std::string to_string(Terminal t);
Terminal uniform_terminal(Rng& rng, std::uint32_t n);

class TreeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public TreeError {
public:
    using TreeError::TreeError;
};

class StaleHandle : public TreeError {
public:
    StaleHandle() : TreeError("stale or foreign tree handle") {}
};

enum class Side : std::uint8_t { Left, Right };
enum class MutationOp : std::uint8_t { Substitute, Insert, Delete };

std::string_view to_string(MutationOp op);

/// Handle to any node. Valid only for the issuing tree until its next edit.
struct NodeRef {
    std::int32_t id = -1;
    std::uint64_t tree = 0;
    std::uint64_t generation = 0;
};

/// Handle that is guaranteed to name a leaf.
struct LeafRef {
    std::int32_t id = -1;
    std::uint64_t tree = 0;
    std::uint64_t generation = 0;
};

/// Describes one HVL-Mutate' sub-operation against the pre-mutation tree.
///
/// `position` is the sampling slot of the acted-on node: a leaf slot in
/// [0, T) for substitute/delete, a node slot in [0, S) for insert. Together
/// with the terminal and side it replays the edit on an identical tree.
/// `added` / `removed` name the terminals entering and leaving the leaf
/// multiset, which is all MAJORITY needs to update its counts.
struct MutationRecord {
    MutationOp op = MutationOp::Substitute;
    std::uint32_t position = 0;
    Terminal terminal{};
    Side side = Side::Left;
    bool vacuous = false;
    bool has_added = false;
    bool has_removed = false;
    Terminal added{};
    Terminal removed{};

    friend bool operator==(const MutationRecord&, const MutationRecord&) = default;
};

/// Record whose multiset change undoes `r` (added and removed swapped).
MutationRecord multiset_inverse(const MutationRecord& r);

std::string to_string(const MutationRecord& r);

/// Binary parse tree of joins and terminal leaves, stored in an arena.
///
/// Nodes live in a vector and are linked by indices with explicit parent
/// links. Two slot arrays (all live nodes, and leaves only) give O(1)
/// uniform sampling; every node remembers its slot in each array so edits
/// can swap-remove in O(1). Structural edits cost O(1) apart from
/// bookkeeping; no edit walks the tree.
class GpTree {
public:
    /// Single-leaf tree.
    explicit GpTree(Terminal leaf);

    GpTree(const GpTree& other);
    GpTree& operator=(const GpTree& other);
    GpTree(GpTree&& other) noexcept;
    GpTree& operator=(GpTree&& other) noexcept;
    ~GpTree() = default;

    std::size_t leaf_count() const noexcept { return leaves_.size(); }
    std::size_t node_count() const noexcept { return live_.size(); }

    NodeRef root() const noexcept { return node_handle(root_); }
    NodeRef node_at(std::size_t slot) const;
    LeafRef leaf_at(std::size_t slot) const;
    NodeRef sample_node(Rng& rng) const { return node_at(rng.below(node_count())); }
    LeafRef sample_leaf(Rng& rng) const { return leaf_at(rng.below(leaf_count())); }

    bool is_leaf(NodeRef v) const;
    Terminal terminal(LeafRef v) const;
    std::uint32_t max_index() const;

    MutationRecord substitute(LeafRef leaf, Terminal u);
    MutationRecord insert(NodeRef v, Terminal u, Side side);
    MutationRecord remove(LeafRef leaf);

    /// Re-applies a record produced against a tree identical to this one.
    void replay(const MutationRecord& r);

    void inorder_leaves(std::vector<Terminal>& out) const;
    std::vector<Terminal> inorder_leaves() const;

    std::string serialize() const;
    friend bool structurally_equal(const GpTree& a, const GpTree& b);

    /// Full recount of every structural invariant; returns a description of
    /// the first violation, or an empty string.
    std::string audit() const;

private:
    friend class TreeBuilder;

    struct Node {
        std::int32_t parent = -1;
        std::int32_t left = -1;
        std::int32_t right = -1;
        std::int32_t live_slot = -1;
        std::int32_t leaf_slot = -1; // -1 for joins
        Terminal term{};
    };

    GpTree() = default;

    NodeRef node_handle(std::int32_t id) const noexcept { return {id, id_, generation_}; }
    void check(std::int32_t id, std::uint64_t tree, std::uint64_t generation) const;
    std::int32_t allocate(Node node);
    void release(std::int32_t id);
    void replace_child(std::int32_t parent, std::int32_t old_child, std::int32_t new_child);
    void bump() noexcept { ++generation_; }

    static std::uint64_t fresh_id() noexcept;

    std::vector<Node> nodes_;
    std::vector<std::int32_t> free_;
    std::vector<std::int32_t> live_;
    std::vector<std::int32_t> leaves_;
    std::int32_t root_ = -1;
    std::uint64_t id_ = fresh_id();
    std::uint64_t generation_ = 0;
};

/// Bottom-up construction of a tree from leaves and joins.
class TreeBuilder {
public:
    using Handle = std::int32_t;

    Handle leaf(Terminal t);
    Handle join(Handle left, Handle right);
    /// Consumes the builder. `root` must be the only parentless node.
    GpTree finish(Handle root) &&;

private:
    GpTree tree_;
};

/// Parses the canonical text form; every index must lie in [1, n].
GpTree parse_tree(std::string_view text, std::uint32_t n);

/// Applies one HVL-Mutate' step: substitute, insert, or delete with
/// probability 1/3 each, positions and terminals drawn uniformly.
MutationRecord hvl_prime_step(GpTree& tree, Rng& rng, std::uint32_t n);

} // namespace hvlgp
