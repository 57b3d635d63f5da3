#include "hvlgp/tree.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <utility>

namespace hvlgp {

std::string to_string(Terminal t)
{
    return (t.positive() ? "x" : "~x") + std::to_string(t.index);
}

Terminal uniform_terminal(Rng& rng, std::uint32_t n)
{
    return Terminal::from_ordinal(rng.below(2ULL * n));
}

std::string_view to_string(MutationOp op)
{
    switch (op) {
    case MutationOp::Substitute: return "sub";
    case MutationOp::Insert: return "ins";
    case MutationOp::Delete: return "del";
    }
    return "?";
}

std::string to_string(const MutationRecord& r)
{
    std::string s(to_string(r.op));
    s += '@';
    s += std::to_string(r.position);
    if (r.op != MutationOp::Delete) {
        s += ':';
        s += to_string(r.terminal);
    }
    if (r.op == MutationOp::Insert) {
        s += r.side == Side::Left ? ":L" : ":R";
    }
    if (r.vacuous) {
        s += ":vacuous";
    }
    return s;
}

MutationRecord multiset_inverse(const MutationRecord& r)
{
    MutationRecord inv = r;
    std::swap(inv.has_added, inv.has_removed);
    std::swap(inv.added, inv.removed);
    return inv;
}

// ---------------------------------------------------------------------------

std::uint64_t GpTree::fresh_id() noexcept
{
    static std::atomic<std::uint64_t> counter{1};
    return counter.fetch_add(1, std::memory_order_relaxed);
}

GpTree::GpTree(Terminal leaf)
{
    root_ = allocate(Node{.term = leaf});
}

GpTree::GpTree(const GpTree& other)
    : nodes_(other.nodes_), free_(other.free_), live_(other.live_), leaves_(other.leaves_), root_(other.root_)
{
}

GpTree& GpTree::operator=(const GpTree& other)
{
    if (this != &other) {
        nodes_ = other.nodes_;
        free_ = other.free_;
        live_ = other.live_;
        leaves_ = other.leaves_;
        root_ = other.root_;
        bump();
    }
    return *this;
}

GpTree::GpTree(GpTree&& other) noexcept
    : nodes_(std::move(other.nodes_)), free_(std::move(other.free_)), live_(std::move(other.live_)),
      leaves_(std::move(other.leaves_)), root_(std::exchange(other.root_, -1)), id_(other.id_),
      generation_(other.generation_)
{
    other.id_ = fresh_id();
}

GpTree& GpTree::operator=(GpTree&& other) noexcept
{
    if (this != &other) {
        nodes_ = std::move(other.nodes_);
        free_ = std::move(other.free_);
        live_ = std::move(other.live_);
        leaves_ = std::move(other.leaves_);
        root_ = std::exchange(other.root_, -1);
        std::swap(id_, other.id_);
        generation_ = std::max(generation_, other.generation_) + 1;
        other.bump();
    }
    return *this;
}

void GpTree::check(std::int32_t id, std::uint64_t tree, std::uint64_t generation) const
{
    if (tree != id_ || generation != generation_ || id < 0 || static_cast<std::size_t>(id) >= nodes_.size()
        || nodes_[id].live_slot < 0) {
        throw StaleHandle();
    }
}

NodeRef GpTree::node_at(std::size_t slot) const
{
    if (slot >= live_.size()) {
        throw std::out_of_range("node slot out of range");
    }
    return node_handle(live_[slot]);
}

LeafRef GpTree::leaf_at(std::size_t slot) const
{
    if (slot >= leaves_.size()) {
        throw std::out_of_range("leaf slot out of range");
    }
    return {leaves_[slot], id_, generation_};
}

bool GpTree::is_leaf(NodeRef v) const
{
    check(v.id, v.tree, v.generation);
    return nodes_[v.id].leaf_slot >= 0;
}

Terminal GpTree::terminal(LeafRef v) const
{
    check(v.id, v.tree, v.generation);
    return nodes_[v.id].term;
}

std::uint32_t GpTree::max_index() const
{
    std::uint32_t m = 0;
    for (auto id : leaves_) {
        m = std::max(m, nodes_[id].term.index);
    }
    return m;
}

std::int32_t GpTree::allocate(Node node)
{
    std::int32_t id;
    if (!free_.empty()) {
        id = free_.back();
        free_.pop_back();
        nodes_[id] = node;
    } else {
        id = static_cast<std::int32_t>(nodes_.size());
        nodes_.push_back(node);
    }
    auto& n = nodes_[id];
    n.live_slot = static_cast<std::int32_t>(live_.size());
    live_.push_back(id);
    if (n.left < 0) {
        n.leaf_slot = static_cast<std::int32_t>(leaves_.size());
        leaves_.push_back(id);
    } else {
        n.leaf_slot = -1;
    }
    return id;
}

void GpTree::release(std::int32_t id)
{
    auto& n = nodes_[id];
    const auto slot = n.live_slot;
    live_[slot] = live_.back();
    nodes_[live_[slot]].live_slot = slot;
    live_.pop_back();
    if (n.leaf_slot >= 0) {
        const auto lslot = n.leaf_slot;
        leaves_[lslot] = leaves_.back();
        nodes_[leaves_[lslot]].leaf_slot = lslot;
        leaves_.pop_back();
    }
    n = Node{};
    free_.push_back(id);
}

void GpTree::replace_child(std::int32_t parent, std::int32_t old_child, std::int32_t new_child)
{
    nodes_[new_child].parent = parent;
    if (parent < 0) {
        root_ = new_child;
        return;
    }
    auto& p = nodes_[parent];
    if (p.left == old_child) {
        p.left = new_child;
    } else {
        p.right = new_child;
    }
}

MutationRecord GpTree::substitute(LeafRef leaf, Terminal u)
{
    check(leaf.id, leaf.tree, leaf.generation);
    auto& n = nodes_[leaf.id];
    MutationRecord r{.op = MutationOp::Substitute,
                     .position = static_cast<std::uint32_t>(n.leaf_slot),
                     .terminal = u,
                     .vacuous = n.term == u,
                     .has_added = true,
                     .has_removed = true,
                     .added = u,
                     .removed = n.term};
    n.term = u;
    bump();
    return r;
}

MutationRecord GpTree::insert(NodeRef v, Terminal u, Side side)
{
    check(v.id, v.tree, v.generation);
    MutationRecord r{.op = MutationOp::Insert,
                     .position = static_cast<std::uint32_t>(nodes_[v.id].live_slot),
                     .terminal = u,
                     .side = side,
                     .has_added = true,
                     .added = u};
    const auto parent = nodes_[v.id].parent;
    const auto leaf = allocate(Node{.term = u});
    const auto join = side == Side::Left ? allocate(Node{.left = leaf, .right = v.id})
                                         : allocate(Node{.left = v.id, .right = leaf});
    replace_child(parent, v.id, join);
    nodes_[leaf].parent = join;
    nodes_[v.id].parent = join;
    bump();
    return r;
}

MutationRecord GpTree::remove(LeafRef leaf)
{
    check(leaf.id, leaf.tree, leaf.generation);
    MutationRecord r{.op = MutationOp::Delete, .position = static_cast<std::uint32_t>(nodes_[leaf.id].leaf_slot)};
    if (leaves_.size() == 1) {
        r.vacuous = true;
        bump();
        return r;
    }
    r.has_removed = true;
    r.removed = nodes_[leaf.id].term;
    const auto p = nodes_[leaf.id].parent;
    const auto sibling = nodes_[p].left == leaf.id ? nodes_[p].right : nodes_[p].left;
    replace_child(nodes_[p].parent, p, sibling);
    release(leaf.id);
    release(p);
    bump();
    return r;
}

void GpTree::replay(const MutationRecord& r)
{
    switch (r.op) {
    case MutationOp::Substitute: substitute(leaf_at(r.position), r.terminal); break;
    case MutationOp::Insert: insert(node_at(r.position), r.terminal, r.side); break;
    case MutationOp::Delete: remove(leaf_at(r.position)); break;
    }
}

void GpTree::inorder_leaves(std::vector<Terminal>& out) const
{
    out.clear();
    out.reserve(leaves_.size());
    // Leaves of a strict binary tree are visited left to right by walking
    // parent links; no explicit stack is needed.
    std::int32_t cur = root_;
    while (nodes_[cur].left >= 0) {
        cur = nodes_[cur].left;
    }
    for (;;) {
        out.push_back(nodes_[cur].term);
        // Climb while we are a right child, then step into the right sibling.
        std::int32_t p = nodes_[cur].parent;
        while (p >= 0 && nodes_[p].right == cur) {
            cur = p;
            p = nodes_[cur].parent;
        }
        if (p < 0) {
            break;
        }
        cur = nodes_[p].right;
        while (nodes_[cur].left >= 0) {
            cur = nodes_[cur].left;
        }
    }
}

std::vector<Terminal> GpTree::inorder_leaves() const
{
    std::vector<Terminal> out;
    inorder_leaves(out);
    return out;
}

std::string GpTree::serialize() const
{
    std::string out;
    out.reserve(nodes_.size() * 6);
    // Explicit stack of (node, state): 0 = enter, 1 = between children, 2 = close.
    std::vector<std::pair<std::int32_t, int>> stack{{root_, 0}};
    while (!stack.empty()) {
        auto& [id, state] = stack.back();
        const auto& n = nodes_[id];
        if (n.left < 0) {
            out += to_string(n.term);
            stack.pop_back();
            continue;
        }
        if (state == 0) {
            out += "(J ";
            state = 1;
            stack.emplace_back(n.left, 0);
        } else if (state == 1) {
            out += ' ';
            state = 2;
            stack.emplace_back(n.right, 0);
        } else {
            out += ')';
            stack.pop_back();
        }
    }
    return out;
}

bool structurally_equal(const GpTree& a, const GpTree& b)
{
    if (a.node_count() != b.node_count() || a.leaf_count() != b.leaf_count()) {
        return false;
    }
    std::vector<std::pair<std::int32_t, std::int32_t>> stack{{a.root_, b.root_}};
    while (!stack.empty()) {
        auto [x, y] = stack.back();
        stack.pop_back();
        const auto& nx = a.nodes_[x];
        const auto& ny = b.nodes_[y];
        if ((nx.left < 0) != (ny.left < 0)) {
            return false;
        }
        if (nx.left < 0) {
            if (nx.term != ny.term) {
                return false;
            }
            continue;
        }
        stack.emplace_back(nx.left, ny.left);
        stack.emplace_back(nx.right, ny.right);
    }
    return true;
}

std::string GpTree::audit() const
{
    if (root_ < 0 || static_cast<std::size_t>(root_) >= nodes_.size()) {
        return "root out of range";
    }
    if (nodes_[root_].parent != -1) {
        return "root has a parent";
    }
    std::size_t reached = 0;
    std::size_t reached_leaves = 0;
    std::vector<std::int32_t> stack{root_};
    while (!stack.empty()) {
        const auto id = stack.back();
        stack.pop_back();
        if (++reached > nodes_.size()) {
            return "cycle detected";
        }
        const auto& n = nodes_[id];
        if (n.live_slot < 0 || static_cast<std::size_t>(n.live_slot) >= live_.size() || live_[n.live_slot] != id) {
            return "node slot index inconsistent at node " + std::to_string(id);
        }
        if ((n.left < 0) != (n.right < 0)) {
            return "join with a single child at node " + std::to_string(id);
        }
        if (n.left < 0) {
            ++reached_leaves;
            if (n.leaf_slot < 0 || static_cast<std::size_t>(n.leaf_slot) >= leaves_.size()
                || leaves_[n.leaf_slot] != id) {
                return "leaf slot index inconsistent at node " + std::to_string(id);
            }
            if (n.term.index < 1) {
                return "terminal index below 1";
            }
            continue;
        }
        if (n.leaf_slot >= 0) {
            return "join registered as leaf at node " + std::to_string(id);
        }
        for (auto c : {n.left, n.right}) {
            if (nodes_[c].parent != id) {
                return "parent link mismatch below node " + std::to_string(id);
            }
            stack.push_back(c);
        }
    }
    if (reached != live_.size()) {
        return "live node count " + std::to_string(live_.size()) + " but reached " + std::to_string(reached);
    }
    if (reached_leaves != leaves_.size()) {
        return "leaf count " + std::to_string(leaves_.size()) + " but reached " + std::to_string(reached_leaves);
    }
    if (live_.size() != 2 * leaves_.size() - 1) {
        return "S != 2T - 1";
    }
    if (live_.size() + free_.size() != nodes_.size()) {
        return "arena free list inconsistent";
    }
    return {};
}

// ---------------------------------------------------------------------------

TreeBuilder::Handle TreeBuilder::leaf(Terminal t)
{
    return tree_.allocate(GpTree::Node{.term = t});
}

TreeBuilder::Handle TreeBuilder::join(Handle left, Handle right)
{
    auto& nodes = tree_.nodes_;
    if (left == right || nodes.at(left).parent >= 0 || nodes.at(right).parent >= 0) {
        throw TreeError("join children must be distinct parentless nodes");
    }
    const auto id = tree_.allocate(GpTree::Node{.left = left, .right = right});
    nodes[left].parent = id;
    nodes[right].parent = id;
    return id;
}

GpTree TreeBuilder::finish(Handle root) &&
{
    tree_.root_ = root;
    if (auto problem = tree_.audit(); !problem.empty()) {
        throw TreeError("builder produced an invalid tree: " + problem);
    }
    return std::move(tree_);
}

// ---------------------------------------------------------------------------

namespace {

class Parser {
public:
    Parser(std::string_view text, std::uint32_t n) : text_(text), n_(n) {}

    GpTree run()
    {
        const auto root = tree();
        if (pos_ != text_.size()) {
            fail("trailing characters");
        }
        return std::move(builder_).finish(root);
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw ParseError(what + " at offset " + std::to_string(pos_));
    }

    void expect(std::string_view token)
    {
        if (text_.substr(pos_, token.size()) != token) {
            fail("expected '" + std::string(token) + "'");
        }
        pos_ += token.size();
    }

    TreeBuilder::Handle tree()
    {
        if (pos_ >= text_.size()) {
            fail("unexpected end of input");
        }
        if (text_[pos_] != '(') {
            return leaf();
        }
        expect("(J ");
        const auto left = tree();
        expect(" ");
        const auto right = tree();
        if (pos_ < text_.size() && text_[pos_] == ' ') {
            fail("join must have exactly two children");
        }
        expect(")");
        return builder_.join(left, right);
    }

    TreeBuilder::Handle leaf()
    {
        Sign sign = Sign::Positive;
        if (text_[pos_] == '~') {
            sign = Sign::Negated;
            ++pos_;
        }
        expect("x");
        const char* first = text_.data() + pos_;
        const char* last = text_.data() + text_.size();
        if (first == last || *first < '1' || *first > '9') {
            fail("expected variable index");
        }
        std::uint32_t index = 0;
        auto [ptr, ec] = std::from_chars(first, last, index);
        if (ec != std::errc{}) {
            fail("variable index out of range");
        }
        pos_ += static_cast<std::size_t>(ptr - first);
        if (index > n_) {
            fail("variable index " + std::to_string(index) + " exceeds n = " + std::to_string(n_));
        }
        return builder_.leaf({index, sign});
    }

    std::string_view text_;
    std::uint32_t n_;
    std::size_t pos_ = 0;
    TreeBuilder builder_;
};

} // namespace

GpTree parse_tree(std::string_view text, std::uint32_t n)
{
    return Parser(text, n).run();
}

MutationRecord hvl_prime_step(GpTree& tree, Rng& rng, std::uint32_t n)
{
    switch (rng.below(3)) {
    case 0: {
        const auto leaf = tree.sample_leaf(rng);
        return tree.substitute(leaf, uniform_terminal(rng, n));
    }
    case 1: {
        const auto v = tree.sample_node(rng);
        const auto u = uniform_terminal(rng, n);
        const auto side = rng.coin() ? Side::Right : Side::Left;
        return tree.insert(v, u, side);
    }
    default: return tree.remove(tree.sample_leaf(rng));
    }
}

} // namespace hvlgp
