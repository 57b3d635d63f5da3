#include "hvlgp/initializers.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace hvlgp {

namespace {

constexpr std::string_view text_prefix = "text:";

} // namespace

GpTree make_vine(std::span<const Terminal> leaves)
{
    if (leaves.empty()) {
        throw std::invalid_argument("a tree needs at least one leaf");
    }
    TreeBuilder b;
    auto acc = b.leaf(leaves[0]);
    for (std::size_t i = 1; i < leaves.size(); ++i) {
        acc = b.join(acc, b.leaf(leaves[i]));
    }
    return std::move(b).finish(acc);
}

GpTree init_unity_expectation(std::uint32_t n, Rng& rng)
{
    if (n < 1) {
        throw std::invalid_argument("n must be at least 1");
    }
    return random_tree(2ULL * n, n, rng);
}

GpTree random_tree(std::size_t leaves, std::uint32_t n, Rng& rng)
{
    if (n < 1 || leaves < 1) {
        throw std::invalid_argument("random_tree needs n >= 1 and at least one leaf");
    }
    if (leaves == 1) {
        return GpTree(uniform_terminal(rng, n));
    }
    // Shape first: joins[j] holds child indices, where a value < 0 encodes
    // the open slot (-1 - slot_number) still awaiting a subtree.
    struct Join {
        std::int64_t left;
        std::int64_t right;
    };
    struct Slot {
        std::size_t join;
        bool right;
    };
    std::vector<Join> joins{{-1, -1}};
    std::vector<Slot> open{{0, false}, {0, true}};
    while (open.size() < leaves) {
        const auto pick = rng.below(open.size());
        const Slot slot = open[pick];
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));
        const auto id = static_cast<std::int64_t>(joins.size());
        joins.push_back({-1, -1});
        (slot.right ? joins[slot.join].right : joins[slot.join].left) = id;
        open.push_back({static_cast<std::size_t>(id), false});
        open.push_back({static_cast<std::size_t>(id), true});
    }

    TreeBuilder b;
    std::vector<TreeBuilder::Handle> filled_left(joins.size(), -1);
    std::vector<TreeBuilder::Handle> filled_right(joins.size(), -1);
    for (const auto& slot : open) {
        const auto leaf = b.leaf(uniform_terminal(rng, n));
        (slot.right ? filled_right : filled_left)[slot.join] = leaf;
    }
    // Children always have larger ids than their parent, so a reverse sweep
    // builds every subtree before its parent needs it.
    std::vector<TreeBuilder::Handle> built(joins.size(), -1);
    for (auto j = static_cast<std::int64_t>(joins.size()) - 1; j >= 0; --j) {
        const auto& node = joins[j];
        const auto left = node.left >= 0 ? built[node.left] : filled_left[j];
        const auto right = node.right >= 0 ? built[node.right] : filled_right[j];
        built[j] = b.join(left, right);
    }
    return std::move(b).finish(built[0]);
}

GpTree init_adversarial_majority(std::uint32_t n)
{
    if (n < 1) {
        throw std::invalid_argument("n must be at least 1");
    }
    const std::vector<Terminal> leaves(2ULL * n, Terminal{1, Sign::Negated});
    return make_vine(leaves);
}

GpTree init_t_lopt(std::uint32_t n)
{
    if (n < 2) {
        throw std::invalid_argument("t-lopt requires n >= 2");
    }
    std::vector<Terminal> leaves;
    leaves.reserve(2ULL * n);
    for (std::uint32_t i = 1; i < n; ++i) {
        leaves.push_back({i, Sign::Positive});
    }
    leaves.insert(leaves.end(), n + 1, Terminal{n, Sign::Negated});
    return make_vine(leaves);
}

GpTree init_from_text(std::string_view text, std::uint32_t n)
{
    return parse_tree(text, n);
}

void check_initializer_id(std::string_view id)
{
    if (id == "unity" || id == "adversarial-neg1" || id == "t-lopt" || id.starts_with(text_prefix)) {
        return;
    }
    throw std::invalid_argument("unknown initializer '" + std::string(id) + "'");
}

GpTree make_initial(std::string_view id, std::uint32_t n, Rng& rng)
{
    if (id == "unity") {
        return init_unity_expectation(n, rng);
    }
    if (id == "adversarial-neg1") {
        return init_adversarial_majority(n);
    }
    if (id == "t-lopt") {
        return init_t_lopt(n);
    }
    if (id.starts_with(text_prefix)) {
        return init_from_text(id.substr(text_prefix.size()), n);
    }
    throw std::invalid_argument("unknown initializer '" + std::string(id) + "'");
}

} // namespace hvlgp
