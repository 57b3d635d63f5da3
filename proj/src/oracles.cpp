#include "hvlgp/oracles.hpp"

#include "hvlgp/initializers.hpp"

#include <sstream>

namespace hvlgp {

namespace {

void guard(const GpTree& tree, std::uint32_t n)
{
    if (tree.node_count() * n > enumeration_limit) {
        throw InstanceTooLarge("instance too large to enumerate: S * n = " + std::to_string(tree.node_count() * n));
    }
}

/// Sums weights per key, grouped by denominator so the hot loop stays in
/// machine integers.
class WeightAccumulator {
public:
    void add(int key, OutcomeWeight w) { sums_[key][w.den] += w.num; }

    std::map<int, Rational> exact() const
    {
        std::map<int, Rational> out;
        for (const auto& [key, by_den] : sums_) {
            Rational total = 0;
            for (const auto& [den, num] : by_den) {
                total += Rational(num) / Rational(den);
            }
            out[key] = total;
        }
        return out;
    }

private:
    std::map<int, std::map<std::uint64_t, std::uint64_t>> sums_;
};

} // namespace

void for_each_single_mutation(const GpTree& tree, std::uint32_t n, const OutcomeVisitor& visit)
{
    guard(tree, n);
    const std::uint64_t leaves = tree.leaf_count();
    const std::uint64_t nodes = tree.node_count();
    const std::uint64_t terminals = 2ULL * n;

    GpTree scratch = tree;
    const OutcomeWeight sub_weight{1, 3 * leaves * terminals};
    for (std::size_t slot = 0; slot < leaves; ++slot) {
        for (std::uint64_t t = 0; t < terminals; ++t) {
            scratch = tree;
            const auto r = scratch.substitute(scratch.leaf_at(slot), Terminal::from_ordinal(t));
            if (!visit(r, sub_weight, scratch)) {
                return;
            }
        }
    }
    const OutcomeWeight ins_weight{1, 3 * nodes * terminals * 2};
    for (std::size_t slot = 0; slot < nodes; ++slot) {
        for (std::uint64_t t = 0; t < terminals; ++t) {
            for (const auto side : {Side::Left, Side::Right}) {
                scratch = tree;
                const auto r = scratch.insert(scratch.node_at(slot), Terminal::from_ordinal(t), side);
                if (!visit(r, ins_weight, scratch)) {
                    return;
                }
            }
        }
    }
    const OutcomeWeight del_weight{1, 3 * leaves};
    for (std::size_t slot = 0; slot < leaves; ++slot) {
        scratch = tree;
        const auto r = scratch.remove(scratch.leaf_at(slot));
        if (!visit(r, del_weight, scratch)) {
            return;
        }
    }
}

Rational MutationDistribution::total() const
{
    Rational sum = 0;
    for (const auto& o : outcomes) {
        sum += o.probability;
    }
    return sum;
}

Rational MutationDistribution::improving_mass() const
{
    Rational sum = 0;
    for (const auto& o : outcomes) {
        if (o.fitness > base_fitness) {
            sum += o.probability;
        }
    }
    return sum;
}

Rational MutationDistribution::improving_mass(MutationOp op) const
{
    Rational sum = 0;
    for (const auto& o : outcomes) {
        if (o.record.op == op && o.fitness > base_fitness) {
            sum += o.probability;
        }
    }
    return sum;
}

MutationDistribution enumerate_single_mutations(const GpTree& tree, ProblemKind problem, std::uint32_t n)
{
    const Problem p{problem, n};
    MutationDistribution d;
    d.base_fitness = evaluate(p, tree);
    for_each_single_mutation(tree, n, [&](const MutationRecord& r, OutcomeWeight w, const GpTree& result) {
        d.outcomes.push_back({r, w.exact(), evaluate(p, result)});
        return true;
    });
    return d;
}

Rational inverse_e_upper()
{
    // 1/e = 0.367879441171442321..., so the truncation + 1 ulp is above it.
    return Rational(367879441171443LL) / Rational(1000000000000000LL);
}

std::string BoundReport::describe() const
{
    std::ostringstream os;
    os << "k=" << k << " T=" << leaves << " S=" << nodes << " insertion_mass=" << insertion_mass << " ("
       << insertion_mass.convert_to<double>() << ") bound=" << bound.convert_to<double>()
       << (applicable ? "" : " (T < n-k: constant not applicable)");
    return os.str();
}

BoundReport check_lemma1(const GpTree& tree, std::uint32_t n)
{
    const Problem p{ProblemKind::Order, n};
    BoundReport report;
    report.k = evaluate(p, tree);
    report.leaves = tree.leaf_count();
    report.nodes = tree.node_count();

    std::uint64_t improving = 0;
    std::uint64_t den = 0;
    for_each_single_mutation(tree, n, [&](const MutationRecord& r, OutcomeWeight w, const GpTree& result) {
        if (r.op == MutationOp::Insert && evaluate(p, result) > report.k) {
            improving += w.num;
            den = w.den;
        }
        return true;
    });
    report.insertion_mass = den == 0 ? Rational(0) : Rational(improving) / Rational(den);

    const long long gap = static_cast<long long>(n) - report.k;
    report.applicable = static_cast<long long>(report.leaves) >= gap;
    report.bound = Rational(gap * (gap + 1)) / Rational(24LL * n * static_cast<long long>(report.nodes))
        * inverse_e_upper();
    report.pass = !report.applicable || report.insertion_mass >= report.bound;
    return report;
}

DeltaDistribution substitution_deltas(const GpTree& tree, ProblemKind problem, std::uint32_t n)
{
    guard(tree, n);
    const Problem p{problem, n};
    const int base = evaluate(p, tree);
    const std::uint64_t terminals = 2ULL * n;
    WeightAccumulator acc;
    GpTree scratch = tree;
    for (std::size_t slot = 0; slot < tree.leaf_count(); ++slot) {
        for (std::uint64_t t = 0; t < terminals; ++t) {
            scratch = tree;
            scratch.substitute(scratch.leaf_at(slot), Terminal::from_ordinal(t));
            acc.add(evaluate(p, scratch) - base, {1, tree.leaf_count() * terminals});
        }
    }
    return acc.exact();
}

DeltaDistribution delete_insert_deltas(const GpTree& tree, ProblemKind problem, std::uint32_t n)
{
    guard(tree, n);
    const Problem p{problem, n};
    const int base = evaluate(p, tree);
    const std::uint64_t terminals = 2ULL * n;
    WeightAccumulator acc;
    GpTree deleted = tree;
    GpTree scratch = tree;
    for (std::size_t slot = 0; slot < tree.leaf_count(); ++slot) {
        deleted = tree;
        deleted.remove(deleted.leaf_at(slot));
        const std::uint64_t den = tree.leaf_count() * deleted.node_count() * terminals * 2;
        for (std::size_t node = 0; node < deleted.node_count(); ++node) {
            for (std::uint64_t t = 0; t < terminals; ++t) {
                for (const auto side : {Side::Left, Side::Right}) {
                    scratch = deleted;
                    scratch.insert(scratch.node_at(node), Terminal::from_ordinal(t), side);
                    acc.add(evaluate(p, scratch) - base, {1, den});
                }
            }
        }
    }
    return acc.exact();
}

bool check_sdp(const GpTree& tree, std::uint32_t n, ProblemKind problem)
{
    return substitution_deltas(tree, problem, n) == delete_insert_deltas(tree, problem, n);
}

StuckCrosscheck crosscheck_stuck(const GpTree& tree, std::uint32_t n)
{
    const Problem p{ProblemKind::Majority, n};
    const auto base = majority_fitness(tree.inorder_leaves(), n);
    StuckCrosscheck check;
    check.predicted = is_stuck_gpstar_single_majority(base.profile);

    bool improving = false;
    for_each_single_mutation(tree, n, [&](const MutationRecord&, OutcomeWeight, const GpTree& result) {
        improving = evaluate(p, result) > base.fitness;
        return !improving;
    });
    check.enumerated = base.fitness < static_cast<int>(n) && !improving;
    return check;
}

// ---------------------------------------------------------------------------

namespace {

template <class Check>
SweepReport sweep_exhaustive(std::size_t min_leaves, std::size_t max_leaves, std::uint32_t max_n, Check check)
{
    SweepReport report;
    for (std::uint32_t n = 1; n <= max_n; ++n) {
        for (std::size_t leaves = min_leaves; leaves <= max_leaves; ++leaves) {
            const auto shapes = all_shapes(leaves);
            for (const auto& multiset : all_multisets(leaves, n)) {
                for (const auto& shape : shapes) {
                    const auto tree = build_tree(shape, multiset);
                    ++report.instances;
                    if (!check(tree, n)) {
                        if (report.failures++ == 0) {
                            report.first_failure = tree.serialize() + " n=" + std::to_string(n);
                        }
                    }
                }
            }
        }
    }
    return report;
}

} // namespace

SweepReport sweep_sdp(std::size_t max_leaves, std::uint32_t max_n)
{
    return sweep_exhaustive(2, max_leaves, max_n,
                            [](const GpTree& t, std::uint32_t n) { return check_sdp(t, n); });
}

SweepReport sweep_stuck(std::size_t max_leaves, std::uint32_t max_n)
{
    return sweep_exhaustive(1, max_leaves, max_n,
                            [](const GpTree& t, std::uint32_t n) { return crosscheck_stuck(t, n).agree(); });
}

SweepReport sweep_lemma1(std::size_t cases, std::uint32_t max_n, std::uint64_t seed)
{
    SweepReport report;
    Rng rng(seed);
    for (std::size_t c = 0; c < cases; ++c) {
        const auto n = static_cast<std::uint32_t>(1 + rng.below(max_n));
        const auto leaves = n + rng.below(3ULL * n + 1);
        const auto tree = random_tree(leaves, n, rng);
        const auto r = check_lemma1(tree, n);
        ++report.instances;
        if (!r.pass || !r.applicable) {
            if (report.failures++ == 0) {
                report.first_failure = tree.serialize() + " n=" + std::to_string(n) + " " + r.describe();
            }
        }
    }
    return report;
}

std::vector<Shape> all_shapes(std::size_t leaves)
{
    if (leaves == 0) {
        throw std::invalid_argument("a shape needs at least one leaf");
    }
    if (leaves == 1) {
        return {Shape{0}};
    }
    std::vector<Shape> out;
    for (std::size_t left = 1; left < leaves; ++left) {
        const auto lhs = all_shapes(left);
        const auto rhs = all_shapes(leaves - left);
        for (const auto& l : lhs) {
            for (const auto& r : rhs) {
                Shape s{1};
                s.insert(s.end(), l.begin(), l.end());
                s.insert(s.end(), r.begin(), r.end());
                out.push_back(std::move(s));
            }
        }
    }
    return out;
}

namespace {

TreeBuilder::Handle build_shape(TreeBuilder& b, const Shape& shape, std::size_t& pos,
                                std::span<const Terminal> leaves, std::size_t& leaf)
{
    if (pos >= shape.size()) {
        throw std::invalid_argument("truncated shape");
    }
    if (shape[pos++] == 0) {
        if (leaf >= leaves.size()) {
            throw std::invalid_argument("shape has more leaves than supplied");
        }
        return b.leaf(leaves[leaf++]);
    }
    const auto l = build_shape(b, shape, pos, leaves, leaf);
    const auto r = build_shape(b, shape, pos, leaves, leaf);
    return b.join(l, r);
}

void multisets(std::size_t length, std::uint64_t terminals, std::uint64_t lowest, std::vector<Terminal>& cur,
               std::vector<std::vector<Terminal>>& out)
{
    if (cur.size() == length) {
        out.push_back(cur);
        return;
    }
    for (std::uint64_t t = lowest; t < terminals; ++t) {
        cur.push_back(Terminal::from_ordinal(t));
        multisets(length, terminals, t, cur, out);
        cur.pop_back();
    }
}

} // namespace

GpTree build_tree(const Shape& shape, std::span<const Terminal> leaves)
{
    TreeBuilder b;
    std::size_t pos = 0;
    std::size_t leaf = 0;
    const auto root = build_shape(b, shape, pos, leaves, leaf);
    if (pos != shape.size() || leaf != leaves.size()) {
        throw std::invalid_argument("shape and leaf list do not match");
    }
    return std::move(b).finish(root);
}

std::vector<std::vector<Terminal>> all_multisets(std::size_t length, std::uint32_t n)
{
    std::vector<std::vector<Terminal>> out;
    std::vector<Terminal> cur;
    multisets(length, 2ULL * n, 0, cur, out);
    return out;
}

std::vector<std::vector<Terminal>> all_sequences(std::size_t length, std::uint32_t n)
{
    const std::uint64_t terminals = 2ULL * n;
    std::vector<std::vector<Terminal>> out;
    std::vector<std::uint64_t> digits(length, 0);
    for (;;) {
        std::vector<Terminal> seq;
        seq.reserve(length);
        for (auto d : digits) {
            seq.push_back(Terminal::from_ordinal(d));
        }
        out.push_back(std::move(seq));
        std::size_t i = 0;
        while (i < length && ++digits[i] == terminals) {
            digits[i++] = 0;
        }
        if (i == length) {
            break;
        }
    }
    return out;
}

} // namespace hvlgp
