#include "hvlgp/engine.hpp"

#include "hvlgp/initializers.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <utility>

namespace hvlgp {

std::string_view to_string(AcceptancePolicy p)
{
    return p == AcceptancePolicy::Strict ? "strict" : "nonstrict";
}

std::string_view to_string(OpCountPolicy p)
{
    return p == OpCountPolicy::Multi ? "multi" : "single";
}

std::string_view to_string(RunStatus s)
{
    switch (s) {
    case RunStatus::Optimal: return "optimal";
    case RunStatus::Stuck: return "stuck";
    case RunStatus::BudgetExhausted: return "budget";
    }
    return "?";
}

AcceptancePolicy parse_acceptance(std::string_view s)
{
    if (s == "nonstrict" || s == "gp" || s == ">=") {
        return AcceptancePolicy::NonStrict;
    }
    if (s == "strict" || s == "gpstar" || s == ">") {
        return AcceptancePolicy::Strict;
    }
    throw ConfigError("unknown acceptance policy '" + std::string(s) + "'");
}

OpCountPolicy parse_op_count(std::string_view s)
{
    if (s == "single") {
        return OpCountPolicy::Single;
    }
    if (s == "multi") {
        return OpCountPolicy::Multi;
    }
    throw ConfigError("unknown op-count policy '" + std::string(s) + "'");
}

namespace {

bool stuck_detection_exact(const RunConfig& c)
{
    return c.problem.kind == ProblemKind::Majority && c.acceptance == AcceptancePolicy::Strict
        && c.ops == OpCountPolicy::Single;
}

bool terminates_almost_surely(const RunConfig& c)
{
    if (c.problem.kind == ProblemKind::Order) {
        return true;
    }
    return c.acceptance == AcceptancePolicy::NonStrict && c.ops == OpCountPolicy::Single;
}

} // namespace

void validate(const RunConfig& config)
{
    if (config.problem.n < 1) {
        throw ConfigError("n must be at least 1");
    }
    try {
        check_initializer_id(config.initializer);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (config.initializer == "t-lopt" && config.problem.n < 2) {
        throw ConfigError("t-lopt requires n >= 2");
    }
    if (config.stuck_detection && !stuck_detection_exact(config)) {
        throw ConfigError("stuck detection is only exact for strict single-step MAJORITY");
    }
    if (config.budget == 0 && !config.stuck_detection && !terminates_almost_surely(config)) {
        throw ConfigError("unlimited budget needs stuck detection or a terminating problem/algorithm pair");
    }
}

std::string to_string(const TraceEntry& e)
{
    std::string s = std::to_string(e.evaluation) + '\t';
    for (std::size_t i = 0; i < e.ops.size(); ++i) {
        if (i > 0) {
            s += ',';
        }
        s += to_string(e.ops[i]);
    }
    s += '\t' + std::to_string(e.fitness_before) + '\t' + std::to_string(e.fitness_after) + '\t'
        + (e.accepted ? "1" : "0");
    return s;
}

bool operator==(const RunResult& a, const RunResult& b)
{
    auto key = [](const RunResult& r) {
        return std::tie(r.status, r.evaluations, r.accepted, r.initial_fitness, r.final_fitness, r.initial_nodes,
                        r.t_max_nodes, r.final_nodes, r.proposed_ops, r.final_tree);
    };
    if (key(a) != key(b) || a.trace.size() != b.trace.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        const auto& x = a.trace[i];
        const auto& y = b.trace[i];
        if (x.evaluation != y.evaluation || x.ops != y.ops || x.fitness_before != y.fitness_before
            || x.fitness_after != y.fitness_after || x.accepted != y.accepted) {
            return false;
        }
    }
    return true;
}

std::uint32_t sample_op_count(OpCountPolicy policy, Rng& rng)
{
    if (policy == OpCountPolicy::Single) {
        return 1;
    }
    static const double threshold = std::exp(-1.0);
    std::uint32_t poisson = 0;
    double product = rng.uniform01();
    while (product > threshold) {
        ++poisson;
        product *= rng.uniform01();
    }
    return 1 + poisson;
}

namespace {

/// Fitness bookkeeping for the current solution. MAJORITY in incremental
/// mode keeps a live profile that proposals update and roll back.
class Evaluator {
public:
    Evaluator(const RunConfig& config, const GpTree& initial)
        : problem_(config.problem),
          incremental_(config.problem.kind == ProblemKind::Majority && config.incremental_majority),
          profile_(config.problem.n)
    {
        fitness_ = from_scratch(initial);
    }

    int fitness() const noexcept { return fitness_; }

    int propose(const GpTree& candidate, std::span<const MutationRecord> records)
    {
        if (!incremental_) {
            return from_scratch_candidate(candidate);
        }
        int f = fitness_;
        for (const auto& r : records) {
            f += profile_.apply(r);
        }
        return f;
    }

    void commit(int f)
    {
        fitness_ = f;
        if (problem_.kind == ProblemKind::Majority && !incremental_) {
            profile_ = candidate_profile_;
        }
    }

    void rollback(std::span<const MutationRecord> records)
    {
        if (!incremental_) {
            return;
        }
        for (auto it = records.rbegin(); it != records.rend(); ++it) {
            profile_.apply(multiset_inverse(*it));
        }
    }

    const DeficitProfile& profile() const noexcept { return profile_; }

private:
    int from_scratch(const GpTree& tree)
    {
        tree.inorder_leaves(leaves_);
        if (problem_.kind == ProblemKind::Order) {
            return order_fitness_value(leaves_, problem_.n, seen_);
        }
        profile_ = DeficitProfile::from_leaves(leaves_, problem_.n);
        return profile_.fitness();
    }

    int from_scratch_candidate(const GpTree& tree)
    {
        tree.inorder_leaves(leaves_);
        if (problem_.kind == ProblemKind::Order) {
            return order_fitness_value(leaves_, problem_.n, seen_);
        }
        candidate_profile_ = DeficitProfile::from_leaves(leaves_, problem_.n);
        return candidate_profile_.fitness();
    }

    Problem problem_;
    bool incremental_;
    int fitness_ = 0;
    DeficitProfile profile_;
    DeficitProfile candidate_profile_{1};
    std::vector<Terminal> leaves_;
    std::vector<std::uint8_t> seen_;
};

} // namespace

RunResult run_from(const RunConfig& config, GpTree initial, Rng& rng)
{
    validate(config);
    if (initial.max_index() > config.problem.n) {
        throw ConfigError("initial tree uses a variable index above n");
    }
    const auto n = config.problem.n;
    const bool detect_stuck = config.stuck_detection;
    const bool tracing = config.trace == TraceLevel::Full;

    RunResult result;
    GpTree current = std::move(initial);
    GpTree candidate = current;
    Evaluator eval(config, current);

    result.evaluations = 1;
    result.initial_fitness = eval.fitness();
    result.initial_nodes = current.node_count();
    result.t_max_nodes = current.node_count();

    auto finished = [&]() -> bool {
        if (eval.fitness() == static_cast<int>(n)) {
            result.status = RunStatus::Optimal;
            return true;
        }
        if (detect_stuck && is_stuck_gpstar_single_majority(eval.profile())) {
            result.status = RunStatus::Stuck;
            return true;
        }
        return false;
    };

    std::vector<MutationRecord> records;
    bool done = finished();
    while (!done) {
        if (config.budget != 0 && result.evaluations >= config.budget) {
            result.status = RunStatus::BudgetExhausted;
            break;
        }
        candidate = current;
        records.clear();
        const auto k = sample_op_count(config.ops, rng);
        for (std::uint32_t j = 0; j < k; ++j) {
            records.push_back(hvl_prime_step(candidate, rng, n));
            ++result.proposed_ops[static_cast<std::size_t>(records.back().op)];
        }
        const int before = eval.fitness();
        const int after = eval.propose(candidate, records);
        ++result.evaluations;
        const bool accepted = accept(config.acceptance, before, after);
        if (tracing) {
            result.trace.push_back({result.evaluations, records, before, after, accepted});
        }
        if (accepted) {
            eval.commit(after);
            std::swap(current, candidate);
            ++result.accepted;
            result.t_max_nodes = std::max(result.t_max_nodes, current.node_count());
            done = finished();
        } else {
            eval.rollback(records);
        }
    }

    result.final_fitness = eval.fitness();
    result.final_nodes = current.node_count();
    result.final_tree = current.serialize();
    return result;
}

RunResult run(const RunConfig& config)
{
    validate(config);
    Rng rng(config.seed);
    auto initial = make_initial(config.initializer, config.problem.n, rng);
    return run_from(config, std::move(initial), rng);
}

} // namespace hvlgp
