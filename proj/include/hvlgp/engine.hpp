#pragma once

#include "hvlgp/problems.hpp"
#include "hvlgp/rng.hpp"
#include "hvlgp/tree.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hvlgp {

/// NonStrict accepts f' >= f, Strict only f' > f.
enum class AcceptancePolicy : std::uint8_t { NonStrict, Strict };
/// Single applies one sub-operation per proposal, Multi 1 + Poisson(1).
enum class OpCountPolicy : std::uint8_t { Single, Multi };
enum class TraceLevel : std::uint8_t { None, Full };
enum class RunStatus : std::uint8_t { Optimal, Stuck, BudgetExhausted };

std::string_view to_string(AcceptancePolicy p);
std::string_view to_string(OpCountPolicy p);
std::string_view to_string(RunStatus s);
AcceptancePolicy parse_acceptance(std::string_view s);
OpCountPolicy parse_op_count(std::string_view s);

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct RunConfig {
    Problem problem{};
    AcceptancePolicy acceptance = AcceptancePolicy::NonStrict;
    OpCountPolicy ops = OpCountPolicy::Single;
    /// "unity", "adversarial-neg1", "t-lopt" or "text:<tree>".
    std::string initializer = "unity";
    std::uint64_t seed = 0;
    /// Maximum number of fitness evaluations; 0 means unlimited.
    std::uint64_t budget = 0;
    bool stuck_detection = false;
    /// Evaluate MAJORITY from count deltas instead of a full leaf scan.
    bool incremental_majority = true;
    TraceLevel trace = TraceLevel::None;
};

/// Throws ConfigError when the configuration contradicts itself, e.g. an
/// unlimited budget on a pair with no termination guarantee.
void validate(const RunConfig& config);

struct TraceEntry {
    std::uint64_t evaluation = 0;
    std::vector<MutationRecord> ops;
    int fitness_before = 0;
    int fitness_after = 0;
    bool accepted = false;
};

std::string to_string(const TraceEntry& e);

struct RunResult {
    RunStatus status = RunStatus::BudgetExhausted;
    /// Fitness evaluations, counting the initial solution as evaluation 1.
    std::uint64_t evaluations = 0;
    std::uint64_t accepted = 0;
    int initial_fitness = 0;
    int final_fitness = 0;
    std::size_t initial_nodes = 0;
    /// Largest node count of the current solution over the run.
    std::size_t t_max_nodes = 0;
    std::size_t final_nodes = 0;
    /// Proposed sub-operations by kind (substitute, insert, delete).
    std::array<std::uint64_t, 3> proposed_ops{};
    std::string final_tree;
    std::vector<TraceEntry> trace;

    friend bool operator==(const RunResult&, const RunResult&);
};

/// k = 1 for Single; 1 + Poisson(1) via Knuth's product of uniforms for Multi.
std::uint32_t sample_op_count(OpCountPolicy policy, Rng& rng);

constexpr bool accept(AcceptancePolicy policy, int f_old, int f_new) noexcept
{
    return policy == AcceptancePolicy::Strict ? f_new > f_old : f_new >= f_old;
}

/// Runs the (1+1) loop from the configured initializer.
RunResult run(const RunConfig& config);

/// Runs the (1+1) loop from an explicit initial tree. The generator is
/// used for mutation only.
RunResult run_from(const RunConfig& config, GpTree initial, Rng& rng);

} // namespace hvlgp
