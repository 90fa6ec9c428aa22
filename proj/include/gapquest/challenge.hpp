#pragma once

#include "gapquest/model.hpp"
#include "gapquest/random.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gapquest {

enum class ChallengeKind {
    build,
    test,
    class_coverage,
    method_coverage,
    line_coverage,
    branch_coverage,
    mutation,
};

inline constexpr std::array<ChallengeKind, 7> all_challenge_kinds{
    ChallengeKind::build,           ChallengeKind::test,          ChallengeKind::class_coverage,
    ChallengeKind::method_coverage, ChallengeKind::line_coverage, ChallengeKind::branch_coverage,
    ChallengeKind::mutation,
};

const char *to_string(ChallengeKind kind);
ChallengeKind challenge_kind_from_string(const std::string &text);

enum class BuildStatus { success, failure };
const char *to_string(BuildStatus status);
BuildStatus build_status_from_string(const std::string &text);

struct ClassTarget
{
    std::string class_name;
    auto operator<=>(const ClassTarget &) const = default;
};

struct MethodTarget
{
    std::string class_name;
    std::string name;
    std::string signature;
    auto operator<=>(const MethodTarget &) const = default;
};

/// build and test challenges carry no target (monostate).
using Target = std::variant<std::monostate, ClassTarget, MethodTarget, LineRef, MutantKey>;

/// Class a target lives in; empty for untargeted kinds.
std::string target_class(const Target &target);

/// Metrics captured when a challenge is generated; outcomes compare against these.
struct Baseline
{
    std::optional<std::uint32_t> class_lines_covered;
    std::optional<std::uint32_t> method_lines_covered;
    std::optional<std::uint32_t> line_branch_covered;
    std::optional<std::uint32_t> tests_total;

    bool operator==(const Baseline &) const = default;
};

enum class ChallengeState { current, solved, rejected, expired };
const char *to_string(ChallengeState state);
ChallengeState challenge_state_from_string(const std::string &text);

struct Challenge
{
    std::string id;
    ChallengeKind kind = ChallengeKind::test;
    Target target;
    Baseline baseline;
    std::uint32_t points = 1;
    ChallengeState state = ChallengeState::current;
    std::uint64_t created_run = 0;
    std::optional<std::uint64_t> resolved_run;
    std::optional<std::string> rejection_reason;

    bool operator==(const Challenge &) const = default;
};

struct GenerationConfig
{
    std::uint32_t max_current = 3;
    std::map<ChallengeKind, double> kind_weights{
        {ChallengeKind::mutation, 0.30},        {ChallengeKind::line_coverage, 0.30},
        {ChallengeKind::branch_coverage, 0.15}, {ChallengeKind::method_coverage, 0.10},
        {ChallengeKind::class_coverage, 0.10},  {ChallengeKind::test, 0.05},
    };
    std::map<ChallengeKind, std::uint32_t> points_table{
        {ChallengeKind::build, 1},           {ChallengeKind::test, 1},
        {ChallengeKind::class_coverage, 2},  {ChallengeKind::method_coverage, 2},
        {ChallengeKind::line_coverage, 2},   {ChallengeKind::branch_coverage, 3},
        {ChallengeKind::mutation, 4},
    };
    std::uint64_t seed = 0;

    /// Throws ValidationError on zero max_current, negative or all-zero
    /// drawable weights, or a missing/zero price.
    void validate() const;
    bool operator==(const GenerationConfig &) const = default;
};

/// Every target a challenge of `kind` may point at, in canonical order.
std::vector<Target> valid_targets(const SourceModel &model, ChallengeKind kind);

/// Weighted class draw favouring low line coverage: w(c) = 1 - covered/total,
/// restricted to `eligible`. Falls back to a uniform draw when every eligible
/// class is fully line-covered. Throws NoEligibleClass on an empty set.
std::string select_class(const SourceModel &model, const std::vector<std::string> &eligible,
                         Rng &rng);

/// Same draw with eligibility taken from valid_targets(model, kind).
std::string select_class(const SourceModel &model, ChallengeKind kind, Rng &rng);

std::uint32_t points_for(ChallengeKind kind, const GenerationConfig &config);

/// Tops the user up to config.max_current current challenges.
///
/// `user_challenges` is the user's full list: current ones count against the
/// cap, and the (kind, target) pairs of current and rejected challenges are
/// never drawn again. A failing build with no open build challenge yields a
/// build challenge first. Output depends only on the arguments.
std::vector<Challenge> generate(const SourceModel &model,
                                const std::vector<Challenge> &user_challenges,
                                const GenerationConfig &config, std::uint64_t run_seq,
                                BuildStatus latest_build = BuildStatus::success);

enum class Outcome { still_open, solved, expired };
const char *to_string(Outcome outcome);

/// Decides a current challenge against the model of a new run.
///
/// Coverage kinds need strict improvement over the generation baseline;
/// solved wins over expired.
Outcome evaluate(const Challenge &challenge, const SourceModel &prev_model,
                 const SourceModel &new_model, BuildStatus new_run_status);

} // namespace gapquest
