#pragma once

#include "gapquest/challenge.hpp"
#include "gapquest/model.hpp"
#include "gapquest/random.hpp"

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gapquest {

enum class QuestKind {
    add_tests,
    cover_branches,
    cover_lines,
    solve_challenges_of_kind,
    solve_without_rejection,
};

inline constexpr std::array<QuestKind, 5> all_quest_kinds{
    QuestKind::add_tests, QuestKind::cover_branches, QuestKind::cover_lines,
    QuestKind::solve_challenges_of_kind, QuestKind::solve_without_rejection,
};

const char *to_string(QuestKind kind);
QuestKind quest_kind_from_string(const std::string &text);

enum class QuestState { current, completed, failed };
const char *to_string(QuestState state);
QuestState quest_state_from_string(const std::string &text);

struct QuestBaseline
{
    std::uint32_t tests_total = 0;
    std::uint64_t lines_covered = 0;
    std::uint64_t branches_covered = 0;

    bool operator==(const QuestBaseline &) const = default;
};

struct Quest
{
    std::string id;
    QuestKind kind = QuestKind::add_tests;
    std::uint32_t goal = 1;
    std::uint32_t progress = 0;
    std::optional<ChallengeKind> constraint;
    QuestBaseline baseline;
    QuestState state = QuestState::current;
    std::uint32_t points = 1;
    std::uint64_t created_run = 0;
    std::optional<std::uint64_t> resolved_run;

    bool operator==(const Quest &) const = default;
};

struct GoalRange
{
    std::uint32_t min = 1;
    std::uint32_t max = 1;
    bool operator==(const GoalRange &) const = default;
};

struct QuestConfig
{
    std::map<QuestKind, GoalRange> goals{
        {QuestKind::add_tests, {2, 4}},
        {QuestKind::cover_lines, {3, 8}},
        {QuestKind::cover_branches, {2, 5}},
        {QuestKind::solve_challenges_of_kind, {2, 3}},
        {QuestKind::solve_without_rejection, {2, 3}},
    };
    /// Per-goal-unit price for the counting kinds.
    std::map<QuestKind, std::uint32_t> points_per_unit{
        {QuestKind::add_tests, 1},
        {QuestKind::cover_lines, 1},
        {QuestKind::cover_branches, 2},
    };
    /// Flat price for the challenge-solving kinds.
    std::uint32_t solve_points = 5;
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const QuestConfig &) const = default;
};

std::uint32_t quest_points(QuestKind kind, std::uint32_t goal, const QuestConfig &config);

/// Draws one quest among the kinds whose minimum goal is attainable on
/// `model`. Throws NoAttainableQuest when none is.
Quest generate_quest(const SourceModel &model, const QuestConfig &config,
                     const GenerationConfig &challenge_config, Rng &rng, std::string id,
                     std::uint64_t run_seq);

struct ChallengeOutcome
{
    ChallengeKind kind;
    Outcome outcome;
};

/// Advances a current quest by one run. `rejections` counts challenges the
/// user rejected since the previous run; they are applied before the run's
/// solves.
Quest apply_run(Quest quest, const SourceModel &new_model,
                const std::vector<ChallengeOutcome> &outcomes, std::uint32_t rejections,
                std::uint64_t run_seq);

/// floor(100 * progress / goal).
std::uint32_t percent(const Quest &quest);

std::string describe(const Quest &quest);

} // namespace gapquest
