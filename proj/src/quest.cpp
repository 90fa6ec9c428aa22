#include "gapquest/quest.hpp"

#include "gapquest/errors.hpp"

#include <algorithm>

namespace gapquest {

const char *to_string(QuestKind kind)
{
    switch (kind) {
    case QuestKind::add_tests: return "add_tests";
    case QuestKind::cover_branches: return "cover_branches";
    case QuestKind::cover_lines: return "cover_lines";
    case QuestKind::solve_challenges_of_kind: return "solve_challenges_of_kind";
    case QuestKind::solve_without_rejection: return "solve_without_rejection";
    }
    return "?";
}

QuestKind quest_kind_from_string(const std::string &text)
{
    for (auto k : all_quest_kinds) {
        if (text == to_string(k)) {
            return k;
        }
    }
    throw ValidationError("unknown quest kind '" + text + "'");
}

const char *to_string(QuestState state)
{
    switch (state) {
    case QuestState::current: return "current";
    case QuestState::completed: return "completed";
    case QuestState::failed: return "failed";
    }
    return "?";
}

QuestState quest_state_from_string(const std::string &text)
{
    for (auto s : {QuestState::current, QuestState::completed, QuestState::failed}) {
        if (text == to_string(s)) {
            return s;
        }
    }
    throw ValidationError("unknown quest state '" + text + "'");
}

void QuestConfig::validate() const
{
    for (auto kind : all_quest_kinds) {
        auto it = goals.find(kind);
        if (it == goals.end() || it->second.min == 0 || it->second.min > it->second.max) {
            throw ValidationError(std::string("bad goal range for ") + to_string(kind));
        }
    }
    for (auto kind : {QuestKind::add_tests, QuestKind::cover_lines, QuestKind::cover_branches}) {
        auto it = points_per_unit.find(kind);
        if (it == points_per_unit.end() || it->second == 0) {
            throw ValidationError(std::string("missing quest price for ") + to_string(kind));
        }
    }
    if (solve_points == 0) {
        throw ValidationError("solve_points must be positive");
    }
}

std::uint32_t quest_points(QuestKind kind, std::uint32_t goal, const QuestConfig &config)
{
    switch (kind) {
    case QuestKind::add_tests:
    case QuestKind::cover_lines:
    case QuestKind::cover_branches:
        return goal * config.points_per_unit.at(kind);
    case QuestKind::solve_challenges_of_kind:
    case QuestKind::solve_without_rejection:
        return config.solve_points;
    }
    return 1;
}

Quest generate_quest(const SourceModel &model, const QuestConfig &config,
                     const GenerationConfig &challenge_config, Rng &rng, std::string id,
                     std::uint64_t run_seq)
{
    const auto uncovered_lines = model.lines_total() - model.lines_covered();
    const auto uncovered_branches = model.branches_total() - model.branches_covered();

    std::vector<ChallengeKind> solvable;
    for (auto kind : all_challenge_kinds) {
        if (kind == ChallengeKind::build) {
            continue;
        }
        auto w = challenge_config.kind_weights.find(kind);
        if (w != challenge_config.kind_weights.end() && w->second > 0.0 &&
            !valid_targets(model, kind).empty()) {
            solvable.push_back(kind);
        }
    }

    // Upper bound on the goal each kind can reach from this model.
    struct Candidate
    {
        QuestKind kind;
        std::uint32_t cap;
    };
    std::vector<Candidate> candidates;
    for (auto kind : all_quest_kinds) {
        const auto range = config.goals.at(kind);
        std::uint64_t cap = range.max;
        switch (kind) {
        case QuestKind::cover_lines: cap = std::min<std::uint64_t>(cap, uncovered_lines); break;
        case QuestKind::cover_branches:
            cap = std::min<std::uint64_t>(cap, uncovered_branches);
            break;
        case QuestKind::solve_challenges_of_kind:
            if (solvable.empty()) {
                cap = 0;
            }
            break;
        default: break;
        }
        if (cap >= range.min) {
            candidates.push_back({kind, static_cast<std::uint32_t>(cap)});
        }
    }
    if (candidates.empty()) {
        throw NoAttainableQuest();
    }

    const auto &pick = candidates[static_cast<std::size_t>(rng.index(candidates.size()))];
    const auto lo = config.goals.at(pick.kind).min;

    Quest q;
    q.id = std::move(id);
    q.kind = pick.kind;
    q.goal = lo + static_cast<std::uint32_t>(rng.index(pick.cap - lo + 1));
    if (pick.kind == QuestKind::solve_challenges_of_kind) {
        q.constraint = solvable[static_cast<std::size_t>(rng.index(solvable.size()))];
    }
    q.baseline.tests_total = model.tests().total;
    q.baseline.lines_covered = model.lines_covered();
    q.baseline.branches_covered = model.branches_covered();
    q.points = quest_points(q.kind, q.goal, config);
    q.created_run = run_seq;
    return q;
}

namespace {

std::uint32_t clamp_delta(std::uint64_t now, std::uint64_t base, std::uint32_t goal)
{
    if (now <= base) {
        return 0;
    }
    return static_cast<std::uint32_t>(std::min<std::uint64_t>(now - base, goal));
}

} // namespace

Quest apply_run(Quest quest, const SourceModel &new_model,
                const std::vector<ChallengeOutcome> &outcomes, std::uint32_t rejections,
                std::uint64_t run_seq)
{
    if (quest.state != QuestState::current) {
        return quest;
    }

    auto solved_matching = [&](auto pred) {
        std::uint32_t n = 0;
        for (const auto &o : outcomes) {
            if (o.outcome == Outcome::solved && pred(o.kind)) {
                ++n;
            }
        }
        return n;
    };

    switch (quest.kind) {
    case QuestKind::add_tests:
        quest.progress = std::max(
            quest.progress,
            clamp_delta(new_model.tests().total, quest.baseline.tests_total, quest.goal));
        break;
    case QuestKind::cover_lines:
        quest.progress = std::max(
            quest.progress,
            clamp_delta(new_model.lines_covered(), quest.baseline.lines_covered, quest.goal));
        break;
    case QuestKind::cover_branches:
        quest.progress = std::max(
            quest.progress,
            clamp_delta(new_model.branches_covered(), quest.baseline.branches_covered, quest.goal));
        break;
    case QuestKind::solve_challenges_of_kind: {
        const auto n = solved_matching([&](ChallengeKind k) { return k == quest.constraint; });
        quest.progress = std::min(quest.goal, quest.progress + n);
        break;
    }
    case QuestKind::solve_without_rejection: {
        if (rejections > 0) {
            quest.progress = 0;
        }
        const auto n = solved_matching([](ChallengeKind) { return true; });
        quest.progress = std::min(quest.goal, quest.progress + n);
        break;
    }
    }

    if (quest.progress == quest.goal) {
        quest.state = QuestState::completed;
        quest.resolved_run = run_seq;
    }
    return quest;
}

std::uint32_t percent(const Quest &quest)
{
    if (quest.goal == 0) {
        return 0;
    }
    return static_cast<std::uint32_t>(100ULL * quest.progress / quest.goal);
}

std::string describe(const Quest &quest)
{
    const auto goal = std::to_string(quest.goal);
    switch (quest.kind) {
    case QuestKind::add_tests: return "Add " + goal + " tests to the test suite";
    case QuestKind::cover_branches: return "Cover " + goal + " additional branches";
    case QuestKind::cover_lines: return "Cover " + goal + " additional lines";
    case QuestKind::solve_challenges_of_kind:
        return "Solve " + goal + " " +
               (quest.constraint ? to_string(*quest.constraint) : "any") + " challenges";
    case QuestKind::solve_without_rejection:
        return "Solve " + goal + " challenges without rejecting one";
    }
    return {};
}

} // namespace gapquest
