#include "gapquest/progression.hpp"

#include "gapquest/errors.hpp"

#include <algorithm>
#include <set>

namespace gapquest {

std::size_t UserState::count(ChallengeState state) const
{
    return static_cast<std::size_t>(std::count_if(
        challenges.begin(), challenges.end(), [&](const Challenge &c) { return c.state == state; }));
}

std::size_t UserState::solved_of_kind(ChallengeKind kind) const
{
    return static_cast<std::size_t>(
        std::count_if(challenges.begin(), challenges.end(), [&](const Challenge &c) {
            return c.state == ChallengeState::solved && c.kind == kind;
        }));
}

std::size_t UserState::completed_quests() const
{
    return static_cast<std::size_t>(std::count_if(quests.begin(), quests.end(), [](const Quest &q) {
        return q.state == QuestState::completed;
    }));
}

const Quest *UserState::current_quest() const
{
    for (const auto &q : quests) {
        if (q.state == QuestState::current) {
            return &q;
        }
    }
    return nullptr;
}

Challenge *UserState::find_challenge(const std::string &id)
{
    for (auto &c : challenges) {
        if (c.id == id) {
            return &c;
        }
    }
    return nullptr;
}

const Challenge *UserState::find_challenge(const std::string &id) const
{
    return const_cast<UserState *>(this)->find_challenge(id);
}

std::uint64_t recompute_score(const UserState &user)
{
    std::uint64_t score = 0;
    for (const auto &c : user.challenges) {
        if (c.state == ChallengeState::solved) {
            score += c.points;
        }
    }
    for (const auto &q : user.quests) {
        if (q.state == QuestState::completed) {
            score += q.points;
        }
    }
    return score;
}

UserState apply_outcomes(UserState user, const std::vector<Challenge> &solved,
                         const std::vector<Quest> &completed_quests)
{
    std::set<std::string> seen;
    for (const auto &c : solved) {
        if (!seen.insert(c.id).second) {
            throw AccountingError("challenge " + c.id + " awarded twice");
        }
        auto *mine = user.find_challenge(c.id);
        if (mine == nullptr) {
            throw AccountingError("challenge " + c.id + " does not belong to " + user.user_id);
        }
        if (mine->state == ChallengeState::solved) {
            throw AccountingError("challenge " + c.id + " already awarded");
        }
        if (mine->state != ChallengeState::current) {
            throw AccountingError("challenge " + c.id + " is " + to_string(mine->state));
        }
        mine->state = ChallengeState::solved;
        mine->resolved_run = c.resolved_run ? c.resolved_run : mine->resolved_run;
        user.score += mine->points;
    }

    std::set<std::string> seen_quests;
    for (const auto &q : completed_quests) {
        if (!seen_quests.insert(q.id).second) {
            throw AccountingError("quest " + q.id + " awarded twice");
        }
        auto it = std::find_if(user.quests.begin(), user.quests.end(),
                               [&](const Quest &mine) { return mine.id == q.id; });
        if (it == user.quests.end()) {
            throw AccountingError("quest " + q.id + " does not belong to " + user.user_id);
        }
        if (it->state == QuestState::completed) {
            throw AccountingError("quest " + q.id + " already awarded");
        }
        *it = q;
        it->state = QuestState::completed;
        user.score += it->points;
    }
    return user;
}

const char *to_string(AchievementScope scope)
{
    return scope == AchievementScope::individual ? "individual" : "project";
}

AchievementScope achievement_scope_from_string(const std::string &text)
{
    if (text == "individual") return AchievementScope::individual;
    if (text == "project") return AchievementScope::project;
    throw ValidationError("unknown achievement scope '" + text + "'");
}

const char *to_string(AchievementRule rule)
{
    switch (rule) {
    case AchievementRule::tests_added: return "tests_added";
    case AchievementRule::challenges_solved: return "challenges_solved";
    case AchievementRule::quests_completed: return "quests_completed";
    case AchievementRule::mutation_challenges_solved: return "mutation_challenges_solved";
    case AchievementRule::classes_fully_covered: return "classes_fully_covered";
    case AchievementRule::project_line_coverage_percent: return "project_line_coverage_percent";
    }
    return "?";
}

AchievementRule achievement_rule_from_string(const std::string &text)
{
    for (auto r : {AchievementRule::tests_added, AchievementRule::challenges_solved,
                   AchievementRule::quests_completed, AchievementRule::mutation_challenges_solved,
                   AchievementRule::classes_fully_covered,
                   AchievementRule::project_line_coverage_percent}) {
        if (text == to_string(r)) {
            return r;
        }
    }
    throw ValidationError("unknown achievement rule '" + text + "'");
}

std::vector<AchievementDef> default_catalog()
{
    using R = AchievementRule;
    using S = AchievementScope;
    return {
        {"first_test", "First Test", "Add a test to the suite", false, S::individual,
         R::tests_added, 1},
        {"ten_tests", "Ten Tests", "Add ten tests to the suite", false, S::individual,
         R::tests_added, 10},
        {"challenge_novice", "Challenge Novice", "Solve your first challenge", false,
         S::individual, R::challenges_solved, 1},
        {"challenge_adept", "Challenge Adept", "Solve ten challenges", false, S::individual,
         R::challenges_solved, 10},
        {"quest_complete", "Quest Complete", "Complete a quest", false, S::individual,
         R::quests_completed, 1},
        {"mutant_hunter", "Mutant Hunter", "Solve five mutation challenges", false,
         S::individual, R::mutation_challenges_solved, 5},
        {"perfectionist", "Perfectionist", "Reach 100% line coverage in a class", true,
         S::individual, R::classes_fully_covered, 1},
        {"project_80", "Project 80", "Project line coverage reaches 80%", false, S::project,
         R::project_line_coverage_percent, 80},
    };
}

void validate_catalog(const std::vector<AchievementDef> &catalog)
{
    std::set<std::string> keys;
    for (const auto &def : catalog) {
        if (def.key.empty() || !keys.insert(def.key).second) {
            throw ValidationError("achievement keys must be unique and non-empty: '" + def.key +
                                  "'");
        }
    }
}

bool achievement_met(const AchievementDef &def, const UserState &user, const SourceModel &model)
{
    switch (def.rule) {
    case AchievementRule::tests_added: return user.tests_added >= def.threshold;
    case AchievementRule::challenges_solved:
        return user.count(ChallengeState::solved) >= def.threshold;
    case AchievementRule::quests_completed: return user.completed_quests() >= def.threshold;
    case AchievementRule::mutation_challenges_solved:
        return user.solved_of_kind(ChallengeKind::mutation) >= def.threshold;
    case AchievementRule::classes_fully_covered: {
        std::uint64_t full = 0;
        for (const auto &c : model.classes()) {
            if (c.lines_total > 0 && c.lines_covered == c.lines_total) {
                ++full;
            }
        }
        return full >= def.threshold;
    }
    case AchievementRule::project_line_coverage_percent: {
        const auto total = model.lines_total();
        return total > 0 && model.lines_covered() * 100 >= def.threshold * total;
    }
    }
    return false;
}

AchievementCheck check_achievements(UserState user, const SourceModel &model,
                                    const std::vector<AchievementDef> &catalog,
                                    const Unlock &stamp)
{
    AchievementCheck out;
    for (const auto &def : catalog) {
        if (user.achievements.count(def.key) == 0 && achievement_met(def, user, model)) {
            out.unlocked.push_back(def);
        }
    }
    for (const auto &def : out.unlocked) {
        user.achievements.emplace(def.key, stamp);
    }
    out.user = std::move(user);
    return out;
}

bool ranks_before(const LeaderboardRow &a, const LeaderboardRow &b)
{
    if (a.score != b.score) {
        return a.score > b.score;
    }
    if (a.solved_challenges != b.solved_challenges) {
        return a.solved_challenges > b.solved_challenges;
    }
    if (a.name != b.name) {
        return a.name < b.name;
    }
    return a.id < b.id;
}

namespace {

LeaderboardRow user_row(const UserState &u)
{
    LeaderboardRow row;
    row.id = u.user_id;
    row.name = u.display_name.empty() ? u.user_id : u.display_name;
    row.avatar_index = u.avatar_index;
    row.score = u.score;
    row.solved_challenges = u.count(ChallengeState::solved);
    row.completed_quests = u.completed_quests();
    row.achievements = u.achievements.size();
    return row;
}

} // namespace

std::vector<LeaderboardRow> leaderboard(const std::vector<UserState> &users)
{
    std::vector<LeaderboardRow> rows;
    rows.reserve(users.size());
    for (const auto &u : users) {
        rows.push_back(user_row(u));
    }
    std::sort(rows.begin(), rows.end(), ranks_before);
    return rows;
}

std::vector<LeaderboardRow> team_leaderboard(const std::vector<UserState> &users)
{
    std::map<std::string, LeaderboardRow> teams;
    for (const auto &u : users) {
        if (!u.team) {
            continue;
        }
        auto [it, inserted] = teams.try_emplace(*u.team);
        auto &row = it->second;
        const auto member = user_row(u);
        if (inserted) {
            row.id = *u.team;
            row.name = *u.team;
            row.members = 0;
        }
        row.score += member.score;
        row.solved_challenges += member.solved_challenges;
        row.completed_quests += member.completed_quests;
        row.achievements += member.achievements;
        ++row.members;
    }
    std::vector<LeaderboardRow> rows;
    for (auto &[name, row] : teams) {
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), ranks_before);
    return rows;
}

} // namespace gapquest
