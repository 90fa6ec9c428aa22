#pragma once

#include "gapquest/challenge.hpp"
#include "gapquest/model.hpp"
#include "gapquest/quest.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gapquest {

inline constexpr int avatar_count = 50;

struct Unlock
{
    std::string at;
    std::uint64_t run_seq = 0;
    bool operator==(const Unlock &) const = default;
};

struct UserState
{
    std::string user_id;
    std::string display_name;
    int avatar_index = 0;
    std::optional<std::string> team;
    std::uint64_t score = 0;
    std::vector<Challenge> challenges;
    std::vector<Quest> quests;
    std::map<std::string, Unlock> achievements;
    std::uint64_t event_seq = 0;
    /// Sum of positive test-count deltas between consecutive runs.
    std::uint64_t tests_added = 0;

    std::size_t count(ChallengeState state) const;
    std::size_t solved_of_kind(ChallengeKind kind) const;
    std::size_t completed_quests() const;
    const Quest *current_quest() const;
    Challenge *find_challenge(const std::string &id);
    const Challenge *find_challenge(const std::string &id) const;

    bool operator==(const UserState &) const = default;
};

/// Score derived from the item lists; must always equal UserState::score.
std::uint64_t recompute_score(const UserState &user);

/// Records solved challenges and completed quests and adds their points.
/// Throws AccountingError when a challenge id appears twice, is unknown, or
/// was already solved.
UserState apply_outcomes(UserState user, const std::vector<Challenge> &solved,
                         const std::vector<Quest> &completed_quests);

enum class AchievementScope { individual, project };

enum class AchievementRule {
    tests_added,
    challenges_solved,
    quests_completed,
    mutation_challenges_solved,
    classes_fully_covered,
    project_line_coverage_percent,
};

const char *to_string(AchievementScope scope);
AchievementScope achievement_scope_from_string(const std::string &text);
const char *to_string(AchievementRule rule);
AchievementRule achievement_rule_from_string(const std::string &text);

struct AchievementDef
{
    std::string key;
    std::string title;
    std::string description;
    bool secret = false;
    AchievementScope scope = AchievementScope::individual;
    AchievementRule rule = AchievementRule::challenges_solved;
    std::uint64_t threshold = 1;

    bool operator==(const AchievementDef &) const = default;
};

std::vector<AchievementDef> default_catalog();

/// Throws ValidationError on duplicate keys.
void validate_catalog(const std::vector<AchievementDef> &catalog);

bool achievement_met(const AchievementDef &def, const UserState &user, const SourceModel &model);

struct AchievementCheck
{
    UserState user;
    std::vector<AchievementDef> unlocked;
};

/// Unlocks every catalog entry whose rule now holds and that the user does
/// not have yet, stamping each with `stamp`.
AchievementCheck check_achievements(UserState user, const SourceModel &model,
                                    const std::vector<AchievementDef> &catalog,
                                    const Unlock &stamp);

struct LeaderboardRow
{
    std::string id;
    std::string name;
    std::optional<int> avatar_index;
    std::uint64_t score = 0;
    std::uint64_t solved_challenges = 0;
    std::uint64_t completed_quests = 0;
    std::uint64_t achievements = 0;
    std::uint64_t members = 1;

    bool operator==(const LeaderboardRow &) const = default;
};

/// Score desc, then solved challenges desc, then name asc, then id asc.
bool ranks_before(const LeaderboardRow &a, const LeaderboardRow &b);

std::vector<LeaderboardRow> leaderboard(const std::vector<UserState> &users);

/// One row per team with member sums; users without a team are left out.
std::vector<LeaderboardRow> team_leaderboard(const std::vector<UserState> &users);

} // namespace gapquest
