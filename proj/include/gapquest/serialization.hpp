#pragma once

#include "gapquest/challenge.hpp"
#include "gapquest/model.hpp"
#include "gapquest/progression.hpp"
#include "gapquest/quest.hpp"

#include <json.hpp>

namespace gapquest {

using Json = nlohmann::json;

void to_json(Json &j, const LineRef &v);
void from_json(const Json &j, LineRef &v);
void to_json(Json &j, const LineCov &v);
void from_json(const Json &j, LineCov &v);
void to_json(Json &j, const MethodCov &v);
void from_json(const Json &j, MethodCov &v);
void to_json(Json &j, const ClassCov &v);
void from_json(const Json &j, ClassCov &v);
void to_json(Json &j, const MutantKey &v);
void from_json(const Json &j, MutantKey &v);
void to_json(Json &j, const Mutant &v);
void from_json(const Json &j, Mutant &v);
void to_json(Json &j, const TestSnapshot &v);
void from_json(const Json &j, TestSnapshot &v);
void to_json(Json &j, const SourceModel &v);
/// Goes through assemble_model, so invariants are re-checked on load.
void from_json(const Json &j, SourceModel &v);

Json target_to_json(const Target &t);
Target target_from_json(const Json &j);

void to_json(Json &j, const Baseline &v);
void from_json(const Json &j, Baseline &v);
void to_json(Json &j, const Challenge &v);
void from_json(const Json &j, Challenge &v);
void to_json(Json &j, const GenerationConfig &v);
void from_json(const Json &j, GenerationConfig &v);

void to_json(Json &j, const Quest &v);
void from_json(const Json &j, Quest &v);
void to_json(Json &j, const QuestConfig &v);
void from_json(const Json &j, QuestConfig &v);

void to_json(Json &j, const Unlock &v);
void from_json(const Json &j, Unlock &v);
void to_json(Json &j, const UserState &v);
void from_json(const Json &j, UserState &v);
void to_json(Json &j, const AchievementDef &v);
void from_json(const Json &j, AchievementDef &v);
void to_json(Json &j, const LeaderboardRow &v);

/// Challenge as shown to clients: adds a human-readable description.
Json challenge_view(const Challenge &c, const SourceModel *model);
/// Quest as shown to clients: adds percent and description.
Json quest_view(const Quest &q);

} // namespace gapquest
