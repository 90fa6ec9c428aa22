#pragma once

#include "gapquest/challenge.hpp"
#include "gapquest/model.hpp"
#include "gapquest/progression.hpp"
#include "gapquest/quest.hpp"
#include "gapquest/serialization.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace gapquest {

inline constexpr int schema_version = 1;

enum class EventKind {
    build_finished,
    challenge_solved,
    challenge_expired,
    quest_completed,
    achievement_unlocked,
    challenge_new,
    quest_new,
};

const char *to_string(EventKind kind);
EventKind event_kind_from_string(const std::string &text);

/// Notification record. Payloads reference entities by id only.
struct Event
{
    std::uint64_t seq = 0;
    EventKind kind = EventKind::build_finished;
    Json payload;
    std::uint64_t run_seq = 0;

    bool operator==(const Event &) const = default;
};

void to_json(Json &j, const Event &v);
void from_json(const Json &j, Event &v);

struct ArtifactDigests
{
    std::string coverage;
    std::string mutations;
    std::vector<std::string> tests;

    bool operator==(const ArtifactDigests &) const = default;
};

struct RunRecord
{
    std::uint64_t run_seq = 0;
    std::string commit;
    BuildStatus build_status = BuildStatus::success;
    std::string received_at;
    ArtifactDigests digests;
    /// Set when the reports could not be ingested.
    std::optional<std::string> ingest_error;

    bool operator==(const RunRecord &) const = default;
};

void to_json(Json &j, const RunRecord &v);
void from_json(const Json &j, RunRecord &v);

struct ProjectConfig
{
    GenerationConfig generation;
    QuestConfig quests;
    std::vector<AchievementDef> catalog = default_catalog();

    void validate() const;
    bool operator==(const ProjectConfig &) const = default;
};

void to_json(Json &j, const ProjectConfig &v);
void from_json(const Json &j, ProjectConfig &v);

/// Everything the engine keeps about one user of a project.
struct UserRecord
{
    UserState state;
    std::vector<RunRecord> runs;
    /// Model of the latest successfully ingested run.
    std::optional<SourceModel> model;
    /// Rejections since the last run; applied to quests at the next run.
    std::uint32_t pending_rejections = 0;
    std::vector<Event> events;

    std::uint64_t latest_run() const { return runs.empty() ? 0 : runs.back().run_seq; }
    bool operator==(const UserRecord &) const = default;
};

struct ProjectState
{
    std::string project_id;
    ProjectConfig config;
    std::map<std::string, UserRecord> users;

    std::vector<UserState> user_states() const;
    bool operator==(const ProjectState &) const = default;
};

struct RunInput
{
    std::string commit;
    BuildStatus build_status = BuildStatus::success;
    std::string coverage;
    std::string mutations;
    std::vector<std::string> tests;
    /// ISO-8601 UTC; defaults to the current time.
    std::optional<std::string> received_at;
};

struct RunReport
{
    std::uint64_t run_seq = 0;
    std::vector<Event> events;
    std::vector<std::string> warnings;

    std::map<std::string, std::size_t> counts() const;
    std::vector<std::string> ids_of(EventKind kind, const char *field) const;
};

void to_json(Json &j, const RunReport &v);

struct NewUser
{
    std::string user_id;
    std::string display_name;
    std::optional<std::string> team;
    int avatar_index = 0;
};

std::string now_iso8601();

/// Runs the per-run pipeline on `state` in place: parse, evaluate current
/// challenges, advance the quest, award points, unlock achievements, top up
/// challenges and quest, and append events.
///
/// On unparseable reports the run is still appended to the user's history
/// and IngestError is thrown; nothing else changes.
RunReport apply_ingest(ProjectState &state, const std::string &user_id, const RunInput &input);

/// Rejects a current challenge and immediately generates its replacement
/// against the user's latest model.
RunReport apply_rejection(ProjectState &state, const std::string &user_id,
                          const std::string &challenge_id, const std::string &reason);

void apply_add_user(ProjectState &state, const NewUser &user);

std::vector<Event> events_since(const ProjectState &state, const std::string &user_id,
                                std::uint64_t after_seq);

/// Checks the stored score against the item lists for every user; throws
/// AccountingError on mismatch.
void verify_scores(const ProjectState &state);

class Store;

/// Thread-safe façade over the state directory: one writer per project,
/// readers get the last committed snapshot.
class Engine
{
public:
    explicit Engine(std::filesystem::path state_root);
    ~Engine();

    Engine(const Engine &) = delete;
    Engine &operator=(const Engine &) = delete;

    const std::filesystem::path &state_root() const noexcept;

    void init_project(const std::string &project_id, ProjectConfig config = {});
    /// Registers a user and returns its API token.
    std::string add_user(const std::string &project_id, const NewUser &user);

    RunReport ingest_run(const std::string &project_id, const std::string &user_id,
                         const RunInput &input);
    RunReport reject_challenge(const std::string &project_id, const std::string &user_id,
                               const std::string &challenge_id, const std::string &reason);
    std::vector<Event> events_since(const std::string &project_id, const std::string &user_id,
                                    std::uint64_t after_seq) const;

    std::shared_ptr<const ProjectState> snapshot(const std::string &project_id) const;
    bool has_project(const std::string &project_id) const;

    /// User id owning `token`, compared in constant time.
    std::optional<std::string> authenticate(const std::string &project_id,
                                            const std::string &token) const;

private:
    struct Slot;
    Slot &slot(const std::string &project_id) const;

    std::unique_ptr<Store> store_;
    mutable std::mutex slots_mu_;
    mutable std::map<std::string, std::unique_ptr<Slot>> slots_;
};

} // namespace gapquest
