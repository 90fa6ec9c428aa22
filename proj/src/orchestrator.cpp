#include "gapquest/orchestrator.hpp"

#include "gapquest/digest.hpp"
#include "gapquest/errors.hpp"
#include "gapquest/report_ingest.hpp"
#include "gapquest/store.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <ctime>

namespace gapquest {

const char *to_string(EventKind kind)
{
    switch (kind) {
    case EventKind::build_finished: return "build_finished";
    case EventKind::challenge_solved: return "challenge_solved";
    case EventKind::challenge_expired: return "challenge_expired";
    case EventKind::quest_completed: return "quest_completed";
    case EventKind::achievement_unlocked: return "achievement_unlocked";
    case EventKind::challenge_new: return "challenge_new";
    case EventKind::quest_new: return "quest_new";
    }
    return "?";
}

EventKind event_kind_from_string(const std::string &text)
{
    for (auto k : {EventKind::build_finished, EventKind::challenge_solved,
                   EventKind::challenge_expired, EventKind::quest_completed,
                   EventKind::achievement_unlocked, EventKind::challenge_new,
                   EventKind::quest_new}) {
        if (text == to_string(k)) {
            return k;
        }
    }
    throw ValidationError("unknown event kind '" + text + "'");
}

void to_json(Json &j, const Event &v)
{
    j = Json{{"seq", v.seq}, {"kind", to_string(v.kind)}, {"payload", v.payload},
             {"run_seq", v.run_seq}};
}

void from_json(const Json &j, Event &v)
{
    j.at("seq").get_to(v.seq);
    v.kind = event_kind_from_string(j.at("kind").get<std::string>());
    v.payload = j.at("payload");
    j.at("run_seq").get_to(v.run_seq);
}

void to_json(Json &j, const RunRecord &v)
{
    j = Json{{"run_seq", v.run_seq},
             {"commit", v.commit},
             {"build_status", to_string(v.build_status)},
             {"received_at", v.received_at},
             {"digests",
              {{"coverage", v.digests.coverage},
               {"mutations", v.digests.mutations},
               {"tests", v.digests.tests}}},
             {"ingest_error", v.ingest_error ? Json(*v.ingest_error) : Json(nullptr)}};
}

void from_json(const Json &j, RunRecord &v)
{
    j.at("run_seq").get_to(v.run_seq);
    j.at("commit").get_to(v.commit);
    v.build_status = build_status_from_string(j.at("build_status").get<std::string>());
    j.at("received_at").get_to(v.received_at);
    const auto &d = j.at("digests");
    d.at("coverage").get_to(v.digests.coverage);
    d.at("mutations").get_to(v.digests.mutations);
    d.at("tests").get_to(v.digests.tests);
    if (j.contains("ingest_error") && !j.at("ingest_error").is_null()) {
        v.ingest_error = j.at("ingest_error").get<std::string>();
    } else {
        v.ingest_error.reset();
    }
}

void ProjectConfig::validate() const
{
    generation.validate();
    quests.validate();
    validate_catalog(catalog);
}

void to_json(Json &j, const ProjectConfig &v)
{
    j = Json{{"generation", v.generation}, {"quests", v.quests}, {"catalog", v.catalog}};
}

void from_json(const Json &j, ProjectConfig &v)
{
    j.at("generation").get_to(v.generation);
    j.at("quests").get_to(v.quests);
    j.at("catalog").get_to(v.catalog);
}

std::vector<UserState> ProjectState::user_states() const
{
    std::vector<UserState> out;
    out.reserve(users.size());
    for (const auto &[id, rec] : users) {
        out.push_back(rec.state);
    }
    return out;
}

std::map<std::string, std::size_t> RunReport::counts() const
{
    std::map<std::string, std::size_t> out;
    for (const auto &e : events) {
        ++out[to_string(e.kind)];
    }
    return out;
}

std::vector<std::string> RunReport::ids_of(EventKind kind, const char *field) const
{
    std::vector<std::string> out;
    for (const auto &e : events) {
        if (e.kind == kind && e.payload.contains(field)) {
            out.push_back(e.payload.at(field).get<std::string>());
        }
    }
    return out;
}

void to_json(Json &j, const RunReport &v)
{
    j = Json{{"run_seq", v.run_seq},
             {"counts", v.counts()},
             {"events", v.events},
             {"warnings", v.warnings}};
}

std::string now_iso8601()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

UserRecord &require_user(ProjectState &state, const std::string &user_id)
{
    auto it = state.users.find(user_id);
    if (it == state.users.end()) {
        throw NotRegistered("user '" + user_id + "' is not registered in project '" +
                            state.project_id + "'");
    }
    return it->second;
}

GenerationConfig config_for(const ProjectState &state, const std::string &user_id)
{
    auto cfg = state.config.generation;
    cfg.seed = mix_seed({cfg.seed, hash_text(user_id)});
    return cfg;
}

void emit(UserRecord &rec, RunReport &report, EventKind kind, Json payload, std::uint64_t run_seq)
{
    Event e;
    e.seq = ++rec.state.event_seq;
    e.kind = kind;
    e.payload = std::move(payload);
    e.run_seq = run_seq;
    rec.events.push_back(e);
    report.events.push_back(std::move(e));
}

bool is_hex(const std::string &s)
{
    return !s.empty() &&
           std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isxdigit(c) != 0; });
}

std::optional<BuildStatus> latest_ingested_status(const UserRecord &rec)
{
    for (auto it = rec.runs.rbegin(); it != rec.runs.rend(); ++it) {
        if (!it->ingest_error) {
            return it->build_status;
        }
    }
    return std::nullopt;
}

void ensure_quest(ProjectState &state, UserRecord &rec, const SourceModel &model,
                  std::uint64_t run_seq, std::vector<std::string> &new_quests)
{
    if (rec.state.current_quest() != nullptr) {
        return;
    }
    auto &user = rec.state;
    Rng rng(mix_seed({state.config.quests.seed, hash_text(user.user_id), run_seq,
                      user.quests.size()}));
    try {
        auto q = generate_quest(model, state.config.quests, state.config.generation, rng,
                                "q" + std::to_string(user.quests.size() + 1), run_seq);
        new_quests.push_back(q.id);
        user.quests.push_back(std::move(q));
    } catch (const NoAttainableQuest &) {
    }
}

} // namespace

RunReport apply_ingest(ProjectState &state, const std::string &user_id, const RunInput &input)
{
    auto &rec = require_user(state, user_id);
    auto &user = rec.state;

    if (!is_hex(input.commit)) {
        throw ValidationError("commit must be a non-empty hex string");
    }
    for (const auto &r : rec.runs) {
        if (r.commit == input.commit && !r.ingest_error) {
            throw ConflictError("commit " + input.commit + " was already ingested as run " +
                                std::to_string(r.run_seq));
        }
    }

    RunReport report;
    RunRecord run;
    run.run_seq = rec.latest_run() + 1;
    run.commit = input.commit;
    run.build_status = input.build_status;
    run.received_at = input.received_at.value_or(now_iso8601());
    run.digests.coverage = sha256_hex(input.coverage);
    run.digests.mutations = sha256_hex(input.mutations);
    for (const auto &t : input.tests) {
        run.digests.tests.push_back(sha256_hex(t));
    }
    report.run_seq = run.run_seq;
    const auto run_seq = run.run_seq;

    // (1) parse and assemble
    std::optional<SourceModel> parsed;
    auto fail = [&](const char *kind, const std::string &what, SourcePosition pos = {}) {
        run.ingest_error = std::string(kind) + ": " + what;
        rec.runs.push_back(run);
        return IngestError(kind, what, pos);
    };
    try {
        auto classes = parse_coverage(input.coverage);
        auto mutants = parse_mutations(input.mutations);
        auto tests = parse_test_results(input.tests);
        report.warnings = std::move(tests.warnings);
        parsed = assemble_model(std::move(classes), std::move(mutants), std::move(tests.snapshot));
    } catch (const ParseError &e) {
        throw fail("ParseError", e.what(), e.position());
    } catch (const SchemaError &e) {
        throw fail("SchemaError", e.what());
    } catch (const DuplicateMutantError &e) {
        throw fail("DuplicateMutantError", e.what());
    } catch (const ModelError &e) {
        throw fail("ModelError", e.what());
    }
    rec.runs.push_back(run);
    const SourceModel &model = *parsed;
    const SourceModel &prev = rec.model ? *rec.model : model;

    // (2) evaluate current challenges
    std::vector<Challenge> solved;
    std::vector<std::string> expired;
    std::vector<ChallengeOutcome> outcomes;
    for (auto &c : user.challenges) {
        if (c.state != ChallengeState::current) {
            continue;
        }
        const auto outcome = evaluate(c, prev, model, input.build_status);
        outcomes.push_back({c.kind, outcome});
        if (outcome == Outcome::solved) {
            auto done = c;
            done.resolved_run = run_seq;
            solved.push_back(std::move(done));
        } else if (outcome == Outcome::expired) {
            c.state = ChallengeState::expired;
            c.resolved_run = run_seq;
            expired.push_back(c.id);
        }
    }

    // (3) quest progress, including rejections queued since the last run
    std::vector<Quest> completed;
    for (auto &q : user.quests) {
        if (q.state != QuestState::current) {
            continue;
        }
        auto next = apply_run(q, model, outcomes, rec.pending_rejections, run_seq);
        if (next.state == QuestState::completed) {
            completed.push_back(std::move(next));
        } else {
            q = std::move(next);
        }
    }
    rec.pending_rejections = 0;

    // (4) points
    if (rec.model && model.tests().total > rec.model->tests().total) {
        user.tests_added += model.tests().total - rec.model->tests().total;
    }
    user = apply_outcomes(std::move(user), solved, completed);

    // (5) achievements
    const Unlock stamp{run.received_at, run_seq};
    auto check = check_achievements(std::move(user), model, state.config.catalog, stamp);
    user = std::move(check.user);

    // (6) top up challenges and quest
    auto fresh = generate(model, user.challenges, config_for(state, user_id), run_seq,
                          input.build_status);
    for (const auto &c : fresh) {
        user.challenges.push_back(c);
    }
    std::vector<std::string> new_quests;
    ensure_quest(state, rec, model, run_seq, new_quests);

    // (7) events in fixed kind order
    emit(rec, report, EventKind::build_finished,
         Json{{"commit", input.commit}, {"status", to_string(input.build_status)}}, run_seq);
    for (const auto &c : solved) {
        emit(rec, report, EventKind::challenge_solved, Json{{"challenge_id", c.id}}, run_seq);
    }
    for (const auto &id : expired) {
        emit(rec, report, EventKind::challenge_expired, Json{{"challenge_id", id}}, run_seq);
    }
    for (const auto &q : completed) {
        emit(rec, report, EventKind::quest_completed, Json{{"quest_id", q.id}}, run_seq);
    }
    for (const auto &def : check.unlocked) {
        emit(rec, report, EventKind::achievement_unlocked, Json{{"key", def.key}}, run_seq);
    }
    for (const auto &c : fresh) {
        emit(rec, report, EventKind::challenge_new, Json{{"challenge_id", c.id}}, run_seq);
    }
    for (const auto &id : new_quests) {
        emit(rec, report, EventKind::quest_new, Json{{"quest_id", id}}, run_seq);
    }

    // Project milestones reach every member.
    for (const auto &def : check.unlocked) {
        if (def.scope != AchievementScope::project) {
            continue;
        }
        for (auto &[other_id, other] : state.users) {
            if (other_id == user_id || other.state.achievements.count(def.key) > 0) {
                continue;
            }
            other.state.achievements.emplace(def.key, stamp);
            RunReport ignored;
            emit(other, ignored, EventKind::achievement_unlocked,
                 Json{{"key", def.key}, {"source_user", user_id}}, other.latest_run());
        }
    }

    rec.model = std::move(parsed);

    if (recompute_score(user) != user.score) {
        throw AccountingError("score drifted from item lists for " + user_id);
    }
    return report;
}

RunReport apply_rejection(ProjectState &state, const std::string &user_id,
                          const std::string &challenge_id, const std::string &reason)
{
    auto &rec = require_user(state, user_id);
    auto &user = rec.state;

    if (std::all_of(reason.begin(), reason.end(),
                    [](unsigned char c) { return std::isspace(c) != 0; })) {
        throw ValidationError("a rejection needs a non-empty reason");
    }
    auto *c = user.find_challenge(challenge_id);
    if (c == nullptr) {
        throw ConflictError("challenge " + challenge_id + " does not exist");
    }
    if (c->state != ChallengeState::current) {
        throw ConflictError("challenge " + challenge_id + " is " + to_string(c->state) +
                            ", not current");
    }

    const auto run_seq = rec.latest_run();
    c->state = ChallengeState::rejected;
    c->rejection_reason = reason;
    c->resolved_run = run_seq;

    for (auto &q : user.quests) {
        if (q.state == QuestState::current && q.kind == QuestKind::solve_without_rejection) {
            q.progress = 0;
        }
    }
    ++rec.pending_rejections;

    RunReport report;
    report.run_seq = run_seq;
    if (rec.model) {
        auto fresh = generate(*rec.model, user.challenges, config_for(state, user_id), run_seq,
                              latest_ingested_status(rec).value_or(BuildStatus::success));
        for (const auto &n : fresh) {
            user.challenges.push_back(n);
        }
        for (const auto &n : fresh) {
            emit(rec, report, EventKind::challenge_new, Json{{"challenge_id", n.id}}, run_seq);
        }
    }
    return report;
}

void apply_add_user(ProjectState &state, const NewUser &user)
{
    validate_identifier("user", user.user_id);
    if (user.avatar_index < 0 || user.avatar_index >= avatar_count) {
        throw ValidationError("avatar index must be in [0, " + std::to_string(avatar_count - 1) +
                              "]");
    }
    if (user.team && user.team->empty()) {
        throw ValidationError("team name must not be empty");
    }
    if (state.users.count(user.user_id) > 0) {
        throw ConflictError("user '" + user.user_id + "' already exists");
    }
    UserRecord rec;
    rec.state.user_id = user.user_id;
    rec.state.display_name = user.display_name.empty() ? user.user_id : user.display_name;
    rec.state.avatar_index = user.avatar_index;
    rec.state.team = user.team;
    state.users.emplace(user.user_id, std::move(rec));
}

std::vector<Event> events_since(const ProjectState &state, const std::string &user_id,
                                std::uint64_t after_seq)
{
    auto it = state.users.find(user_id);
    if (it == state.users.end()) {
        throw NotRegistered("user '" + user_id + "' is not registered in project '" +
                            state.project_id + "'");
    }
    std::vector<Event> out;
    for (const auto &e : it->second.events) {
        if (e.seq > after_seq) {
            out.push_back(e);
        }
    }
    return out;
}

void verify_scores(const ProjectState &state)
{
    for (const auto &[id, rec] : state.users) {
        if (recompute_score(rec.state) != rec.state.score) {
            throw AccountingError("stored score of " + id + " disagrees with its item lists");
        }
    }
}

// ---------------------------------------------------------------------------

struct Engine::Slot
{
    std::mutex writer;
    mutable std::mutex snapshot_mu;
    std::shared_ptr<const ProjectState> state;
    std::map<std::string, std::string> tokens;

    std::shared_ptr<const ProjectState> get() const
    {
        std::lock_guard lock(snapshot_mu);
        return state;
    }

    void swap_in(ProjectState next, std::map<std::string, std::string> next_tokens)
    {
        auto ptr = std::make_shared<const ProjectState>(std::move(next));
        std::lock_guard lock(snapshot_mu);
        state = std::move(ptr);
        tokens = std::move(next_tokens);
    }
};

Engine::Engine(std::filesystem::path state_root)
    : store_(std::make_unique<Store>(std::move(state_root)))
{
}

Engine::~Engine() = default;

const std::filesystem::path &Engine::state_root() const noexcept { return store_->root(); }

Engine::Slot &Engine::slot(const std::string &project_id) const
{
    std::lock_guard lock(slots_mu_);
    auto it = slots_.find(project_id);
    if (it != slots_.end()) {
        return *it->second;
    }
    validate_identifier("project", project_id);
    if (!store_->exists(project_id)) {
        throw NotRegistered("project '" + project_id + "' does not exist");
    }
    auto s = std::make_unique<Slot>();
    s->swap_in(store_->load(project_id), store_->load_tokens(project_id));
    return *slots_.emplace(project_id, std::move(s)).first->second;
}

bool Engine::has_project(const std::string &project_id) const
{
    {
        std::lock_guard lock(slots_mu_);
        if (slots_.count(project_id) > 0) {
            return true;
        }
    }
    try {
        validate_identifier("project", project_id);
    } catch (const ValidationError &) {
        return false;
    }
    return store_->exists(project_id);
}

void Engine::init_project(const std::string &project_id, ProjectConfig config)
{
    validate_identifier("project", project_id);
    config.validate();
    std::lock_guard lock(slots_mu_);
    if (slots_.count(project_id) > 0 || store_->exists(project_id)) {
        throw ConflictError("project '" + project_id + "' already exists");
    }
    ProjectState state;
    state.project_id = project_id;
    state.config = std::move(config);
    store_->persist(state);
    store_->save_tokens(project_id, {});
    auto s = std::make_unique<Slot>();
    s->swap_in(std::move(state), {});
    slots_.emplace(project_id, std::move(s));
}

std::string Engine::add_user(const std::string &project_id, const NewUser &user)
{
    auto &s = slot(project_id);
    std::lock_guard writer(s.writer);
    auto next = *s.get();
    apply_add_user(next, user);
    auto tokens = s.tokens;
    auto token = random_token();
    tokens[user.user_id] = token;
    store_->save_tokens(project_id, tokens);
    store_->persist(next, {user.user_id});
    s.swap_in(std::move(next), std::move(tokens));
    return token;
}

RunReport Engine::ingest_run(const std::string &project_id, const std::string &user_id,
                             const RunInput &input)
{
    auto &s = slot(project_id);
    std::lock_guard writer(s.writer);
    auto next = *s.get();
    try {
        auto report = apply_ingest(next, user_id, input);
        // Project-scope unlocks may touch every user.
        store_->persist(next);
        s.swap_in(std::move(next), s.tokens);
        return report;
    } catch (const IngestError &) {
        store_->persist(next, {user_id});
        s.swap_in(std::move(next), s.tokens);
        throw;
    }
}

RunReport Engine::reject_challenge(const std::string &project_id, const std::string &user_id,
                                   const std::string &challenge_id, const std::string &reason)
{
    auto &s = slot(project_id);
    std::lock_guard writer(s.writer);
    auto next = *s.get();
    auto report = apply_rejection(next, user_id, challenge_id, reason);
    store_->persist(next, {user_id});
    s.swap_in(std::move(next), s.tokens);
    return report;
}

std::vector<Event> Engine::events_since(const std::string &project_id, const std::string &user_id,
                                        std::uint64_t after_seq) const
{
    return gapquest::events_since(*slot(project_id).get(), user_id, after_seq);
}

std::shared_ptr<const ProjectState> Engine::snapshot(const std::string &project_id) const
{
    return slot(project_id).get();
}

std::optional<std::string> Engine::authenticate(const std::string &project_id,
                                                const std::string &token) const
{
    auto &s = slot(project_id);
    std::map<std::string, std::string> tokens;
    {
        std::lock_guard lock(s.snapshot_mu);
        tokens = s.tokens;
    }
    std::optional<std::string> who;
    // Compare against every entry so timing does not reveal which user matched.
    for (const auto &[user, expected] : tokens) {
        if (constant_time_equal(expected, token)) {
            who = user;
        }
    }
    return who;
}

} // namespace gapquest
