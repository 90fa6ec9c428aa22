#include "gapquest/errors.hpp"
#include "gapquest/orchestrator.hpp"
#include "gapquest/report_ingest.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace gapquest;
using gapquest::testing::fixture;
using gapquest::testing::fixture_run;

namespace {

ProjectState project(std::uint64_t seed = 1)
{
    ProjectState s;
    s.project_id = "cli";
    s.config.generation.seed = seed;
    s.config.quests.seed = seed;
    apply_add_user(s, {"alice", "Alice", std::string("red"), 3});
    return s;
}

RunInput zero_run(const std::string &commit)
{
    auto in = fixture_run(1, commit);
    in.coverage = fixture("commons-cli/zero-coverage.xml");
    return in;
}

std::size_t count(const RunReport &r, const char *kind)
{
    const auto c = r.counts();
    const auto it = c.find(kind);
    return it == c.end() ? 0 : it->second;
}

const Challenge *current_of_kind(const UserState &u, ChallengeKind kind)
{
    for (const auto &c : u.challenges) {
        if (c.state == ChallengeState::current && c.kind == kind) {
            return &c;
        }
    }
    return nullptr;
}

} // namespace

TEST(Ingest, FirstRunOnUncoveredProject)
{
    auto s = project();
    const auto r = apply_ingest(s, "alice", zero_run("a1"));
    EXPECT_EQ(r.run_seq, 1u);
    EXPECT_EQ(count(r, "challenge_new"), 3u);
    EXPECT_EQ(count(r, "quest_new"), 1u);
    EXPECT_EQ(count(r, "build_finished"), 1u);
    EXPECT_EQ(r.events.size(), 5u);
    EXPECT_EQ(r.events.front().kind, EventKind::build_finished);
    const auto &u = s.users.at("alice").state;
    EXPECT_EQ(u.count(ChallengeState::current), 3u);
    EXPECT_EQ(u.event_seq, 5u);
}

TEST(Ingest, SecondRunCoveringOneTarget)
{
    auto s = project();
    apply_ingest(s, "alice", fixture_run(1, "a1"));
    const auto *line = current_of_kind(s.users.at("alice").state, ChallengeKind::line_coverage);
    ASSERT_NE(line, nullptr);
    const auto id = line->id;
    const auto r = apply_ingest(s, "alice", fixture_run(2, "a2"));
    EXPECT_EQ(count(r, "challenge_solved"), 1u);
    EXPECT_EQ(count(r, "challenge_new"), 1u);
    EXPECT_EQ(r.ids_of(EventKind::challenge_solved, "challenge_id"), std::vector<std::string>{id});
    EXPECT_EQ(s.users.at("alice").state.score, 2u);
}

TEST(Ingest, FailingBuildThenFix)
{
    auto s = project();
    auto in = zero_run("b1");
    in.build_status = BuildStatus::failure;
    apply_ingest(s, "alice", in);
    const auto *build = current_of_kind(s.users.at("alice").state, ChallengeKind::build);
    ASSERT_NE(build, nullptr);
    const auto id = build->id;
    const auto r = apply_ingest(s, "alice", zero_run("b2"));
    EXPECT_EQ(r.ids_of(EventKind::challenge_solved, "challenge_id"), std::vector<std::string>{id});
}

TEST(Ingest, UnknownUser)
{
    auto s = project();
    EXPECT_THROW(apply_ingest(s, "mallory", zero_run("a1")), NotRegistered);
}

TEST(Ingest, BadCommit)
{
    auto s = project();
    EXPECT_THROW(apply_ingest(s, "alice", zero_run("not-hex")), ValidationError);
    EXPECT_THROW(apply_ingest(s, "alice", zero_run("")), ValidationError);
}

TEST(Ingest, DuplicateCommit)
{
    auto s = project();
    apply_ingest(s, "alice", zero_run("a1"));
    EXPECT_THROW(apply_ingest(s, "alice", zero_run("a1")), ConflictError);
}

TEST(Ingest, ParseFailureRecordsRunOnly)
{
    auto s = project();
    apply_ingest(s, "alice", fixture_run(1, "a1"));
    const auto before = s.users.at("alice");
    auto bad = fixture_run(2, "a2");
    bad.coverage = fixture("broken/malformed.xml");
    try {
        apply_ingest(s, "alice", bad);
        FAIL();
    } catch (const IngestError &e) {
        EXPECT_EQ(e.cause_kind(), "ParseError");
        EXPECT_EQ(e.position().line, 7u);
    }
    const auto &after = s.users.at("alice");
    ASSERT_EQ(after.runs.size(), 2u);
    EXPECT_TRUE(after.runs.back().ingest_error.has_value());
    EXPECT_EQ(after.state, before.state);
    EXPECT_EQ(after.events, before.events);
    EXPECT_EQ(after.model, before.model);
    // The same commit can be retried with fixed reports.
    EXPECT_NO_THROW(apply_ingest(s, "alice", fixture_run(2, "a2")));
}

TEST(Reject, ReplacesChallenge)
{
    auto s = project();
    apply_ingest(s, "alice", fixture_run(1, "a1"));
    const auto id = current_of_kind(s.users.at("alice").state, ChallengeKind::line_coverage)->id;
    const auto r = apply_rejection(s, "alice", id, "line unreachable");
    const auto &u = s.users.at("alice").state;
    EXPECT_EQ(u.find_challenge(id)->state, ChallengeState::rejected);
    EXPECT_EQ(u.find_challenge(id)->rejection_reason, "line unreachable");
    EXPECT_EQ(count(r, "challenge_new"), 1u);
    EXPECT_EQ(u.count(ChallengeState::current), 3u);
    EXPECT_EQ(s.users.at("alice").pending_rejections, 1u);
}

TEST(Reject, EmptyReason)
{
    auto s = project();
    apply_ingest(s, "alice", fixture_run(1, "a1"));
    EXPECT_THROW(apply_rejection(s, "alice", "c1", ""), ValidationError);
    EXPECT_THROW(apply_rejection(s, "alice", "c1", "   "), ValidationError);
}

TEST(Reject, Twice)
{
    auto s = project();
    apply_ingest(s, "alice", fixture_run(1, "a1"));
    apply_rejection(s, "alice", "c1", "not useful");
    EXPECT_THROW(apply_rejection(s, "alice", "c1", "not useful"), ConflictError);
    EXPECT_THROW(apply_rejection(s, "alice", "c99", "unknown"), ConflictError);
}

TEST(Events, Since)
{
    auto s = project();
    const auto r1 = apply_ingest(s, "alice", fixture_run(1, "a1"));
    EXPECT_EQ(events_since(s, "alice", 0), r1.events);
    EXPECT_TRUE(events_since(s, "alice", s.users.at("alice").state.event_seq).empty());
    EXPECT_THROW(events_since(s, "bob", 0), NotRegistered);
}

TEST(Events, RejectionInterleavesInOrder)
{
    auto s = project();
    apply_ingest(s, "alice", fixture_run(1, "a1"));
    const auto rej = apply_rejection(s, "alice", "c2", "too hard");
    apply_ingest(s, "alice", fixture_run(2, "a2"));
    const auto all = events_since(s, "alice", 0);
    for (std::size_t i = 0; i < all.size(); ++i) {
        EXPECT_EQ(all[i].seq, i + 1);
    }
    ASSERT_EQ(rej.events.size(), 1u);
    EXPECT_EQ(all[rej.events[0].seq - 1], rej.events[0]);
    EXPECT_EQ(rej.events[0].kind, EventKind::challenge_new);
}

TEST(Users, Validation)
{
    auto s = project();
    EXPECT_THROW(apply_add_user(s, {"alice", "Again", std::nullopt, 0}), ConflictError);
    EXPECT_THROW(apply_add_user(s, {"bob", "Bob", std::nullopt, 50}), ValidationError);
    EXPECT_THROW(apply_add_user(s, {"bob", "Bob", std::nullopt, -1}), ValidationError);
    EXPECT_THROW(apply_add_user(s, {"../bob", "Bob", std::nullopt, 0}), ValidationError);
    EXPECT_THROW(apply_add_user(s, {"bob", "Bob", std::string(""), 0}), ValidationError);
    EXPECT_NO_THROW(apply_add_user(s, {"bob", "Bob", std::nullopt, 49}));
}

TEST(Achievements, ProjectScopeReachesEveryUser)
{
    auto s = project();
    apply_add_user(s, {"bob", "Bob", std::nullopt, 0});
    apply_ingest(s, "bob", zero_run("b1"));
    // A fully covered report crosses the project-wide coverage threshold.
    auto full = fixture_run(1, "f1");
    std::string cov = fixture("commons-cli/run1-coverage.xml");
    for (std::size_t p = cov.find("hits=\"0\""); p != std::string::npos; p = cov.find("hits=\"0\"")) {
        cov.replace(p, 8, "hits=\"1\"");
    }
    full.coverage = cov;
    const auto r = apply_ingest(s, "alice", full);
    const auto keys = r.ids_of(EventKind::achievement_unlocked, "key");
    EXPECT_NE(std::find(keys.begin(), keys.end(), "project_80"), keys.end());
    EXPECT_TRUE(s.users.at("bob").state.achievements.count("project_80"));
    bool bob_event = false;
    for (const auto &e : s.users.at("bob").events) {
        bob_event |= e.kind == EventKind::achievement_unlocked &&
                     e.payload.at("key") == "project_80" &&
                     e.payload.at("source_user") == "alice";
    }
    EXPECT_TRUE(bob_event);
    EXPECT_NO_THROW(verify_scores(s));
}

TEST(Scores, RecomputableAfterEveryStep)
{
    auto s = project(5);
    for (int run = 1; run <= 3; ++run) {
        apply_ingest(s, "alice", fixture_run(run, "c" + std::to_string(run)));
        EXPECT_NO_THROW(verify_scores(s));
        const auto &u = s.users.at("alice").state;
        if (const auto *c = current_of_kind(u, ChallengeKind::line_coverage)) {
            apply_rejection(s, "alice", c->id, "skip");
            EXPECT_NO_THROW(verify_scores(s));
        }
    }
}

TEST(EventKindText, RoundTrip)
{
    for (auto k : {EventKind::build_finished, EventKind::challenge_solved,
                   EventKind::challenge_expired, EventKind::quest_completed,
                   EventKind::achievement_unlocked, EventKind::challenge_new,
                   EventKind::quest_new}) {
        EXPECT_EQ(event_kind_from_string(to_string(k)), k);
    }
}
