#include "gapquest/errors.hpp"
#include "gapquest/orchestrator.hpp"
#include "gapquest/store.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <fstream>
#include <thread>

using namespace gapquest;
using gapquest::testing::fixture_run;
using gapquest::testing::read_file;
using gapquest::testing::TempDir;

namespace {

ProjectState busy_project()
{
    ProjectState s;
    s.project_id = "cli";
    s.config.generation.seed = 1;
    apply_add_user(s, {"alice", "Alice", std::string("red"), 3});
    apply_add_user(s, {"bob", "Bob", std::nullopt, 7});
    for (int run = 1; run <= 3; ++run) {
        apply_ingest(s, "alice", fixture_run(run, "a" + std::to_string(run)));
    }
    apply_ingest(s, "bob", fixture_run(1, "b1"));
    apply_rejection(s, "alice", s.users.at("alice").state.challenges.back().id, "not now");
    return s;
}

struct Crash
{
};

} // namespace

TEST(Store, EmptyProjectRoundTrip)
{
    TempDir dir;
    Store store(dir.path());
    ProjectState s;
    s.project_id = "empty";
    store.persist(s);
    EXPECT_TRUE(store.exists("empty"));
    EXPECT_EQ(store.load("empty"), s);
}

TEST(Store, BusyProjectRoundTrip)
{
    TempDir dir;
    Store store(dir.path());
    const auto s = busy_project();
    store.persist(s);
    const auto loaded = store.load("cli");
    EXPECT_EQ(loaded, s);
    EXPECT_EQ(serialize_project(loaded), serialize_project(s));
}

TEST(Store, TruncatedUserFileNamesFile)
{
    TempDir dir;
    Store store(dir.path());
    store.persist(busy_project());
    const auto file = dir.path() / "cli" / "users" / "alice.json";
    const auto text = read_file(file);
    std::ofstream(file, std::ios::binary | std::ios::trunc) << text.substr(0, text.size() / 2);
    try {
        store.load("cli");
        FAIL();
    } catch (const LoadError &e) {
        EXPECT_EQ(e.file(), file);
        EXPECT_NE(std::string(e.what()).find("alice.json"), std::string::npos);
    }
}

TEST(Store, TamperedScoreRejected)
{
    TempDir dir;
    Store store(dir.path());
    store.persist(busy_project());
    const auto file = dir.path() / "cli" / "users" / "alice.json";
    auto j = Json::parse(read_file(file));
    j["state"]["score"] = j["state"]["score"].get<std::uint64_t>() + 1;
    std::ofstream(file, std::ios::binary | std::ios::trunc) << j.dump();
    EXPECT_THROW(store.load("cli"), LoadError);
}

TEST(Store, ShortEventLogRejected)
{
    TempDir dir;
    Store store(dir.path());
    store.persist(busy_project());
    const auto log = dir.path() / "cli" / "events" / "alice.log";
    auto text = read_file(log);
    text.erase(text.rfind('\n', text.size() - 2) + 1);
    std::ofstream(log, std::ios::binary | std::ios::trunc) << text;
    EXPECT_THROW(store.load("cli"), LoadError);
}

TEST(Store, WrongSchemaVersion)
{
    TempDir dir;
    Store store(dir.path());
    store.persist(busy_project());
    const auto file = dir.path() / "cli" / "project.json";
    auto j = Json::parse(read_file(file));
    j["schema_version"] = 99;
    std::ofstream(file, std::ios::binary | std::ios::trunc) << j.dump();
    EXPECT_THROW(store.load("cli"), LoadError);
}

TEST(Store, CrashAtEveryRenameLeavesConsistentState)
{
    ProjectState before;
    before.project_id = "cli";
    before.config.generation.seed = 1;
    apply_add_user(before, {"alice", "Alice", std::nullopt, 0});
    apply_add_user(before, {"bob", "Bob", std::nullopt, 0});
    apply_ingest(before, "alice", fixture_run(1, "a1"));
    apply_ingest(before, "bob", fixture_run(1, "b1"));
    auto after = before;
    apply_ingest(after, "alice", fixture_run(2, "a2"));
    apply_ingest(after, "bob", fixture_run(2, "b2"));

    for (int crash_at = 0;; ++crash_at) {
        TempDir dir;
        Store store(dir.path());
        store.persist(before);
        int renames = 0;
        store.set_fault_hook([&](const std::filesystem::path &) {
            if (renames++ == crash_at) {
                throw Crash{};
            }
        });
        bool crashed = false;
        try {
            store.persist(after);
        } catch (const Crash &) {
            crashed = true;
        }
        store.set_fault_hook({});
        const auto loaded = store.load("cli");
        EXPECT_NO_THROW(verify_scores(loaded));
        for (const auto &[id, rec] : loaded.users) {
            EXPECT_TRUE(rec == before.users.at(id) || rec == after.users.at(id))
                << "crash " << crash_at << " user " << id;
        }
        if (!crashed) {
            EXPECT_EQ(loaded, after);
            break;
        }
    }
}

TEST(Store, IdentifiersAreFileSafe)
{
    EXPECT_NO_THROW(validate_identifier("user", "alice.b-2_x"));
    for (const char *bad : {"", ".hidden", "../x", "a/b", "a b", "ä"}) {
        EXPECT_THROW(validate_identifier("user", bad), ValidationError) << bad;
    }
}

TEST(Engine, ReplayIsByteIdentical)
{
    TempDir a, b;
    for (const auto *dir : {&a, &b}) {
        Engine engine(dir->path());
        ProjectConfig cfg;
        cfg.generation.seed = 1;
        engine.init_project("cli", cfg);
        engine.add_user("cli", {"alice", "Alice", std::nullopt, 0});
        for (int run = 1; run <= 3; ++run) {
            engine.ingest_run("cli", "alice", fixture_run(run, "a" + std::to_string(run)));
        }
        engine.reject_challenge("cli", "alice", "c2", "later");
    }
    for (const char *rel : {"cli/events/alice.log", "cli/users/alice.json", "cli/project.json"}) {
        EXPECT_EQ(read_file(a.path() / rel), read_file(b.path() / rel)) << rel;
    }
}

TEST(Engine, PersistsAcrossInstances)
{
    TempDir dir;
    std::string token;
    ProjectState live;
    {
        Engine engine(dir.path());
        engine.init_project("cli");
        token = engine.add_user("cli", {"alice", "Alice", std::nullopt, 0});
        engine.ingest_run("cli", "alice", fixture_run(1, "a1"));
        live = *engine.snapshot("cli");
    }
    Engine again(dir.path());
    EXPECT_TRUE(again.has_project("cli"));
    EXPECT_EQ(*again.snapshot("cli"), live);
    EXPECT_EQ(again.authenticate("cli", token), "alice");
    EXPECT_EQ(again.authenticate("cli", token + "0"), std::nullopt);
    EXPECT_EQ(again.authenticate("cli", ""), std::nullopt);
    EXPECT_THROW(again.init_project("cli"), ConflictError);
}

TEST(Engine, FailedIngestKeepsRunHistory)
{
    TempDir dir;
    Engine engine(dir.path());
    engine.init_project("cli");
    engine.add_user("cli", {"alice", "Alice", std::nullopt, 0});
    auto bad = fixture_run(1, "a1");
    bad.mutations = gapquest::testing::fixture("broken/unknown-status.xml");
    EXPECT_THROW(engine.ingest_run("cli", "alice", bad), IngestError);
    Engine reloaded(dir.path());
    const auto snap = reloaded.snapshot("cli");
    ASSERT_EQ(snap->users.at("alice").runs.size(), 1u);
    EXPECT_TRUE(snap->users.at("alice").runs[0].ingest_error.has_value());
    EXPECT_TRUE(snap->users.at("alice").state.challenges.empty());
}

TEST(Engine, ReadersSeeCommittedSnapshots)
{
    TempDir dir;
    Engine engine(dir.path());
    engine.init_project("cli");
    engine.add_user("cli", {"alice", "Alice", std::nullopt, 0});
    std::atomic<bool> done{false};
    std::atomic<int> bad{0};
    std::thread reader([&] {
        while (!done) {
            const auto snap = engine.snapshot("cli");
            try {
                verify_scores(*snap);
            } catch (...) {
                ++bad;
            }
            const auto &rec = snap->users.at("alice");
            if (rec.state.event_seq != rec.events.size()) {
                ++bad;
            }
        }
    });
    for (int run = 1; run <= 3; ++run) {
        engine.ingest_run("cli", "alice", fixture_run(run, "a" + std::to_string(run)));
    }
    done = true;
    reader.join();
    EXPECT_EQ(bad, 0);
}
