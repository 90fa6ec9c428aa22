#include "gapquest/analytics.hpp"
#include "gapquest/errors.hpp"
#include "gapquest/gateway.hpp"
#include "gapquest/store.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace gapquest;
using gapquest::testing::fixture_run;
using gapquest::testing::read_file;
using gapquest::testing::TempDir;

namespace {

/// One class with `total` lines of which the first `covered` are hit, and
/// `branches` two-way branch lines.
SourceModel sized_model(std::uint32_t total, std::uint32_t covered, std::uint32_t branch_lines,
                        std::uint32_t branches_covered, std::uint32_t mutants,
                        std::uint32_t detected)
{
    ClassCov c;
    c.class_name = "pkg.Big";
    c.file = "pkg/Big.java";
    MethodCov m;
    m.class_name = c.class_name;
    m.name = "run";
    m.signature = "()V";
    std::uint32_t left_branches = branches_covered;
    for (std::uint32_t i = 1; i <= total; ++i) {
        LineCov l{{c.file, c.class_name, i}, i <= covered ? 1u : 0u, 0, 0};
        if (i <= branch_lines) {
            l.branch_total = 2;
            l.branch_covered = std::min<std::uint32_t>(left_branches, l.hits > 0 ? 2 : 0);
            left_branches -= l.branch_covered;
        }
        m.lines.push_back(l);
    }
    m.first_line = 1;
    m.last_line = total;
    c.methods.push_back(std::move(m));
    c.reaggregate();
    std::vector<Mutant> ms;
    for (std::uint32_t i = 0; i < mutants; ++i) {
        Mutant mu;
        mu.key = {c.class_name, "run", 1 + i % total, "MathMutator", i};
        // Detected mutants alternate between killed and timed out.
        mu.status = i < detected ? (i % 2 ? MutantStatus::timed_out : MutantStatus::killed)
                                 : (i % 2 ? MutantStatus::survived : MutantStatus::no_coverage);
        ms.push_back(std::move(mu));
    }
    return assemble_model({c}, ms, {});
}

/// Splits `total` over `n` users with a seeded, uneven spread.
std::vector<std::uint64_t> spread(std::uint64_t total, std::size_t n, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<std::uint64_t> out(n, 0);
    for (std::uint64_t i = 0; i < total; ++i) {
        ++out[rng.index(n)];
    }
    return out;
}

double oracle_mean(std::uint64_t total, std::size_t n)
{
    return std::floor(10.0 * static_cast<double>(total) / static_cast<double>(n) + 0.5) / 10.0;
}

const MetricSummary &metric(const std::vector<MetricSummary> &all, const std::string &name)
{
    for (const auto &m : all) {
        if (m.metric == name) {
            return m;
        }
    }
    throw std::runtime_error("no metric " + name);
}

} // namespace

TEST(SuiteMetrics, LineRatio)
{
    const auto m = suite_metrics(sized_model(868, 755, 0, 0, 0, 0));
    ASSERT_TRUE(m.line_coverage.has_value());
    EXPECT_NEAR(*m.line_coverage, 0.87, 0.005);
    EXPECT_FALSE(m.branch_coverage.has_value());
    EXPECT_FALSE(m.mutation_score.has_value());
}

TEST(SuiteMetrics, MutationScore)
{
    const auto m = suite_metrics(sized_model(10, 10, 0, 0, 10, 7));
    ASSERT_TRUE(m.mutation_score.has_value());
    EXPECT_DOUBLE_EQ(*m.mutation_score, 0.7);
}

TEST(SuiteMetrics, CombinedProfile)
{
    const auto m = suite_metrics(sized_model(100, 87, 25, 34, 100, 71));
    EXPECT_DOUBLE_EQ(*m.line_coverage, 0.87);
    EXPECT_DOUBLE_EQ(*m.branch_coverage, 0.68);
    EXPECT_DOUBLE_EQ(*m.mutation_score, 0.71);
}

TEST(RoundHalfUp, Tenths)
{
    EXPECT_EQ(round_half_up_tenths(204, 15), 136);
    EXPECT_EQ(round_half_up_tenths(71, 15), 47);
    EXPECT_EQ(round_half_up_tenths(1, 4), 3);  // 0.25
    EXPECT_EQ(round_half_up_tenths(1, 20), 1); // 0.05
    EXPECT_EQ(round_half_up_tenths(0, 3), 0);
    for (std::uint64_t n = 1; n <= 40; ++n) {
        for (std::uint64_t t = 0; t <= 200; ++t) {
            // k is the half-up rounding of 10t/n iff k - 1/2 <= 10t/n < k + 1/2.
            const auto k = static_cast<std::uint64_t>(round_half_up_tenths(t, n));
            ASSERT_LT(20 * t, (2 * k + 1) * n) << t << "/" << n;
            ASSERT_GE(20 * t + n, 2 * k * n) << t << "/" << n;
        }
    }
}

TEST(Aggregate, FifteenUserTotals)
{
    const auto challenges = spread(204, 15, 1);
    const auto quests = spread(71, 15, 2);
    std::vector<UserStats> stats;
    for (std::size_t i = 0; i < 15; ++i) {
        UserStats s;
        s.user_id = "u" + std::to_string(i);
        s.solved_by_kind[ChallengeKind::line_coverage] = challenges[i];
        s.quests_completed = quests[i];
        stats.push_back(s);
    }
    const auto agg = aggregate(stats);
    EXPECT_EQ(metric(agg, "challenges_solved").total, 204u);
    EXPECT_EQ(metric(agg, "challenges_solved").mean_display(), "13.6");
    EXPECT_DOUBLE_EQ(metric(agg, "challenges_solved").mean(), oracle_mean(204, 15));
    EXPECT_EQ(metric(agg, "quests_completed").mean_display(), "4.7");
    EXPECT_DOUBLE_EQ(metric(agg, "quests_completed").mean(), oracle_mean(71, 15));
    EXPECT_EQ(metric(agg, "challenges_solved").min,
              *std::min_element(challenges.begin(), challenges.end()));
    EXPECT_EQ(metric(agg, "challenges_solved").max,
              *std::max_element(challenges.begin(), challenges.end()));
}

TEST(Aggregate, SingleUser)
{
    UserStats s;
    s.user_id = "solo";
    s.score = 26;
    const auto agg = aggregate(std::vector<UserStats>{s});
    const auto &m = metric(agg, "score");
    EXPECT_EQ(m.min, 26u);
    EXPECT_EQ(m.max, 26u);
    EXPECT_DOUBLE_EQ(m.mean(), 26.0);
}

TEST(Aggregate, EmptyProject)
{
    EXPECT_THROW(aggregate(std::vector<UserStats>{}), EmptyProject);
    EXPECT_THROW(aggregate(ProjectState{}), EmptyProject);
}

TEST(Aggregate, MatchesRawStateFiles)
{
    TempDir dir;
    {
        Engine engine(dir.path());
        ProjectConfig cfg;
        cfg.generation.seed = 1;
        engine.init_project("cli", cfg);
        engine.add_user("cli", {"alice", "Alice", std::nullopt, 0});
        engine.add_user("cli", {"bob", "Bob", std::nullopt, 0});
        engine.add_user("cli", {"carol", "Carol", std::nullopt, 0});
        for (int run = 1; run <= 3; ++run) {
            engine.ingest_run("cli", "alice", fixture_run(run, "a" + std::to_string(run)));
        }
        engine.ingest_run("cli", "bob", fixture_run(1, "b1"));
        engine.ingest_run("cli", "bob", fixture_run(2, "b2"));
        engine.reject_challenge("cli", "bob", "c1", "skip");
    }
    // Count straight from the user documents.
    std::uint64_t solved = 0, runs = 0, score = 0, rejected = 0, quests = 0;
    std::uint64_t max_score = 0, min_runs = ~0ull;
    for (const auto &entry : std::filesystem::directory_iterator(dir.path() / "cli" / "users")) {
        const auto j = Json::parse(read_file(entry.path()));
        for (const auto &c : j["state"]["challenges"]) {
            solved += c["state"] == "solved";
            rejected += c["state"] == "rejected";
        }
        for (const auto &q : j["state"]["quests"]) {
            quests += q["state"] == "completed";
        }
        runs += j["runs"].size();
        min_runs = std::min<std::uint64_t>(min_runs, j["runs"].size());
        score += j["state"]["score"].get<std::uint64_t>();
        max_score = std::max(max_score, j["state"]["score"].get<std::uint64_t>());
    }
    const auto agg = aggregate(Store(dir.path()).load("cli"));
    EXPECT_EQ(metric(agg, "challenges_solved").total, solved);
    EXPECT_EQ(metric(agg, "rejected").total, rejected);
    EXPECT_EQ(metric(agg, "quests_completed").total, quests);
    EXPECT_EQ(metric(agg, "runs").total, runs);
    EXPECT_EQ(metric(agg, "runs").min, min_runs);
    EXPECT_EQ(metric(agg, "score").total, score);
    EXPECT_EQ(metric(agg, "score").max, max_score);
    EXPECT_DOUBLE_EQ(metric(agg, "score").mean(), oracle_mean(score, 3));
    EXPECT_EQ(metric(agg, "runs").users, 3u);
}

TEST(Export, CsvOneRow)
{
    UserStats s;
    s.user_id = "alice";
    s.score = 6;
    const auto csv = export_table(user_stats_table({s}), ExportFormat::csv);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
    EXPECT_EQ(csv.substr(0, 20), "user_id,score,runs,s");
    EXPECT_NE(csv.find("\r\nalice,6,0,0,"), std::string::npos);
}

TEST(Export, CsvEmptyIsHeaderOnly)
{
    const auto csv = export_table(user_stats_table({}), ExportFormat::csv);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1);
}

TEST(Export, CsvQuoting)
{
    Table t;
    t.columns = {"a", "b"};
    t.rows = {{std::string("x,y"), std::string("say \"hi\"")}};
    EXPECT_EQ(export_table(t, ExportFormat::csv), "a,b\r\n\"x,y\",\"say \"\"hi\"\"\"\r\n");
}

TEST(Export, JsonRoundTrip)
{
    std::vector<UserStats> stats;
    for (int i = 0; i < 3; ++i) {
        UserStats s;
        s.user_id = "u" + std::to_string(i);
        s.score = 10u * i;
        s.runs = i;
        s.solved_by_kind[ChallengeKind::mutation] = i;
        if (i > 0) {
            s.suite = suite_metrics(sized_model(100, 87, 25, 34, 100, 71));
        }
        stats.push_back(s);
    }
    const auto table = user_stats_table(stats);
    EXPECT_EQ(import_json_table(export_table(table, ExportFormat::json)), table);
    const auto agg = aggregate_table(aggregate(stats));
    EXPECT_EQ(import_json_table(export_table(agg, ExportFormat::json)), agg);
}

TEST(Export, UnknownFormat)
{
    EXPECT_THROW(export_format_from_string("xml"), ValidationError);
    EXPECT_EQ(export_format_from_string("json"), ExportFormat::json);
}

TEST(Export, StatsPayloadOptions)
{
    ProjectState s;
    s.project_id = "cli";
    apply_add_user(s, {"alice", "Alice", std::nullopt, 0});
    EXPECT_NE(stats_payload(s, "aggregate", "csv").find("metric,users,total,min,max,mean"),
              std::string::npos);
    EXPECT_THROW(stats_payload(s, "teams", "csv"), ValidationError);
    EXPECT_THROW(stats_payload(s, "users", "yaml"), ValidationError);
}
