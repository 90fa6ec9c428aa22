#include "gapquest/cli.hpp"

#include "gapquest/analytics.hpp"
#include "gapquest/errors.hpp"
#include "gapquest/gateway.hpp"
#include "gapquest/orchestrator.hpp"
#include "gapquest/store.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <sstream>

namespace gapquest {

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 1;
constexpr int exit_io = 2;

/// Input file could not be read.
class InputError : public Error
{
public:
    using Error::Error;
};

std::string slurp(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot read " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_status(std::ostream &out, const UserRecord &rec)
{
    const auto &u = rec.state;
    out << u.display_name << " (" << u.user_id << ")";
    if (u.team) {
        out << " team " << *u.team;
    }
    out << "\nscore " << u.score << ", runs " << rec.runs.size() << ", achievements "
        << u.achievements.size() << "\n";
    const SourceModel *model = rec.model ? &*rec.model : nullptr;
    out << "current challenges:\n";
    for (const auto &c : u.challenges) {
        if (c.state == ChallengeState::current) {
            const auto view = challenge_view(c, model);
            out << "  " << c.id << " [" << to_string(c.kind) << ", " << c.points << " pts] "
                << view.at("description").get<std::string>() << "\n";
        }
    }
    if (const auto *q = u.current_quest()) {
        out << "quest " << q->id << ": " << describe(*q) << " - " << percent(*q) << "%\n";
    }
}

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Turns coverage and mutation gaps into challenges, quests and leaderboards"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string state_dir = "state";
    app.add_option("--state-dir", state_dir, "State directory")->envname("GAPQUEST_STATE_DIR");

    std::string project;
    std::string user;

    // init
    auto *init = app.add_subcommand("init", "Create a project");
    std::uint64_t seed = 0;
    std::uint32_t max_current = 3;
    init->add_option("--project", project, "Project id")->required();
    init->add_option("--seed", seed, "Generation seed");
    init->add_option("--max-current", max_current, "Concurrent challenges per user");

    // user add
    auto *user_cmd = app.add_subcommand("user", "Manage users");
    user_cmd->require_subcommand(1);
    auto *user_add = user_cmd->add_subcommand("add", "Register a user and print its API token");
    std::string name;
    std::string team;
    int avatar = 0;
    user_add->add_option("--project", project, "Project id")->required();
    user_add->add_option("--id", user, "User id (defaults to --name)");
    user_add->add_option("--name", name, "Display name")->required();
    user_add->add_option("--team", team, "Team name");
    user_add->add_option("--avatar", avatar, "Avatar index")->check(CLI::Range(0, avatar_count - 1));

    // run ingest
    auto *run_cmd = app.add_subcommand("run", "Runs");
    run_cmd->require_subcommand(1);
    auto *ingest = run_cmd->add_subcommand("ingest", "Ingest one CI run");
    std::string commit;
    std::string status;
    std::string coverage_file;
    std::string mutations_file;
    std::vector<std::string> test_files;
    std::string received_at;
    ingest->add_option("--project", project, "Project id")->required();
    ingest->add_option("--user", user, "User id")->required();
    ingest->add_option("--commit", commit, "Commit hash")->required();
    ingest->add_option("--status", status, "success or failure")->required();
    ingest->add_option("--coverage", coverage_file, "Coverage XML")->required();
    ingest->add_option("--mutations", mutations_file, "Mutation XML")->required();
    ingest->add_option("--tests", test_files, "Test result XML files");
    ingest->add_option("--at", received_at, "Receive time (ISO-8601 UTC)");

    // reject
    auto *reject = app.add_subcommand("reject", "Reject a current challenge");
    std::string challenge;
    std::string reason;
    reject->add_option("--project", project, "Project id")->required();
    reject->add_option("--user", user, "User id")->required();
    reject->add_option("--challenge", challenge, "Challenge id")->required();
    reject->add_option("--reason", reason, "Why the challenge is rejected")->required();

    // status
    auto *status_cmd = app.add_subcommand("status", "Show a user's progress");
    bool as_json = false;
    status_cmd->add_option("--project", project, "Project id")->required();
    status_cmd->add_option("--user", user, "User id")->required();
    status_cmd->add_flag("--json", as_json, "Print JSON");

    // events
    auto *events_cmd = app.add_subcommand("events", "Print a user's events after a sequence number");
    std::uint64_t since = 0;
    events_cmd->add_option("--project", project, "Project id")->required();
    events_cmd->add_option("--user", user, "User id")->required();
    events_cmd->add_option("--since", since, "Last seen event sequence number");

    // stats export
    auto *stats = app.add_subcommand("stats", "Statistics");
    stats->require_subcommand(1);
    auto *stats_export = stats->add_subcommand("export", "Export per-user or aggregate stats");
    std::string format = "csv";
    std::string table = "users";
    std::string output;
    stats_export->add_option("--project", project, "Project id")->required();
    stats_export->add_option("--format", format, "csv or json");
    stats_export->add_option("--table", table, "users or aggregate");
    stats_export->add_option("--output", output, "Write to file instead of stdout");

    // serve
    auto *serve = app.add_subcommand("serve", "Serve the HTTP API");
    int port = 8080;
    std::string host = "127.0.0.1";
    serve->add_option("--port", port, "TCP port");
    serve->add_option("--host", host, "Bind address");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    }

    try {
        Engine engine(state_dir);

        if (*init) {
            ProjectConfig config;
            config.generation.seed = seed;
            config.generation.max_current = max_current;
            config.quests.seed = seed;
            engine.init_project(project, config);
            out << "initialized project " << project << " in " << state_dir << "\n";
        } else if (*user_add) {
            NewUser nu;
            nu.user_id = user.empty() ? name : user;
            nu.display_name = name;
            if (!team.empty()) {
                nu.team = team;
            }
            nu.avatar_index = avatar;
            out << engine.add_user(project, nu) << "\n";
        } else if (*ingest) {
            RunInput in;
            in.commit = commit;
            in.build_status = build_status_from_string(status);
            in.coverage = slurp(coverage_file);
            in.mutations = slurp(mutations_file);
            for (const auto &f : test_files) {
                in.tests.push_back(slurp(f));
            }
            if (!received_at.empty()) {
                in.received_at = received_at;
            }
            out << Json(engine.ingest_run(project, user, in)).dump(2) << "\n";
        } else if (*reject) {
            out << Json(engine.reject_challenge(project, user, challenge, reason)).dump(2) << "\n";
        } else if (*status_cmd) {
            const auto snap = engine.snapshot(project);
            auto it = snap->users.find(user);
            if (it == snap->users.end()) {
                throw NotRegistered("user '" + user + "' is not registered");
            }
            if (as_json) {
                Json j = it->second.state;
                j["runs"] = it->second.runs.size();
                out << j.dump(2) << "\n";
            } else {
                print_status(out, it->second);
            }
        } else if (*events_cmd) {
            out << Json(engine.events_since(project, user, since)).dump(2) << "\n";
        } else if (*stats_export) {
            // Reads the persisted files directly, independent of any running server.
            Store store(state_dir);
            validate_identifier("project", project);
            if (!store.exists(project)) {
                throw NotRegistered("project '" + project + "' does not exist");
            }
            const auto payload = stats_payload(store.load(project), table, format);
            if (output.empty()) {
                out << payload;
            } else {
                std::ofstream f(output, std::ios::binary);
                if (!(f << payload)) {
                    throw InputError("cannot write " + output);
                }
            }
        } else if (*serve) {
            Api api(engine);
            HttpServer server(api);
            const int bound = server.bind(host, port);
            if (bound < 0) {
                err << "error: cannot bind " << host << ":" << port << "\n";
                return exit_io;
            }
            out << "listening on " << host << ":" << bound << "\n" << std::flush;
            server.listen();
        }
        return exit_ok;
    } catch (const LoadError &e) {
        err << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const InputError &e) {
        err << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const Error &e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const std::filesystem::filesystem_error &e) {
        err << "error: " << e.what() << "\n";
        return exit_io;
    } catch (const std::system_error &e) {
        err << "error: " << e.what() << "\n";
        return exit_io;
    }
}

} // namespace gapquest
