#include "gapquest/gateway.hpp"

#include "gapquest/analytics.hpp"
#include "gapquest/errors.hpp"

#include <httplib.h>

#include <charconv>

namespace gapquest {

namespace {

HttpResponse json_response(int status, const Json &body)
{
    return {status, body.dump() + "\n", "application/json"};
}

HttpResponse error_response(int status, const std::string &error, const std::string &detail)
{
    return json_response(status, Json{{"error", error}, {"detail", detail}});
}

std::vector<std::string> split_path(const std::string &path)
{
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= path.size()) {
        auto end = path.find('/', start);
        if (end == std::string::npos) {
            end = path.size();
        }
        if (end > start) {
            parts.push_back(path.substr(start, end - start));
        }
        start = end + 1;
    }
    return parts;
}

std::string bearer_token(const HttpRequest &req)
{
    if (auto it = req.headers.find("authorization"); it != req.headers.end()) {
        const std::string prefix = "Bearer ";
        if (it->second.compare(0, prefix.size(), prefix) == 0) {
            return it->second.substr(prefix.size());
        }
    }
    if (auto it = req.headers.find("x-api-token"); it != req.headers.end()) {
        return it->second;
    }
    return {};
}

std::string query(const HttpRequest &req, const std::string &key, const std::string &fallback = {})
{
    auto it = req.query.find(key);
    return it == req.query.end() ? fallback : it->second;
}

const UserRecord &user_record(const ProjectState &state, const std::string &user_id)
{
    auto it = state.users.find(user_id);
    if (it == state.users.end()) {
        throw NotRegistered("user '" + user_id + "' is not registered");
    }
    return it->second;
}

Json challenges_json(const UserRecord &rec, const std::string &filter)
{
    std::optional<ChallengeState> want;
    if (filter == "completed" || filter == "solved") {
        want = ChallengeState::solved;
    } else if (!filter.empty()) {
        want = challenge_state_from_string(filter);
    }
    Json out = Json::array();
    const SourceModel *model = rec.model ? &*rec.model : nullptr;
    for (const auto &c : rec.state.challenges) {
        if (!want || c.state == *want) {
            out.push_back(challenge_view(c, model));
        }
    }
    return out;
}

Json quests_json(const UserRecord &rec, const std::string &filter)
{
    std::optional<QuestState> want;
    if (!filter.empty()) {
        want = quest_state_from_string(filter);
    }
    Json out = Json::array();
    for (const auto &q : rec.state.quests) {
        if (!want || q.state == *want) {
            out.push_back(quest_view(q));
        }
    }
    return out;
}

Json achievements_json(const ProjectState &state, const UserRecord &rec)
{
    Json out = Json::array();
    for (const auto &def : state.config.catalog) {
        auto it = rec.state.achievements.find(def.key);
        const bool unlocked = it != rec.state.achievements.end();
        if (def.secret && !unlocked) {
            continue;
        }
        Json j = def;
        j.erase("rule");
        j.erase("threshold");
        j["unlocked"] = unlocked;
        if (unlocked) {
            j["unlocked_at"] = it->second.at;
            j["unlocked_run"] = it->second.run_seq;
        }
        out.push_back(std::move(j));
    }
    return out;
}

Json user_summary(const UserRecord &rec)
{
    const auto &u = rec.state;
    return Json{{"user_id", u.user_id},
                {"display_name", u.display_name},
                {"avatar_index", u.avatar_index},
                {"team", u.team ? Json(*u.team) : Json(nullptr)},
                {"score", u.score},
                {"runs", rec.runs.size()},
                {"event_seq", u.event_seq},
                {"challenges",
                 {{"current", u.count(ChallengeState::current)},
                  {"solved", u.count(ChallengeState::solved)},
                  {"rejected", u.count(ChallengeState::rejected)},
                  {"expired", u.count(ChallengeState::expired)}}},
                {"quests_completed", u.completed_quests()},
                {"achievements", u.achievements.size()}};
}

std::uint64_t parse_since(const std::string &text)
{
    if (text.empty()) {
        return 0;
    }
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw ValidationError("'since' must be a non-negative integer");
    }
    return v;
}

RunInput run_input_from(const HttpRequest &req, std::optional<std::string> &claimed_user)
{
    RunInput in;
    if (!req.form.empty()) {
        auto field = [&](const char *name) -> std::optional<std::string> {
            auto it = req.form.find(name);
            return it == req.form.end() ? std::nullopt : std::optional(it->second);
        };
        auto need = [&](const char *name) {
            auto v = field(name);
            if (!v) {
                throw ValidationError(std::string("missing form field '") + name + "'");
            }
            return *v;
        };
        in.commit = need("commit");
        in.build_status = build_status_from_string(need("build_status"));
        in.coverage = need("coverage");
        in.mutations = need("mutations");
        auto [lo, hi] = req.form.equal_range("tests");
        for (auto it = lo; it != hi; ++it) {
            in.tests.push_back(it->second);
        }
        in.received_at = field("received_at");
        claimed_user = field("user");
        return in;
    }

    Json body;
    try {
        body = Json::parse(req.body);
    } catch (const Json::exception &e) {
        throw ValidationError(std::string("request body is not JSON: ") + e.what());
    }
    try {
        body.at("commit").get_to(in.commit);
        in.build_status = build_status_from_string(body.at("build_status").get<std::string>());
        body.at("coverage").get_to(in.coverage);
        body.at("mutations").get_to(in.mutations);
        if (body.contains("tests")) {
            body.at("tests").get_to(in.tests);
        }
        if (body.contains("received_at") && !body.at("received_at").is_null()) {
            in.received_at = body.at("received_at").get<std::string>();
        }
        if (body.contains("user") && !body.at("user").is_null()) {
            claimed_user = body.at("user").get<std::string>();
        }
    } catch (const Json::exception &e) {
        throw ValidationError(std::string("bad run payload: ") + e.what());
    }
    return in;
}

} // namespace

std::string stats_payload(const ProjectState &state, const std::string &table,
                          const std::string &format)
{
    const auto fmt = export_format_from_string(format);
    const auto stats = user_stats(state);
    if (table == "users" || table.empty()) {
        return export_table(user_stats_table(stats), fmt);
    }
    if (table == "aggregate") {
        return export_table(aggregate_table(aggregate(stats)), fmt);
    }
    throw ValidationError("unknown stats table '" + table + "' (expected users or aggregate)");
}

HttpResponse Api::handle(const HttpRequest &req) const
{
    const auto parts = split_path(req.path);
    const bool get = req.method == "GET";
    const bool post = req.method == "POST";

    if (get && parts.size() == 1 && parts[0] == "healthz") {
        return json_response(200, Json{{"status", "ok"}});
    }
    if (parts.size() < 3 || parts[0] != "api" || parts[1] != "projects") {
        return error_response(404, "NotFound", "no such route");
    }
    const auto &project = parts[2];

    std::optional<std::string> caller;
    try {
        const auto token = bearer_token(req);
        if (!token.empty() && engine_.has_project(project)) {
            caller = engine_.authenticate(project, token);
        }
    } catch (const Error &e) {
        return error_response(500, "LoadError", e.what());
    }
    if (!caller) {
        return error_response(401, "Unauthorized", "missing or invalid API token");
    }

    try {
        const auto rest = std::vector<std::string>(parts.begin() + 3, parts.end());

        if (post && rest.size() == 1 && rest[0] == "runs") {
            std::optional<std::string> claimed;
            RunInput input;
            try {
                input = run_input_from(req, claimed);
            } catch (const ValidationError &e) {
                return error_response(400, "ValidationError", e.what());
            }
            const auto user = claimed.value_or(*caller);
            if (user != *caller) {
                return error_response(403, "Forbidden", "token does not belong to " + user);
            }
            try {
                const auto report = engine_.ingest_run(project, user, input);
                return json_response(200, report);
            } catch (const IngestError &e) {
                Json body{{"error", "IngestError"}, {"kind", e.cause_kind()}, {"detail", e.what()}};
                if (e.position().line > 0) {
                    body["position"] = {{"line", e.position().line},
                                        {"column", e.position().column},
                                        {"offset", e.position().offset}};
                }
                return json_response(400, body);
            } catch (const ValidationError &e) {
                return error_response(400, "ValidationError", e.what());
            }
        }

        const auto snap = engine_.snapshot(project);

        if (get && rest.size() == 1 && rest[0] == "leaderboard") {
            return json_response(200, Json(leaderboard(snap->user_states())));
        }
        if (get && rest.size() == 2 && rest[0] == "leaderboard" && rest[1] == "teams") {
            return json_response(200, Json(team_leaderboard(snap->user_states())));
        }
        if (get && rest.size() == 1 && rest[0] == "stats") {
            const auto format = query(req, "format", "json");
            auto body = stats_payload(*snap, query(req, "table", "users"), format);
            return {200, std::move(body), format == "csv" ? "text/csv" : "application/json"};
        }

        if (rest.size() >= 2 && rest[0] == "users") {
            const auto &user_id = rest[1];
            const auto &rec = user_record(*snap, user_id);

            if (get && rest.size() == 2) {
                return json_response(200, user_summary(rec));
            }
            if (get && rest.size() == 3 && rest[2] == "challenges") {
                try {
                    return json_response(200, challenges_json(rec, query(req, "state")));
                } catch (const ValidationError &e) {
                    return error_response(400, "ValidationError", e.what());
                }
            }
            if (get && rest.size() == 3 && rest[2] == "quests") {
                try {
                    return json_response(200, quests_json(rec, query(req, "state")));
                } catch (const ValidationError &e) {
                    return error_response(400, "ValidationError", e.what());
                }
            }
            if (get && rest.size() == 3 && rest[2] == "achievements") {
                return json_response(200, achievements_json(*snap, rec));
            }
            if (get && rest.size() == 3 && rest[2] == "events") {
                std::uint64_t since = 0;
                try {
                    since = parse_since(query(req, "since"));
                } catch (const ValidationError &e) {
                    return error_response(400, "ValidationError", e.what());
                }
                return json_response(200, Json(gapquest::events_since(*snap, user_id, since)));
            }
            if (post && rest.size() == 5 && rest[2] == "challenges" && rest[4] == "reject") {
                if (user_id != *caller) {
                    return error_response(403, "Forbidden", "token does not belong to " + user_id);
                }
                std::string reason;
                try {
                    const auto body = Json::parse(req.body.empty() ? "{}" : req.body);
                    reason = body.value("reason", "");
                    if (body.contains("challenge_id") && body.at("challenge_id") != rest[3]) {
                        return error_response(422, "ValidationError",
                                              "challenge_id in body does not match the path");
                    }
                } catch (const Json::exception &e) {
                    return error_response(422, "ValidationError",
                                          std::string("request body is not JSON: ") + e.what());
                }
                const auto report = engine_.reject_challenge(project, user_id, rest[3], reason);
                const auto after = engine_.snapshot(project);
                const auto &urec = after->users.at(user_id);
                const SourceModel *model = urec.model ? &*urec.model : nullptr;
                Json replacement = nullptr;
                if (auto ids = report.ids_of(EventKind::challenge_new, "challenge_id");
                    !ids.empty()) {
                    replacement = challenge_view(*urec.state.find_challenge(ids.front()), model);
                }
                return json_response(
                    200, Json{{"rejected", challenge_view(*urec.state.find_challenge(rest[3]), model)},
                              {"replacement", replacement},
                              {"events", report.events}});
            }
        }
        return error_response(404, "NotFound", "no such route");
    } catch (const NotRegistered &e) {
        return error_response(404, "NotRegistered", e.what());
    } catch (const ValidationError &e) {
        return error_response(422, "ValidationError", e.what());
    } catch (const ConflictError &e) {
        return error_response(409, "ConflictError", e.what());
    } catch (const EmptyProject &e) {
        return error_response(409, "EmptyProject", e.what());
    } catch (const std::exception &e) {
        return error_response(500, "InternalError", e.what());
    }
}

struct HttpServer::Impl
{
    explicit Impl(const Api &a) : api(a) {}
    const Api &api;
    httplib::Server server;
};

HttpServer::HttpServer(const Api &api) : impl_(std::make_unique<Impl>(api))
{
    auto forward = [this](const httplib::Request &req, httplib::Response &res) {
        HttpRequest r;
        r.method = req.method;
        r.path = req.path;
        for (const auto &[k, v] : req.params) {
            r.query[k] = v;
        }
        for (const auto &[k, v] : req.headers) {
            std::string key = k;
            for (auto &ch : key) {
                ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
            }
            r.headers[key] = v;
        }
        r.body = req.body;
        for (const auto &[name, part] : req.files) {
            r.form.emplace(name, part.content);
        }
        auto out = impl_->api.handle(r);
        res.status = out.status;
        res.set_content(out.body, out.content_type);
    };
    impl_->server.Get(".*", forward);
    impl_->server.Post(".*", forward);
}

HttpServer::~HttpServer() = default;

int HttpServer::bind(const std::string &host, int port)
{
    if (port == 0) {
        return impl_->server.bind_to_any_port(host);
    }
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

} // namespace gapquest
