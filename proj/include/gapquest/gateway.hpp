#pragma once

#include "gapquest/orchestrator.hpp"

#include <map>
#include <memory>
#include <string>

namespace gapquest {

struct HttpRequest
{
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    /// Header names lowercased.
    std::map<std::string, std::string> headers;
    std::string body;
    /// Multipart form fields by name; repeated names keep every value.
    std::multimap<std::string, std::string> form;
};

struct HttpResponse
{
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// JSON API over an Engine. Routes:
///
///   GET  /healthz
///   GET  /api/projects/{p}/users/{u}
///   GET  /api/projects/{p}/users/{u}/challenges?state=current|completed|rejected|expired
///   GET  /api/projects/{p}/users/{u}/quests?state=current|completed|failed
///   GET  /api/projects/{p}/users/{u}/achievements
///   GET  /api/projects/{p}/users/{u}/events?since=N
///   POST /api/projects/{p}/users/{u}/challenges/{id}/reject
///   POST /api/projects/{p}/runs
///   GET  /api/projects/{p}/leaderboard
///   GET  /api/projects/{p}/leaderboard/teams
///   GET  /api/projects/{p}/stats?table=users|aggregate&format=json|csv
///
/// Everything except /healthz needs `Authorization: Bearer <token>`. Any
/// project token may read; writes need the token of the user acted on.
class Api
{
public:
    explicit Api(Engine &engine) : engine_(engine) {}

    HttpResponse handle(const HttpRequest &request) const;

private:
    Engine &engine_;
};

/// Blocking HTTP/1.1 server around an Api.
class HttpServer
{
public:
    explicit HttpServer(const Api &api);
    ~HttpServer();

    HttpServer(const HttpServer &) = delete;
    HttpServer &operator=(const HttpServer &) = delete;

    /// Binds `port` (0 picks a free one) and returns the bound port, or -1.
    int bind(const std::string &host, int port);
    /// Serves until stop(); call after bind().
    bool listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Stats payload shared by the CLI and the HTTP API.
std::string stats_payload(const ProjectState &state, const std::string &table,
                          const std::string &format);

} // namespace gapquest
