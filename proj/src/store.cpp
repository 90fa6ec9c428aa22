#include "gapquest/store.hpp"

#include "gapquest/errors.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>

namespace gapquest {

namespace fs = std::filesystem;

void validate_identifier(const std::string &kind, const std::string &id)
{
    if (id.empty() || id.size() > 128 || id.front() == '.') {
        throw ValidationError(kind + " id '" + id + "' is not valid");
    }
    for (unsigned char c : id) {
        if (!(std::isalnum(c) || c == '-' || c == '_' || c == '.')) {
            throw ValidationError(kind + " id '" + id +
                                  "' may only contain letters, digits, '-', '_' and '.'");
        }
    }
}

namespace {

std::string read_file(const fs::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw LoadError(path, "cannot open file");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Json parse_document(const fs::path &path)
{
    const auto text = read_file(path);
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::exception &e) {
        throw LoadError(path, e.what());
    }
    if (!doc.is_object() || doc.value("schema_version", 0) != schema_version) {
        throw LoadError(path, "missing or unsupported schema_version");
    }
    return doc;
}

} // namespace

std::string serialize_user(const UserRecord &record)
{
    Json doc{{"schema_version", schema_version},
             {"state", record.state},
             {"runs", record.runs},
             {"model", record.model ? Json(*record.model) : Json(nullptr)},
             {"pending_rejections", record.pending_rejections}};
    return doc.dump(2) + "\n";
}

std::string serialize_events(const std::vector<Event> &events)
{
    std::string out;
    for (const auto &e : events) {
        Json line = e;
        line["schema_version"] = schema_version;
        out += line.dump();
        out += '\n';
    }
    return out;
}

std::string serialize_project(const ProjectState &state)
{
    Json users = Json::array();
    for (const auto &[id, rec] : state.users) {
        users.push_back(id);
    }
    Json doc{{"schema_version", schema_version},
             {"project_id", state.project_id},
             {"config", state.config},
             {"users", std::move(users)}};
    return doc.dump(2) + "\n";
}

Store::Store(fs::path root) : root_(std::move(root)) {}

fs::path Store::project_dir(const std::string &project_id) const { return root_ / project_id; }

bool Store::exists(const std::string &project_id) const
{
    return fs::exists(project_dir(project_id) / "project.json");
}

void Store::set_fault_hook(std::function<void(const fs::path &)> hook)
{
    fault_hook_ = std::move(hook);
}

void Store::write_atomic(const fs::path &path, const std::string &content) const
{
    fs::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
    if (fd < 0) {
        throw std::system_error(errno, std::generic_category(), "open " + tmp.string());
    }
    const char *p = content.data();
    std::size_t left = content.size();
    while (left > 0) {
        const auto n = ::write(fd, p, left);
        if (n < 0) {
            if (errno == EINTR) {
                continue;
            }
            const int err = errno;
            ::close(fd);
            throw std::system_error(err, std::generic_category(), "write " + tmp.string());
        }
        p += n;
        left -= static_cast<std::size_t>(n);
    }
    if (::fsync(fd) != 0 || ::close(fd) != 0) {
        throw std::system_error(errno, std::generic_category(), "sync " + tmp.string());
    }
    if (fault_hook_) {
        fault_hook_(path);
    }
    fs::rename(tmp, path);
}

void Store::persist(const ProjectState &state, const std::vector<std::string> &users) const
{
    const auto dir = project_dir(state.project_id);
    auto write_user = [&](const std::string &id, const UserRecord &rec) {
        write_atomic(dir / "events" / (id + ".log"), serialize_events(rec.events));
        write_atomic(dir / "users" / (id + ".json"), serialize_user(rec));
    };
    if (users.empty()) {
        for (const auto &[id, rec] : state.users) {
            write_user(id, rec);
        }
    } else {
        for (const auto &id : users) {
            write_user(id, state.users.at(id));
        }
    }
    write_atomic(dir / "project.json", serialize_project(state));
}

ProjectState Store::load(const std::string &project_id) const
{
    const auto dir = project_dir(project_id);
    const auto project_file = dir / "project.json";
    const auto doc = parse_document(project_file);

    ProjectState state;
    std::vector<std::string> user_ids;
    try {
        doc.at("project_id").get_to(state.project_id);
        doc.at("config").get_to(state.config);
        doc.at("users").get_to(user_ids);
        state.config.validate();
    } catch (const std::exception &e) {
        throw LoadError(project_file, e.what());
    }
    if (state.project_id != project_id) {
        throw LoadError(project_file, "project_id does not match its directory");
    }

    for (const auto &id : user_ids) {
        const auto user_file = dir / "users" / (id + ".json");
        // A user registered by an interrupted persist may lack its file.
        if (!fs::exists(user_file)) {
            throw LoadError(user_file, "user listed in project.json has no state file");
        }
        const auto udoc = parse_document(user_file);
        UserRecord rec;
        try {
            udoc.at("state").get_to(rec.state);
            udoc.at("runs").get_to(rec.runs);
            if (!udoc.at("model").is_null()) {
                rec.model = udoc.at("model").get<SourceModel>();
            }
            udoc.at("pending_rejections").get_to(rec.pending_rejections);
        } catch (const std::exception &e) {
            throw LoadError(user_file, e.what());
        }
        if (rec.state.user_id != id) {
            throw LoadError(user_file, "user_id does not match its file name");
        }
        if (recompute_score(rec.state) != rec.state.score) {
            throw LoadError(user_file, "score disagrees with solved challenges and quests");
        }

        const auto log_file = dir / "events" / (id + ".log");
        if (fs::exists(log_file)) {
            std::istringstream lines(read_file(log_file));
            std::string line;
            std::size_t line_no = 0;
            while (std::getline(lines, line) && rec.events.size() < rec.state.event_seq) {
                ++line_no;
                if (line.empty()) {
                    continue;
                }
                try {
                    auto e = Json::parse(line).get<Event>();
                    if (e.seq != rec.events.size() + 1) {
                        throw LoadError(log_file, "event sequence gap at line " +
                                                      std::to_string(line_no));
                    }
                    rec.events.push_back(std::move(e));
                } catch (const LoadError &) {
                    throw;
                } catch (const std::exception &e) {
                    throw LoadError(log_file,
                                    "line " + std::to_string(line_no) + ": " + e.what());
                }
            }
        }
        if (rec.events.size() != rec.state.event_seq) {
            throw LoadError(log_file, "event log shorter than the user's event_seq");
        }
        state.users.emplace(id, std::move(rec));
    }
    return state;
}

std::map<std::string, std::string> Store::load_tokens(const std::string &project_id) const
{
    const auto file = project_dir(project_id) / "tokens.json";
    if (!fs::exists(file)) {
        return {};
    }
    const auto doc = parse_document(file);
    try {
        return doc.at("tokens").get<std::map<std::string, std::string>>();
    } catch (const std::exception &e) {
        throw LoadError(file, e.what());
    }
}

void Store::save_tokens(const std::string &project_id,
                        const std::map<std::string, std::string> &tokens) const
{
    Json doc{{"schema_version", schema_version}, {"tokens", tokens}};
    write_atomic(project_dir(project_id) / "tokens.json", doc.dump(2) + "\n");
}

} // namespace gapquest
