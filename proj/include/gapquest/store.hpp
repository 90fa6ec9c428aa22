#pragma once

#include "gapquest/orchestrator.hpp"

#include <filesystem>
#include <functional>
#include <map>
#include <string>

namespace gapquest {

/// On-disk layout under the state root:
///
///   <project>/project.json
///   <project>/users/<user_id>.json
///   <project>/events/<user_id>.log     one JSON event per line
///   <project>/tokens.json
///
/// Every file is replaced via write-then-rename. Per user the event log is
/// written before the user document, and load drops log lines past the
/// document's event_seq, so an interrupted persist never exposes a partial
/// step.
class Store
{
public:
    explicit Store(std::filesystem::path root);

    const std::filesystem::path &root() const noexcept { return root_; }
    std::filesystem::path project_dir(const std::string &project_id) const;
    bool exists(const std::string &project_id) const;

    ProjectState load(const std::string &project_id) const;
    /// Writes the given users (all when empty) and then project.json.
    void persist(const ProjectState &state, const std::vector<std::string> &users = {}) const;

    std::map<std::string, std::string> load_tokens(const std::string &project_id) const;
    void save_tokens(const std::string &project_id,
                     const std::map<std::string, std::string> &tokens) const;

    /// Called with the destination path right before each rename; tests use
    /// it to simulate a crash mid-persist.
    void set_fault_hook(std::function<void(const std::filesystem::path &)> hook);

private:
    void write_atomic(const std::filesystem::path &path, const std::string &content) const;

    std::filesystem::path root_;
    std::function<void(const std::filesystem::path &)> fault_hook_;
};

/// Validates a project or user identifier for use as a file name.
void validate_identifier(const std::string &kind, const std::string &id);

std::string serialize_user(const UserRecord &record);
std::string serialize_events(const std::vector<Event> &events);
std::string serialize_project(const ProjectState &state);

} // namespace gapquest
