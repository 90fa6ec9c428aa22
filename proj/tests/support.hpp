#pragma once

#include "gapquest/challenge.hpp"
#include "gapquest/model.hpp"
#include "gapquest/orchestrator.hpp"
#include "gapquest/random.hpp"

#include <filesystem>
#include <set>
#include <string>
#include <vector>

namespace gapquest::testing {

std::string fixture(const std::string &relative);

/// Reports of one run of the six-class fixture project.
RunInput fixture_run(int run, const std::string &commit);

/// Random model with at most 10 classes, 50 lines and 20 mutants.
SourceModel random_model(Rng &rng);

/// Plain enumeration of valid targets straight from the model's line data.
std::set<Target> brute_force_targets(const SourceModel &model, ChallengeKind kind);

/// Two classes of ten lines each at the given covered counts.
SourceModel two_class_model(std::uint32_t covered_a, std::uint32_t covered_b);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir
{
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;
    const std::filesystem::path &path() const { return path_; }

private:
    std::filesystem::path path_;
};

std::string read_file(const std::filesystem::path &path);

} // namespace gapquest::testing
