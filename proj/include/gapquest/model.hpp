#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace gapquest {

struct LineRef
{
    std::string file;
    std::string class_name;
    std::uint32_t line = 0;

    auto operator<=>(const LineRef &) const = default;
};

struct LineCov
{
    LineRef ref;
    std::uint64_t hits = 0;
    std::uint32_t branch_total = 0;
    std::uint32_t branch_covered = 0;

    bool operator==(const LineCov &) const = default;
};

struct MethodCov
{
    std::string class_name;
    std::string name;
    std::string signature;
    std::uint32_t first_line = 0;
    std::uint32_t last_line = 0;
    std::vector<LineCov> lines;

    std::uint32_t covered_lines() const;
    bool operator==(const MethodCov &) const = default;
};

struct ClassCov
{
    std::string class_name;
    std::string file;
    std::vector<MethodCov> methods;
    std::uint32_t lines_total = 0;
    std::uint32_t lines_covered = 0;
    std::uint32_t branches_total = 0;
    std::uint32_t branches_covered = 0;

    /// Recomputes the four aggregates from the contained lines.
    void reaggregate();
    const LineCov *find_line(std::uint32_t line) const;
    const MethodCov *find_method(const std::string &name, const std::string &signature) const;
    bool operator==(const ClassCov &) const = default;
};

enum class MutantStatus { killed, survived, no_coverage, timed_out };

struct MutantKey
{
    std::string class_name;
    std::string method_name;
    std::uint32_t line = 0;
    std::string mutator;
    std::uint32_t index = 0;

    auto operator<=>(const MutantKey &) const = default;
    std::string to_string() const;
};

struct Mutant
{
    MutantKey key;
    MutantStatus status = MutantStatus::survived;
    std::string description;
    std::optional<std::string> killing_test;
    bool orphaned = false;

    bool operator==(const Mutant &) const = default;
};

struct TestId
{
    std::string classname;
    std::string name;

    auto operator<=>(const TestId &) const = default;
};

struct TestSnapshot
{
    std::uint32_t total = 0;
    std::uint32_t failures = 0;
    std::uint32_t errors = 0;
    std::uint32_t skipped = 0;
    std::set<TestId> test_ids;

    bool operator==(const TestSnapshot &) const = default;
};

/// Normalized, read-only view of one run's reports.
///
/// Only assemble_model() (and deserialization) can produce one, so every
/// instance has passed the aggregate and identity checks.
class SourceModel
{
public:
    SourceModel() = default;

    const std::vector<ClassCov> &classes() const noexcept { return classes_; }
    const std::vector<Mutant> &mutants() const noexcept { return mutants_; }
    const TestSnapshot &tests() const noexcept { return tests_; }

    const ClassCov *find_class(const std::string &name) const;
    const Mutant *find_mutant(const MutantKey &key) const;

    std::uint64_t lines_total() const;
    std::uint64_t lines_covered() const;
    std::uint64_t branches_total() const;
    std::uint64_t branches_covered() const;

    bool operator==(const SourceModel &other) const
    {
        return classes_ == other.classes_ && mutants_ == other.mutants_ &&
               tests_ == other.tests_;
    }

private:
    friend SourceModel assemble_model(std::vector<ClassCov>, std::vector<Mutant>, TestSnapshot);

    void index();

    std::vector<ClassCov> classes_;
    std::vector<Mutant> mutants_;
    TestSnapshot tests_;
    std::map<std::string, std::size_t> class_index_;
    std::map<MutantKey, std::size_t> mutant_index_;
};

/// Builds the immutable model for one run.
///
/// Mutants whose class is missing from the coverage report are kept and
/// flagged orphaned. Throws ModelError naming every offending class or
/// mutant when an aggregate, range or uniqueness invariant fails.
SourceModel assemble_model(std::vector<ClassCov> classes, std::vector<Mutant> mutants,
                           TestSnapshot tests);

const char *to_string(MutantStatus status);
MutantStatus mutant_status_from_string(const std::string &text);

} // namespace gapquest
