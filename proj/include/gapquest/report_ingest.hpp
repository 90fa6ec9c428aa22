#pragma once

#include "gapquest/model.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace gapquest {

/// Cobertura-style coverage report -> one ClassCov per `class` element.
///
/// Branch counts come only from `condition-coverage="P% (c/t)"`; lines with
/// branch="false" carry no branches. Class-level `<lines>` blocks are ignored
/// since they repeat the method lines.
std::vector<ClassCov> parse_coverage(std::string_view document);

/// PIT-style mutation report.
std::vector<Mutant> parse_mutations(std::string_view document);

struct TestResults
{
    TestSnapshot snapshot;
    std::vector<std::string> warnings;
};

/// Merges xunit `testsuite` documents. Identity is (classname, name); a test
/// seen in several documents is counted once with its worst status.
TestResults parse_test_results(const std::vector<std::string> &documents);

/// Parses and assembles the three artifacts of one run.
SourceModel ingest_reports(std::string_view coverage, std::string_view mutations,
                           const std::vector<std::string> &tests);

/// Parses "P% (c/t)" and returns {covered, total}.
std::pair<std::uint32_t, std::uint32_t> parse_condition_coverage(std::string_view text);

} // namespace gapquest
