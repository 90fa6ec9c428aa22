#pragma once

#include "gapquest/model.hpp"
#include "gapquest/orchestrator.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace gapquest {

/// Test-suite quality of one model. Ratios are absent when their
/// denominator is zero.
struct SuiteMetrics
{
    std::uint32_t tests = 0;
    std::optional<double> line_coverage;
    std::optional<double> branch_coverage;
    /// (killed + timed_out) / all mutants.
    std::optional<double> mutation_score;
};

SuiteMetrics suite_metrics(const SourceModel &model);

struct UserStats
{
    std::string user_id;
    std::map<ChallengeKind, std::uint64_t> solved_by_kind;
    std::uint64_t rejected = 0;
    std::uint64_t quests_completed = 0;
    std::uint64_t runs = 0;
    std::uint64_t score = 0;
    std::optional<SuiteMetrics> suite;

    std::uint64_t solved_total() const;
};

std::vector<UserStats> user_stats(const ProjectState &state);

struct MetricSummary
{
    std::string metric;
    std::uint64_t users = 0;
    std::uint64_t total = 0;
    std::uint64_t min = 0;
    std::uint64_t max = 0;

    /// Mean rounded half-up to one decimal, in tenths.
    std::int64_t mean_tenths() const;
    double mean() const { return static_cast<double>(mean_tenths()) / 10.0; }
    std::string mean_display() const;
};

/// Mean/min/max/total over users for solved challenges, completed quests,
/// runs, score and rejections. Throws EmptyProject without users.
std::vector<MetricSummary> aggregate(const std::vector<UserStats> &stats);
std::vector<MetricSummary> aggregate(const ProjectState &state);

/// Half-up rounding of total/n to tenths using integer arithmetic.
std::int64_t round_half_up_tenths(std::uint64_t total, std::uint64_t n);

using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct Table
{
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    bool operator==(const Table &) const = default;
};

Table user_stats_table(const std::vector<UserStats> &stats);
Table aggregate_table(const std::vector<MetricSummary> &summary);

enum class ExportFormat { csv, json };
ExportFormat export_format_from_string(const std::string &text);

/// CSV: header row, comma separated, RFC 4180 quoting, CRLF line ends.
/// JSON: array of row objects with keys in column order.
std::string export_table(const Table &table, ExportFormat format);
Table import_json_table(const std::string &document);

} // namespace gapquest
