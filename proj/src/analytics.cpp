#include "gapquest/analytics.hpp"

#include "gapquest/errors.hpp"

#include <algorithm>
#include <charconv>

namespace gapquest {

SuiteMetrics suite_metrics(const SourceModel &model)
{
    SuiteMetrics m;
    m.tests = model.tests().total;
    auto ratio = [](std::uint64_t num, std::uint64_t den) -> std::optional<double> {
        if (den == 0) {
            return std::nullopt;
        }
        return static_cast<double>(num) / static_cast<double>(den);
    };
    m.line_coverage = ratio(model.lines_covered(), model.lines_total());
    m.branch_coverage = ratio(model.branches_covered(), model.branches_total());
    std::uint64_t detected = 0;
    for (const auto &mu : model.mutants()) {
        if (mu.status == MutantStatus::killed || mu.status == MutantStatus::timed_out) {
            ++detected;
        }
    }
    m.mutation_score = ratio(detected, model.mutants().size());
    return m;
}

std::uint64_t UserStats::solved_total() const
{
    std::uint64_t n = 0;
    for (const auto &[k, v] : solved_by_kind) {
        n += v;
    }
    return n;
}

std::vector<UserStats> user_stats(const ProjectState &state)
{
    std::vector<UserStats> out;
    for (const auto &[id, rec] : state.users) {
        UserStats s;
        s.user_id = id;
        for (auto k : all_challenge_kinds) {
            s.solved_by_kind[k] = 0;
        }
        for (const auto &c : rec.state.challenges) {
            if (c.state == ChallengeState::solved) {
                ++s.solved_by_kind[c.kind];
            } else if (c.state == ChallengeState::rejected) {
                ++s.rejected;
            }
        }
        s.quests_completed = rec.state.completed_quests();
        s.runs = rec.runs.size();
        s.score = rec.state.score;
        if (rec.model) {
            s.suite = suite_metrics(*rec.model);
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::int64_t round_half_up_tenths(std::uint64_t total, std::uint64_t n)
{
    // floor(10 * total / n + 1/2) == floor((20 * total + n) / (2 * n))
    return static_cast<std::int64_t>((20 * total + n) / (2 * n));
}

std::int64_t MetricSummary::mean_tenths() const
{
    return users == 0 ? 0 : round_half_up_tenths(total, users);
}

std::string MetricSummary::mean_display() const
{
    const auto t = mean_tenths();
    return std::to_string(t / 10) + "." + std::to_string(t % 10);
}

std::vector<MetricSummary> aggregate(const std::vector<UserStats> &stats)
{
    if (stats.empty()) {
        throw EmptyProject();
    }
    using Getter = std::uint64_t (*)(const UserStats &);
    const std::pair<const char *, Getter> metrics[] = {
        {"challenges_solved", [](const UserStats &s) { return s.solved_total(); }},
        {"quests_completed", [](const UserStats &s) { return s.quests_completed; }},
        {"runs", [](const UserStats &s) { return s.runs; }},
        {"score", [](const UserStats &s) { return s.score; }},
        {"rejected", [](const UserStats &s) { return s.rejected; }},
    };
    std::vector<MetricSummary> out;
    for (const auto &[name, get] : metrics) {
        MetricSummary m;
        m.metric = name;
        m.users = stats.size();
        m.min = get(stats.front());
        m.max = m.min;
        for (const auto &s : stats) {
            const auto v = get(s);
            m.total += v;
            m.min = std::min(m.min, v);
            m.max = std::max(m.max, v);
        }
        out.push_back(std::move(m));
    }
    return out;
}

std::vector<MetricSummary> aggregate(const ProjectState &state)
{
    return aggregate(user_stats(state));
}

namespace {

Cell opt_cell(const std::optional<double> &v)
{
    return v ? Cell(*v) : Cell(std::monostate{});
}

Cell int_cell(std::uint64_t v) { return Cell(static_cast<std::int64_t>(v)); }

std::string format_double(double v)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

std::string cell_text(const Cell &c)
{
    struct Visitor
    {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(std::int64_t v) const { return std::to_string(v); }
        std::string operator()(double v) const { return format_double(v); }
        std::string operator()(const std::string &v) const { return v; }
    };
    return std::visit(Visitor{}, c);
}

std::string csv_field(const std::string &text)
{
    if (text.find_first_of(",\"\r\n") == std::string::npos) {
        return text;
    }
    std::string out = "\"";
    for (char ch : text) {
        if (ch == '"') {
            out += '"';
        }
        out += ch;
    }
    out += '"';
    return out;
}

} // namespace

Table user_stats_table(const std::vector<UserStats> &stats)
{
    Table t;
    t.columns = {"user_id", "score", "runs", "solved_total"};
    for (auto k : all_challenge_kinds) {
        t.columns.push_back(std::string("solved_") + to_string(k));
    }
    for (const char *c : {"rejected", "quests_completed", "tests", "line_coverage",
                          "branch_coverage", "mutation_score"}) {
        t.columns.emplace_back(c);
    }
    for (const auto &s : stats) {
        std::vector<Cell> row{s.user_id, int_cell(s.score), int_cell(s.runs),
                              int_cell(s.solved_total())};
        for (auto k : all_challenge_kinds) {
            auto it = s.solved_by_kind.find(k);
            row.push_back(int_cell(it == s.solved_by_kind.end() ? 0 : it->second));
        }
        row.push_back(int_cell(s.rejected));
        row.push_back(int_cell(s.quests_completed));
        if (s.suite) {
            row.push_back(int_cell(s.suite->tests));
            row.push_back(opt_cell(s.suite->line_coverage));
            row.push_back(opt_cell(s.suite->branch_coverage));
            row.push_back(opt_cell(s.suite->mutation_score));
        } else {
            row.insert(row.end(), 4, Cell{});
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table aggregate_table(const std::vector<MetricSummary> &summary)
{
    Table t;
    t.columns = {"metric", "users", "total", "min", "max", "mean"};
    for (const auto &m : summary) {
        t.rows.push_back({m.metric, int_cell(m.users), int_cell(m.total), int_cell(m.min),
                          int_cell(m.max), Cell(m.mean())});
    }
    return t;
}

ExportFormat export_format_from_string(const std::string &text)
{
    if (text == "csv") return ExportFormat::csv;
    if (text == "json") return ExportFormat::json;
    throw ValidationError("unknown export format '" + text + "' (expected csv or json)");
}

std::string export_table(const Table &table, ExportFormat format)
{
    if (format == ExportFormat::csv) {
        std::string out;
        auto write_row = [&](auto begin, auto end, auto to_text) {
            for (auto it = begin; it != end; ++it) {
                if (it != begin) {
                    out += ',';
                }
                out += csv_field(to_text(*it));
            }
            out += "\r\n";
        };
        write_row(table.columns.begin(), table.columns.end(),
                  [](const std::string &s) { return s; });
        for (const auto &row : table.rows) {
            write_row(row.begin(), row.end(), cell_text);
        }
        return out;
    }

    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto &row : table.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < table.columns.size(); ++i) {
            const auto &c = i < row.size() ? row[i] : Cell{};
            auto &slot = obj[table.columns[i]];
            std::visit(
                [&](const auto &v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, std::monostate>) {
                        slot = nullptr;
                    } else {
                        slot = v;
                    }
                },
                c);
        }
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

Table import_json_table(const std::string &document)
{
    const auto arr = nlohmann::ordered_json::parse(document);
    if (!arr.is_array()) {
        throw ValidationError("expected a JSON array of row objects");
    }
    Table t;
    for (const auto &obj : arr) {
        if (!obj.is_object()) {
            throw ValidationError("expected a JSON array of row objects");
        }
        if (t.columns.empty()) {
            for (const auto &[k, v] : obj.items()) {
                t.columns.push_back(k);
            }
        }
        std::vector<Cell> row;
        for (const auto &col : t.columns) {
            const auto it = obj.find(col);
            if (it == obj.end() || it->is_null()) {
                row.emplace_back(std::monostate{});
            } else if (it->is_number_integer()) {
                row.emplace_back(it->get<std::int64_t>());
            } else if (it->is_number_float()) {
                row.emplace_back(it->get<double>());
            } else if (it->is_string()) {
                row.emplace_back(it->get<std::string>());
            } else {
                throw ValidationError("unsupported value in column '" + col + "'");
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

} // namespace gapquest
