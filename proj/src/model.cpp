#include "gapquest/model.hpp"

#include "gapquest/errors.hpp"

#include <algorithm>

namespace gapquest {

std::uint32_t MethodCov::covered_lines() const
{
    return static_cast<std::uint32_t>(
        std::count_if(lines.begin(), lines.end(), [](const LineCov &l) { return l.hits > 0; }));
}

void ClassCov::reaggregate()
{
    lines_total = lines_covered = branches_total = branches_covered = 0;
    for (const auto &m : methods) {
        for (const auto &l : m.lines) {
            ++lines_total;
            lines_covered += l.hits > 0 ? 1 : 0;
            branches_total += l.branch_total;
            branches_covered += l.branch_covered;
        }
    }
}

const LineCov *ClassCov::find_line(std::uint32_t line) const
{
    for (const auto &m : methods) {
        for (const auto &l : m.lines) {
            if (l.ref.line == line) {
                return &l;
            }
        }
    }
    return nullptr;
}

const MethodCov *ClassCov::find_method(const std::string &name, const std::string &signature) const
{
    for (const auto &m : methods) {
        if (m.name == name && m.signature == signature) {
            return &m;
        }
    }
    return nullptr;
}

std::string MutantKey::to_string() const
{
    return class_name + "#" + method_name + ":" + std::to_string(line) + "/" + mutator + "/" +
           std::to_string(index);
}

const ClassCov *SourceModel::find_class(const std::string &name) const
{
    auto it = class_index_.find(name);
    return it == class_index_.end() ? nullptr : &classes_[it->second];
}

const Mutant *SourceModel::find_mutant(const MutantKey &key) const
{
    auto it = mutant_index_.find(key);
    return it == mutant_index_.end() ? nullptr : &mutants_[it->second];
}

std::uint64_t SourceModel::lines_total() const
{
    std::uint64_t n = 0;
    for (const auto &c : classes_) {
        n += c.lines_total;
    }
    return n;
}

std::uint64_t SourceModel::lines_covered() const
{
    std::uint64_t n = 0;
    for (const auto &c : classes_) {
        n += c.lines_covered;
    }
    return n;
}

std::uint64_t SourceModel::branches_total() const
{
    std::uint64_t n = 0;
    for (const auto &c : classes_) {
        n += c.branches_total;
    }
    return n;
}

std::uint64_t SourceModel::branches_covered() const
{
    std::uint64_t n = 0;
    for (const auto &c : classes_) {
        n += c.branches_covered;
    }
    return n;
}

void SourceModel::index()
{
    class_index_.clear();
    mutant_index_.clear();
    for (std::size_t i = 0; i < classes_.size(); ++i) {
        class_index_.emplace(classes_[i].class_name, i);
    }
    for (std::size_t i = 0; i < mutants_.size(); ++i) {
        mutant_index_.emplace(mutants_[i].key, i);
    }
}

SourceModel assemble_model(std::vector<ClassCov> classes, std::vector<Mutant> mutants,
                           TestSnapshot tests)
{
    std::vector<std::string> offenders;
    std::set<std::string> class_names;

    for (const auto &c : classes) {
        if (c.class_name.empty()) {
            offenders.push_back("class with empty name");
            continue;
        }
        if (!class_names.insert(c.class_name).second) {
            offenders.push_back("class " + c.class_name + ": duplicate");
        }
        ClassCov recomputed = c;
        recomputed.reaggregate();
        if (recomputed.lines_total != c.lines_total ||
            recomputed.lines_covered != c.lines_covered ||
            recomputed.branches_total != c.branches_total ||
            recomputed.branches_covered != c.branches_covered) {
            offenders.push_back("class " + c.class_name + ": aggregates disagree with lines");
        }
        for (const auto &m : c.methods) {
            if (m.first_line > m.last_line) {
                offenders.push_back("method " + c.class_name + "." + m.name + ": bad line range");
            }
            for (const auto &l : m.lines) {
                if (l.ref.line < 1 || l.ref.line < m.first_line || l.ref.line > m.last_line) {
                    offenders.push_back("line " + c.class_name + ":" +
                                        std::to_string(l.ref.line) + ": outside method range");
                }
                if (l.branch_covered > l.branch_total) {
                    offenders.push_back("line " + c.class_name + ":" +
                                        std::to_string(l.ref.line) +
                                        ": covered branches exceed total");
                }
                if (l.ref.file.empty() || l.ref.class_name != c.class_name) {
                    offenders.push_back("line " + c.class_name + ":" +
                                        std::to_string(l.ref.line) + ": bad reference");
                }
            }
        }
    }

    std::set<MutantKey> keys;
    for (auto &m : mutants) {
        if (!keys.insert(m.key).second) {
            offenders.push_back("mutant " + m.key.to_string() + ": duplicate key");
        }
        if (m.key.line < 1) {
            offenders.push_back("mutant " + m.key.to_string() + ": line < 1");
        }
        m.orphaned = class_names.count(m.key.class_name) == 0;
    }

    if (tests.failures + tests.errors > tests.total || tests.test_ids.size() != tests.total) {
        offenders.push_back("tests: counters disagree with test ids");
    }

    if (!offenders.empty()) {
        throw ModelError(std::move(offenders));
    }

    SourceModel model;
    model.classes_ = std::move(classes);
    model.mutants_ = std::move(mutants);
    model.tests_ = std::move(tests);
    model.index();
    return model;
}

const char *to_string(MutantStatus status)
{
    switch (status) {
    case MutantStatus::killed: return "KILLED";
    case MutantStatus::survived: return "SURVIVED";
    case MutantStatus::no_coverage: return "NO_COVERAGE";
    case MutantStatus::timed_out: return "TIMED_OUT";
    }
    return "?";
}

MutantStatus mutant_status_from_string(const std::string &text)
{
    if (text == "KILLED") return MutantStatus::killed;
    if (text == "SURVIVED") return MutantStatus::survived;
    if (text == "NO_COVERAGE") return MutantStatus::no_coverage;
    if (text == "TIMED_OUT") return MutantStatus::timed_out;
    throw SchemaError("mutation", "status", "unknown status '" + text + "'");
}

} // namespace gapquest
