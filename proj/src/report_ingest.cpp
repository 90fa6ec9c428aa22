#include "gapquest/report_ingest.hpp"

#include "gapquest/errors.hpp"
#include "xml_dom.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <map>

namespace gapquest {

namespace {

std::uint32_t to_u32(std::string_view text, const xml::Element &owner, std::string_view field)
{
    auto v = xml::to_uint(text, owner, field);
    if (v > std::numeric_limits<std::uint32_t>::max()) {
        throw SchemaError(owner.name, std::string(field), "value out of range");
    }
    return static_cast<std::uint32_t>(v);
}

void expect_root(const xml::Element &root, std::string_view name)
{
    if (root.name != name) {
        throw SchemaError(root.name, "", "expected root element <" + std::string(name) + ">");
    }
}

LineCov parse_line(const xml::Element &el, const std::string &file, const std::string &cls)
{
    LineCov line;
    line.ref.file = file;
    line.ref.class_name = cls;
    line.ref.line = to_u32(el.required("number"), el, "number");
    if (line.ref.line == 0) {
        throw SchemaError(el.name, "number", "line numbers start at 1");
    }
    line.hits = xml::to_uint(el.required("hits"), el, "hits");

    const auto *branch = el.attribute("branch");
    if (branch != nullptr && *branch == "true") {
        const auto &cc = el.required("condition-coverage");
        try {
            auto [covered, total] = parse_condition_coverage(cc);
            line.branch_covered = covered;
            line.branch_total = total;
        } catch (const SchemaError &) {
            throw SchemaError(el.name, "condition-coverage",
                              "expected 'P% (c/t)', got '" + cc + "'");
        }
    }
    return line;
}

ClassCov parse_class(const xml::Element &el)
{
    ClassCov cls;
    cls.class_name = el.required("name");
    cls.file = el.required("filename");
    if (cls.class_name.empty()) {
        throw SchemaError(el.name, "name", "empty class name");
    }
    if (cls.file.empty()) {
        throw SchemaError(el.name, "filename", "empty file name");
    }
    if (const auto *methods = el.child("methods")) {
        for (const auto &m : methods->children) {
            if (m.name != "method") {
                continue;
            }
            MethodCov method;
            method.class_name = cls.class_name;
            method.name = m.required("name");
            method.signature = m.required("signature");
            if (const auto *lines = m.child("lines")) {
                for (const auto &l : lines->children) {
                    if (l.name == "line") {
                        method.lines.push_back(parse_line(l, cls.file, cls.class_name));
                    }
                }
            }
            if (!method.lines.empty()) {
                auto [lo, hi] = std::minmax_element(
                    method.lines.begin(), method.lines.end(),
                    [](const LineCov &a, const LineCov &b) { return a.ref.line < b.ref.line; });
                method.first_line = lo->ref.line;
                method.last_line = hi->ref.line;
            }
            cls.methods.push_back(std::move(method));
        }
    }
    cls.reaggregate();
    return cls;
}

enum class Verdict { pass = 0, skipped = 1, failure = 2, error = 3 };

} // namespace

std::pair<std::uint32_t, std::uint32_t> parse_condition_coverage(std::string_view text)
{
    // INT "%" SP "(" INT "/" INT ")"
    auto fail = [&] {
        return SchemaError("line", "condition-coverage",
                           "expected 'P% (c/t)', got '" + std::string(text) + "'");
    };
    const char *p = text.data();
    const char *end = p + text.size();
    auto read_int = [&](std::uint32_t &out) {
        auto [next, ec] = std::from_chars(p, end, out);
        if (ec != std::errc() || next == p) {
            throw fail();
        }
        p = next;
    };
    auto expect = [&](char c) {
        if (p == end || *p != c) {
            throw fail();
        }
        ++p;
    };
    std::uint32_t percent = 0, covered = 0, total = 0;
    read_int(percent);
    expect('%');
    expect(' ');
    expect('(');
    read_int(covered);
    expect('/');
    read_int(total);
    expect(')');
    if (p != end || covered > total || percent > 100) {
        throw fail();
    }
    return {covered, total};
}

std::vector<ClassCov> parse_coverage(std::string_view document)
{
    const auto root = xml::parse(document);
    expect_root(root, "coverage");

    std::vector<ClassCov> out;
    const auto *packages = root.child("packages");
    if (packages == nullptr) {
        throw SchemaError("coverage", "packages", "missing required child element");
    }
    for (const auto &pkg : packages->children) {
        if (pkg.name != "package") {
            continue;
        }
        const auto *classes = pkg.child("classes");
        if (classes == nullptr) {
            continue;
        }
        for (const auto &c : classes->children) {
            if (c.name == "class") {
                out.push_back(parse_class(c));
            }
        }
    }
    return out;
}

std::vector<Mutant> parse_mutations(std::string_view document)
{
    const auto root = xml::parse(document);
    expect_root(root, "mutations");

    std::vector<Mutant> out;
    std::set<MutantKey> seen;
    for (const auto &el : root.children) {
        if (el.name != "mutation") {
            continue;
        }
        Mutant m;
        m.status = mutant_status_from_string(el.required("status"));
        m.key.class_name = el.child_text("mutatedClass");
        m.key.method_name = el.child_text("mutatedMethod");
        m.key.line = to_u32(el.child_text("lineNumber"), el, "lineNumber");
        m.key.mutator = el.child_text("mutator");
        m.key.index = to_u32(el.child_text("index"), el, "index");
        if (m.key.class_name.empty()) {
            throw SchemaError(el.name, "mutatedClass", "empty class name");
        }
        if (m.key.line == 0) {
            throw SchemaError(el.name, "lineNumber", "line numbers start at 1");
        }
        if (const auto *d = el.child("description")) {
            m.description = d->text;
        }
        if (const auto *k = el.child("killingTest"); k != nullptr && !k->text.empty()) {
            m.killing_test = k->text;
        }
        if (!seen.insert(m.key).second) {
            throw DuplicateMutantError(m.key.to_string());
        }
        out.push_back(std::move(m));
    }
    return out;
}

TestResults parse_test_results(const std::vector<std::string> &documents)
{
    TestResults result;
    std::map<TestId, Verdict> verdicts;

    auto read_suite = [&](const xml::Element &suite, std::size_t doc_index) {
        std::uint64_t local_total = 0, local_fail = 0, local_err = 0, local_skip = 0;
        for (const auto &tc : suite.children) {
            if (tc.name != "testcase") {
                continue;
            }
            TestId id{tc.required("classname"), tc.required("name")};
            Verdict v = Verdict::pass;
            if (tc.child("error") != nullptr) {
                v = Verdict::error;
                ++local_err;
            } else if (tc.child("failure") != nullptr) {
                v = Verdict::failure;
                ++local_fail;
            } else if (tc.child("skipped") != nullptr) {
                v = Verdict::skipped;
                ++local_skip;
            }
            ++local_total;
            auto [it, inserted] = verdicts.emplace(std::move(id), v);
            if (!inserted) {
                it->second = std::max(it->second, v);
            }
        }
        auto check = [&](const char *attr, std::uint64_t derived) {
            if (const auto *claimed = suite.attribute(attr)) {
                if (xml::to_uint(*claimed, suite, attr) != derived) {
                    result.warnings.push_back(
                        "document " + std::to_string(doc_index) + ": testsuite claims " + attr +
                        "=" + *claimed + " but contains " + std::to_string(derived));
                }
            }
        };
        check("tests", local_total);
        check("failures", local_fail);
        check("errors", local_err);
        check("skipped", local_skip);
    };

    for (std::size_t i = 0; i < documents.size(); ++i) {
        const auto root = xml::parse(documents[i]);
        if (root.name == "testsuite") {
            read_suite(root, i);
        } else if (root.name == "testsuites") {
            for (const auto &suite : root.children) {
                if (suite.name == "testsuite") {
                    read_suite(suite, i);
                }
            }
        } else {
            throw SchemaError(root.name, "", "expected root element <testsuite>");
        }
    }

    auto &snap = result.snapshot;
    for (auto &[id, verdict] : verdicts) {
        ++snap.total;
        switch (verdict) {
        case Verdict::failure: ++snap.failures; break;
        case Verdict::error: ++snap.errors; break;
        case Verdict::skipped: ++snap.skipped; break;
        case Verdict::pass: break;
        }
        snap.test_ids.insert(id);
    }
    return result;
}

SourceModel ingest_reports(std::string_view coverage, std::string_view mutations,
                           const std::vector<std::string> &tests)
{
    return assemble_model(parse_coverage(coverage), parse_mutations(mutations),
                          parse_test_results(tests).snapshot);
}

} // namespace gapquest
