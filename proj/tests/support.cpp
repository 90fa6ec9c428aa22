#include "support.hpp"

#include "gapquest/errors.hpp"

#include <fstream>
#include <unistd.h>
#include <sstream>

namespace gapquest::testing {

std::string read_file(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fixture(const std::string &relative)
{
    return read_file(std::filesystem::path(GAPQUEST_FIXTURES) / relative);
}

RunInput fixture_run(int run, const std::string &commit)
{
    const std::string prefix = "commons-cli/run" + std::to_string(run);
    RunInput in;
    in.commit = commit;
    in.coverage = fixture(prefix + "-coverage.xml");
    in.mutations = fixture(prefix + "-mutations.xml");
    in.tests = {fixture(prefix + "-tests.xml")};
    in.received_at = "2024-03-0" + std::to_string(run) + "T10:00:00Z";
    return in;
}

SourceModel random_model(Rng &rng)
{
    const auto n_classes = 1 + rng.index(10);
    auto lines_left = 50 - static_cast<std::uint32_t>(rng.index(40));
    std::vector<ClassCov> classes;
    for (std::uint64_t c = 0; c < n_classes && lines_left > 0; ++c) {
        ClassCov cls;
        cls.class_name = "pkg.C" + std::to_string(c);
        cls.file = "pkg/C" + std::to_string(c) + ".java";
        const auto n_methods = 1 + rng.index(3);
        std::uint32_t line_no = 1;
        for (std::uint64_t m = 0; m < n_methods && lines_left > 0; ++m) {
            MethodCov method;
            method.class_name = cls.class_name;
            method.name = "m" + std::to_string(m);
            method.signature = "()V";
            const auto n_lines = std::min<std::uint32_t>(
                lines_left, 1 + static_cast<std::uint32_t>(rng.index(5)));
            for (std::uint32_t i = 0; i < n_lines; ++i) {
                LineCov l;
                l.ref = {cls.file, cls.class_name, line_no++};
                l.hits = rng.index(3) == 0 ? 0 : 1 + rng.index(5);
                if (rng.index(4) == 0) {
                    l.branch_total = 2 * (1 + static_cast<std::uint32_t>(rng.index(2)));
                    l.branch_covered =
                        l.hits == 0 ? 0
                                    : static_cast<std::uint32_t>(rng.index(l.branch_total + 1));
                }
                method.lines.push_back(l);
            }
            lines_left -= n_lines;
            method.first_line = method.lines.front().ref.line;
            method.last_line = method.lines.back().ref.line;
            cls.methods.push_back(std::move(method));
            line_no += 2;
        }
        cls.reaggregate();
        classes.push_back(std::move(cls));
    }

    std::vector<Mutant> mutants;
    const auto n_mutants = rng.index(21);
    for (std::uint64_t i = 0; i < n_mutants; ++i) {
        const auto &cls = classes[rng.index(classes.size())];
        const auto &method = cls.methods[rng.index(cls.methods.size())];
        const auto &line = method.lines[rng.index(method.lines.size())];
        Mutant m;
        m.key = {cls.class_name, method.name, line.ref.line, "NegateConditionalsMutator",
                 static_cast<std::uint32_t>(i)};
        m.status = static_cast<MutantStatus>(rng.index(4));
        m.description = "mutant " + std::to_string(i);
        mutants.push_back(std::move(m));
    }

    TestSnapshot tests;
    const auto n_tests = rng.index(6);
    for (std::uint64_t i = 0; i < n_tests; ++i) {
        tests.test_ids.insert({"pkg.Tests", "t" + std::to_string(i)});
    }
    tests.total = static_cast<std::uint32_t>(tests.test_ids.size());
    return assemble_model(std::move(classes), std::move(mutants), std::move(tests));
}

std::set<Target> brute_force_targets(const SourceModel &model, ChallengeKind kind)
{
    std::set<Target> out;
    switch (kind) {
    case ChallengeKind::build:
        break;
    case ChallengeKind::test:
        out.insert(std::monostate{});
        break;
    case ChallengeKind::class_coverage:
        for (const auto &c : model.classes()) {
            std::uint32_t total = 0, covered = 0;
            for (const auto &m : c.methods) {
                for (const auto &l : m.lines) {
                    ++total;
                    covered += l.hits > 0 ? 1 : 0;
                }
            }
            if (covered < total) {
                out.insert(ClassTarget{c.class_name});
            }
        }
        break;
    case ChallengeKind::method_coverage:
        for (const auto &c : model.classes()) {
            for (const auto &m : c.methods) {
                for (const auto &l : m.lines) {
                    if (l.hits == 0) {
                        out.insert(MethodTarget{c.class_name, m.name, m.signature});
                    }
                }
            }
        }
        break;
    case ChallengeKind::line_coverage:
    case ChallengeKind::branch_coverage:
        for (const auto &c : model.classes()) {
            for (const auto &m : c.methods) {
                for (const auto &l : m.lines) {
                    const bool uncovered = l.hits == 0;
                    const bool open_branch = l.hits > 0 && l.branch_covered < l.branch_total;
                    if (kind == ChallengeKind::line_coverage ? uncovered : open_branch) {
                        out.insert(l.ref);
                    }
                }
            }
        }
        break;
    case ChallengeKind::mutation:
        for (const auto &m : model.mutants()) {
            if (m.status == MutantStatus::survived) {
                out.insert(m.key);
            }
        }
        break;
    }
    return out;
}

SourceModel two_class_model(std::uint32_t covered_a, std::uint32_t covered_b)
{
    std::vector<ClassCov> classes;
    for (auto [name, covered] : {std::pair{"pkg.A", covered_a}, std::pair{"pkg.B", covered_b}}) {
        ClassCov c;
        c.class_name = name;
        c.file = std::string(name) + ".java";
        MethodCov m;
        m.class_name = name;
        m.name = "run";
        m.signature = "()V";
        for (std::uint32_t i = 1; i <= 10; ++i) {
            m.lines.push_back({{c.file, name, i}, i <= covered ? 1u : 0u, 0, 0});
        }
        m.first_line = 1;
        m.last_line = 10;
        c.methods.push_back(std::move(m));
        c.reaggregate();
        classes.push_back(std::move(c));
    }
    return assemble_model(std::move(classes), {}, {});
}

TempDir::TempDir()
{
    static std::uint64_t counter = 0;
    const auto base = std::filesystem::temp_directory_path();
    for (;;) {
        path_ = base / ("gapquest-test-" + std::to_string(::getpid()) + "-" +
                        std::to_string(counter++));
        if (std::filesystem::create_directory(path_)) {
            break;
        }
    }
}

TempDir::~TempDir()
{
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

} // namespace gapquest::testing
