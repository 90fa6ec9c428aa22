#include "gapquest/challenge.hpp"

#include "gapquest/errors.hpp"

#include <algorithm>
#include <set>

namespace gapquest {

const char *to_string(ChallengeKind kind)
{
    switch (kind) {
    case ChallengeKind::build: return "build";
    case ChallengeKind::test: return "test";
    case ChallengeKind::class_coverage: return "class_coverage";
    case ChallengeKind::method_coverage: return "method_coverage";
    case ChallengeKind::line_coverage: return "line_coverage";
    case ChallengeKind::branch_coverage: return "branch_coverage";
    case ChallengeKind::mutation: return "mutation";
    }
    return "?";
}

ChallengeKind challenge_kind_from_string(const std::string &text)
{
    for (auto k : all_challenge_kinds) {
        if (text == to_string(k)) {
            return k;
        }
    }
    throw ValidationError("unknown challenge kind '" + text + "'");
}

const char *to_string(BuildStatus status)
{
    return status == BuildStatus::success ? "success" : "failure";
}

BuildStatus build_status_from_string(const std::string &text)
{
    if (text == "success") return BuildStatus::success;
    if (text == "failure") return BuildStatus::failure;
    throw ValidationError("build status must be 'success' or 'failure', got '" + text + "'");
}

const char *to_string(ChallengeState state)
{
    switch (state) {
    case ChallengeState::current: return "current";
    case ChallengeState::solved: return "solved";
    case ChallengeState::rejected: return "rejected";
    case ChallengeState::expired: return "expired";
    }
    return "?";
}

ChallengeState challenge_state_from_string(const std::string &text)
{
    for (auto s : {ChallengeState::current, ChallengeState::solved, ChallengeState::rejected,
                   ChallengeState::expired}) {
        if (text == to_string(s)) {
            return s;
        }
    }
    throw ValidationError("unknown challenge state '" + text + "'");
}

const char *to_string(Outcome outcome)
{
    switch (outcome) {
    case Outcome::still_open: return "still_open";
    case Outcome::solved: return "solved";
    case Outcome::expired: return "expired";
    }
    return "?";
}

std::string target_class(const Target &target)
{
    struct Visitor
    {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(const ClassTarget &t) const { return t.class_name; }
        std::string operator()(const MethodTarget &t) const { return t.class_name; }
        std::string operator()(const LineRef &t) const { return t.class_name; }
        std::string operator()(const MutantKey &t) const { return t.class_name; }
    };
    return std::visit(Visitor{}, target);
}

void GenerationConfig::validate() const
{
    if (max_current == 0) {
        throw ValidationError("max_current must be positive");
    }
    double drawable = 0.0;
    for (const auto &[kind, w] : kind_weights) {
        if (w < 0.0) {
            throw ValidationError(std::string("negative weight for ") + to_string(kind));
        }
        if (kind != ChallengeKind::build) {
            drawable += w;
        }
    }
    if (drawable <= 0.0) {
        throw ValidationError("kind weights are all zero");
    }
    for (auto kind : all_challenge_kinds) {
        auto it = points_table.find(kind);
        if (it == points_table.end() || it->second == 0) {
            throw ValidationError(std::string("points table needs a positive price for ") +
                                  to_string(kind));
        }
    }
}

std::vector<Target> valid_targets(const SourceModel &model, ChallengeKind kind)
{
    std::vector<Target> out;
    switch (kind) {
    case ChallengeKind::build:
        break;
    case ChallengeKind::test:
        out.emplace_back(std::monostate{});
        break;
    case ChallengeKind::class_coverage:
        for (const auto &c : model.classes()) {
            if (c.lines_covered < c.lines_total) {
                out.emplace_back(ClassTarget{c.class_name});
            }
        }
        break;
    case ChallengeKind::method_coverage:
        for (const auto &c : model.classes()) {
            for (const auto &m : c.methods) {
                if (m.covered_lines() < m.lines.size()) {
                    out.emplace_back(MethodTarget{c.class_name, m.name, m.signature});
                }
            }
        }
        break;
    case ChallengeKind::line_coverage:
        for (const auto &c : model.classes()) {
            for (const auto &m : c.methods) {
                for (const auto &l : m.lines) {
                    if (l.hits == 0) {
                        out.emplace_back(l.ref);
                    }
                }
            }
        }
        break;
    case ChallengeKind::branch_coverage:
        for (const auto &c : model.classes()) {
            for (const auto &m : c.methods) {
                for (const auto &l : m.lines) {
                    if (l.hits > 0 && l.branch_covered < l.branch_total) {
                        out.emplace_back(l.ref);
                    }
                }
            }
        }
        break;
    case ChallengeKind::mutation:
        for (const auto &mu : model.mutants()) {
            if (mu.status == MutantStatus::survived) {
                out.emplace_back(mu.key);
            }
        }
        break;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::string select_class(const SourceModel &model, const std::vector<std::string> &eligible,
                         Rng &rng)
{
    if (eligible.empty()) {
        throw NoEligibleClass();
    }
    std::vector<double> weights;
    weights.reserve(eligible.size());
    for (const auto &name : eligible) {
        const auto *c = model.find_class(name);
        double w = 0.0;
        if (c != nullptr && c->lines_total > 0) {
            w = 1.0 - static_cast<double>(c->lines_covered) / static_cast<double>(c->lines_total);
        }
        weights.push_back(w);
    }
    auto pick = rng.weighted(weights);
    if (pick == weights.size()) {
        pick = static_cast<std::size_t>(rng.index(eligible.size()));
    }
    return eligible[pick];
}

std::string select_class(const SourceModel &model, ChallengeKind kind, Rng &rng)
{
    std::set<std::string> names;
    for (const auto &t : valid_targets(model, kind)) {
        auto cls = target_class(t);
        if (!cls.empty()) {
            names.insert(std::move(cls));
        }
    }
    return select_class(model, std::vector<std::string>(names.begin(), names.end()), rng);
}

std::uint32_t points_for(ChallengeKind kind, const GenerationConfig &config)
{
    auto it = config.points_table.find(kind);
    if (it == config.points_table.end() || it->second == 0) {
        throw ValidationError(std::string("no price configured for ") + to_string(kind));
    }
    return it->second;
}

namespace {

using TaskKey = std::pair<ChallengeKind, Target>;

Baseline capture_baseline(const SourceModel &model, const Target &target)
{
    Baseline b;
    b.tests_total = model.tests().total;
    const auto *cls = model.find_class(target_class(target));
    if (cls == nullptr) {
        return b;
    }
    b.class_lines_covered = cls->lines_covered;
    if (const auto *mt = std::get_if<MethodTarget>(&target)) {
        if (const auto *m = cls->find_method(mt->name, mt->signature)) {
            b.method_lines_covered = m->covered_lines();
        }
    } else if (const auto *lr = std::get_if<LineRef>(&target)) {
        if (const auto *l = cls->find_line(lr->line)) {
            b.line_branch_covered = l->branch_covered;
        }
    }
    return b;
}

} // namespace

std::vector<Challenge> generate(const SourceModel &model,
                                const std::vector<Challenge> &user_challenges,
                                const GenerationConfig &config, std::uint64_t run_seq,
                                BuildStatus latest_build)
{
    std::set<TaskKey> taken;
    std::size_t current = 0;
    bool build_open = false;
    for (const auto &c : user_challenges) {
        if (c.state == ChallengeState::current) {
            ++current;
            build_open = build_open || c.kind == ChallengeKind::build;
        }
        if (c.state == ChallengeState::current || c.state == ChallengeState::rejected) {
            taken.emplace(c.kind, c.target);
        }
    }

    std::vector<Challenge> out;
    if (current >= config.max_current) {
        return out;
    }
    std::size_t room = config.max_current - current;
    std::size_t next_id = user_challenges.size() + 1;

    auto emit = [&](ChallengeKind kind, Target target) {
        Challenge c;
        c.id = "c" + std::to_string(next_id++);
        c.kind = kind;
        c.baseline = capture_baseline(model, target);
        c.target = std::move(target);
        c.points = points_for(kind, config);
        c.state = ChallengeState::current;
        c.created_run = run_seq;
        taken.emplace(c.kind, c.target);
        out.push_back(std::move(c));
        --room;
    };

    if (latest_build == BuildStatus::failure && !build_open) {
        emit(ChallengeKind::build, std::monostate{});
    }

    Rng rng(mix_seed({config.seed, run_seq, user_challenges.size()}));

    // Open targets per drawable kind, grouped by class. Recomputed lazily
    // after each emission by filtering against `taken`.
    std::vector<ChallengeKind> kinds;
    std::vector<std::vector<Target>> open;
    for (auto kind : all_challenge_kinds) {
        if (kind == ChallengeKind::build) {
            continue;
        }
        auto w = config.kind_weights.find(kind);
        if (w == config.kind_weights.end() || w->second <= 0.0) {
            continue;
        }
        kinds.push_back(kind);
        open.push_back(valid_targets(model, kind));
    }

    while (room > 0) {
        std::vector<double> weights(kinds.size(), 0.0);
        for (std::size_t i = 0; i < kinds.size(); ++i) {
            auto &targets = open[i];
            std::erase_if(targets, [&](const Target &t) { return taken.count({kinds[i], t}) > 0; });
            if (!targets.empty()) {
                weights[i] = config.kind_weights.at(kinds[i]);
            }
        }
        const auto k = rng.weighted(weights);
        if (k == weights.size()) {
            break;
        }
        const auto kind = kinds[k];
        const auto &targets = open[k];

        if (kind == ChallengeKind::test) {
            emit(kind, targets.front());
            continue;
        }

        std::set<std::string> class_set;
        for (const auto &t : targets) {
            class_set.insert(target_class(t));
        }
        const auto cls =
            select_class(model, std::vector<std::string>(class_set.begin(), class_set.end()), rng);
        std::vector<const Target *> in_class;
        for (const auto &t : targets) {
            if (target_class(t) == cls) {
                in_class.push_back(&t);
            }
        }
        emit(kind, *in_class[static_cast<std::size_t>(rng.index(in_class.size()))]);
    }
    return out;
}

Outcome evaluate(const Challenge &challenge, const SourceModel &, const SourceModel &new_model,
                 BuildStatus new_run_status)
{
    const auto &t = challenge.target;
    const auto &b = challenge.baseline;

    switch (challenge.kind) {
    case ChallengeKind::build:
        return new_run_status == BuildStatus::success ? Outcome::solved : Outcome::still_open;

    case ChallengeKind::test:
        return new_run_status == BuildStatus::success &&
                       new_model.tests().total > b.tests_total.value_or(0)
                   ? Outcome::solved
                   : Outcome::still_open;

    case ChallengeKind::class_coverage: {
        const auto *cls = new_model.find_class(std::get<ClassTarget>(t).class_name);
        if (cls == nullptr) {
            return Outcome::expired;
        }
        return cls->lines_covered > b.class_lines_covered.value_or(0) ? Outcome::solved
                                                                      : Outcome::still_open;
    }

    case ChallengeKind::method_coverage: {
        const auto &mt = std::get<MethodTarget>(t);
        const auto *cls = new_model.find_class(mt.class_name);
        const auto *m = cls != nullptr ? cls->find_method(mt.name, mt.signature) : nullptr;
        if (m == nullptr) {
            return Outcome::expired;
        }
        return m->covered_lines() > b.method_lines_covered.value_or(0) ? Outcome::solved
                                                                       : Outcome::still_open;
    }

    case ChallengeKind::line_coverage:
    case ChallengeKind::branch_coverage: {
        const auto &ref = std::get<LineRef>(t);
        const auto *cls = new_model.find_class(ref.class_name);
        const auto *line = cls != nullptr ? cls->find_line(ref.line) : nullptr;
        if (line == nullptr) {
            return Outcome::expired;
        }
        if (challenge.kind == ChallengeKind::line_coverage) {
            return line->hits > 0 ? Outcome::solved : Outcome::still_open;
        }
        return line->branch_covered > b.line_branch_covered.value_or(0) ? Outcome::solved
                                                                        : Outcome::still_open;
    }

    case ChallengeKind::mutation: {
        const auto *mu = new_model.find_mutant(std::get<MutantKey>(t));
        if (mu == nullptr) {
            return Outcome::expired;
        }
        return mu->status == MutantStatus::killed ? Outcome::solved : Outcome::still_open;
    }
    }
    return Outcome::still_open;
}

} // namespace gapquest
