#include "gapquest/serialization.hpp"

#include "gapquest/errors.hpp"

namespace gapquest {

namespace {

template <typename T>
Json opt(const std::optional<T> &v)
{
    return v ? Json(*v) : Json(nullptr);
}

template <typename T>
std::optional<T> get_opt(const Json &j, const char *key)
{
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) {
        return std::nullopt;
    }
    return it->get<T>();
}

} // namespace

void to_json(Json &j, const LineRef &v)
{
    j = Json{{"file", v.file}, {"class", v.class_name}, {"line", v.line}};
}

void from_json(const Json &j, LineRef &v)
{
    j.at("file").get_to(v.file);
    j.at("class").get_to(v.class_name);
    j.at("line").get_to(v.line);
}

void to_json(Json &j, const LineCov &v)
{
    j = Json{{"line", v.ref.line},
             {"hits", v.hits},
             {"branch_total", v.branch_total},
             {"branch_covered", v.branch_covered}};
}

void from_json(const Json &j, LineCov &v)
{
    j.at("line").get_to(v.ref.line);
    j.at("hits").get_to(v.hits);
    j.at("branch_total").get_to(v.branch_total);
    j.at("branch_covered").get_to(v.branch_covered);
}

void to_json(Json &j, const MethodCov &v)
{
    j = Json{{"name", v.name},           {"signature", v.signature}, {"first_line", v.first_line},
             {"last_line", v.last_line}, {"lines", v.lines}};
}

void from_json(const Json &j, MethodCov &v)
{
    j.at("name").get_to(v.name);
    j.at("signature").get_to(v.signature);
    j.at("first_line").get_to(v.first_line);
    j.at("last_line").get_to(v.last_line);
    j.at("lines").get_to(v.lines);
}

void to_json(Json &j, const ClassCov &v)
{
    j = Json{{"class", v.class_name},
             {"file", v.file},
             {"methods", v.methods},
             {"lines_total", v.lines_total},
             {"lines_covered", v.lines_covered},
             {"branches_total", v.branches_total},
             {"branches_covered", v.branches_covered}};
}

void from_json(const Json &j, ClassCov &v)
{
    j.at("class").get_to(v.class_name);
    j.at("file").get_to(v.file);
    j.at("methods").get_to(v.methods);
    // Line refs are not repeated per line in the document.
    for (auto &m : v.methods) {
        m.class_name = v.class_name;
        for (auto &l : m.lines) {
            l.ref.file = v.file;
            l.ref.class_name = v.class_name;
        }
    }
    j.at("lines_total").get_to(v.lines_total);
    j.at("lines_covered").get_to(v.lines_covered);
    j.at("branches_total").get_to(v.branches_total);
    j.at("branches_covered").get_to(v.branches_covered);
}

void to_json(Json &j, const MutantKey &v)
{
    j = Json{{"class", v.class_name},
             {"method", v.method_name},
             {"line", v.line},
             {"mutator", v.mutator},
             {"index", v.index}};
}

void from_json(const Json &j, MutantKey &v)
{
    j.at("class").get_to(v.class_name);
    j.at("method").get_to(v.method_name);
    j.at("line").get_to(v.line);
    j.at("mutator").get_to(v.mutator);
    j.at("index").get_to(v.index);
}

void to_json(Json &j, const Mutant &v)
{
    j = Json{{"key", v.key},
             {"status", to_string(v.status)},
             {"description", v.description},
             {"killing_test", opt(v.killing_test)},
             {"orphaned", v.orphaned}};
}

void from_json(const Json &j, Mutant &v)
{
    j.at("key").get_to(v.key);
    v.status = mutant_status_from_string(j.at("status").get<std::string>());
    j.at("description").get_to(v.description);
    v.killing_test = get_opt<std::string>(j, "killing_test");
    v.orphaned = j.value("orphaned", false);
}

void to_json(Json &j, const TestSnapshot &v)
{
    Json ids = Json::array();
    for (const auto &id : v.test_ids) {
        ids.push_back(Json::array({id.classname, id.name}));
    }
    j = Json{{"total", v.total},
             {"failures", v.failures},
             {"errors", v.errors},
             {"skipped", v.skipped},
             {"ids", std::move(ids)}};
}

void from_json(const Json &j, TestSnapshot &v)
{
    j.at("total").get_to(v.total);
    j.at("failures").get_to(v.failures);
    j.at("errors").get_to(v.errors);
    j.at("skipped").get_to(v.skipped);
    v.test_ids.clear();
    for (const auto &id : j.at("ids")) {
        v.test_ids.insert(TestId{id.at(0).get<std::string>(), id.at(1).get<std::string>()});
    }
}

void to_json(Json &j, const SourceModel &v)
{
    j = Json{{"classes", v.classes()}, {"mutants", v.mutants()}, {"tests", v.tests()}};
}

void from_json(const Json &j, SourceModel &v)
{
    v = assemble_model(j.at("classes").get<std::vector<ClassCov>>(),
                       j.at("mutants").get<std::vector<Mutant>>(),
                       j.at("tests").get<TestSnapshot>());
}

Json target_to_json(const Target &t)
{
    struct Visitor
    {
        Json operator()(std::monostate) const { return Json{{"type", "none"}}; }
        Json operator()(const ClassTarget &c) const
        {
            return Json{{"type", "class"}, {"class", c.class_name}};
        }
        Json operator()(const MethodTarget &m) const
        {
            return Json{{"type", "method"},
                        {"class", m.class_name},
                        {"name", m.name},
                        {"signature", m.signature}};
        }
        Json operator()(const LineRef &l) const
        {
            Json j = l;
            j["type"] = "line";
            return j;
        }
        Json operator()(const MutantKey &k) const
        {
            Json j = k;
            j["type"] = "mutant";
            return j;
        }
    };
    return std::visit(Visitor{}, t);
}

Target target_from_json(const Json &j)
{
    const auto type = j.at("type").get<std::string>();
    if (type == "none") return std::monostate{};
    if (type == "class") return ClassTarget{j.at("class").get<std::string>()};
    if (type == "method") {
        return MethodTarget{j.at("class").get<std::string>(), j.at("name").get<std::string>(),
                            j.at("signature").get<std::string>()};
    }
    if (type == "line") return j.get<LineRef>();
    if (type == "mutant") return j.get<MutantKey>();
    throw ValidationError("unknown target type '" + type + "'");
}

void to_json(Json &j, const Baseline &v)
{
    j = Json{{"class_lines_covered", opt(v.class_lines_covered)},
             {"method_lines_covered", opt(v.method_lines_covered)},
             {"line_branch_covered", opt(v.line_branch_covered)},
             {"tests_total", opt(v.tests_total)}};
}

void from_json(const Json &j, Baseline &v)
{
    v.class_lines_covered = get_opt<std::uint32_t>(j, "class_lines_covered");
    v.method_lines_covered = get_opt<std::uint32_t>(j, "method_lines_covered");
    v.line_branch_covered = get_opt<std::uint32_t>(j, "line_branch_covered");
    v.tests_total = get_opt<std::uint32_t>(j, "tests_total");
}

void to_json(Json &j, const Challenge &v)
{
    j = Json{{"id", v.id},
             {"kind", to_string(v.kind)},
             {"target", target_to_json(v.target)},
             {"baseline", v.baseline},
             {"points", v.points},
             {"state", to_string(v.state)},
             {"created_run", v.created_run},
             {"resolved_run", opt(v.resolved_run)},
             {"rejection_reason", opt(v.rejection_reason)}};
}

void from_json(const Json &j, Challenge &v)
{
    j.at("id").get_to(v.id);
    v.kind = challenge_kind_from_string(j.at("kind").get<std::string>());
    v.target = target_from_json(j.at("target"));
    j.at("baseline").get_to(v.baseline);
    j.at("points").get_to(v.points);
    v.state = challenge_state_from_string(j.at("state").get<std::string>());
    j.at("created_run").get_to(v.created_run);
    v.resolved_run = get_opt<std::uint64_t>(j, "resolved_run");
    v.rejection_reason = get_opt<std::string>(j, "rejection_reason");
}

void to_json(Json &j, const GenerationConfig &v)
{
    Json weights = Json::object();
    for (const auto &[k, w] : v.kind_weights) {
        weights[to_string(k)] = w;
    }
    Json points = Json::object();
    for (const auto &[k, p] : v.points_table) {
        points[to_string(k)] = p;
    }
    j = Json{{"max_current", v.max_current},
             {"kind_weights", std::move(weights)},
             {"points_table", std::move(points)},
             {"seed", v.seed}};
}

void from_json(const Json &j, GenerationConfig &v)
{
    j.at("max_current").get_to(v.max_current);
    v.kind_weights.clear();
    for (const auto &[k, w] : j.at("kind_weights").items()) {
        v.kind_weights[challenge_kind_from_string(k)] = w.get<double>();
    }
    v.points_table.clear();
    for (const auto &[k, p] : j.at("points_table").items()) {
        v.points_table[challenge_kind_from_string(k)] = p.get<std::uint32_t>();
    }
    j.at("seed").get_to(v.seed);
}

void to_json(Json &j, const Quest &v)
{
    j = Json{{"id", v.id},
             {"kind", to_string(v.kind)},
             {"goal", v.goal},
             {"progress", v.progress},
             {"constraint", v.constraint ? Json(to_string(*v.constraint)) : Json(nullptr)},
             {"baseline",
              {{"tests_total", v.baseline.tests_total},
               {"lines_covered", v.baseline.lines_covered},
               {"branches_covered", v.baseline.branches_covered}}},
             {"state", to_string(v.state)},
             {"points", v.points},
             {"created_run", v.created_run},
             {"resolved_run", opt(v.resolved_run)}};
}

void from_json(const Json &j, Quest &v)
{
    j.at("id").get_to(v.id);
    v.kind = quest_kind_from_string(j.at("kind").get<std::string>());
    j.at("goal").get_to(v.goal);
    j.at("progress").get_to(v.progress);
    if (auto c = get_opt<std::string>(j, "constraint")) {
        v.constraint = challenge_kind_from_string(*c);
    } else {
        v.constraint.reset();
    }
    const auto &b = j.at("baseline");
    b.at("tests_total").get_to(v.baseline.tests_total);
    b.at("lines_covered").get_to(v.baseline.lines_covered);
    b.at("branches_covered").get_to(v.baseline.branches_covered);
    v.state = quest_state_from_string(j.at("state").get<std::string>());
    j.at("points").get_to(v.points);
    j.at("created_run").get_to(v.created_run);
    v.resolved_run = get_opt<std::uint64_t>(j, "resolved_run");
}

void to_json(Json &j, const QuestConfig &v)
{
    Json goals = Json::object();
    for (const auto &[k, r] : v.goals) {
        goals[to_string(k)] = Json{{"min", r.min}, {"max", r.max}};
    }
    Json unit = Json::object();
    for (const auto &[k, p] : v.points_per_unit) {
        unit[to_string(k)] = p;
    }
    j = Json{{"goals", std::move(goals)},
             {"points_per_unit", std::move(unit)},
             {"solve_points", v.solve_points},
             {"seed", v.seed}};
}

void from_json(const Json &j, QuestConfig &v)
{
    v.goals.clear();
    for (const auto &[k, r] : j.at("goals").items()) {
        v.goals[quest_kind_from_string(k)] = GoalRange{r.at("min").get<std::uint32_t>(),
                                                       r.at("max").get<std::uint32_t>()};
    }
    v.points_per_unit.clear();
    for (const auto &[k, p] : j.at("points_per_unit").items()) {
        v.points_per_unit[quest_kind_from_string(k)] = p.get<std::uint32_t>();
    }
    j.at("solve_points").get_to(v.solve_points);
    j.at("seed").get_to(v.seed);
}

void to_json(Json &j, const Unlock &v)
{
    j = Json{{"at", v.at}, {"run_seq", v.run_seq}};
}

void from_json(const Json &j, Unlock &v)
{
    j.at("at").get_to(v.at);
    j.at("run_seq").get_to(v.run_seq);
}

void to_json(Json &j, const UserState &v)
{
    j = Json{{"user_id", v.user_id},
             {"display_name", v.display_name},
             {"avatar_index", v.avatar_index},
             {"team", opt(v.team)},
             {"score", v.score},
             {"challenges", v.challenges},
             {"quests", v.quests},
             {"achievements", v.achievements},
             {"event_seq", v.event_seq},
             {"tests_added", v.tests_added}};
}

void from_json(const Json &j, UserState &v)
{
    j.at("user_id").get_to(v.user_id);
    j.at("display_name").get_to(v.display_name);
    j.at("avatar_index").get_to(v.avatar_index);
    v.team = get_opt<std::string>(j, "team");
    j.at("score").get_to(v.score);
    j.at("challenges").get_to(v.challenges);
    j.at("quests").get_to(v.quests);
    j.at("achievements").get_to(v.achievements);
    j.at("event_seq").get_to(v.event_seq);
    j.at("tests_added").get_to(v.tests_added);
}

void to_json(Json &j, const AchievementDef &v)
{
    j = Json{{"key", v.key},
             {"title", v.title},
             {"description", v.description},
             {"secret", v.secret},
             {"scope", to_string(v.scope)},
             {"rule", to_string(v.rule)},
             {"threshold", v.threshold}};
}

void from_json(const Json &j, AchievementDef &v)
{
    j.at("key").get_to(v.key);
    j.at("title").get_to(v.title);
    j.at("description").get_to(v.description);
    j.at("secret").get_to(v.secret);
    v.scope = achievement_scope_from_string(j.at("scope").get<std::string>());
    v.rule = achievement_rule_from_string(j.at("rule").get<std::string>());
    j.at("threshold").get_to(v.threshold);
}

void to_json(Json &j, const LeaderboardRow &v)
{
    j = Json{{"id", v.id},
             {"name", v.name},
             {"avatar_index", opt(v.avatar_index)},
             {"score", v.score},
             {"solved_challenges", v.solved_challenges},
             {"completed_quests", v.completed_quests},
             {"achievements", v.achievements},
             {"members", v.members}};
}

Json challenge_view(const Challenge &c, const SourceModel *model)
{
    Json j = c;
    std::string text;
    switch (c.kind) {
    case ChallengeKind::build: text = "Fix the failing build"; break;
    case ChallengeKind::test: text = "Write a new test"; break;
    case ChallengeKind::class_coverage:
        text = "Cover more lines in class " + std::get<ClassTarget>(c.target).class_name;
        break;
    case ChallengeKind::method_coverage: {
        const auto &m = std::get<MethodTarget>(c.target);
        text = "Improve the coverage of method " + m.class_name + "." + m.name;
        break;
    }
    case ChallengeKind::line_coverage: {
        const auto &l = std::get<LineRef>(c.target);
        text = "Cover line " + std::to_string(l.line) + " of " + l.file;
        break;
    }
    case ChallengeKind::branch_coverage: {
        const auto &l = std::get<LineRef>(c.target);
        text = "Cover more branches on line " + std::to_string(l.line) + " of " + l.file;
        break;
    }
    case ChallengeKind::mutation: {
        const auto &k = std::get<MutantKey>(c.target);
        text = "Kill the mutant in " + k.class_name + "." + k.method_name + " at line " +
               std::to_string(k.line);
        if (model != nullptr) {
            if (const auto *mu = model->find_mutant(k)) {
                j["mutant_description"] = mu->description;
            }
        }
        break;
    }
    }
    if (model != nullptr) {
        if (const auto *cls = model->find_class(target_class(c.target))) {
            j["file"] = cls->file;
        }
    }
    j["description"] = text;
    return j;
}

Json quest_view(const Quest &q)
{
    Json j = q;
    j["percent"] = percent(q);
    j["description"] = describe(q);
    return j;
}

} // namespace gapquest
