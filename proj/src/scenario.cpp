#include "bornlab/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace bornlab {

namespace {

enum class FieldType { Int, Real, Bool, Name, Quad, IntList, RealList, NameList, QuadList, PairList };

using Schema = std::map<std::string, FieldType>;

const std::map<std::string, Schema> &block_schemas() {
    static const std::map<std::string, Schema> schemas = {
        {"busch",
         {{"assignment", FieldType::Name}, {"rationals", FieldType::Int}, {"reals", FieldType::QuadList},
          {"tolerance", FieldType::Real}, {"expect", FieldType::Name}}},
        {"continuity",
         {{"assignment", FieldType::Name}, {"path", FieldType::Name}, {"grid", FieldType::QuadList},
          {"tolerance", FieldType::Real}, {"min_jump", FieldType::Real}, {"max_jump", FieldType::Real},
          {"c1", FieldType::Quad}, {"c2", FieldType::Quad}, {"expect", FieldType::Name}}},
        {"dyadic", {{"assignments", FieldType::NameList}, {"m", FieldType::Int}, {"expect", FieldType::Name}}},
        {"envariance",
         {{"dims", FieldType::IntList}, {"swap_max", FieldType::Int}, {"unequal", FieldType::Bool},
          {"expect", FieldType::Name}}},
        {"finegrain",
         {{"pairs", FieldType::PairList}, {"exhaustive_max", FieldType::Int}, {"expect", FieldType::Name}}},
        {"frame-weight",
         {{"assignment", FieldType::Name}, {"d", FieldType::Int}, {"subspaces", FieldType::IntList},
          {"trials", FieldType::Int}, {"tolerance", FieldType::Real}, {"expect", FieldType::Name}}},
        {"gleason",
         {{"assignment", FieldType::Name}, {"d", FieldType::Int}, {"dims", FieldType::IntList},
          {"frames", FieldType::Int}, {"repeats", FieldType::Int}, {"threshold", FieldType::Real},
          {"regularity", FieldType::Name}, {"min_residual", FieldType::Real}, {"max_residual", FieldType::Real}, {"max_rho_error", FieldType::Real},
          {"expect", FieldType::Name}}},
        {"hartle",
         {{"p", FieldType::Real}, {"grid", FieldType::IntList}, {"slope_tolerance", FieldType::Real},
          {"bruteforce_states", FieldType::Int}, {"bruteforce_max_n", FieldType::Int},
          {"expect", FieldType::Name}}},
        {"mixture",
         {{"weights", FieldType::RealList}, {"q", FieldType::RealList}, {"grid", FieldType::IntList},
          {"random", FieldType::Int}, {"limit_tolerance", FieldType::Real}, {"expect", FieldType::Name}}},
        {"orthogonality", {{"samples", FieldType::Int}, {"expect", FieldType::Name}}},
        {"pathology",
         {{"c1", FieldType::Quad}, {"c2", FieldType::Quad}, {"pairs", FieldType::Int}, {"grid", FieldType::QuadList},
          {"window", FieldType::Real}, {"min_jump", FieldType::Real}, {"expect", FieldType::Name}}},
        {"rational-sector",
         {{"dims", FieldType::IntList}, {"samples", FieldType::Int}, {"expect", FieldType::Name}}},
        {"shift",
         {{"assignments", FieldType::NameList}, {"samples", FieldType::Int}, {"expect", FieldType::Name}}},
    };
    return schemas;
}

struct LineError {
    std::size_t line;
    std::string message;
};

[[noreturn]] void fail(std::size_t line, const std::string &message) {
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": " + message);
}

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::vector<std::string> split_list(const std::string &value) {
    std::vector<std::string> out;
    if (trim(value).empty()) {
        return out;
    }
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(trim(item));
    }
    return out;
}

long long parse_int(const std::string &s, std::size_t line) {
    std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
    if (i == s.size() || !std::all_of(s.begin() + static_cast<long>(i), s.end(),
                                      [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
        fail(line, "expected an integer, got '" + s + "'");
    }
    try {
        return std::stoll(s);
    } catch (const std::exception &) {
        fail(line, "integer out of range: '" + s + "'");
    }
}

double parse_real(const std::string &s, std::size_t line) {
    try {
        return to_double(parse_rational(s));
    } catch (const Error &) {
        fail(line, "expected a number, got '" + s + "'");
    }
}

QuadRational parse_quad(const std::string &s, std::size_t line) {
    try {
        return QuadRational::parse(s);
    } catch (const Error &) {
        fail(line, "expected an element a + b*sqrt2, got '" + s + "'");
    }
}

std::string parse_name(const std::string &s, std::size_t line) {
    if (s.empty() || std::any_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); })) {
        fail(line, "expected a single identifier, got '" + s + "'");
    }
    return s;
}

bool parse_bool(const std::string &s, std::size_t line) {
    if (s == "true" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "no" || s == "off") return false;
    fail(line, "expected true or false, got '" + s + "'");
}

FieldValue parse_field(FieldType type, const std::string &value, std::size_t line) {
    switch (type) {
    case FieldType::Int: return parse_int(value, line);
    case FieldType::Real: return parse_real(value, line);
    case FieldType::Bool: return parse_bool(value, line);
    case FieldType::Name: return parse_name(value, line);
    case FieldType::Quad: return parse_quad(value, line);
    case FieldType::IntList: {
        std::vector<long long> out;
        for (const auto &item : split_list(value)) out.push_back(parse_int(item, line));
        return out;
    }
    case FieldType::RealList: {
        std::vector<double> out;
        for (const auto &item : split_list(value)) out.push_back(parse_real(item, line));
        return out;
    }
    case FieldType::NameList: {
        std::vector<std::string> out;
        for (const auto &item : split_list(value)) out.push_back(parse_name(item, line));
        return out;
    }
    case FieldType::QuadList: {
        std::vector<QuadRational> out;
        for (const auto &item : split_list(value)) out.push_back(parse_quad(item, line));
        return out;
    }
    case FieldType::PairList: {
        std::vector<std::pair<long long, long long>> out;
        for (const auto &item : split_list(value)) {
            const auto colon = item.find(':');
            if (colon == std::string::npos) {
                fail(line, "expected m:n, got '" + item + "'");
            }
            out.emplace_back(parse_int(trim(item.substr(0, colon)), line), parse_int(trim(item.substr(colon + 1)), line));
        }
        return out;
    }
    }
    fail(line, "unsupported field");
}

bool contains(const std::vector<std::string> &v, const std::string &s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

void require_positive(const Block &b, const std::string &key) {
    auto it = b.fields().find(key);
    if (it == b.fields().end()) {
        return;
    }
    const auto &v = it->second.value;
    const bool ok = std::visit(
        [](const auto &x) -> bool {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, long long> || std::is_same_v<T, double>) {
                return x > 0;
            } else if constexpr (std::is_same_v<T, std::vector<long long>> || std::is_same_v<T, std::vector<double>>) {
                return std::all_of(x.begin(), x.end(), [](auto y) { return y > 0; });
            } else {
                return true;
            }
        },
        v);
    if (!ok) {
        fail(it->second.line, "'" + key + "' must be positive");
    }
}

void validate_block(const Block &b) {
    static const std::set<std::string> positive = {
        "rationals", "tolerance", "m",  "swap_max", "exhaustive_max", "d",       "trials",      "frames",
        "repeats",   "threshold", "samples", "slope_tolerance", "bruteforce_states", "bruteforce_max_n", "random",
        "limit_tolerance", "pairs", "window", "dims", "subspaces", "grid", "min_residual", "max_residual", "max_rho_error"};
    for (const auto &[key, field] : b.fields()) {
        if (positive.count(key) && !(b.kind() == "finegrain" && key == "pairs")) {
            require_positive(b, key);
        }
        if (key == "assignment") {
            const auto name = std::get<std::string>(field.value);
            if (!contains(assignment_names(), name)) {
                fail(field.line, "unknown assignment '" + name + "'");
            }
        }
        if (key == "assignments") {
            for (const auto &name : std::get<std::vector<std::string>>(field.value)) {
                if (!contains(assignment_names(), name)) {
                    fail(field.line, "unknown assignment '" + name + "'");
                }
            }
        }
        if (key == "expect") {
            const auto v = std::get<std::string>(field.value);
            if (v != "pass" && v != "fail") {
                fail(field.line, "expect must be pass or fail");
            }
        }
        if (key == "path") {
            try {
                (void)parse_probe_path(std::get<std::string>(field.value));
            } catch (const Error &e) {
                fail(field.line, e.what());
            }
        }
        if (key == "regularity") {
            const auto v = std::get<std::string>(field.value);
            if (v != "regular" && v != "non-regular") {
                fail(field.line, "regularity must be regular or non-regular");
            }
        }
        if ((key == "c1" || key == "c2") && !std::get<QuadRational>(field.value).is_rational()) {
            fail(field.line, "'" + key + "' must be rational");
        }
        if (key == "pairs" && b.kind() == "finegrain") {
            for (const auto &[m, n] : std::get<std::vector<std::pair<long long, long long>>>(field.value)) {
                if (m < 1 || m > n) {
                    fail(field.line, "finegrain pairs need 1 <= m <= n");
                }
            }
        }
        if (key == "p" || key == "q" || key == "weights") {
            std::vector<double> values;
            if (key == "p") {
                values.push_back(std::get<double>(field.value));
            } else {
                values = std::get<std::vector<double>>(field.value);
            }
            for (double x : values) {
                if (!(x >= 0.0 && x <= 1.0)) {
                    fail(field.line, "'" + key + "' values must lie in [0, 1]");
                }
            }
        }
    }
    if (b.kind() == "continuity" && !b.has("assignment")) {
        fail(b.line(), "[continuity] needs 'assignment'");
    }
    if (b.kind() == "continuity" && !b.has("path")) {
        fail(b.line(), "[continuity] needs 'path'");
    }
    if (b.kind() == "continuity" && !b.has("grid")) {
        fail(b.line(), "[continuity] needs 'grid'");
    }
    if (b.kind() == "mixture" && b.has("weights") != b.has("q")) {
        fail(b.line(), "[mixture] needs both 'weights' and 'q'");
    }
    if (b.kind() == "mixture" && b.has("weights") &&
        b.get<std::vector<double>>("weights", {}).size() != b.get<std::vector<double>>("q", {}).size()) {
        fail(b.fields().at("q").line, "'weights' and 'q' differ in length");
    }
}

} // namespace

CheckConfig ScenarioSpec::check_config() const {
    CheckConfig cfg;
    cfg.dims = dims;
    cfg.trials = trials;
    cfg.tol = tolerance;
    cfg.seed = seed;
    cfg.tags = tags;
    return cfg;
}

std::vector<std::string> block_kinds() {
    std::vector<std::string> out;
    for (const auto &[kind, schema] : block_schemas()) {
        out.push_back(kind);
    }
    return out;
}

TagPolicy parse_tag_policy(std::string_view s) {
    if (s == "none") return TagPolicy::None;
    if (s == "rational") return TagPolicy::Rational;
    if (s == "mixed") return TagPolicy::Mixed;
    throw Error(ErrorKind::InvalidSpec, "tag policy must be none, rational or mixed");
}

std::string_view to_string(TagPolicy p) {
    switch (p) {
    case TagPolicy::None: return "none";
    case TagPolicy::Rational: return "rational";
    case TagPolicy::Mixed: return "mixed";
    }
    return "none";
}

Status parse_status(std::string_view s) {
    if (s == "holds") return Status::Holds;
    if (s == "fails") return Status::Fails;
    if (s == "not-applicable") return Status::NotApplicable;
    throw Error(ErrorKind::InvalidSpec, "expected holds, fails or not-applicable");
}

ScenarioSpec parse_scenario(std::string_view text) {
    ScenarioSpec spec;
    bool have_seed = false;
    std::set<std::string> seen_top;
    std::map<std::string, std::size_t> kind_counts;
    Block *current = nullptr;
    const auto &schemas = block_schemas();
    const auto properties = property_names();

    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find('\n', start), text.size());
        std::string raw(text.substr(start, end - start));
        start = end + 1;
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) {
            raw.resize(hash);
        }
        const std::string line = trim(raw);
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }

        if (line.front() == '[') {
            if (line.back() != ']') {
                fail(line_no, "unterminated block header");
            }
            const std::string kind = trim(std::string_view(line).substr(1, line.size() - 2));
            if (!schemas.count(kind)) {
                fail(line_no, "unknown block [" + kind + "]");
            }
            spec.blocks.emplace_back(kind, line_no, kind_counts[kind]++);
            current = &spec.blocks.back();
            continue;
        }

        if (line.rfind("expect ", 0) == 0 && current == nullptr) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                fail(line_no, "expected 'expect <assignment> <property> = <status>'");
            }
            std::stringstream lhs(line.substr(7, eq - 7));
            std::string a, p, extra;
            lhs >> a >> p >> extra;
            if (a.empty() || p.empty() || !extra.empty()) {
                fail(line_no, "expected 'expect <assignment> <property> = <status>'");
            }
            Status status{};
            try {
                status = parse_status(trim(line.substr(eq + 1)));
            } catch (const Error &e) {
                fail(line_no, e.what());
            }
            spec.expectations.push_back({a, p, status, line_no});
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail(line_no, "expected 'key = value'");
        }
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) {
            fail(line_no, "missing key");
        }

        if (current != nullptr) {
            const auto &schema = schemas.at(current->kind());
            auto it = schema.find(key);
            if (it == schema.end()) {
                fail(line_no, "unknown key '" + key + "' in [" + current->kind() + "]");
            }
            if (current->has(key)) {
                fail(line_no, "duplicate key '" + key + "'");
            }
            current->set(key, Field{parse_field(it->second, value, line_no), line_no});
            continue;
        }

        if (!seen_top.insert(key).second) {
            fail(line_no, "duplicate key '" + key + "'");
        }
        if (key == "name") {
            spec.name = parse_name(value, line_no);
        } else if (key == "description") {
            spec.description = value;
        } else if (key == "seed") {
            const long long s = parse_int(value, line_no);
            if (s < 0) {
                fail(line_no, "seed must be non-negative");
            }
            spec.seed = static_cast<std::uint64_t>(s);
            have_seed = true;
        } else if (key == "dims") {
            spec.dims.clear();
            const FieldValue parsed = parse_field(FieldType::IntList, value, line_no);
            for (auto d : std::get<std::vector<long long>>(parsed)) {
                if (d < 1 || d > 64) {
                    fail(line_no, "dimensions must lie in [1, 64]");
                }
                spec.dims.push_back(static_cast<std::size_t>(d));
            }
        } else if (key == "assignments") {
            spec.assignments = std::get<std::vector<std::string>>(parse_field(FieldType::NameList, value, line_no));
            for (const auto &a : spec.assignments) {
                if (!contains(assignment_names(), a)) {
                    fail(line_no, "unknown assignment '" + a + "'");
                }
            }
        } else if (key == "properties") {
            spec.properties = std::get<std::vector<std::string>>(parse_field(FieldType::NameList, value, line_no));
            for (const auto &p : spec.properties) {
                if (!contains(properties, p)) {
                    fail(line_no, "unknown property '" + p + "'");
                }
            }
        } else if (key == "trials") {
            const long long t = parse_int(value, line_no);
            if (t < 1) {
                fail(line_no, "trials must be at least 1");
            }
            spec.trials = static_cast<std::size_t>(t);
        } else if (key == "tolerance") {
            spec.tolerance = parse_real(value, line_no);
            if (!(spec.tolerance > 0)) {
                fail(line_no, "tolerance must be positive");
            }
        } else if (key.rfind("tolerance.", 0) == 0) {
            const std::string prop = key.substr(10);
            if (!contains(properties, prop)) {
                fail(line_no, "unknown property '" + prop + "'");
            }
            const double t = parse_real(value, line_no);
            if (!(t > 0)) {
                fail(line_no, "tolerance must be positive");
            }
            spec.property_tolerances[prop] = t;
        } else if (key == "tags") {
            try {
                spec.tags = parse_tag_policy(value);
            } catch (const Error &e) {
                fail(line_no, e.what());
            }
        } else if (key == "lemma1") {
            spec.lemma1 = parse_bool(value, line_no);
        } else {
            fail(line_no, "unknown key '" + key + "'");
        }
    }

    if (!have_seed) {
        throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": scenario has no seed");
    }
    for (const auto &e : spec.expectations) {
        if (!contains(spec.assignments, e.assignment)) {
            fail(e.line, "expectation names assignment '" + e.assignment + "', which is not in the matrix");
        }
        if (!contains(spec.properties, e.property)) {
            fail(e.line, "expectation names property '" + e.property + "', which is not in the matrix");
        }
    }
    for (const auto &b : spec.blocks) {
        validate_block(b);
    }
    return spec;
}

ScenarioSpec load_scenario(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::ParseError, "cannot open scenario '" + path + "'");
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

} // namespace bornlab
