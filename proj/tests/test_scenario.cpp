#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <set>
#include <sstream>

#include "bornlab/report.hpp"
#include "bornlab/scenario.hpp"

using namespace bornlab;

namespace {

std::string error_of(const std::string &text) {
    try {
        (void)parse_scenario(text);
    } catch (const Error &e) {
        return e.what();
    }
    return {};
}

const std::string kSmall = R"(# comment line
name = small
seed = 5
dims = 2, 3
trials = 5
tolerance = 1e-9
assignments = born, trace-squared
properties = additivity, normalization

expect trace-squared additivity = fails

[finegrain]
pairs = 1:2, 2:3

[hartle]
p = 1/2
grid = 100, 1000, 10000, 100000
)";

} // namespace

TEST_CASE("a small scenario parses with every field") {
    const ScenarioSpec spec = parse_scenario(kSmall);
    CHECK(spec.name == "small");
    CHECK(spec.seed == 5);
    CHECK(spec.dims == std::vector<std::size_t>{2, 3});
    CHECK(spec.trials == 5);
    CHECK(spec.assignments == std::vector<std::string>{"born", "trace-squared"});
    REQUIRE(spec.expectations.size() == 1);
    CHECK(spec.expectations[0].status == Status::Fails);
    CHECK(spec.expectations[0].line == 10);
    REQUIRE(spec.blocks.size() == 2);
    CHECK(spec.blocks[0].kind() == "finegrain");
    CHECK(spec.blocks[0].line() == 12);
    CHECK(spec.blocks[1].get<double>("p", 0.0) == 0.5);
    const CheckConfig cfg = spec.check_config();
    CHECK(cfg.trials == 5);
    CHECK(cfg.seed == 5);
}

TEST_CASE("parse errors carry the line number") {
    CHECK(error_of("seed = 1\ndims = 2, 0\n").find("line 2:") != std::string::npos);
    CHECK(error_of("seed = 1\n\nassignments = born, gibbs\n").find("line 3:") != std::string::npos);
    CHECK(error_of("seed = 1\ntolerance = 0\n").find("line 2: tolerance must be positive") != std::string::npos);
    CHECK(error_of("seed = 1\ntolerance = -1e-3\n").find("line 2:") != std::string::npos);
    CHECK(error_of("seed = 1\nbogus = 3\n").find("line 2: unknown key") != std::string::npos);
    CHECK(error_of("seed = 1\n[nowhere]\n").find("line 2: unknown block") != std::string::npos);
    CHECK(error_of("seed = 1\nseed = 2\n").find("line 2: duplicate key") != std::string::npos);
    CHECK(error_of("seed = 1\njust text\n").find("line 2:") != std::string::npos);
    CHECK(error_of("name = x\n").find("no seed") != std::string::npos);
    CHECK(error_of("seed = 1\n[finegrain]\npairs = 3:2\n").find("line 3:") != std::string::npos);
    CHECK(error_of("seed = 1\n[hartle]\np = 3/2\n").find("line 3:") != std::string::npos);
    CHECK(error_of("seed = 1\n[continuity]\nassignment = born\n").find("line 2:") != std::string::npos);
    CHECK(error_of("seed = 1\n[gleason]\nassignment = nobody\n").find("line 3: unknown assignment") !=
          std::string::npos);
    CHECK(error_of("seed = 1\n[mixture]\nweights = 0.5, 0.5\nq = 1\n").find("line 4:") != std::string::npos);
}

TEST_CASE("expectations must name matrix cells") {
    const std::string text = "seed = 1\nassignments = born\nproperties = onc\nexpect born anc = holds\n";
    CHECK(error_of(text).find("line 4:") != std::string::npos);
    CHECK(error_of("seed = 1\nassignments = born\nproperties = onc\nexpect born onc = maybe\n").find("line 4:") !=
          std::string::npos);
}

TEST_CASE("every parse failure is a parse error") {
    try {
        (void)parse_scenario("seed = x\n");
        FAIL("bad seed accepted");
    } catch (const Error &e) {
        CHECK(e.kind() == ErrorKind::ParseError);
    }
}

TEST_CASE("block kinds are alphabetized") {
    const auto kinds = block_kinds();
    CHECK(std::is_sorted(kinds.begin(), kinds.end()));
    CHECK(std::find(kinds.begin(), kinds.end(), "gleason") != kinds.end());
    CHECK(std::find(kinds.begin(), kinds.end(), "hartle") != kinds.end());
}

TEST_CASE("empty assignment list gives an empty matrix") {
    const Report r = run_scenario(parse_scenario("seed = 3\nassignments =\nproperties = onc\n"));
    CHECK(r.matrix.rows.empty());
    CHECK(r.mismatches.empty());
    const auto j = report_json(r, false);
    CHECK(j["property_matrix"]["rows"].empty());
}

TEST_CASE("expectations are compared against verdicts") {
    const Report ok = run_scenario(parse_scenario(kSmall));
    CHECK(ok.mismatches.empty());
    REQUIRE(ok.expectations.size() == 1);
    CHECK(ok.expectations[0].matched);

    const Report bad = run_scenario(parse_scenario(
        "seed = 1\ndims = 2\ntrials = 5\nassignments = born\nproperties = additivity\n"
        "expect born additivity = fails\n"));
    REQUIRE(bad.mismatches.size() == 1);
    CHECK(bad.mismatches[0].find("born additivity") != std::string::npos);
    CHECK(bad.mismatches[0].find("line 6") != std::string::npos);
}

TEST_CASE("strict mode treats unlisted cells as holds") {
    const std::string text = "seed = 1\ndims = 2\ntrials = 5\nassignments = trace-squared\nproperties = additivity\n";
    CHECK(run_scenario(parse_scenario(text), 1, false).mismatches.empty());
    CHECK(run_scenario(parse_scenario(text), 1, true).mismatches.size() == 1);
}

TEST_CASE("blocks report their checks and failures become mismatches") {
    const Report r = run_scenario(parse_scenario(kSmall));
    REQUIRE(r.harnesses.size() == 2);
    for (const auto &h : r.harnesses) {
        CHECK(h.passed());
        CHECK_FALSE(h.checks.empty());
    }
    // An expect = fail block that passes is a mismatch.
    const Report wrong = run_scenario(parse_scenario("seed = 1\n[finegrain]\npairs = 1:2\nexpect = fail\n"));
    CHECK(wrong.mismatches.size() == 1);
}

TEST_CASE("report json is deterministic and keeps timings in one place") {
    const ScenarioSpec spec = parse_scenario(kSmall);
    const auto a = report_json(run_scenario(spec, 1)).dump();
    const auto b = report_json(run_scenario(spec, 4));
    CHECK(report_json(run_scenario(spec, 1), false).dump() == report_json(run_scenario(spec, 3), false).dump());
    CHECK(b.contains("timings"));
    CHECK(b["schema_version"] == kReportSchemaVersion);
    CHECK(b["seed"] == 5);
    auto stripped = b;
    stripped.erase("timings");
    // No other key mentions wall time.
    CHECK(stripped.dump().find("seconds") == std::string::npos);
    CHECK_FALSE(a.empty());
}

TEST_CASE("verdicts in the report carry replay information") {
    const auto j = report_json(run_scenario(parse_scenario(kSmall)), false);
    const auto &cells = j["property_matrix"]["cells"];
    REQUIRE_FALSE(cells.empty());
    bool saw_witness = false;
    CHECK(cells.size() == 4);
    for (const auto &cell : cells) {
        CHECK(cell.contains("tolerance"));
        CHECK(cell.contains("trials"));
        CHECK(cell.contains("seed"));
        if (cell["status"] == "fails") {
            CHECK(cell["witness"].contains("trial_seed"));
            saw_witness = true;
        }
    }
    CHECK(saw_witness);
}

TEST_CASE("csv files use a header row and round-trip doubles") {
    Series s{"demo", {"n", "value"}, {{1.0, 0.1}, {2.0, 1.0 / 3.0}}};
    const std::string csv = to_csv(s);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "n,value");
    std::getline(in, line);
    CHECK(line == "1,0.10000000000000001");
    std::getline(in, line);
    CHECK(std::stod(line.substr(line.find(',') + 1)) == 1.0 / 3.0);
}

TEST_CASE("report files are written") {
    const auto dir = std::filesystem::temp_directory_path() / "bornlab-test-report";
    std::filesystem::remove_all(dir);
    const auto files = write_report(run_scenario(parse_scenario(kSmall)), dir);
    CHECK(std::filesystem::exists(dir / "report.json"));
    CHECK(std::filesystem::exists(dir / "property-matrix.csv"));
    CHECK(files.size() >= 3);
    std::filesystem::remove_all(dir);
}

TEST_CASE("catalog listing") {
    const std::string list = list_catalog();
    CHECK(list == list_catalog());
    for (const char *name : {"born", "zurek-patch", "strong-normalization", "two-slope", "amplitude-sweep"}) {
        CHECK_MESSAGE(list.find(name) != std::string::npos, name);
    }
    for (const auto &kind : block_kinds()) {
        CHECK_MESSAGE(list.find(kind) != std::string::npos, kind);
    }
}

TEST_CASE("every name in the bundled scenarios appears in the catalog") {
    const std::string list = list_catalog();
    std::set<std::string> names;
    for (const auto &entry : std::filesystem::directory_iterator(BORNLAB_SCENARIO_DIR)) {
        if (entry.path().extension() != ".scn") {
            continue;
        }
        const ScenarioSpec spec = load_scenario(entry.path().string());
        names.insert(spec.assignments.begin(), spec.assignments.end());
        names.insert(spec.properties.begin(), spec.properties.end());
        for (const auto &b : spec.blocks) {
            names.insert(b.kind());
            if (b.has("assignment")) {
                names.insert(b.get<std::string>("assignment", ""));
            }
            if (b.has("path")) {
                names.insert(b.get<std::string>("path", ""));
            }
        }
    }
    CHECK(names.size() > 10);
    for (const auto &n : names) {
        CHECK_MESSAGE(list.find(n) != std::string::npos, n);
    }
}
