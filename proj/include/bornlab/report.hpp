#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bornlab/property_lab.hpp"
#include "bornlab/scenario.hpp"

namespace bornlab {

inline constexpr int kReportSchemaVersion = 1;
std::string_view artifact_version();

/// A table written as one CSV file: header row, "," separator, %.17g numbers.
struct Series {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct CheckLine {
    std::string name;
    bool passed = true;
    double value = 0.0;
    double bound = 0.0;
    std::string detail;
};

struct HarnessResult {
    std::string kind;
    std::string label;
    std::size_t line = 0;
    std::uint64_t seed = 0;
    std::vector<CheckLine> checks;
    nlohmann::json details = nlohmann::json::object();
    std::vector<Series> series;
    /// From the block's `expect` key.
    std::optional<bool> expect_pass;
    double wall_seconds = 0.0;

    [[nodiscard]] bool passed() const;
};

/// Seed of one harness block: the scenario seed hashed with "harness:kind:index".
std::uint64_t block_seed(std::uint64_t base, const Block &block);

/// Runs a single harness block. `seed` is the block's own seed.
HarnessResult run_block(const Block &block, std::uint64_t seed);

struct ExpectationOutcome {
    Expectation expectation;
    Status actual = Status::NotApplicable;
    bool matched = true;
};

struct Report {
    ScenarioSpec spec;
    PropertyMatrix matrix;
    std::vector<Lemma1Record> lemma1;
    std::vector<double> lemma1_seconds;
    std::vector<HarnessResult> harnesses;
    std::vector<ExpectationOutcome> expectations;
    /// Human-readable disagreements between expectations and results.
    std::vector<std::string> mismatches;
    double wall_seconds = 0.0;
};

/// Runs the matrix, the strong-normalization cross-check (when requested) and
/// every block.
/// With `expect_strict`, matrix cells without an explicit expectation are
/// expected to hold and blocks without `expect` are expected to pass.
Report run_scenario(const ScenarioSpec &spec, std::size_t jobs = 1, bool expect_strict = false);

/// The full report. Every wall time lives under the top-level "timings" key,
/// which is omitted when `with_timings` is false.
nlohmann::json report_json(const Report &report, bool with_timings = true);

std::string to_csv(const Series &series);
/// Writes report.json, property-matrix.csv and one CSV per harness series;
/// returns the paths written.
std::vector<std::filesystem::path> write_report(const Report &report, const std::filesystem::path &dir);

/// Compact plain-text summary for the terminal.
std::string summary_text(const Report &report);

/// Plain-text listing of assignments, properties, probe paths and harness
/// blocks, alphabetized within each section.
std::string list_catalog();

nlohmann::json to_json(const PropertyVerdict &v);
nlohmann::json to_json(const HermitianOperator &op);

} // namespace bornlab
