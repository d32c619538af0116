#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "bornlab/exact.hpp"
#include "bornlab/property_lab.hpp"

namespace bornlab {

using FieldValue =
    std::variant<long long, double, bool, std::string, QuadRational, std::vector<long long>, std::vector<double>,
                 std::vector<std::string>, std::vector<QuadRational>, std::vector<std::pair<long long, long long>>>;

struct Field {
    FieldValue value;
    std::size_t line = 0;
};

/// One [kind] section of a scenario file, already type-checked.
class Block {
  public:
    Block(std::string kind, std::size_t line, std::size_t index)
        : kind_(std::move(kind)), line_(line), index_(index) {}

    [[nodiscard]] const std::string &kind() const { return kind_; }
    [[nodiscard]] std::size_t line() const { return line_; }
    /// Position among blocks of the same kind.
    [[nodiscard]] std::size_t index() const { return index_; }
    [[nodiscard]] std::string label() const { return kind_ + "-" + std::to_string(index_); }
    [[nodiscard]] const std::map<std::string, Field> &fields() const { return fields_; }
    [[nodiscard]] bool has(const std::string &key) const { return fields_.count(key) != 0; }

    void set(const std::string &key, Field f) { fields_[key] = std::move(f); }

    template <class T> [[nodiscard]] T get(const std::string &key, T fallback) const {
        auto it = fields_.find(key);
        return it == fields_.end() ? fallback : std::get<T>(it->second.value);
    }
    template <class T> [[nodiscard]] T require(const std::string &key) const {
        auto it = fields_.find(key);
        if (it == fields_.end()) {
            throw Error(ErrorKind::InvalidSpec,
                        "line " + std::to_string(line_) + ": [" + kind_ + "] needs '" + key + "'");
        }
        return std::get<T>(it->second.value);
    }

  private:
    std::string kind_;
    std::size_t line_;
    std::size_t index_;
    std::map<std::string, Field> fields_;
};

struct Expectation {
    std::string assignment;
    std::string property;
    Status status;
    std::size_t line;
};

struct ScenarioSpec {
    std::string name = "unnamed";
    std::string description;
    std::uint64_t seed = 0;
    std::vector<std::size_t> dims{2, 3, 4, 5};
    std::vector<std::string> assignments;
    std::vector<std::string> properties;
    std::size_t trials = 200;
    double tolerance = 1e-9;
    std::map<std::string, double> property_tolerances;
    TagPolicy tags = TagPolicy::Mixed;
    bool lemma1 = false;
    std::vector<Expectation> expectations;
    std::vector<Block> blocks;

    [[nodiscard]] CheckConfig check_config() const;
};

/// Harness block kinds accepted in scenario files, alphabetized.
std::vector<std::string> block_kinds();

/// Parses and validates scenario text. Every failure is an Error whose message
/// starts with "line N:" when a line is at fault.
ScenarioSpec parse_scenario(std::string_view text);
ScenarioSpec load_scenario(const std::string &path);

TagPolicy parse_tag_policy(std::string_view s);
std::string_view to_string(TagPolicy p);
Status parse_status(std::string_view s);

} // namespace bornlab
