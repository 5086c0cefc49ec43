#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace aeca {

// Refinement levels, in the order used for reporting.
enum class ClassLevel { Grade, Domain, DomainGrade, Term, TermGrade };

inline constexpr std::array<ClassLevel, 5> kAllLevels = {
    ClassLevel::Grade, ClassLevel::Domain, ClassLevel::DomainGrade, ClassLevel::Term, ClassLevel::TermGrade};

std::string_view to_string(ClassLevel level) noexcept;
/// Accepts "grade", "domain", "domain_grade", "domain+grade", "term", "term_grade",
/// "term+grade" (case-insensitive). Throws Error(InvalidConfig) otherwise.
ClassLevel parse_level(std::string_view text);
bool level_needs_domain(ClassLevel level) noexcept;
bool level_needs_term(ClassLevel level) noexcept;

struct AERecord {
    std::string patient_id;
    std::string group;
    std::size_t group_index = 0;
    int grade = 0;
    std::optional<std::string> domain;
    std::optional<std::string> term;
    std::optional<int> cycle;
    std::size_t source_line = 0;
};

struct AEClass {
    std::string label;
    ClassLevel level = ClassLevel::Grade;
    std::optional<int> grade;
    std::optional<std::string> domain;
    std::optional<std::string> term;
};

/// Canonical label: "G3", "Metabolism:G3", "Nausea:G2", or the raw domain/term.
std::string class_label(ClassLevel level, int grade, const std::optional<std::string>& domain,
                        const std::optional<std::string>& term);

// Input column names. Empty string means "not bound".
struct ColumnMap {
    std::string patient;
    std::string group;
    std::string grade;
    std::string domain;
    std::string term;
    std::string cycle;
};

struct RejectedRow {
    std::size_t line = 0;
    std::string reason;
};

// Immutable after parsing. Group j is groups[j]; N_j is patients_per_group[j].
struct Dataset {
    std::vector<AERecord> records;
    std::vector<std::string> groups;
    std::vector<std::size_t> patients_per_group;
    std::vector<std::vector<std::string>> roster;  // sorted distinct patient ids per group
    bool has_domain = false;
    bool has_term = false;
    bool has_cycle = false;

    std::size_t group_count() const noexcept { return groups.size(); }
};

struct ParseOptions {
    int min_grade = 1;
    std::optional<std::string> roster_text;  // delimited (patient_id, group) with header
    std::vector<std::string> group_order;    // explicit order; unlisted groups follow in input order
};

struct ParseResult {
    Dataset dataset;
    std::vector<RejectedRow> rejected;
};

/// Parses long-format AE records. Row-level problems go to the reject list.
/// A row whose grade, domain and term cells are all empty is a roster entry for a
/// patient with no AE: it counts towards N_j but yields no record.
/// Throws MissingColumn, EmptyDataset, SingleGroup, ParseError.
ParseResult parse_dataset(std::string_view source, const ColumnMap& columns, const ParseOptions& options = {});

/// Keeps records from one cycle. N_j is kept from the full roster; groups left
/// with no records are removed. Throws MissingField, EmptyDataset, SingleGroup.
Dataset filter_cycle(const Dataset& d, int cycle);

/// Drops records below min_grade; roster and groups are unchanged.
Dataset filter_min_grade(const Dataset& d, int min_grade);

/// Column names used by write_dataset.
ColumnMap canonical_columns();

/// Writes the dataset as comma-delimited text readable with canonical_columns().
/// Roster-only patients are written as rows with empty AE cells.
std::string write_dataset(const Dataset& d);

struct ClassAssignment {
    std::vector<AEClass> classes;         // I classes, sorted by case-folded label
    std::vector<std::size_t> record_class;  // one class index per record
};

/// Maps every record to one class at the given level. Labels compare
/// case-insensitively; the displayed spelling is the smallest variant seen.
/// Throws MissingField when a record lacks the domain or term the level needs.
ClassAssignment derive_classes(const Dataset& d, ClassLevel level);

}  // namespace aeca
