#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "aeca/ae_data.hpp"

namespace aeca {

// Suffix marking the complement row of a class ("G3ᶜ").
inline constexpr std::string_view kComplementSuffix = "\xE1\xB6\x9C";

// Stacked 2I x J table. Row 2i is class i, row 2i+1 its complement.
struct StackedTable {
    std::vector<AEClass> classes;     // I
    std::vector<std::string> groups;  // J
    Eigen::MatrixXd pi;               // I x J, per-patient relative frequencies
    Eigen::MatrixXd profiles;         // 2I x J column profiles (pi/I, (1-pi)/I); columns sum to 1
    Eigen::VectorXd col_masses;       // c_j = 1/J
    Eigen::VectorXd row_masses;       // r = profiles * c
    Eigen::VectorXd avg_frequency;    // mean of pi over groups, length I
    std::vector<bool> degenerate;     // pi constant at 0 or 1 across groups
    double total_inertia = 0.0;       // over non-degenerate classes

    std::size_t class_count() const noexcept { return classes.size(); }
    std::size_t group_count() const noexcept { return groups.size(); }

    /// Correspondence matrix with grand total 1: profiles scaled by the column masses.
    Eigen::MatrixXd correspondence() const;
    /// Interleaved row labels, complements carrying kComplementSuffix.
    std::vector<std::string> row_labels() const;
    /// Unnormalized stacked counts table (pi, 1 - pi); grand total I*J.
    Eigen::MatrixXd stacked_counts() const;
};

/// pi_ij = distinct patients of group j with at least one record of class i, over N_j.
StackedTable build_stacked(const Dataset& d, ClassLevel level);

/// Builds the stacked table from a precomputed pi matrix (entries in [0,1]).
/// Throws OutOfRange, DimensionMismatch, DuplicateLabel.
StackedTable from_pi_matrix(const Eigen::MatrixXd& pi, const std::vector<std::string>& class_labels,
                            const std::vector<std::string>& group_labels, ClassLevel level = ClassLevel::Grade);

/// True when the class has the same pi in every group and that value is 0 or 1.
bool is_degenerate_row(const Eigen::Ref<const Eigen::RowVectorXd>& pi_row);

struct PiMatrixImport {
    Eigen::MatrixXd pi;
    std::vector<std::string> class_labels;
    std::vector<std::string> group_labels;
    bool rescaled_from_percent = false;
    std::vector<std::string> warnings;
};

/// Reads a pi table: header row of group names, first column class labels.
/// Any value above 1 marks the whole table as percentages (divided by 100).
PiMatrixImport read_pi_matrix(std::string_view text);

struct FrequencyRow {
    std::string label;
    std::vector<double> percent;  // per group, full precision
    double average_percent = 0.0;
};

struct FrequencyTable {
    std::vector<std::string> groups;
    std::vector<FrequencyRow> rows;
};

FrequencyTable frequency_table(const StackedTable& t);

/// Fixed-width text with 2-decimal percentages.
std::string format_frequency_table(const FrequencyTable& ft);
/// Comma-delimited, 2-decimal percentages, header "class,<groups...>,average".
std::string frequency_table_csv(const FrequencyTable& ft);

}  // namespace aeca
