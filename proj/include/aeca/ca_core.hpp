#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "aeca/contingency.hpp"

namespace aeca {

// Singular values below max(kRankRelTol * alpha_1, kRankAbsTol) count as zero.
inline constexpr double kRankRelTol = 1e-12;
inline constexpr double kRankAbsTol = 1e-14;

struct ResidualMatrix {
    Eigen::MatrixXd S;  // 2I x J
};

struct CAResult {
    Eigen::VectorXd singular_values;   // alpha, descending, length K
    Eigen::VectorXd inertia_shares;    // alpha_k^2 / sum alpha^2, percent
    Eigen::MatrixXd treatment_coords;  // F, J x K principal coordinates
    Eigen::MatrixXd class_coords;      // A, 2I x K contribution coordinates
    Eigen::MatrixXd contributions;     // A squared; each column sums to 1
    Eigen::VectorXd class_masses;      // r of the analyzed table
    Eigen::VectorXd group_masses;      // c
    int rank = 0;
    double total_inertia = 0.0;

    std::vector<std::string> group_labels;     // J
    std::vector<std::string> row_labels;       // 2I, interleaved with complements
    std::vector<std::size_t> class_index;      // analyzed class i -> class index in the input table
    std::vector<std::string> dropped_classes;  // removed by the degenerate-class rule
};

/// sqrt(sum (p_i - q_i)^2 / w_i). Coordinates with p_i == q_i are skipped;
/// throws ZeroWeight if w_i == 0 where they differ.
double chi2_distance(const Eigen::Ref<const Eigen::VectorXd>& profile,
                     const Eigen::Ref<const Eigen::VectorXd>& reference, const Eigen::Ref<const Eigen::VectorXd>& weights);

/// Removes degenerate classes and rebuilds the table; labels of removed classes go to `dropped`.
StackedTable drop_degenerate_classes(const StackedTable& t, std::vector<std::string>* dropped = nullptr);

/// Closed-form per-class sum over retained classes. Throws DegenerateTable if none are retained.
double total_inertia(const StackedTable& t);

/// S = D_r^{-1/2} (P - r c^T) D_c^{-1/2} on the correspondence matrix.
/// Throws DegenerateTable if some row mass is zero (drop degenerate classes first).
ResidualMatrix standardized_residuals(const StackedTable& t);

/// Drops degenerate classes, then decomposes the standardized residuals.
/// For each dimension the sign is chosen so the largest-magnitude group
/// coordinate is positive (ties go to the lowest group index).
CAResult decompose(const StackedTable& t);

/// A * diag(alpha) * B^T with B recovered from F and the group masses.
Eigen::MatrixXd reconstruct(const CAResult& result, const Eigen::Ref<const Eigen::VectorXd>& group_masses);

}  // namespace aeca
