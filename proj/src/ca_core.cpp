#include "aeca/ca_core.hpp"

#include <cmath>

#include "aeca/error.hpp"
#include "aeca/svd.hpp"

namespace aeca {

double chi2_distance(const Eigen::Ref<const Eigen::VectorXd>& profile,
                     const Eigen::Ref<const Eigen::VectorXd>& reference, const Eigen::Ref<const Eigen::VectorXd>& weights) {
    if (profile.size() != reference.size() || profile.size() != weights.size()) {
        throw Error(ErrorCode::DimensionMismatch, "chi2_distance: length mismatch");
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < profile.size(); ++i) {
        const double diff = profile(i) - reference(i);
        if (diff == 0.0) continue;
        if (!(weights(i) > 0.0)) {
            throw Error(ErrorCode::ZeroWeight, "chi2_distance: zero weight at coordinate " + std::to_string(i));
        }
        sum += diff * diff / weights(i);
    }
    return std::sqrt(sum);
}

StackedTable drop_degenerate_classes(const StackedTable& t, std::vector<std::string>* dropped) {
    std::vector<Eigen::Index> keep;
    for (std::size_t i = 0; i < t.classes.size(); ++i) {
        if (t.degenerate[i]) {
            if (dropped) dropped->push_back(t.classes[i].label);
        } else {
            keep.push_back(static_cast<Eigen::Index>(i));
        }
    }
    if (keep.size() == t.classes.size()) return t;
    if (keep.empty()) throw Error(ErrorCode::DegenerateTable, "every class has pi constant at 0 or 1");

    Eigen::MatrixXd pi(static_cast<Eigen::Index>(keep.size()), t.pi.cols());
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < keep.size(); ++k) {
        pi.row(static_cast<Eigen::Index>(k)) = t.pi.row(keep[k]);
        labels.push_back(t.classes[static_cast<std::size_t>(keep[k])].label);
    }
    StackedTable out = from_pi_matrix(pi, labels, t.groups, t.classes.front().level);
    for (std::size_t k = 0; k < keep.size(); ++k) out.classes[k] = t.classes[static_cast<std::size_t>(keep[k])];
    return out;
}

double total_inertia(const StackedTable& t) {
    const auto J = t.pi.cols();
    Eigen::Index retained = 0;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < t.pi.rows(); ++i) {
        if (t.degenerate[static_cast<std::size_t>(i)]) continue;
        ++retained;
        const double mean = t.avg_frequency(i);
        const double denom = mean * (1.0 - mean);
        for (Eigen::Index j = 0; j < J; ++j) {
            const double dev = t.pi(i, j) - mean;
            sum += dev * dev / denom;
        }
    }
    if (retained == 0) throw Error(ErrorCode::DegenerateTable, "no class left after dropping degenerate classes");
    return sum / static_cast<double>(retained * J);
}

ResidualMatrix standardized_residuals(const StackedTable& t) {
    const Eigen::MatrixXd P = t.correspondence();
    const Eigen::VectorXd& r = t.row_masses;
    const Eigen::VectorXd& c = t.col_masses;
    if (P.rows() == 0) throw Error(ErrorCode::DegenerateTable, "table has no classes");
    ResidualMatrix out;
    out.S.resize(P.rows(), P.cols());
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
        if (!(r(i) > 0.0)) {
            throw Error(ErrorCode::DegenerateTable, "row " + std::to_string(i) + " has zero mass");
        }
        for (Eigen::Index j = 0; j < P.cols(); ++j) {
            const double expected = r(i) * c(j);
            out.S(i, j) = (P(i, j) - expected) / std::sqrt(expected);
        }
    }
    return out;
}

namespace {

void apply_sign_convention(CAResult& res) {
    constexpr double tie = 1e-9;
    for (Eigen::Index k = 0; k < res.rank; ++k) {
        const double largest = res.treatment_coords.col(k).cwiseAbs().maxCoeff();
        Eigen::Index pick = 0;
        for (Eigen::Index j = 0; j < res.treatment_coords.rows(); ++j) {
            if (std::abs(res.treatment_coords(j, k)) >= largest * (1.0 - tie)) {
                pick = j;
                break;
            }
        }
        if (res.treatment_coords(pick, k) < 0.0) {
            res.treatment_coords.col(k) *= -1.0;
            res.class_coords.col(k) *= -1.0;
        }
    }
}

}  // namespace

CAResult decompose(const StackedTable& input) {
    CAResult res;
    const StackedTable t = drop_degenerate_classes(input, &res.dropped_classes);

    res.group_labels = t.groups;
    res.row_labels = t.row_labels();
    for (const auto& cls : t.classes) {
        for (std::size_t i = 0; i < input.classes.size(); ++i) {
            if (input.classes[i].label == cls.label) {
                res.class_index.push_back(i);
                break;
            }
        }
    }
    res.class_masses = t.row_masses;
    res.group_masses = t.col_masses;
    res.total_inertia = total_inertia(t);

    const ResidualMatrix residuals = standardized_residuals(t);
    const SvdResult svd = jacobi_svd(residuals.S);

    const double alpha1 = svd.sigma.size() > 0 ? svd.sigma(0) : 0.0;
    const double cutoff = std::max(kRankRelTol * alpha1, kRankAbsTol);
    int rank = 0;
    while (rank < svd.sigma.size() && svd.sigma(rank) > cutoff) ++rank;
    res.rank = rank;

    res.singular_values = svd.sigma.head(rank);
    res.class_coords = svd.U.leftCols(rank);
    const Eigen::VectorXd inv_sqrt_c = t.col_masses.cwiseSqrt().cwiseInverse();
    res.treatment_coords = inv_sqrt_c.asDiagonal() * svd.V.leftCols(rank) * res.singular_values.asDiagonal();
    apply_sign_convention(res);

    res.contributions = res.class_coords.cwiseAbs2();
    const Eigen::VectorXd eig = res.singular_values.cwiseAbs2();
    const double sum = eig.sum();
    res.inertia_shares = sum > 0.0 ? Eigen::VectorXd(100.0 * eig / sum) : Eigen::VectorXd(eig);
    return res;
}

Eigen::MatrixXd reconstruct(const CAResult& result, const Eigen::Ref<const Eigen::VectorXd>& group_masses) {
    const auto K = result.rank;
    if (K == 0) return Eigen::MatrixXd::Zero(result.class_coords.rows(), group_masses.size());
    // B = D_c^{1/2} F D_alpha^{-1}
    const Eigen::MatrixXd B = group_masses.cwiseSqrt().asDiagonal() * result.treatment_coords *
                              result.singular_values.cwiseInverse().asDiagonal();
    return result.class_coords * result.singular_values.asDiagonal() * B.transpose();
}

}  // namespace aeca
