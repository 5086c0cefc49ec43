#include "aeca/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "aeca/error.hpp"

namespace aeca {

namespace {

SvdResult tall_jacobi(const Eigen::MatrixXd& a, int max_sweeps) {
    const Eigen::Index m = a.rows();
    const Eigen::Index n = a.cols();
    Eigen::MatrixXd u = a;
    Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
    const double tol = static_cast<double>(m) * std::numeric_limits<double>::epsilon();

    int sweep = 0;
    bool rotated = true;
    while (rotated) {
        if (sweep >= max_sweeps) {
            throw Error(ErrorCode::SvdFailure, "Jacobi SVD did not converge in " + std::to_string(max_sweeps) + " sweeps");
        }
        ++sweep;
        rotated = false;
        for (Eigen::Index p = 0; p + 1 < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double alpha = u.col(p).squaredNorm();
                const double beta = u.col(q).squaredNorm();
                const double gamma = u.col(p).dot(u.col(q));
                if (alpha == 0.0 || beta == 0.0) continue;
                if (std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
                rotated = true;

                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (Eigen::Index i = 0; i < m; ++i) {
                    const double up = u(i, p);
                    const double uq = u(i, q);
                    u(i, p) = c * up - s * uq;
                    u(i, q) = s * up + c * uq;
                }
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double vp = v(i, p);
                    const double vq = v(i, q);
                    v(i, p) = c * vp - s * vq;
                    v(i, q) = s * vp + c * vq;
                }
            }
        }
    }

    Eigen::VectorXd sigma(n);
    for (Eigen::Index k = 0; k < n; ++k) sigma(k) = u.col(k).norm();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return sigma(x) > sigma(y); });

    SvdResult out;
    out.U.resize(m, n);
    out.V.resize(n, n);
    out.sigma.resize(n);
    out.sweeps = sweep;
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        out.sigma(k) = sigma(src);
        out.V.col(k) = v.col(src);
        if (sigma(src) > 0.0) {
            out.U.col(k) = u.col(src) / sigma(src);
        } else {
            out.U.col(k).setZero();
        }
    }
    return out;
}

}  // namespace

SvdResult jacobi_svd(const Eigen::MatrixXd& a, int max_sweeps) {
    if (a.rows() >= a.cols()) return tall_jacobi(a, max_sweeps);
    SvdResult t = tall_jacobi(a.transpose(), max_sweeps);
    std::swap(t.U, t.V);
    return t;
}

}  // namespace aeca
