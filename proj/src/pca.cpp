#include "tvpgamp/pca.hpp"

#include "tvpgamp/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tvpgamp {

PcaModel fit_pca(const Matrix& X, Eigen::Index components,
                 const std::vector<std::string>& columnNames) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();
    if (n < 2) {
        throw ArgumentError("PCA needs at least two observations");
    }
    if (components < 0 || components > std::min(n, p)) {
        throw ArgumentError("component count " + std::to_string(components) +
                            " outside [0, min(n, p)]");
    }
    if (!X.allFinite()) {
        throw DataError("PCA input contains missing or non-finite values");
    }

    PcaModel model;
    model.means = X.colwise().mean().transpose();
    Matrix Z = X.rowwise() - model.means.transpose();
    model.scales = (Z.colwise().squaredNorm() / static_cast<double>(n - 1)).cwiseSqrt().transpose();
    for (Eigen::Index j = 0; j < p; ++j) {
        // relative test so that constant columns with rounding noise are caught
        const double magnitude = std::max(1.0, std::abs(model.means(j)));
        if (!(model.scales(j) > 1e-12 * magnitude)) {
            const std::string name = static_cast<std::size_t>(j) < columnNames.size()
                                         ? columnNames[static_cast<std::size_t>(j)]
                                         : "column " + std::to_string(j);
            throw DataError("PCA input '" + name + "' has zero variance");
        }
    }
    Z = Z.array().rowwise() / model.scales.transpose().array();

    const Matrix corr = (Z.transpose() * Z) / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(corr);
    if (eig.info() != Eigen::Success) {
        throw NumericalError("eigendecomposition of the correlation matrix failed");
    }
    // Eigen returns ascending eigenvalues.
    model.loadings.resize(p, components);
    model.explained.resize(components);
    for (Eigen::Index k = 0; k < components; ++k) {
        const Eigen::Index src = p - 1 - k;
        Vector v = eig.eigenvectors().col(src);
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v(arg) < 0.0) {
            v = -v;
        }
        model.loadings.col(k) = v;
        model.explained(k) = std::max(0.0, eig.eigenvalues()(src));
    }
    return model;
}

Matrix transform_pca(const PcaModel& model, const Matrix& X) {
    if (X.cols() != model.inputs()) {
        throw ArgumentError("PCA transform expects " + std::to_string(model.inputs()) +
                            " columns, got " + std::to_string(X.cols()));
    }
    const Matrix Z = ((X.rowwise() - model.means.transpose()).array().rowwise() /
                      model.scales.transpose().array())
                         .matrix();
    return Z * model.loadings;
}

}  // namespace tvpgamp
