#pragma once

#include "tvpgamp/linalg.hpp"

#include <string>
#include <vector>

namespace tvpgamp {

/// Principal components of the sample correlation matrix.
struct PcaModel {
    Vector means;     // per-column mean at fit time
    Vector scales;    // per-column standard deviation (n - 1 divisor)
    Matrix loadings;  // p x K, orthonormal columns
    Vector explained; // K eigenvalues, descending

    [[nodiscard]] Eigen::Index inputs() const noexcept { return loadings.rows(); }
    [[nodiscard]] Eigen::Index components() const noexcept { return loadings.cols(); }
};

/**
 * Standardises the columns of `X` and returns the leading `components`
 * eigenvectors of their correlation matrix. Each loading column is signed so
 * that its largest-magnitude entry is positive, which keeps factor paths
 * comparable across re-estimation windows.
 *
 * Throws DataError naming the offending column when a column has zero
 * variance (names are taken from `columnNames` when supplied).
 */
PcaModel fit_pca(const Matrix& X, Eigen::Index components,
                 const std::vector<std::string>& columnNames = {});

/// Factor scores: standardise with the stored means/scales, then project.
Matrix transform_pca(const PcaModel& model, const Matrix& X);

}  // namespace tvpgamp
