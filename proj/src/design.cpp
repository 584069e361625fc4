#include "tvpgamp/design.hpp"

#include "tvpgamp/error.hpp"

#include <string>

namespace tvpgamp {

void DesignOperator::check_forward(const Vector& v) const {
    if (v.size() != cols()) {
        throw ArgumentError("forward product expects a vector of length " +
                            std::to_string(cols()) + ", got " + std::to_string(v.size()));
    }
}

void DesignOperator::check_adjoint(const Vector& u) const {
    if (u.size() != rows()) {
        throw ArgumentError("adjoint product expects a vector of length " +
                            std::to_string(rows()) + ", got " + std::to_string(u.size()));
    }
}

DenseDesignOperator::DenseDesignOperator(Matrix X) : X_(std::move(X)) {
    if (X_.rows() == 0 || X_.cols() == 0) {
        throw ArgumentError("design matrix must be non-empty");
    }
    if (!X_.allFinite()) {
        throw ArgumentError("design matrix contains non-finite entries");
    }
    X2_ = X_.array().square().matrix();
}

void DenseDesignOperator::forward(const Vector& v, Vector& out) const {
    check_forward(v);
    out.noalias() = X_ * v;
}

void DenseDesignOperator::adjoint(const Vector& u, Vector& out) const {
    check_adjoint(u);
    out.noalias() = X_.transpose() * u;
}

void DenseDesignOperator::forward_sq(const Vector& v, Vector& out) const {
    check_forward(v);
    out.noalias() = X2_ * v;
}

void DenseDesignOperator::adjoint_sq(const Vector& u, Vector& out) const {
    check_adjoint(u);
    out.noalias() = X2_.transpose() * u;
}

TvpDesignOperator::TvpDesignOperator(const Matrix& baseRows) : base_(baseRows) {
    if (base_.rows() == 0 || base_.cols() == 0) {
        throw ArgumentError("TVP operator needs T > 0 and p > 0");
    }
    if (!base_.allFinite()) {
        throw ArgumentError("TVP base rows contain missing or non-finite values");
    }
}

void TvpDesignOperator::forward(const Vector& v, Vector& out) const {
    check_forward(v);
    const Eigen::Index T = periods();
    const Eigen::Index p = regressors();
    out.resize(T);
    const auto constant = v.head(p);
    for (Eigen::Index t = 0; t < T; ++t) {
        const auto x = base_.row(t);
        const auto dev = v.segment((t + 1) * p, p);
        double acc = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            acc += x(j) * (constant(j) + dev(j));
        }
        out(t) = acc;
    }
}

void TvpDesignOperator::adjoint(const Vector& u, Vector& out) const {
    check_adjoint(u);
    const Eigen::Index T = periods();
    const Eigen::Index p = regressors();
    out.resize(cols());
    out.head(p).setZero();
    for (Eigen::Index t = 0; t < T; ++t) {
        const auto x = base_.row(t);
        const double ut = u(t);
        for (Eigen::Index j = 0; j < p; ++j) {
            const double xu = x(j) * ut;
            out(j) += xu;
            out((t + 1) * p + j) = xu;
        }
    }
}

void TvpDesignOperator::forward_sq(const Vector& v, Vector& out) const {
    check_forward(v);
    const Eigen::Index T = periods();
    const Eigen::Index p = regressors();
    out.resize(T);
    const auto constant = v.head(p);
    for (Eigen::Index t = 0; t < T; ++t) {
        const auto x = base_.row(t);
        const auto dev = v.segment((t + 1) * p, p);
        double acc = 0.0;
        for (Eigen::Index j = 0; j < p; ++j) {
            acc += x(j) * x(j) * (constant(j) + dev(j));
        }
        out(t) = acc;
    }
}

void TvpDesignOperator::adjoint_sq(const Vector& u, Vector& out) const {
    check_adjoint(u);
    const Eigen::Index T = periods();
    const Eigen::Index p = regressors();
    out.resize(cols());
    out.head(p).setZero();
    for (Eigen::Index t = 0; t < T; ++t) {
        const auto x = base_.row(t);
        const double ut = u(t);
        for (Eigen::Index j = 0; j < p; ++j) {
            const double xxu = x(j) * x(j) * ut;
            out(j) += xxu;
            out((t + 1) * p + j) = xxu;
        }
    }
}

TvpDesignOperator build_tvp_operator(const Matrix& baseRows) { return TvpDesignOperator(baseRows); }

Vector op_forward(const DesignOperator& A, const Vector& v) {
    Vector out;
    A.forward(v, out);
    return out;
}

Vector op_adjoint(const DesignOperator& A, const Vector& u) {
    Vector out;
    A.adjoint(u, out);
    return out;
}

Vector op_forward_sq(const DesignOperator& A, const Vector& v) {
    Vector out;
    A.forward_sq(v, out);
    return out;
}

Vector op_adjoint_sq(const DesignOperator& A, const Vector& u) {
    Vector out;
    A.adjoint_sq(u, out);
    return out;
}

CoefficientPath CoefficientPath::from_static(const TvpDesignOperator& A, const Vector& beta) {
    if (beta.size() != A.cols()) {
        throw ArgumentError("static coefficient vector has length " + std::to_string(beta.size()) +
                            ", expected " + std::to_string(A.cols()));
    }
    const Eigen::Index T = A.periods();
    const Eigen::Index p = A.regressors();
    CoefficientPath path;
    path.constant = beta.head(p);
    path.deviations.resize(T, p);
    for (Eigen::Index t = 0; t < T; ++t) {
        path.deviations.row(t) = beta.segment((t + 1) * p, p).transpose();
    }
    path.combined = path.deviations.rowwise() + path.constant.transpose();
    return path;
}

CoefficientPath CoefficientPath::constant_path(const Vector& beta, Eigen::Index periods) {
    CoefficientPath path;
    path.constant = beta;
    path.deviations = Matrix::Zero(periods, beta.size());
    path.combined = path.deviations.rowwise() + beta.transpose();
    return path;
}

}  // namespace tvpgamp
