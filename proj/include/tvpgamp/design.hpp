#pragma once

#include "tvpgamp/linalg.hpp"

namespace tvpgamp {

/**
 * Matrix-free linear map used by the message-passing solver. Besides the
 * usual product and its adjoint, the solver needs the same products with
 * every entry squared, which is what the `_sq` variants compute.
 *
 * Implementations are immutable after construction; all members are safe to
 * call concurrently.
 */
class DesignOperator {
public:
    virtual ~DesignOperator() = default;

    [[nodiscard]] virtual Eigen::Index rows() const noexcept = 0;
    [[nodiscard]] virtual Eigen::Index cols() const noexcept = 0;

    /// out = A v
    virtual void forward(const Vector& v, Vector& out) const = 0;
    /// out = A' u
    virtual void adjoint(const Vector& u, Vector& out) const = 0;
    /// out = (A .* A) v
    virtual void forward_sq(const Vector& v, Vector& out) const = 0;
    /// out = (A .* A)' u
    virtual void adjoint_sq(const Vector& u, Vector& out) const = 0;

protected:
    void check_forward(const Vector& v) const;
    void check_adjoint(const Vector& u) const;
};

/// Explicit dense matrix behind the operator interface.
class DenseDesignOperator final : public DesignOperator {
public:
    explicit DenseDesignOperator(Matrix X);

    [[nodiscard]] Eigen::Index rows() const noexcept override { return X_.rows(); }
    [[nodiscard]] Eigen::Index cols() const noexcept override { return X_.cols(); }
    [[nodiscard]] const Matrix& matrix() const noexcept { return X_; }

    void forward(const Vector& v, Vector& out) const override;
    void adjoint(const Vector& u, Vector& out) const override;
    void forward_sq(const Vector& v, Vector& out) const override;
    void adjoint_sq(const Vector& u, Vector& out) const override;

private:
    Matrix X_;
    Matrix X2_;
};

/**
 * Static form of a time-varying-parameter regression y_t = x_t (b + b_t) + e_t.
 *
 * The implicit T x (T+1)p matrix has row t equal to
 *   [ x_t | 0 ... 0 | x_t | 0 ... 0 ]
 * with the first block (columns [0, p)) multiplying the constant part b and
 * block t+1 (columns [(t+1)p, (t+2)p)) multiplying the deviation b_t. Only the
 * T x p base rows are stored; each product is O(Tp).
 */
class TvpDesignOperator final : public DesignOperator {
public:
    /// Throws ArgumentError for an empty base or non-finite entries.
    explicit TvpDesignOperator(const Matrix& baseRows);

    [[nodiscard]] Eigen::Index rows() const noexcept override { return base_.rows(); }
    [[nodiscard]] Eigen::Index cols() const noexcept override {
        return (base_.rows() + 1) * base_.cols();
    }
    [[nodiscard]] Eigen::Index periods() const noexcept { return base_.rows(); }
    [[nodiscard]] Eigen::Index regressors() const noexcept { return base_.cols(); }
    [[nodiscard]] const RowMatrix& base_rows() const noexcept { return base_; }

    void forward(const Vector& v, Vector& out) const override;
    void adjoint(const Vector& u, Vector& out) const override;
    void forward_sq(const Vector& v, Vector& out) const override;
    void adjoint_sq(const Vector& u, Vector& out) const override;

private:
    RowMatrix base_;
};

TvpDesignOperator build_tvp_operator(const Matrix& baseRows);

Vector op_forward(const DesignOperator& A, const Vector& v);
Vector op_adjoint(const DesignOperator& A, const Vector& u);
Vector op_forward_sq(const DesignOperator& A, const Vector& v);
Vector op_adjoint_sq(const DesignOperator& A, const Vector& u);

/// beta_t = constant + deviations_t for each period.
struct CoefficientPath {
    Vector constant;    // p
    Matrix deviations;  // T x p
    Matrix combined;    // T x p

    /// Splits a static-form coefficient vector of length (T+1)p.
    static CoefficientPath from_static(const TvpDesignOperator& A, const Vector& beta);
    /// Constant-coefficient path: every row equals `beta`.
    static CoefficientPath constant_path(const Vector& beta, Eigen::Index periods);
};

}  // namespace tvpgamp
