#pragma once

#include <Eigen/Dense>

#include "dqmesq/sparse.hpp"

namespace dqmesq {

// Applies exp(scale * H) for Hermitian H. Small problems precompute the
// dense exponential from an eigendecomposition; larger ones fall back to a
// matrix-free Lanczos evaluation converged to machine precision.
class HermitianExponential {
public:
    HermitianExponential(SparseOperator h, Complex scale, index_t dense_limit = 4096,
                         double lanczos_tol = 1e-13);

    void apply_in_place(Eigen::VectorXcd& v) const;
    Eigen::VectorXcd apply(Eigen::VectorXcd v) const {
        apply_in_place(v);
        return v;
    }
    bool dense() const { return dense_; }
    const Eigen::MatrixXcd& dense_matrix() const { return u_; }

private:
    void lanczos_apply(Eigen::VectorXcd& v) const;

    SparseOperator h_;
    Complex scale_;
    bool dense_ = false;
    Eigen::MatrixXcd u_;
    double tol_;
    int max_krylov_ = 160;
};

} // namespace dqmesq
