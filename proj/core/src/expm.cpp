#include "dqmesq/expm.hpp"

#include <cmath>

#include "dqmesq/errors.hpp"

namespace dqmesq {

HermitianExponential::HermitianExponential(SparseOperator h, Complex scale, index_t dense_limit,
                                           double lanczos_tol)
    : h_(std::move(h)), scale_(scale), tol_(lanczos_tol) {
    if (!h_.is_hermitian(1e-11 * std::max(1.0, h_.max_abs())))
        throw config_error("HermitianExponential needs a Hermitian generator");
    if (h_.dim() <= dense_limit) {
        dense_ = true;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h_.dense());
        const Eigen::VectorXcd phases =
            (scale_ * es.eigenvalues().cast<Complex>().array()).exp();
        u_ = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    }
}

void HermitianExponential::apply_in_place(Eigen::VectorXcd& v) const {
    if (v.size() != h_.dim()) throw dimension_mismatch("HermitianExponential apply");
    if (dense_) {
        v = u_ * v;
        return;
    }
    lanczos_apply(v);
}

// Lanczos with full reorthogonalization; the Krylov size grows until the
// a-posteriori residual estimate drops below tol. ||scale*H|| is small for
// every per-step exponential here, so convergence takes a handful of
// iterations.
void HermitianExponential::lanczos_apply(Eigen::VectorXcd& v) const {
    const double norm0 = v.norm();
    if (norm0 == 0.0) return;
    const index_t n = h_.dim();

    std::vector<Eigen::VectorXcd> basis;
    basis.push_back(v / norm0);
    std::vector<double> alpha, beta;   // tridiagonal coefficients
    Eigen::VectorXcd w(n);

    Eigen::VectorXcd small_result;
    double prev_estimate = -1.0;
    for (int m = 1; m <= max_krylov_; ++m) {
        h_.apply(basis.back().data(), w.data());
        const Complex a = basis.back().dot(w);
        alpha.push_back(a.real());
        w -= a * basis.back();
        if (m >= 2) w -= beta.back() * basis[m - 2];
        // full reorthogonalization keeps the basis clean at machine precision
        for (const auto& b : basis) w -= b.dot(w) * b;
        const double bnorm = w.norm();

        // exp of the small tridiagonal block
        Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) t(i, i) = alpha[i];
        for (int i = 0; i + 1 < m; ++i) t(i, i + 1) = t(i + 1, i) = beta[i];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
        const Eigen::VectorXcd phases =
            (scale_ * es.eigenvalues().cast<Complex>().array()).exp();
        const Eigen::VectorXcd e1 = es.eigenvectors().row(0).transpose().cast<Complex>();
        small_result = es.eigenvectors().cast<Complex>() * (phases.array() * e1.array()).matrix();

        const double estimate = bnorm * std::abs(small_result[m - 1]) * std::abs(scale_);
        if (bnorm < 1e-14 || estimate < tol_ ||
            (prev_estimate >= 0.0 && estimate < 1e-1 * tol_)) {
            break;
        }
        prev_estimate = estimate;
        if (m == max_krylov_) break;
        beta.push_back(bnorm);
        basis.push_back(w / bnorm);
    }

    v.setZero();
    for (std::size_t i = 0; i < basis.size(); ++i) v += (norm0 * small_result[i]) * basis[i];
}

} // namespace dqmesq
