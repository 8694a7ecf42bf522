#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace dqmesq {

using Complex = std::complex<double>;
using index_t = std::int64_t;

// Complex sparse matrix in canonical (row-major sorted, duplicate-free) COO
// form. All ladder operators, superoperator lifts and generators are built
// from these. Immutable after construction apart from an internal CSR cache
// used to speed up matvec.
class SparseOperator {
public:
    struct Entry {
        index_t row;
        index_t col;
        Complex value;
    };

    SparseOperator() = default;
    explicit SparseOperator(index_t dim) : dim_(dim) {}

    static SparseOperator identity(index_t dim);
    static SparseOperator zero(index_t dim) { return SparseOperator(dim); }
    // Sorts, merges duplicates and drops entries with |value| <= drop_tol.
    static SparseOperator from_entries(index_t dim, std::vector<Entry> raw,
                                       double drop_tol = 0.0);
    static SparseOperator from_dense(const Eigen::MatrixXcd& m,
                                     double drop_tol = 0.0);

    index_t dim() const { return dim_; }
    index_t nnz() const { return static_cast<index_t>(entries_.size()); }
    const std::vector<Entry>& entries() const { return entries_; }

    SparseOperator operator+(const SparseOperator& other) const;
    SparseOperator operator-(const SparseOperator& other) const;
    SparseOperator operator*(const SparseOperator& other) const;
    SparseOperator scaled(Complex factor) const;
    SparseOperator adjoint() const;
    SparseOperator transpose() const;

    static SparseOperator kron(const SparseOperator& a, const SparseOperator& b);

    // y = A x (overwrites y). Pointers must reference dim() elements.
    void apply(const Complex* x, Complex* y) const;
    // y += alpha * A x
    void apply_add(const Complex* x, Complex* y, Complex alpha) const;
    Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const;

    // Restriction to a subset of basis states: keep[i] is the original index
    // of the i-th retained state. Entries outside the subset are dropped.
    SparseOperator restricted(const std::vector<index_t>& keep) const;
    // Scatter into a larger space: place[i] is the target index of basis
    // state i. Used to embed operators into zero-padded qubit spaces.
    SparseOperator scattered(index_t new_dim, const std::vector<index_t>& place) const;

    Eigen::MatrixXcd dense() const;
    double max_abs() const;
    bool is_hermitian(double tol) const;

private:
    void build_csr() const;

    index_t dim_ = 0;
    std::vector<Entry> entries_;

    // matvec cache
    mutable std::vector<index_t> csr_rowptr_;
    mutable std::vector<index_t> csr_col_;
    mutable std::vector<Complex> csr_val_;
};

} // namespace dqmesq
