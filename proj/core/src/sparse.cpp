#include "dqmesq/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "dqmesq/errors.hpp"

namespace dqmesq {

SparseOperator SparseOperator::identity(index_t dim) {
    SparseOperator op(dim);
    op.entries_.reserve(dim);
    for (index_t i = 0; i < dim; ++i) op.entries_.push_back({i, i, Complex(1.0, 0.0)});
    return op;
}

SparseOperator SparseOperator::from_entries(index_t dim, std::vector<Entry> raw,
                                            double drop_tol) {
    for (const auto& e : raw) {
        if (e.row < 0 || e.row >= dim || e.col < 0 || e.col >= dim)
            throw index_out_of_range("sparse entry outside matrix of dim " + std::to_string(dim));
    }
    std::sort(raw.begin(), raw.end(), [](const Entry& a, const Entry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    SparseOperator op(dim);
    op.entries_.reserve(raw.size());
    for (const auto& e : raw) {
        if (!op.entries_.empty() && op.entries_.back().row == e.row &&
            op.entries_.back().col == e.col) {
            op.entries_.back().value += e.value;
        } else {
            op.entries_.push_back(e);
        }
    }
    auto last = std::remove_if(op.entries_.begin(), op.entries_.end(), [&](const Entry& e) {
        return std::abs(e.value) <= drop_tol;
    });
    op.entries_.erase(last, op.entries_.end());
    return op;
}

SparseOperator SparseOperator::from_dense(const Eigen::MatrixXcd& m, double drop_tol) {
    if (m.rows() != m.cols()) throw dimension_mismatch("from_dense requires a square matrix");
    std::vector<Entry> raw;
    for (index_t i = 0; i < m.rows(); ++i)
        for (index_t j = 0; j < m.cols(); ++j)
            if (std::abs(m(i, j)) > drop_tol) raw.push_back({i, j, m(i, j)});
    return from_entries(m.rows(), std::move(raw));
}

SparseOperator SparseOperator::operator+(const SparseOperator& other) const {
    if (dim_ != other.dim_) throw dimension_mismatch("sparse add");
    std::vector<Entry> merged;
    merged.reserve(entries_.size() + other.entries_.size());
    merged.insert(merged.end(), entries_.begin(), entries_.end());
    merged.insert(merged.end(), other.entries_.begin(), other.entries_.end());
    return from_entries(dim_, std::move(merged));
}

SparseOperator SparseOperator::operator-(const SparseOperator& other) const {
    return *this + other.scaled(Complex(-1.0, 0.0));
}

SparseOperator SparseOperator::operator*(const SparseOperator& other) const {
    if (dim_ != other.dim_) throw dimension_mismatch("sparse multiply");
    other.build_csr();
    std::vector<Entry> raw;
    // entries_ is row sorted, so products come out grouped by row
    std::unordered_map<index_t, Complex> row_acc;
    index_t current_row = -1;
    auto flush = [&]() {
        for (const auto& [col, val] : row_acc)
            if (val != Complex(0.0, 0.0)) raw.push_back({current_row, col, val});
        row_acc.clear();
    };
    for (const auto& e : entries_) {
        if (e.row != current_row) {
            if (current_row >= 0) flush();
            current_row = e.row;
        }
        for (index_t p = other.csr_rowptr_[e.col]; p < other.csr_rowptr_[e.col + 1]; ++p)
            row_acc[other.csr_col_[p]] += e.value * other.csr_val_[p];
    }
    if (current_row >= 0) flush();
    return from_entries(dim_, std::move(raw));
}

SparseOperator SparseOperator::scaled(Complex factor) const {
    SparseOperator op(dim_);
    op.entries_ = entries_;
    for (auto& e : op.entries_) e.value *= factor;
    return op;
}

SparseOperator SparseOperator::adjoint() const {
    std::vector<Entry> raw;
    raw.reserve(entries_.size());
    for (const auto& e : entries_) raw.push_back({e.col, e.row, std::conj(e.value)});
    return from_entries(dim_, std::move(raw));
}

SparseOperator SparseOperator::transpose() const {
    std::vector<Entry> raw;
    raw.reserve(entries_.size());
    for (const auto& e : entries_) raw.push_back({e.col, e.row, e.value});
    return from_entries(dim_, std::move(raw));
}

SparseOperator SparseOperator::kron(const SparseOperator& a, const SparseOperator& b) {
    std::vector<Entry> raw;
    raw.reserve(a.entries_.size() * b.entries_.size());
    const index_t db = b.dim_;
    for (const auto& ea : a.entries_)
        for (const auto& eb : b.entries_)
            raw.push_back({ea.row * db + eb.row, ea.col * db + eb.col, ea.value * eb.value});
    return from_entries(a.dim_ * db, std::move(raw));
}

void SparseOperator::build_csr() const {
    if (!csr_rowptr_.empty() || dim_ == 0) return;
    csr_rowptr_.assign(dim_ + 1, 0);
    csr_col_.resize(entries_.size());
    csr_val_.resize(entries_.size());
    for (const auto& e : entries_) ++csr_rowptr_[e.row + 1];
    for (index_t r = 0; r < dim_; ++r) csr_rowptr_[r + 1] += csr_rowptr_[r];
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        csr_col_[k] = entries_[k].col;
        csr_val_[k] = entries_[k].value;
    }
}

void SparseOperator::apply(const Complex* x, Complex* y) const {
    build_csr();
    for (index_t r = 0; r < dim_; ++r) {
        Complex acc(0.0, 0.0);
        for (index_t p = csr_rowptr_[r]; p < csr_rowptr_[r + 1]; ++p)
            acc += csr_val_[p] * x[csr_col_[p]];
        y[r] = acc;
    }
}

void SparseOperator::apply_add(const Complex* x, Complex* y, Complex alpha) const {
    build_csr();
    for (index_t r = 0; r < dim_; ++r) {
        Complex acc(0.0, 0.0);
        for (index_t p = csr_rowptr_[r]; p < csr_rowptr_[r + 1]; ++p)
            acc += csr_val_[p] * x[csr_col_[p]];
        y[r] += alpha * acc;
    }
}

Eigen::VectorXcd SparseOperator::apply(const Eigen::VectorXcd& x) const {
    if (x.size() != dim_) throw dimension_mismatch("matvec size");
    Eigen::VectorXcd y(dim_);
    apply(x.data(), y.data());
    return y;
}

SparseOperator SparseOperator::restricted(const std::vector<index_t>& keep) const {
    std::vector<index_t> where(dim_, -1);
    for (std::size_t i = 0; i < keep.size(); ++i) where[keep[i]] = static_cast<index_t>(i);
    std::vector<Entry> raw;
    for (const auto& e : entries_) {
        const index_t r = where[e.row];
        const index_t c = where[e.col];
        if (r >= 0 && c >= 0) raw.push_back({r, c, e.value});
    }
    return from_entries(static_cast<index_t>(keep.size()), std::move(raw));
}

SparseOperator SparseOperator::scattered(index_t new_dim, const std::vector<index_t>& place) const {
    if (static_cast<index_t>(place.size()) != dim_)
        throw dimension_mismatch("scatter map size");
    std::vector<Entry> raw;
    raw.reserve(entries_.size());
    for (const auto& e : entries_) raw.push_back({place[e.row], place[e.col], e.value});
    return from_entries(new_dim, std::move(raw));
}

Eigen::MatrixXcd SparseOperator::dense() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim_, dim_);
    for (const auto& e : entries_) m(e.row, e.col) += e.value;
    return m;
}

double SparseOperator::max_abs() const {
    double m = 0.0;
    for (const auto& e : entries_) m = std::max(m, std::abs(e.value));
    return m;
}

bool SparseOperator::is_hermitian(double tol) const {
    return (*this - adjoint()).max_abs() <= tol;
}

} // namespace dqmesq
