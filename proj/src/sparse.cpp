#include "fluxrec/sparse.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace fluxrec {

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols) {}

void SparseMatrix::add(std::size_t row, std::size_t col, double value) {
    if (finalized_) throw std::logic_error("SparseMatrix::add after finalize");
    if (row >= rows_ || col >= cols_) throw std::out_of_range("SparseMatrix::add index out of range");
    coo_.push_back({row, col, value});
}

void SparseMatrix::finalize() {
    if (finalized_) return;
    std::sort(coo_.begin(), coo_.end(), [](const Triplet &a, const Triplet &b) {
        if (a.row != b.row) return a.row < b.row;
        if (a.col != b.col) return a.col < b.col;
        return a.value < b.value;
    });
    row_ptr_.assign(rows_ + 1, 0);
    col_.clear();
    val_.clear();
    for (std::size_t k = 0; k < coo_.size();) {
        const std::size_t r = coo_[k].row;
        const std::size_t c = coo_[k].col;
        double sum = 0.0;
        for (; k < coo_.size() && coo_[k].row == r && coo_[k].col == c; ++k) sum += coo_[k].value;
        col_.push_back(c);
        val_.push_back(sum);
        ++row_ptr_[r + 1];
    }
    for (std::size_t r = 0; r < rows_; ++r) row_ptr_[r + 1] += row_ptr_[r];
    coo_.clear();
    coo_.shrink_to_fit();
    finalized_ = true;
}

void SparseMatrix::require_finalized() const {
    if (!finalized_) throw std::logic_error("SparseMatrix used before finalize");
}

std::vector<double> SparseMatrix::multiply(std::span<const double> x) const {
    require_finalized();
    if (x.size() != cols_) throw std::invalid_argument("SparseMatrix::multiply dimension mismatch");
    std::vector<double> y(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
        double s = 0.0;
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += val_[k] * x[col_[k]];
        y[r] = s;
    }
    return y;
}

std::vector<double> SparseMatrix::diagonal() const {
    std::vector<double> d(std::min(rows_, cols_), 0.0);
    for (std::size_t r = 0; r < d.size(); ++r) d[r] = at(r, r);
    return d;
}

double SparseMatrix::at(std::size_t row, std::size_t col) const {
    require_finalized();
    const auto begin = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
    const auto end = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
    const auto it = std::lower_bound(begin, end, col);
    if (it == end || *it != col) return 0.0;
    return val_[static_cast<std::size_t>(it - col_.begin())];
}

std::vector<double> SparseMatrix::to_dense() const {
    require_finalized();
    std::vector<double> dense(rows_ * cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) dense[r * cols_ + col_[k]] = val_[k];
    return dense;
}

double euclidean_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double relative_residual(const SparseMatrix &a, std::span<const double> x, std::span<const double> b) {
    const auto ax = a.multiply(x);
    double r2 = 0.0;
    for (std::size_t i = 0; i < ax.size(); ++i) r2 += (ax[i] - b[i]) * (ax[i] - b[i]);
    const double bn = euclidean_norm(b);
    return bn > 0.0 ? std::sqrt(r2) / bn : std::sqrt(r2);
}

namespace {

void check_square(const SparseMatrix &a, std::size_t n_rhs) {
    if (!a.finalized()) throw std::logic_error("solver called on a non-finalized matrix");
    if (a.rows() != a.cols()) throw std::invalid_argument("solver requires a square matrix");
    if (a.rows() != n_rhs) throw std::invalid_argument("right-hand side dimension mismatch");
}

std::string residual_message(const char *what, double res) {
    std::ostringstream msg;
    msg << what << " (relative residual " << res << ")";
    return msg.str();
}

}  // namespace

std::vector<double> solve_spd(const SparseMatrix &a, std::span<const double> rhs, double rel_tol, SolveStats *stats) {
    check_square(a, rhs.size());
    const std::size_t n = rhs.size();
    std::vector<double> x(n, 0.0);
    const double bnorm = euclidean_norm(rhs);
    if (bnorm == 0.0) {
        if (stats) *stats = {0, 0.0};
        return x;
    }
    std::vector<double> inv_diag = a.diagonal();
    for (double &d : inv_diag) {
        if (!(d > 0.0)) throw SolverError("matrix is not positive definite (non-positive diagonal)", 1.0);
        d = 1.0 / d;
    }

    const std::size_t max_iter = std::max<std::size_t>(2000, 20 * n);
    std::vector<double> r(rhs.begin(), rhs.end()), z(n), p(n);
    std::size_t iter = 0;
    double res = 1.0;
    // Restarting from the true residual guards against drift of the recursive one.
    for (int restart = 0; restart < 5; ++restart) {
        const auto ax = a.multiply(x);
        for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ax[i];
        res = euclidean_norm(r) / bnorm;
        if (res <= rel_tol) break;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] = inv_diag[i] * r[i];
        double rz = 0.0;
        for (std::size_t i = 0; i < n; ++i) rz += r[i] * z[i];
        for (; iter < max_iter; ++iter) {
            const auto ap = a.multiply(p);
            double pap = 0.0;
            for (std::size_t i = 0; i < n; ++i) pap += p[i] * ap[i];
            if (!(pap > 0.0)) throw SolverError("matrix is not positive definite", res);
            const double alpha = rz / pap;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            if (euclidean_norm(r) / bnorm <= 0.5 * rel_tol) {
                ++iter;
                break;
            }
            double rz_new = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                z[i] = inv_diag[i] * r[i];
                rz_new += r[i] * z[i];
            }
            const double beta = rz_new / rz;
            rz = rz_new;
            for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        }
        if (iter >= max_iter) break;
    }
    res = relative_residual(a, x, rhs);
    if (stats) *stats = {iter, res};
    if (!(res <= rel_tol)) throw SolverError(residual_message("conjugate gradients did not converge", res), res);
    return x;
}

std::vector<double> solve_general(const SparseMatrix &a, std::span<const double> rhs, double rel_tol,
                                  SolveStats *stats) {
    check_square(a, rhs.size());
    const auto n = static_cast<Eigen::Index>(rhs.size());
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(a.nonzeros());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k)
            trips.emplace_back(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(a.col_index()[k]),
                               a.values()[k]);
    Eigen::SparseMatrix<double> m(n, n);
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(m);
    lu.factorize(m);
    if (lu.info() != Eigen::Success) throw SolverError("sparse LU factorization failed: matrix is singular", 1.0);

    const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n);
    Eigen::VectorXd x = lu.solve(b);
    if (lu.info() != Eigen::Success) throw SolverError("sparse LU solve failed", 1.0);

    const double bnorm = b.norm();
    auto rel = [&](const Eigen::VectorXd &xv) {
        const double r = (b - m * xv).norm();
        return bnorm > 0.0 ? r / bnorm : r;
    };
    double res = rel(x);
    std::size_t steps = 1;
    for (; steps < 4 && !(res <= rel_tol) && std::isfinite(res); ++steps) {
        x += lu.solve(b - m * x);
        res = rel(x);
    }
    if (stats) *stats = {steps, res};
    if (!(res <= rel_tol)) throw SolverError(residual_message("sparse LU missed the residual tolerance", res), res);
    return {x.data(), x.data() + n};
}

}  // namespace fluxrec
