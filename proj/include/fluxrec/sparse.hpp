#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fluxrec {

/// Sparse matrix assembled in coordinate form and finalized into CSR.
///
/// Duplicate coordinate entries are summed on finalization. Summation happens
/// in a canonical order, so permuting the coordinate entries yields a
/// bit-identical compressed matrix.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(std::size_t rows, std::size_t cols);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool finalized() const { return finalized_; }

    void add(std::size_t row, std::size_t col, double value);
    void finalize();

    const std::vector<std::size_t> &row_ptr() const { return row_ptr_; }
    const std::vector<std::size_t> &col_index() const { return col_; }
    const std::vector<double> &values() const { return val_; }
    std::size_t nonzeros() const { return val_.size(); }

    /// y = A x
    std::vector<double> multiply(std::span<const double> x) const;
    std::vector<double> diagonal() const;
    double at(std::size_t row, std::size_t col) const;
    /// Row-major dense copy; intended for tests and small oracles.
    std::vector<double> to_dense() const;

private:
    void require_finalized() const;

    struct Triplet {
        std::size_t row;
        std::size_t col;
        double value;
    };

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    bool finalized_ = false;
    std::vector<Triplet> coo_;
    std::vector<std::size_t> row_ptr_;
    std::vector<std::size_t> col_;
    std::vector<double> val_;
};

/// Thrown when a linear solve misses its residual contract.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string &what, double relative_residual)
        : std::runtime_error(what), relative_residual_(relative_residual) {}
    double relative_residual() const { return relative_residual_; }

private:
    double relative_residual_;
};

struct SolveStats {
    std::size_t iterations = 0;
    double relative_residual = 0.0;
};

double euclidean_norm(std::span<const double> v);
/// ||A x - b|| / ||b|| (or ||A x|| when b = 0).
double relative_residual(const SparseMatrix &a, std::span<const double> x, std::span<const double> b);

/// Jacobi-preconditioned conjugate gradients.
std::vector<double> solve_spd(const SparseMatrix &a, std::span<const double> rhs, double rel_tol,
                              SolveStats *stats = nullptr);

/// Sparse LU with a residual check and iterative refinement.
std::vector<double> solve_general(const SparseMatrix &a, std::span<const double> rhs, double rel_tol,
                                  SolveStats *stats = nullptr);

}  // namespace fluxrec
