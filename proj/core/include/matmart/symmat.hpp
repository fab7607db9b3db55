#pragma once

#include <initializer_list>
#include <span>
#include <vector>

namespace matmart {

class RectMatrix;

/// Dense real symmetric matrix.
///
/// Symmetry is enforced at construction: the input is averaged with its
/// transpose and the result is stored so that entry (i,j) and entry (j,i)
/// are the same double, exactly. Inputs whose asymmetry exceeds
/// 1e-8 * max|entry| are rejected, as are non-finite entries.
class SymMatrix {
public:
    /// Zero matrix of the given dimension (dim >= 1).
    explicit SymMatrix(int dim);

    /// Build from row-major entries (size dim*dim), symmetrizing.
    SymMatrix(int dim, std::span<const double> row_major);

    /// Build from nested braces: SymMatrix({{0, 1}, {1, 0}}).
    SymMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static SymMatrix zero(int dim) { return SymMatrix(dim); }
    static SymMatrix identity(int dim);
    static SymMatrix diagonal(std::span<const double> entries);
    static SymMatrix diagonal(std::initializer_list<double> entries);

    int dim() const { return dim_; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * dim_ + j]; }
    std::span<const double> data() const { return a_; }

    /// In-place *this += factor * other. Preserves exact symmetry.
    void add_scaled(const SymMatrix& other, double factor);

    /// Matrix square A*A (symmetric since A is).
    SymMatrix square() const;

    double trace() const;
    double max_abs() const;
    double frobenius_norm() const;

    friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
    friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
    friend SymMatrix operator*(double factor, const SymMatrix& a);

private:
    struct Unchecked {};
    SymMatrix(Unchecked, int dim, std::vector<double> entries);

    int dim_;
    std::vector<double> a_;  // row-major, exactly symmetric

    friend class RectMatrix;
    friend SymMatrix dilation(const RectMatrix& b);
    friend SymMatrix spectral_map(const SymMatrix& a, double (*fn)(double));
};

/// Dense rectangular matrix; all entries must be finite.
class RectMatrix {
public:
    RectMatrix(int rows, int cols);  // zero-filled
    RectMatrix(int rows, int cols, std::span<const double> row_major);
    RectMatrix(std::initializer_list<std::initializer_list<double>> rows);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }
    double& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    std::span<const double> data() const { return a_; }

    RectMatrix transpose() const;

    /// Gram matrix B^T B, exactly symmetric.
    SymMatrix gram() const;

    double max_abs() const;

private:
    int rows_, cols_;
    std::vector<double> a_;
};

/// Result of eigh(): eigenvalues ascending, eigenvectors as the columns
/// of an orthogonal matrix, A = Q diag(lambda) Q^T.
struct EigenDecomposition {
    std::vector<double> eigenvalues;  // nondecreasing
    RectMatrix eigenvectors;          // column k pairs with eigenvalues[k]
};

/// Outcome of a semidefinite-order comparison A <= B.
struct PsdComparison {
    bool leq;       // margin >= -tol
    double margin;  // lambda_min(B - A)
};

/// Full eigendecomposition by cyclic Jacobi rotations.
///
/// Deterministic for a fixed input. Convergence target: off-diagonal
/// Frobenius norm <= 1e-13 * ||A||_F, capped at 100 sweeps; the cap being
/// reached raises NumericalError naming the dimension.
EigenDecomposition eigh(const SymMatrix& a);

/// Spectral-mapping exponential Q exp(Lambda) Q^T.
SymMatrix matrix_exp(const SymMatrix& a);

/// Spectral-mapping logarithm; requires lambda_min(A) > 1e-12 * max(1, ||A||).
/// Throws std::domain_error("matrix not positive definite") otherwise.
SymMatrix matrix_log(const SymMatrix& a);

/// Algebraically largest / smallest eigenvalue.
double lambda_max(const SymMatrix& a);
double lambda_min(const SymMatrix& a);

/// Spectral norm: max |eigenvalue| for symmetric, largest singular value
/// (computed through the self-adjoint dilation) for rectangular.
double spectral_norm(const SymMatrix& a);
double spectral_norm(const RectMatrix& b);

/// Self-adjoint dilation [[0, B], [B^T, 0]] of a d1 x d2 matrix.
/// lambda_max of the dilation equals the spectral norm of B.
SymMatrix dilation(const RectMatrix& b);

/// Scale-relative default tolerance for psd_order_leq.
double default_psd_tol(const SymMatrix& a, const SymMatrix& b);

/// Semidefinite-order test A <= B: margin = lambda_min(B - A),
/// true iff margin >= -tol.
PsdComparison psd_order_leq(const SymMatrix& a, const SymMatrix& b, double tol);
PsdComparison psd_order_leq(const SymMatrix& a, const SymMatrix& b);

/// tr exp(A), evaluated in shifted form exp(lmax) * sum_i exp(l_i - lmax)
/// so intermediate terms never overflow before the result does.
double trace_exp(const SymMatrix& a);

}  // namespace matmart
