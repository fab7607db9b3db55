#include "matmart/symmat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "matmart/errors.hpp"

namespace matmart {

namespace {

void require(bool cond, const char* message) {
    if (!cond) throw std::invalid_argument(message);
}

void check_finite(std::span<const double> entries, const char* what) {
    for (double v : entries) {
        if (!std::isfinite(v)) throw std::invalid_argument(std::string(what) + " has non-finite entries");
    }
}

// Scaled accumulation of sqrt(sum v_i^2), safe against overflow of v^2.
class SumOfSquares {
public:
    void add(double v) {
        if (v == 0.0) return;
        const double av = std::abs(v);
        if (scale_ < av) {
            const double r = scale_ / av;
            sum_ = 1.0 + sum_ * r * r;
            scale_ = av;
        } else {
            const double r = av / scale_;
            sum_ += r * r;
        }
    }
    double norm() const { return scale_ * std::sqrt(sum_); }

private:
    double scale_ = 0.0;
    double sum_ = 1.0;
};

}  // namespace

SymMatrix::SymMatrix(int dim) : dim_(dim) {
    require(dim >= 1, "SymMatrix dimension must be positive");
    a_.assign(static_cast<size_t>(dim) * dim, 0.0);
}

SymMatrix::SymMatrix(int dim, std::span<const double> row_major) : dim_(dim) {
    require(dim >= 1, "SymMatrix dimension must be positive");
    require(row_major.size() == static_cast<size_t>(dim) * dim, "SymMatrix entry count does not match dimension");
    check_finite(row_major, "SymMatrix");

    double scale = 0.0;
    for (double v : row_major) scale = std::max(scale, std::abs(v));
    double max_asym = 0.0;
    for (int i = 0; i < dim; ++i) {
        for (int j = i + 1; j < dim; ++j) {
            max_asym = std::max(max_asym,
                                std::abs(row_major[static_cast<size_t>(i) * dim + j] -
                                         row_major[static_cast<size_t>(j) * dim + i]));
        }
    }
    require(max_asym <= 1e-8 * scale, "SymMatrix input is not symmetric");

    a_.resize(static_cast<size_t>(dim) * dim);
    for (int i = 0; i < dim; ++i) {
        a_[static_cast<size_t>(i) * dim + i] = row_major[static_cast<size_t>(i) * dim + i];
        for (int j = i + 1; j < dim; ++j) {
            const double avg = 0.5 * (row_major[static_cast<size_t>(i) * dim + j] +
                                      row_major[static_cast<size_t>(j) * dim + i]);
            a_[static_cast<size_t>(i) * dim + j] = avg;
            a_[static_cast<size_t>(j) * dim + i] = avg;
        }
    }
}

SymMatrix::SymMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : SymMatrix(static_cast<int>(rows.size()), [&rows] {
          std::vector<double> flat;
          flat.reserve(rows.size() * rows.size());
          for (const auto& row : rows) {
              if (row.size() != rows.size()) throw std::invalid_argument("SymMatrix initializer is not square");
              flat.insert(flat.end(), row.begin(), row.end());
          }
          return flat;
      }()) {}

SymMatrix::SymMatrix(Unchecked, int dim, std::vector<double> entries)
    : dim_(dim), a_(std::move(entries)) {}

SymMatrix SymMatrix::identity(int dim) {
    SymMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.a_[static_cast<size_t>(i) * dim + i] = 1.0;
    return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> entries) {
    SymMatrix m(static_cast<int>(entries.size()));
    check_finite(entries, "diagonal");
    for (int i = 0; i < m.dim_; ++i) m.a_[static_cast<size_t>(i) * m.dim_ + i] = entries[i];
    return m;
}

SymMatrix SymMatrix::diagonal(std::initializer_list<double> entries) {
    return diagonal(std::span<const double>(entries.begin(), entries.size()));
}

void SymMatrix::add_scaled(const SymMatrix& other, double factor) {
    require(other.dim_ == dim_, "dimension mismatch");
    for (size_t i = 0; i < a_.size(); ++i) a_[i] += factor * other.a_[i];
}

SymMatrix SymMatrix::square() const {
    std::vector<double> c(a_.size());
    const int d = dim_;
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += a_[static_cast<size_t>(i) * d + k] * a_[static_cast<size_t>(j) * d + k];
            c[static_cast<size_t>(i) * d + j] = s;
            c[static_cast<size_t>(j) * d + i] = s;
        }
    }
    return SymMatrix(Unchecked{}, d, std::move(c));
}

double SymMatrix::trace() const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += a_[static_cast<size_t>(i) * dim_ + i];
    return s;
}

double SymMatrix::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
}

double SymMatrix::frobenius_norm() const {
    SumOfSquares acc;
    for (double v : a_) acc.add(v);
    return acc.norm();
}

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
    require(a.dim_ == b.dim_, "dimension mismatch");
    std::vector<double> c(a.a_.size());
    for (size_t i = 0; i < c.size(); ++i) c[i] = a.a_[i] + b.a_[i];
    return SymMatrix(SymMatrix::Unchecked{}, a.dim_, std::move(c));
}

SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
    require(a.dim_ == b.dim_, "dimension mismatch");
    std::vector<double> c(a.a_.size());
    for (size_t i = 0; i < c.size(); ++i) c[i] = a.a_[i] - b.a_[i];
    return SymMatrix(SymMatrix::Unchecked{}, a.dim_, std::move(c));
}

SymMatrix operator*(double factor, const SymMatrix& a) {
    std::vector<double> c(a.a_.size());
    for (size_t i = 0; i < c.size(); ++i) c[i] = factor * a.a_[i];
    return SymMatrix(SymMatrix::Unchecked{}, a.dim_, std::move(c));
}

RectMatrix::RectMatrix(int rows, int cols) : rows_(rows), cols_(cols) {
    require(rows >= 1 && cols >= 1, "RectMatrix dimensions must be positive");
    a_.assign(static_cast<size_t>(rows) * cols, 0.0);
}

RectMatrix::RectMatrix(int rows, int cols, std::span<const double> row_major)
    : rows_(rows), cols_(cols) {
    require(rows >= 1 && cols >= 1, "RectMatrix dimensions must be positive");
    require(row_major.size() == static_cast<size_t>(rows) * cols, "RectMatrix entry count does not match shape");
    check_finite(row_major, "RectMatrix");
    a_.assign(row_major.begin(), row_major.end());
}

RectMatrix::RectMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : RectMatrix(static_cast<int>(rows.size()),
                 rows.size() ? static_cast<int>(rows.begin()->size()) : 0, [&rows] {
                     std::vector<double> flat;
                     for (const auto& row : rows) {
                         if (row.size() != rows.begin()->size())
                             throw std::invalid_argument("RectMatrix initializer rows differ in length");
                         flat.insert(flat.end(), row.begin(), row.end());
                     }
                     return flat;
                 }()) {}

RectMatrix RectMatrix::transpose() const {
    RectMatrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

SymMatrix RectMatrix::gram() const {
    std::vector<double> g(static_cast<size_t>(cols_) * cols_);
    for (int i = 0; i < cols_; ++i) {
        for (int j = i; j < cols_; ++j) {
            double s = 0.0;
            for (int k = 0; k < rows_; ++k) s += (*this)(k, i) * (*this)(k, j);
            g[static_cast<size_t>(i) * cols_ + j] = s;
            g[static_cast<size_t>(j) * cols_ + i] = s;
        }
    }
    return SymMatrix(SymMatrix::Unchecked{}, cols_, std::move(g));
}

double RectMatrix::max_abs() const {
    double m = 0.0;
    for (double v : a_) m = std::max(m, std::abs(v));
    return m;
}

namespace {

double offdiag_frobenius(const std::vector<double>& m, int d) {
    SumOfSquares acc;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            const double v = m[static_cast<size_t>(i) * d + j];
            acc.add(v);
            acc.add(v);
        }
    return acc.norm();
}

}  // namespace

EigenDecomposition eigh(const SymMatrix& a) {
    const int d = a.dim();
    std::vector<double> m(a.data().begin(), a.data().end());
    std::vector<double> q(static_cast<size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i) q[static_cast<size_t>(i) * d + i] = 1.0;

    const double target = 1e-13 * a.frobenius_norm();
    constexpr int kMaxSweeps = 100;

    bool converged = false;
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        if (offdiag_frobenius(m, d) <= target) {
            converged = true;
            break;
        }
        for (int p = 0; p < d - 1; ++p) {
            for (int col = p + 1; col < d; ++col) {
                const double apq = m[static_cast<size_t>(p) * d + col];
                if (apq == 0.0) continue;
                const double app = m[static_cast<size_t>(p) * d + p];
                const double aqq = m[static_cast<size_t>(col) * d + col];
                const double theta = (aqq - app) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 1.0 / (2.0 * theta);  // avoids overflow of theta^2
                } else {
                    t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                m[static_cast<size_t>(p) * d + p] = app - t * apq;
                m[static_cast<size_t>(col) * d + col] = aqq + t * apq;
                m[static_cast<size_t>(p) * d + col] = 0.0;
                m[static_cast<size_t>(col) * d + p] = 0.0;
                for (int k = 0; k < d; ++k) {
                    if (k == p || k == col) continue;
                    const double akp = m[static_cast<size_t>(k) * d + p];
                    const double akq = m[static_cast<size_t>(k) * d + col];
                    const double nkp = akp - s * (akq + tau * akp);
                    const double nkq = akq + s * (akp - tau * akq);
                    m[static_cast<size_t>(k) * d + p] = nkp;
                    m[static_cast<size_t>(p) * d + k] = nkp;
                    m[static_cast<size_t>(k) * d + col] = nkq;
                    m[static_cast<size_t>(col) * d + k] = nkq;
                }
                for (int k = 0; k < d; ++k) {
                    const double vkp = q[static_cast<size_t>(k) * d + p];
                    const double vkq = q[static_cast<size_t>(k) * d + col];
                    q[static_cast<size_t>(k) * d + p] = vkp - s * (vkq + tau * vkp);
                    q[static_cast<size_t>(k) * d + col] = vkq + s * (vkp - tau * vkq);
                }
            }
        }
    }
    if (!converged && offdiag_frobenius(m, d) > target) {
        throw NumericalError("eigendecomposition failed to converge for dimension " + std::to_string(d) + " matrix");
    }

    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&m, d](int i, int j) {
        return m[static_cast<size_t>(i) * d + i] < m[static_cast<size_t>(j) * d + j];
    });

    EigenDecomposition result{std::vector<double>(d), RectMatrix(d, d)};
    for (int j = 0; j < d; ++j) {
        const int src = order[j];
        result.eigenvalues[j] = m[static_cast<size_t>(src) * d + src];
        for (int i = 0; i < d; ++i) result.eigenvectors(i, j) = q[static_cast<size_t>(i) * d + src];
    }
    return result;
}

SymMatrix spectral_map(const SymMatrix& a, double (*fn)(double)) {
    const EigenDecomposition eig = eigh(a);
    const int d = a.dim();
    std::vector<double> mapped(d);
    for (int k = 0; k < d; ++k) mapped[k] = fn(eig.eigenvalues[k]);

    std::vector<double> c(static_cast<size_t>(d) * d);
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            double s = 0.0;
            for (int k = 0; k < d; ++k) s += eig.eigenvectors(i, k) * mapped[k] * eig.eigenvectors(j, k);
            c[static_cast<size_t>(i) * d + j] = s;
            c[static_cast<size_t>(j) * d + i] = s;
        }
    }
    return SymMatrix(SymMatrix::Unchecked{}, d, std::move(c));
}

SymMatrix matrix_exp(const SymMatrix& a) {
    return spectral_map(a, [](double x) { return std::exp(x); });
}

SymMatrix matrix_log(const SymMatrix& a) {
    const EigenDecomposition eig = eigh(a);
    const double norm = std::max(std::abs(eig.eigenvalues.front()), std::abs(eig.eigenvalues.back()));
    if (eig.eigenvalues.front() <= 1e-12 * std::max(1.0, norm)) {
        throw std::domain_error("matrix not positive definite");
    }
    return spectral_map(a, [](double x) { return std::log(x); });
}

double lambda_max(const SymMatrix& a) {
    if (a.dim() == 1) return a(0, 0);
    return eigh(a).eigenvalues.back();
}

double lambda_min(const SymMatrix& a) {
    if (a.dim() == 1) return a(0, 0);
    return eigh(a).eigenvalues.front();
}

double spectral_norm(const SymMatrix& a) {
    if (a.dim() == 1) return std::abs(a(0, 0));
    const auto& ev = eigh(a).eigenvalues;
    return std::max(std::abs(ev.front()), std::abs(ev.back()));
}

double spectral_norm(const RectMatrix& b) { return lambda_max(dilation(b)); }

SymMatrix dilation(const RectMatrix& b) {
    const int d1 = b.rows(), d2 = b.cols();
    const int d = d1 + d2;
    std::vector<double> c(static_cast<size_t>(d) * d, 0.0);
    for (int i = 0; i < d1; ++i) {
        for (int j = 0; j < d2; ++j) {
            c[static_cast<size_t>(i) * d + (d1 + j)] = b(i, j);
            c[static_cast<size_t>(d1 + j) * d + i] = b(i, j);
        }
    }
    return SymMatrix(SymMatrix::Unchecked{}, d, std::move(c));
}

double default_psd_tol(const SymMatrix& a, const SymMatrix& b) {
    return 1e-9 * std::max({1.0, spectral_norm(a), spectral_norm(b)});
}

PsdComparison psd_order_leq(const SymMatrix& a, const SymMatrix& b, double tol) {
    if (a.dim() != b.dim()) throw std::invalid_argument("dimension mismatch");
    const double margin = lambda_min(b - a);
    return PsdComparison{margin >= -tol, margin};
}

PsdComparison psd_order_leq(const SymMatrix& a, const SymMatrix& b) {
    return psd_order_leq(a, b, default_psd_tol(a, b));
}

double trace_exp(const SymMatrix& a) {
    const auto ev = (a.dim() == 1) ? std::vector<double>{a(0, 0)} : eigh(a).eigenvalues;
    const double shift = *std::max_element(ev.begin(), ev.end());
    double s = 0.0;
    for (double v : ev) s += std::exp(v - shift);
    return std::exp(shift) * s;
}

}  // namespace matmart
