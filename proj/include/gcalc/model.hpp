#pragma once

#include <functional>
#include <span>
#include <vector>

#include "gcalc/common.hpp"

namespace gcalc {

/// d x d real symmetric matrix. Only the upper triangle is stored, so
/// symmetry is exact by construction. Also used for quadratic-variation
/// increments.
class SymMatrix {
public:
    explicit SymMatrix(int dim);

    static SymMatrix zero(int dim) { return SymMatrix(dim); }
    static SymMatrix identity(int dim);
    static SymMatrix diagonal(std::span<const double> entries);

    int dim() const { return dim_; }

    double operator()(int i, int j) const { return a_[packed_index(i, j)]; }
    void set(int i, int j, double value) { a_[packed_index(i, j)] = value; }

    /// Frobenius inner product (A, B) = sum_ij a_ij b_ij.
    double inner(const SymMatrix& other) const;

    /// Quadratic form (A x, x).
    double quad(std::span<const double> x) const;

    SymMatrix& operator+=(const SymMatrix& other);
    SymMatrix& operator*=(double c);
    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
    friend SymMatrix operator*(double c, SymMatrix a) { return a *= c; }

    std::span<const double> packed() const { return a_; }

private:
    std::size_t packed_index(int i, int j) const;

    int dim_;
    std::vector<double> a_;  // upper triangle, row-major
};

enum class SigmaStructure {
    Scalar1D,      // d = 1, variance interval [sigma_lo2, sigma_hi2]
    DiagonalBox,   // all diagonal matrices with entries in [sigma_lo2, sigma_hi2]
};

/// The covariance-uncertainty set Sigma and its square-root set Gamma.
///
/// sigma_lo2/sigma_hi2 bound the covariance matrices themselves (per axis),
/// i.e. every sigma in Sigma satisfies sigma_lo2 I <= sigma <= sigma_hi2 I.
/// Volatility controls theta in Gamma then have diagonal entries in
/// [sqrt(sigma_lo2), sqrt(sigma_hi2)].
class UncertaintySet {
public:
    UncertaintySet(int dim, double sigma_lo2, double sigma_hi2, SigmaStructure structure);

    static UncertaintySet scalar(double sigma_lo2, double sigma_hi2) {
        return UncertaintySet(1, sigma_lo2, sigma_hi2, SigmaStructure::Scalar1D);
    }
    static UncertaintySet diagonal_box(int dim, double sigma_lo2, double sigma_hi2) {
        return UncertaintySet(dim, sigma_lo2, sigma_hi2, SigmaStructure::DiagonalBox);
    }

    int dim() const { return dim_; }
    double sigma_lo2() const { return sigma_lo2_; }
    double sigma_hi2() const { return sigma_hi2_; }
    double sigma_lo() const { return sigma_lo_; }  // sqrt of sigma_lo2
    double sigma_hi() const { return sigma_hi_; }
    SigmaStructure structure() const { return structure_; }

    /// True when diag(v) lies in Sigma, within tol on the box bounds.
    bool contains_diagonal(std::span<const double> variances, double tol = 0.0) const;

    /// True when A lies in Sigma: diagonal entries within the box and
    /// off-diagonal entries zero, within tol.
    bool contains(const SymMatrix& a, double tol = 0.0) const;

private:
    int dim_;
    double sigma_lo2_;
    double sigma_hi2_;
    double sigma_lo_;
    double sigma_hi_;
    SigmaStructure structure_;
};

/// G(A) = 1/2 sup_{sigma in Sigma} (A, sigma).
///
/// For the diagonal structures supported here this is closed form:
///   G(A) = 1/2 sum_i (sigma_hi2 * a_ii^+  -  sigma_lo2 * a_ii^-).
/// Off-diagonal entries of A never contribute because every sigma in Sigma
/// is diagonal.
double g_eval(const SymMatrix& a, const UncertaintySet& s);

/// The finite candidate set achieving the sup in G for diagonal A: the 2^d
/// diagonal matrices with entries in {sigma_lo2, sigma_hi2}. For Scalar1D
/// this is the pair {sigma_lo2, sigma_hi2}.
std::vector<SymMatrix> extreme_points(const UncertaintySet& s);

/// Uniform partition t_k = k T / n of [0, T].
class TimeGrid {
public:
    TimeGrid(double horizon, int n_steps);

    double horizon() const { return horizon_; }
    int n_steps() const { return n_steps_; }
    double dt() const { return dt_; }
    double time(int k) const { return (k == n_steps_) ? horizon_ : dt_ * k; }
    std::vector<double> times() const;

    /// Index of the grid time closest to t.
    int nearest_step(double t) const;

private:
    double horizon_;
    int n_steps_;
    double dt_;
};

/// Functional of finitely many path marginals:
/// Phi(omega) = phi(omega_{t_1}, ..., omega_{t_n}).
///
/// phi receives the n marginal states flattened leg-major into a span of
/// n*dim doubles. `bound` and `lipschitz` are declared by the caller (they
/// feed domain sizing and error budgets); use infinity when unknown. They
/// are trusted but spot-checked on samples by the test suite.
struct CylinderFunctional {
    int dim = 1;
    std::vector<double> times;  // ordered, in (0, T]
    std::function<double(std::span<const double>)> phi;
    double bound = 0.0;
    double lipschitz = 0.0;

    int legs() const { return static_cast<int>(times.size()); }

    double operator()(std::span<const double> flattened) const { return phi(flattened); }

    /// Throws config_error when the declared shape is inconsistent.
    void validate() const;

    /// Single-marginal functional phi(B_T).
    static CylinderFunctional terminal(int dim, double t, std::function<double(std::span<const double>)> f,
                                       double bound, double lipschitz);
};

}  // namespace gcalc
