#include "gcalc/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gcalc {

SymMatrix::SymMatrix(int dim) : dim_(dim) {
    if (dim <= 0) throw std::invalid_argument("SymMatrix: dim must be positive");
    a_.assign(static_cast<std::size_t>(dim) * (dim + 1) / 2, 0.0);
}

SymMatrix SymMatrix::identity(int dim) {
    SymMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.set(i, i, 1.0);
    return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> entries) {
    SymMatrix m(static_cast<int>(entries.size()));
    for (int i = 0; i < m.dim_; ++i) m.set(i, i, entries[static_cast<std::size_t>(i)]);
    return m;
}

std::size_t SymMatrix::packed_index(int i, int j) const {
    if (i > j) std::swap(i, j);
    // row-major upper triangle: row i starts at i*dim - i*(i-1)/2
    return static_cast<std::size_t>(i) * dim_ - static_cast<std::size_t>(i) * (i - 1) / 2 +
           static_cast<std::size_t>(j - i);
}

double SymMatrix::inner(const SymMatrix& other) const {
    if (other.dim_ != dim_) throw std::invalid_argument("SymMatrix::inner: dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) {
        for (int j = i; j < dim_; ++j) {
            const double term = (*this)(i, j) * other(i, j);
            s += (i == j) ? term : 2.0 * term;
        }
    }
    return s;
}

double SymMatrix::quad(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != dim_) throw std::invalid_argument("SymMatrix::quad: dimension mismatch");
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) {
        s += (*this)(i, i) * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < dim_; ++j)
            s += 2.0 * (*this)(i, j) * x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)];
    }
    return s;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& other) {
    if (other.dim_ != dim_) throw std::invalid_argument("SymMatrix: dimension mismatch");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += other.a_[k];
    return *this;
}

SymMatrix& SymMatrix::operator*=(double c) {
    for (double& v : a_) v *= c;
    return *this;
}

UncertaintySet::UncertaintySet(int dim, double sigma_lo2, double sigma_hi2, SigmaStructure structure)
    : dim_(dim),
      sigma_lo2_(sigma_lo2),
      sigma_hi2_(sigma_hi2),
      sigma_lo_(std::sqrt(sigma_lo2)),
      sigma_hi_(std::sqrt(sigma_hi2)),
      structure_(structure) {
    if (dim <= 0) throw std::invalid_argument("UncertaintySet: dim must be positive");
    if (!(sigma_lo2 > 0.0) || !std::isfinite(sigma_hi2))
        throw std::invalid_argument("UncertaintySet: need 0 < sigma_lo2 <= sigma_hi2 < inf");
    if (!(sigma_lo2 <= sigma_hi2))
        throw std::invalid_argument("UncertaintySet: sigma_lo2 must not exceed sigma_hi2");
    if (structure == SigmaStructure::Scalar1D && dim != 1)
        throw std::invalid_argument("UncertaintySet: Scalar1D requires dim == 1");
}

bool UncertaintySet::contains_diagonal(std::span<const double> variances, double tol) const {
    if (static_cast<int>(variances.size()) != dim_) return false;
    for (double v : variances) {
        if (v < sigma_lo2_ - tol || v > sigma_hi2_ + tol) return false;
    }
    return true;
}

bool UncertaintySet::contains(const SymMatrix& a, double tol) const {
    if (a.dim() != dim_) return false;
    for (int i = 0; i < dim_; ++i) {
        const double v = a(i, i);
        if (v < sigma_lo2_ - tol || v > sigma_hi2_ + tol) return false;
        for (int j = i + 1; j < dim_; ++j) {
            if (std::abs(a(i, j)) > tol) return false;
        }
    }
    return true;
}

double g_eval(const SymMatrix& a, const UncertaintySet& s) {
    if (a.dim() != s.dim()) throw std::invalid_argument("g_eval: dimension mismatch between A and Sigma");
    double sum = 0.0;
    for (int i = 0; i < s.dim(); ++i) {
        const double aii = a(i, i);
        sum += (aii >= 0.0) ? s.sigma_hi2() * aii : s.sigma_lo2() * aii;
    }
    return 0.5 * sum;
}

std::vector<SymMatrix> extreme_points(const UncertaintySet& s) {
    const int d = s.dim();
    std::vector<SymMatrix> pts;
    pts.reserve(std::size_t{1} << d);
    for (std::size_t mask = 0; mask < (std::size_t{1} << d); ++mask) {
        SymMatrix m(d);
        for (int i = 0; i < d; ++i)
            m.set(i, i, (mask >> i) & 1 ? s.sigma_hi2() : s.sigma_lo2());
        pts.push_back(std::move(m));
    }
    return pts;
}

TimeGrid::TimeGrid(double horizon, int n_steps) : horizon_(horizon), n_steps_(n_steps) {
    if (!(horizon > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be positive");
    if (n_steps <= 0) throw std::invalid_argument("TimeGrid: n_steps must be positive");
    dt_ = horizon / n_steps;
}

std::vector<double> TimeGrid::times() const {
    std::vector<double> ts(static_cast<std::size_t>(n_steps_) + 1);
    for (int k = 0; k <= n_steps_; ++k) ts[static_cast<std::size_t>(k)] = time(k);
    return ts;
}

int TimeGrid::nearest_step(double t) const {
    const int k = static_cast<int>(std::llround(t / dt_));
    return std::clamp(k, 0, n_steps_);
}

void CylinderFunctional::validate() const {
    if (dim <= 0) throw config_error("CylinderFunctional: dim must be positive");
    if (times.empty()) throw config_error("CylinderFunctional: needs at least one marginal time");
    double prev = 0.0;
    for (double t : times) {
        if (!(t > prev)) throw config_error("CylinderFunctional: times must be strictly increasing and positive");
        prev = t;
    }
    if (!phi) throw config_error("CylinderFunctional: missing phi");
}

CylinderFunctional CylinderFunctional::terminal(int dim, double t,
                                                std::function<double(std::span<const double>)> f,
                                                double bound, double lipschitz) {
    CylinderFunctional c;
    c.dim = dim;
    c.times = {t};
    c.phi = std::move(f);
    c.bound = bound;
    c.lipschitz = lipschitz;
    c.validate();
    return c;
}

}  // namespace gcalc
