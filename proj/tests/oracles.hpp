#pragma once

// Independent oracles used by the test suites. Everything here is kept
// deliberately separate from the library's own solution paths: brute-force
// grids, quadrature, and a plain dynamic program over per-step variances.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "gcalc/model.hpp"

namespace oracle {

// 32-point Gauss-Hermite rule in the probabilists' convention:
// E[f(Z)] ~= sum_i w_i f(z_i) for Z standard normal.
struct GhNode {
    double z;
    double w;
};

inline constexpr std::array<GhNode, 32> kGh32 = {{
    {-1.00774226742294655e+01, 4.12460748901828347e-23},
    {-9.06439921070240473e+00, 5.20844959196091331e-19},
    {-8.21972876538224462e+00, 6.75529022367020369e-16},
    {-7.46075575412151881e+00, 2.37806485577780855e-13},
    {-6.75593083054070487e+00, 3.34750123980119620e-11},
    {-6.08896430907698694e+00, 2.31251841207423929e-09},
    {-5.45003327362342826e+00, 8.88129071310589026e-08},
    {-4.83260461324448887e+00, 2.05962210395342745e-06},
    {-4.23202110999540970e+00, 3.05598030608963359e-05},
    {-3.64478124988083296e+00, 3.02557025817062853e-04},
    {-3.06813516901312155e+00, 2.06205105130788076e-03},
    {-2.49984041518739541e+00, 9.90346170232059286e-03},
    {-1.93800490592571739e+00, 3.41098477260920671e-02},
    {-1.38098019927214422e+00, 8.53448082720807411e-02},
    {-8.27284903779765157e-01, 1.56538993757598499e-01},
    {-2.75546419230275841e-01, 2.11705569880479283e-01},
    {+2.75546419230275841e-01, 2.11705569880479283e-01},
    {+8.27284903779765157e-01, 1.56538993757598499e-01},
    {+1.38098019927214422e+00, 8.53448082720807411e-02},
    {+1.93800490592571739e+00, 3.41098477260920671e-02},
    {+2.49984041518739541e+00, 9.90346170232059286e-03},
    {+3.06813516901312155e+00, 2.06205105130788076e-03},
    {+3.64478124988083296e+00, 3.02557025817062853e-04},
    {+4.23202110999540970e+00, 3.05598030608963359e-05},
    {+4.83260461324448887e+00, 2.05962210395342745e-06},
    {+5.45003327362342826e+00, 8.88129071310589026e-08},
    {+6.08896430907698694e+00, 2.31251841207423929e-09},
    {+6.75593083054070487e+00, 3.34750123980119620e-11},
    {+7.46075575412151881e+00, 2.37806485577780855e-13},
    {+8.21972876538224462e+00, 6.75529022367020369e-16},
    {+9.06439921070240473e+00, 5.20844959196091331e-19},
    {+1.00774226742294655e+01, 4.12460748901828347e-23},
}};

/// Brute-force sup of 1/2 (A, sigma) over a product grid of diagonal
/// matrices in Sigma. Only defends the closed-form g_eval; never used by
/// the library itself.
inline double brute_force_g(const gcalc::SymMatrix& a, const gcalc::UncertaintySet& s, int grid_points) {
    const int d = s.dim();
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    double best = -std::numeric_limits<double>::infinity();
    for (;;) {
        double inner = 0.0;
        for (int i = 0; i < d; ++i) {
            const double frac = grid_points == 1 ? 0.0
                                                 : static_cast<double>(idx[static_cast<std::size_t>(i)]) /
                                                       (grid_points - 1);
            const double sig = s.sigma_lo2() + frac * (s.sigma_hi2() - s.sigma_lo2());
            inner += a(i, i) * sig;
        }
        best = std::max(best, 0.5 * inner);
        int axis = 0;
        while (axis < d) {
            if (++idx[static_cast<std::size_t>(axis)] < grid_points) break;
            idx[static_cast<std::size_t>(axis)] = 0;
            ++axis;
        }
        if (axis == d) break;
    }
    return best;
}

/// E[f(Z)] for Z ~ N(0, variance), composite Simpson over [-10 sd, 10 sd].
inline double gaussian_expectation(const std::function<double(double)>& f, double variance,
                                   int panels = 2000) {
    const double sd = std::sqrt(variance);
    const double lo = -10.0 * sd, hi = 10.0 * sd;
    const double h = (hi - lo) / (2 * panels);
    auto integrand = [&](double x) {
        return f(x) * std::exp(-0.5 * x * x / variance) / std::sqrt(2.0 * M_PI * variance);
    };
    double s = integrand(lo) + integrand(hi);
    for (int i = 1; i < 2 * panels; ++i) s += integrand(lo + h * i) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// One backward step of the worst-case dynamic program on a uniform lattice:
/// v_out(x) = max over sigma in a grid of [lo2, hi2] of E[v_in(x + sqrt(sigma dt) Z)].
/// Linear interpolation, clamped at the lattice edges.
class DpLattice {
public:
    DpLattice(double x_lo, double x_hi, int n_cells)
        : x_lo_(x_lo), x_hi_(x_hi), n_(n_cells), h_((x_hi - x_lo) / n_cells) {}

    int nodes() const { return n_ + 1; }
    double coord(int i) const { return x_lo_ + h_ * i; }

    double interp(std::span<const double> v, double x) const {
        if (x <= x_lo_) return v[0];
        if (x >= x_hi_) return v[static_cast<std::size_t>(n_)];
        const double u = (x - x_lo_) / h_;
        const int i = std::min(static_cast<int>(u), n_ - 1);
        const double frac = u - i;
        return v[static_cast<std::size_t>(i)] * (1.0 - frac) + v[static_cast<std::size_t>(i) + 1] * frac;
    }

    void step_max(std::span<const double> v_in, std::span<double> v_out, double lo2, double hi2,
                  int n_sigma, double dt) const {
        for (int i = 0; i <= n_; ++i) {
            const double x = coord(i);
            double best = -std::numeric_limits<double>::infinity();
            for (int m = 0; m < n_sigma; ++m) {
                const double sig = lo2 + (hi2 - lo2) * (n_sigma == 1 ? 1.0 : static_cast<double>(m) / (n_sigma - 1));
                const double sd = std::sqrt(sig * dt);
                double e = 0.0;
                for (const auto& node : kGh32) e += node.w * interp(v_in, x + sd * node.z);
                best = std::max(best, e);
            }
            v_out[static_cast<std::size_t>(i)] = best;
        }
    }

private:
    double x_lo_, x_hi_;
    int n_;
    double h_;
};

/// Worst-case value sup_theta E[psi(B_T)] at (t=0, x=0) by backward dynamic
/// programming over per-step constant variances (64-point sigma grid).
inline double dp_value_single(const std::function<double(double)>& psi, double lo2, double hi2, double T,
                              int n_t, double x_half_width, int n_cells, int n_sigma = 64) {
    DpLattice lat(-x_half_width, x_half_width, n_cells);
    std::vector<double> v(static_cast<std::size_t>(lat.nodes()));
    for (int i = 0; i < lat.nodes(); ++i) v[static_cast<std::size_t>(i)] = psi(lat.coord(i));
    std::vector<double> w(v.size());
    const double dt = T / n_t;
    for (int k = 0; k < n_t; ++k) {
        lat.step_max(v, w, lo2, hi2, n_sigma, dt);
        std::swap(v, w);
    }
    return lat.interp(v, 0.0);
}

/// Two-marginal version: value of sup E[psi(B_{t1}, B_T)] at (0, 0).
/// Backward DP on [t1, T] for every frozen first marginal on the lattice,
/// stitch at t1, then DP down to 0.
inline double dp_value_two(const std::function<double(double, double)>& psi, double lo2, double hi2,
                           double t1, double T, int n_t, double x_half_width, int n_cells,
                           int n_sigma = 64) {
    DpLattice lat(-x_half_width, x_half_width, n_cells);
    const int nodes = lat.nodes();
    const int n2 = std::max(1, static_cast<int>(std::lround(n_t * (T - t1) / T)));
    const int n1 = std::max(1, n_t - n2);
    std::vector<double> stitched(static_cast<std::size_t>(nodes));
    std::vector<double> v(static_cast<std::size_t>(nodes)), w(static_cast<std::size_t>(nodes));
    for (int j = 0; j < nodes; ++j) {
        const double x1 = lat.coord(j);
        for (int i = 0; i < nodes; ++i) v[static_cast<std::size_t>(i)] = psi(x1, lat.coord(i));
        const double dt2 = (T - t1) / n2;
        for (int k = 0; k < n2; ++k) {
            lat.step_max(v, w, lo2, hi2, n_sigma, dt2);
            std::swap(v, w);
        }
        stitched[static_cast<std::size_t>(j)] = lat.interp(v, x1);
    }
    v = stitched;
    const double dt1 = t1 / n1;
    for (int k = 0; k < n1; ++k) {
        lat.step_max(v, w, lo2, hi2, n_sigma, dt1);
        std::swap(v, w);
    }
    return lat.interp(v, 0.0);
}

}  // namespace oracle
