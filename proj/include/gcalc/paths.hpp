#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "gcalc/model.hpp"
#include "gcalc/rng.hpp"

namespace gcalc {

/// Uniform axis-aligned lattice used by feedback lookup tables.
/// Evaluation is nearest-node with clamping at the edges.
struct SpatialLattice {
    std::vector<double> lo;      // per axis
    std::vector<double> hi;      // per axis
    std::vector<int> n_cells;    // per axis; nodes = n_cells + 1

    int dim() const { return static_cast<int>(lo.size()); }
    int nodes(int axis) const { return n_cells[static_cast<std::size_t>(axis)] + 1; }
    std::size_t total_nodes() const;
    double node_coord(int axis, int index) const;
    int nearest_index(int axis, double x) const;
    /// Flattened (row-major over axes) index of the node nearest to x.
    std::size_t nearest_node(std::span<const double> x) const;
};

/// Volatility control theta with theta theta^T in Sigma. Under diagonal
/// Sigma every admissible theta is diagonal, stored as its d diagonal
/// entries (per-axis volatilities, not variances).
class ControlPolicy {
public:
    enum class Kind { OpenLoop, MarkovFeedback, Callback };

    /// theta constant in time and space.
    static ControlPolicy constant(std::vector<double> theta_diag);
    /// Per-step deterministic theta_k (size n_steps, each of size dim).
    static ControlPolicy open_loop(std::vector<std::vector<double>> theta_steps);
    /// Lookup table theta(t_k, x): values[k][node*dim + axis].
    static ControlPolicy markov_table(SpatialLattice lattice, std::vector<std::vector<double>> values);
    /// Fully general evaluator: fn(step, history of states 0..k, out theta diag).
    /// history has (k+1)*dim entries; the current state is the last dim.
    static ControlPolicy callback(int dim,
                                  std::function<void(int, std::span<const double>, std::span<double>)> fn);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    const std::string& label() const { return label_; }
    ControlPolicy& set_label(std::string s) { label_ = std::move(s); return *this; }

    /// theta diagonal at step k given the path history (states 0..k).
    void eval(int step, std::span<const double> history, std::span<double> out) const;

private:
    ControlPolicy() = default;

    Kind kind_ = Kind::OpenLoop;
    int dim_ = 0;
    std::string label_;
    std::vector<std::vector<double>> steps_;  // OpenLoop
    SpatialLattice lattice_;                  // MarkovFeedback
    std::vector<std::vector<double>> table_;  // MarkovFeedback
    std::function<void(int, std::span<const double>, std::span<double>)> fn_;  // Callback
};

/// Drift control eta, bounded. Deterministic per-step values, a Markov
/// feedback table in (t_k, x), or a general adapted callback (used for the
/// PDE-extracted feedback, which depends on the states at earlier marginal
/// times as well as the current one).
class DriftControl {
public:
    enum class Kind { Deterministic, MarkovFeedback, Callback };

    static DriftControl zero(int dim);
    static DriftControl constant(std::vector<double> eta);
    /// Per-step deterministic eta_k (size n_steps, each of size dim).
    static DriftControl deterministic(std::vector<std::vector<double>> eta_steps);
    static DriftControl markov_table(SpatialLattice lattice, std::vector<std::vector<double>> values,
                                     double bound);
    static DriftControl callback(int dim, double bound,
                                 std::function<void(int, std::span<const double>, std::span<double>)> fn);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    double bound() const { return bound_; }
    const std::string& label() const { return label_; }
    DriftControl& set_label(std::string s) { label_ = std::move(s); return *this; }

    void eval(int step, std::span<const double> history, std::span<double> out) const;

private:
    DriftControl() = default;

    Kind kind_ = Kind::Deterministic;
    int dim_ = 0;
    double bound_ = 0.0;
    std::string label_;
    std::vector<std::vector<double>> steps_;
    SpatialLattice lattice_;
    std::vector<std::vector<double>> table_;
    std::function<void(int, std::span<const double>, std::span<double>)> fn_;
};

/// Simulated (B, <B>) trajectories on a time grid.
///
/// Layout: state(p, k) is the d-vector B_{t_k} of path p; qv_diag(p, k) the
/// diagonal of <B>_{t_k}. Off-diagonal quadratic variation is identically
/// zero because every control in Gamma is diagonal, so only the diagonal is
/// stored; qv_matrix() materializes the SymMatrix view.
class PathBundle {
public:
    PathBundle(TimeGrid grid, int dim, std::size_t n_paths, std::uint64_t seed);

    const TimeGrid& grid() const { return grid_; }
    int dim() const { return dim_; }
    std::size_t n_paths() const { return n_paths_; }
    std::uint64_t seed() const { return seed_; }

    std::span<const double> state(std::size_t path, int step) const {
        return {b_.data() + offset(path, step), static_cast<std::size_t>(dim_)};
    }
    std::span<double> state(std::size_t path, int step) {
        return {b_.data() + offset(path, step), static_cast<std::size_t>(dim_)};
    }
    /// States 0..step of one path, flattened ((step+1)*dim doubles).
    std::span<const double> history(std::size_t path, int step) const {
        return {b_.data() + offset(path, 0), static_cast<std::size_t>(step + 1) * dim_};
    }
    std::span<const double> qv_diag(std::size_t path, int step) const {
        return {qv_.data() + offset(path, step), static_cast<std::size_t>(dim_)};
    }
    std::span<double> qv_diag(std::size_t path, int step) {
        return {qv_.data() + offset(path, step), static_cast<std::size_t>(dim_)};
    }
    SymMatrix qv_matrix(std::size_t path, int step) const {
        return SymMatrix::diagonal(qv_diag(path, step));
    }

private:
    std::size_t offset(std::size_t path, int step) const {
        return (path * (static_cast<std::size_t>(grid_.n_steps()) + 1) + static_cast<std::size_t>(step)) *
               static_cast<std::size_t>(dim_);
    }

    TimeGrid grid_;
    int dim_;
    std::size_t n_paths_;
    std::uint64_t seed_;
    std::vector<double> b_;
    std::vector<double> qv_;
};

/// Euler simulation of B under P_theta:
///   B_{k+1} = B_k + theta_k xi_k sqrt(dt),   <B>_{k+1} = <B>_k + theta_k theta_k^T dt,
/// with xi_k standard normal drawn from the counter-based stream
/// (seed, path, step). path_offset shifts the logical path indices, so
/// batched simulation reproduces exactly the paths of one big run.
///
/// Throws control_violation (naming step and path) if theta theta^T leaves
/// Sigma at any step.
PathBundle simulate(const UncertaintySet& s, const TimeGrid& grid, const ControlPolicy& policy,
                    std::size_t n_paths, std::uint64_t seed, std::size_t path_offset = 0);

/// Per-step realized control values along a bundle's own paths:
/// values[p][k*dim + i] = eta^i(t_k, path p).
std::vector<std::vector<double>> eval_along(const DriftControl& eta, const PathBundle& bundle);

/// Girsanov shift B^eta_{k+1} = B^eta_k + dB_k + d<B>_k eta(t_k, .), with eta
/// evaluated along the shifted path (the controlled state), matching the
/// feedback SDE the optimal drift solves. Quadratic variation is unchanged.
PathBundle drift_shift(const PathBundle& bundle, const DriftControl& eta);

/// H_T^G(eta) = 1/2 sum_k sum_ij eta^i eta^j d<B>^ij per path, eta evaluated
/// along the given bundle. Nonnegative.
std::vector<double> h_functional(const DriftControl& eta, const PathBundle& bundle);

/// Left-point stochastic integral sum_k eta(t_k) . dB_k per path, with the
/// eta values supplied explicitly (as produced by eval_along, possibly on a
/// different bundle than the one integrated against).
std::vector<double> stochastic_integral(const std::vector<std::vector<double>>& eta_values,
                                        const PathBundle& bundle);

/// log E^eta_T = sum_k [eta_k . dB_k - 1/2 (eta_k, d<B>_k eta_k)] per path.
std::vector<double> girsanov_log_density(const DriftControl& eta, const PathBundle& bundle);

/// E^eta_T per path; computed in log space so positivity is exact.
std::vector<double> girsanov_density(const DriftControl& eta, const PathBundle& bundle);

/// Symmetric-matrix-valued step control for the compensator of Lemma-style
/// checks: eta_sym(step, current state) -> SymMatrix.
using SymControl = std::function<SymMatrix(int, std::span<const double>)>;

/// M_{t_k} = sum_{j<k} [ 2 G(eta_j) dt - (eta_j, d<B>_j) ] per path.
/// Every increment is >= 0 because 2 G(eta) >= (eta, sigma) for all sigma in
/// Sigma; returned trajectories are nondecreasing up to round-off.
std::vector<std::vector<double>> compensator_path(const SymControl& eta_sym, const PathBundle& bundle,
                                                  const UncertaintySet& s);

}  // namespace gcalc
