#include "gcalc/paths.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gcalc {

std::size_t SpatialLattice::total_nodes() const {
    std::size_t n = 1;
    for (int a = 0; a < dim(); ++a) n *= static_cast<std::size_t>(nodes(a));
    return n;
}

double SpatialLattice::node_coord(int axis, int index) const {
    const std::size_t a = static_cast<std::size_t>(axis);
    const double h = (hi[a] - lo[a]) / n_cells[a];
    return lo[a] + h * index;
}

int SpatialLattice::nearest_index(int axis, double x) const {
    const std::size_t a = static_cast<std::size_t>(axis);
    const double h = (hi[a] - lo[a]) / n_cells[a];
    const int i = static_cast<int>(std::llround((x - lo[a]) / h));
    return std::clamp(i, 0, n_cells[a]);
}

std::size_t SpatialLattice::nearest_node(std::span<const double> x) const {
    std::size_t idx = 0;
    for (int a = 0; a < dim(); ++a) {
        idx = idx * static_cast<std::size_t>(nodes(a)) +
              static_cast<std::size_t>(nearest_index(a, x[static_cast<std::size_t>(a)]));
    }
    return idx;
}

ControlPolicy ControlPolicy::constant(std::vector<double> theta_diag) {
    ControlPolicy p;
    p.kind_ = Kind::OpenLoop;
    p.dim_ = static_cast<int>(theta_diag.size());
    p.steps_ = {std::move(theta_diag)};
    return p;
}

ControlPolicy ControlPolicy::open_loop(std::vector<std::vector<double>> theta_steps) {
    if (theta_steps.empty()) throw std::invalid_argument("ControlPolicy::open_loop: empty schedule");
    ControlPolicy p;
    p.kind_ = Kind::OpenLoop;
    p.dim_ = static_cast<int>(theta_steps.front().size());
    p.steps_ = std::move(theta_steps);
    return p;
}

ControlPolicy ControlPolicy::markov_table(SpatialLattice lattice, std::vector<std::vector<double>> values) {
    ControlPolicy p;
    p.kind_ = Kind::MarkovFeedback;
    p.dim_ = lattice.dim();
    p.lattice_ = std::move(lattice);
    p.table_ = std::move(values);
    return p;
}

ControlPolicy ControlPolicy::callback(int dim,
                                      std::function<void(int, std::span<const double>, std::span<double>)> fn) {
    ControlPolicy p;
    p.kind_ = Kind::Callback;
    p.dim_ = dim;
    p.fn_ = std::move(fn);
    return p;
}

void ControlPolicy::eval(int step, std::span<const double> history, std::span<double> out) const {
    switch (kind_) {
        case Kind::OpenLoop: {
            const auto& v = steps_[std::min<std::size_t>(static_cast<std::size_t>(step), steps_.size() - 1)];
            std::copy(v.begin(), v.end(), out.begin());
            return;
        }
        case Kind::MarkovFeedback: {
            const auto x = history.last(static_cast<std::size_t>(dim_));
            const auto& tab = table_[std::min<std::size_t>(static_cast<std::size_t>(step), table_.size() - 1)];
            const std::size_t node = lattice_.nearest_node(x);
            for (int i = 0; i < dim_; ++i)
                out[static_cast<std::size_t>(i)] = tab[node * static_cast<std::size_t>(dim_) + i];
            return;
        }
        case Kind::Callback:
            fn_(step, history, out);
            return;
    }
}

DriftControl DriftControl::zero(int dim) {
    return constant(std::vector<double>(static_cast<std::size_t>(dim), 0.0));
}

DriftControl DriftControl::constant(std::vector<double> eta) {
    DriftControl c;
    c.kind_ = Kind::Deterministic;
    c.dim_ = static_cast<int>(eta.size());
    double b = 0.0;
    for (double v : eta) b += v * v;
    c.bound_ = std::sqrt(b);
    c.steps_ = {std::move(eta)};
    return c;
}

DriftControl DriftControl::deterministic(std::vector<std::vector<double>> eta_steps) {
    if (eta_steps.empty()) throw std::invalid_argument("DriftControl::deterministic: empty schedule");
    DriftControl c;
    c.kind_ = Kind::Deterministic;
    c.dim_ = static_cast<int>(eta_steps.front().size());
    double b = 0.0;
    for (const auto& v : eta_steps) {
        double n2 = 0.0;
        for (double x : v) n2 += x * x;
        b = std::max(b, n2);
    }
    c.bound_ = std::sqrt(b);
    c.steps_ = std::move(eta_steps);
    return c;
}

DriftControl DriftControl::markov_table(SpatialLattice lattice, std::vector<std::vector<double>> values,
                                        double bound) {
    DriftControl c;
    c.kind_ = Kind::MarkovFeedback;
    c.dim_ = lattice.dim();
    c.bound_ = bound;
    c.lattice_ = std::move(lattice);
    c.table_ = std::move(values);
    return c;
}

DriftControl DriftControl::callback(int dim, double bound,
                                    std::function<void(int, std::span<const double>, std::span<double>)> fn) {
    DriftControl c;
    c.kind_ = Kind::Callback;
    c.dim_ = dim;
    c.bound_ = bound;
    c.fn_ = std::move(fn);
    return c;
}

void DriftControl::eval(int step, std::span<const double> history, std::span<double> out) const {
    switch (kind_) {
        case Kind::Deterministic: {
            const auto& v = steps_[std::min<std::size_t>(static_cast<std::size_t>(step), steps_.size() - 1)];
            std::copy(v.begin(), v.end(), out.begin());
            return;
        }
        case Kind::MarkovFeedback: {
            const auto x = history.last(static_cast<std::size_t>(dim_));
            const auto& tab = table_[std::min<std::size_t>(static_cast<std::size_t>(step), table_.size() - 1)];
            const std::size_t node = lattice_.nearest_node(x);
            for (int i = 0; i < dim_; ++i)
                out[static_cast<std::size_t>(i)] = tab[node * static_cast<std::size_t>(dim_) + i];
            return;
        }
        case Kind::Callback:
            fn_(step, history, out);
            return;
    }
}

PathBundle::PathBundle(TimeGrid grid, int dim, std::size_t n_paths, std::uint64_t seed)
    : grid_(grid), dim_(dim), n_paths_(n_paths), seed_(seed) {
    const std::size_t total = n_paths * (static_cast<std::size_t>(grid_.n_steps()) + 1) *
                              static_cast<std::size_t>(dim);
    b_.assign(total, 0.0);
    qv_.assign(total, 0.0);
}

PathBundle simulate(const UncertaintySet& s, const TimeGrid& grid, const ControlPolicy& policy,
                    std::size_t n_paths, std::uint64_t seed, std::size_t path_offset) {
    if (policy.dim() != s.dim())
        throw std::invalid_argument("simulate: policy dimension does not match uncertainty set");
    PathBundle bundle(grid, s.dim(), n_paths, seed);
    if (n_paths == 0) return bundle;

    const int d = s.dim();
    const int n = grid.n_steps();
    const double dt = grid.dt();
    const double sqrt_dt = std::sqrt(dt);
    const CounterRng rng(seed, rng_tag::kSimulate);
    // box check tolerance: representation error only
    const double tol = 1e-12 * s.sigma_hi2();

    parallel_for(n_paths, [&](std::size_t begin, std::size_t end) {
        std::vector<double> theta(static_cast<std::size_t>(d));
        std::vector<double> xi(static_cast<std::size_t>(d));
        for (std::size_t p = begin; p < end; ++p) {
            const std::uint64_t global_path = path_offset + p;
            for (int k = 0; k < n; ++k) {
                policy.eval(k, bundle.history(p, k), theta);
                for (int i = 0; i < d; ++i) {
                    const double v = theta[static_cast<std::size_t>(i)] * theta[static_cast<std::size_t>(i)];
                    if (v < s.sigma_lo2() - tol || v > s.sigma_hi2() + tol)
                        throw control_violation("simulate: theta theta^T outside Sigma at step " +
                                                std::to_string(k) + ", path " + std::to_string(global_path));
                }
                rng.normals(global_path, static_cast<std::uint64_t>(k), xi.data(), d);
                const auto bk = bundle.state(p, k);
                const auto qk = bundle.qv_diag(p, k);
                auto bk1 = bundle.state(p, k + 1);
                auto qk1 = bundle.qv_diag(p, k + 1);
                for (int i = 0; i < d; ++i) {
                    const std::size_t ii = static_cast<std::size_t>(i);
                    bk1[ii] = bk[ii] + theta[ii] * xi[ii] * sqrt_dt;
                    qk1[ii] = qk[ii] + theta[ii] * theta[ii] * dt;
                }
            }
        }
    });
    return bundle;
}

std::vector<std::vector<double>> eval_along(const DriftControl& eta, const PathBundle& bundle) {
    const int d = bundle.dim();
    if (eta.dim() != d) throw std::invalid_argument("eval_along: dimension mismatch");
    const int n = bundle.grid().n_steps();
    std::vector<std::vector<double>> values(bundle.n_paths());
    parallel_for(bundle.n_paths(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            auto& row = values[p];
            row.resize(static_cast<std::size_t>(n) * d);
            for (int k = 0; k < n; ++k) {
                eta.eval(k, bundle.history(p, k),
                         std::span<double>(row.data() + static_cast<std::size_t>(k) * d,
                                           static_cast<std::size_t>(d)));
            }
        }
    });
    return values;
}

PathBundle drift_shift(const PathBundle& bundle, const DriftControl& eta) {
    const int d = bundle.dim();
    if (eta.dim() != d) throw std::invalid_argument("drift_shift: dimension mismatch");
    const int n = bundle.grid().n_steps();
    PathBundle shifted(bundle.grid(), d, bundle.n_paths(), bundle.seed());
    parallel_for(bundle.n_paths(), [&](std::size_t begin, std::size_t end) {
        std::vector<double> ev(static_cast<std::size_t>(d));
        for (std::size_t p = begin; p < end; ++p) {
            for (int k = 0; k <= n; ++k) {
                auto q_dst = shifted.qv_diag(p, k);
                const auto q_src = bundle.qv_diag(p, k);
                std::copy(q_src.begin(), q_src.end(), q_dst.begin());
            }
            for (int k = 0; k < n; ++k) {
                // eta evaluated at the shifted (controlled) state
                eta.eval(k, shifted.history(p, k), ev);
                const auto xk = shifted.state(p, k);
                auto xk1 = shifted.state(p, k + 1);
                const auto bk = bundle.state(p, k);
                const auto bk1 = bundle.state(p, k + 1);
                const auto qk = bundle.qv_diag(p, k);
                const auto qk1 = bundle.qv_diag(p, k + 1);
                for (int i = 0; i < d; ++i) {
                    const std::size_t ii = static_cast<std::size_t>(i);
                    // diagonal <B>: (d<B> eta)_i = dqv_i * eta_i
                    xk1[ii] = xk[ii] + (bk1[ii] - bk[ii]) + (qk1[ii] - qk[ii]) * ev[ii];
                }
            }
        }
    });
    return shifted;
}

std::vector<double> h_functional(const DriftControl& eta, const PathBundle& bundle) {
    const int d = bundle.dim();
    if (eta.dim() != d) throw std::invalid_argument("h_functional: dimension mismatch");
    const int n = bundle.grid().n_steps();
    std::vector<double> h(bundle.n_paths(), 0.0);
    parallel_for(bundle.n_paths(), [&](std::size_t begin, std::size_t end) {
        std::vector<double> ev(static_cast<std::size_t>(d));
        for (std::size_t p = begin; p < end; ++p) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) {
                eta.eval(k, bundle.history(p, k), ev);
                const auto qk = bundle.qv_diag(p, k);
                const auto qk1 = bundle.qv_diag(p, k + 1);
                for (int i = 0; i < d; ++i) {
                    const std::size_t ii = static_cast<std::size_t>(i);
                    acc += ev[ii] * ev[ii] * (qk1[ii] - qk[ii]);
                }
            }
            h[p] = 0.5 * acc;
        }
    });
    return h;
}

std::vector<double> stochastic_integral(const std::vector<std::vector<double>>& eta_values,
                                        const PathBundle& bundle) {
    const int d = bundle.dim();
    const int n = bundle.grid().n_steps();
    if (eta_values.size() != bundle.n_paths())
        throw std::invalid_argument("stochastic_integral: path count mismatch");
    std::vector<double> out(bundle.n_paths(), 0.0);
    parallel_for(bundle.n_paths(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            const auto& row = eta_values[p];
            double acc = 0.0;
            for (int k = 0; k < n; ++k) {
                const auto bk = bundle.state(p, k);
                const auto bk1 = bundle.state(p, k + 1);
                for (int i = 0; i < d; ++i) {
                    const std::size_t ii = static_cast<std::size_t>(i);
                    acc += row[static_cast<std::size_t>(k) * d + ii] * (bk1[ii] - bk[ii]);
                }
            }
            out[p] = acc;
        }
    });
    return out;
}

std::vector<double> girsanov_log_density(const DriftControl& eta, const PathBundle& bundle) {
    const int d = bundle.dim();
    if (eta.dim() != d) throw std::invalid_argument("girsanov_log_density: dimension mismatch");
    const int n = bundle.grid().n_steps();
    std::vector<double> logd(bundle.n_paths(), 0.0);
    parallel_for(bundle.n_paths(), [&](std::size_t begin, std::size_t end) {
        std::vector<double> ev(static_cast<std::size_t>(d));
        for (std::size_t p = begin; p < end; ++p) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k) {
                eta.eval(k, bundle.history(p, k), ev);
                const auto bk = bundle.state(p, k);
                const auto bk1 = bundle.state(p, k + 1);
                const auto qk = bundle.qv_diag(p, k);
                const auto qk1 = bundle.qv_diag(p, k + 1);
                for (int i = 0; i < d; ++i) {
                    const std::size_t ii = static_cast<std::size_t>(i);
                    acc += ev[ii] * (bk1[ii] - bk[ii]) - 0.5 * ev[ii] * ev[ii] * (qk1[ii] - qk[ii]);
                }
            }
            logd[p] = acc;
        }
    });
    return logd;
}

std::vector<double> girsanov_density(const DriftControl& eta, const PathBundle& bundle) {
    std::vector<double> d = girsanov_log_density(eta, bundle);
    for (double& x : d) x = std::exp(x);
    return d;
}

std::vector<std::vector<double>> compensator_path(const SymControl& eta_sym, const PathBundle& bundle,
                                                  const UncertaintySet& s) {
    const int d = bundle.dim();
    const int n = bundle.grid().n_steps();
    const double dt = bundle.grid().dt();
    std::vector<std::vector<double>> m(bundle.n_paths());
    parallel_for(bundle.n_paths(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t p = begin; p < end; ++p) {
            auto& row = m[p];
            row.assign(static_cast<std::size_t>(n) + 1, 0.0);
            double acc = 0.0;
            for (int k = 0; k < n; ++k) {
                const SymMatrix eta = eta_sym(k, bundle.state(p, k));
                if (eta.dim() != d)
                    throw std::invalid_argument("compensator_path: eta_sym dimension mismatch");
                const auto qk = bundle.qv_diag(p, k);
                const auto qk1 = bundle.qv_diag(p, k + 1);
                // (eta, d<B>) with diagonal d<B>
                double inner = 0.0;
                for (int i = 0; i < d; ++i)
                    inner += eta(i, i) * (qk1[static_cast<std::size_t>(i)] - qk[static_cast<std::size_t>(i)]);
                acc += 2.0 * g_eval(eta, s) * dt - inner;
                row[static_cast<std::size_t>(k) + 1] = acc;
            }
        }
    });
    return m;
}

}  // namespace gcalc
