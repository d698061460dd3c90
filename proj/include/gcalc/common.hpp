#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace gcalc {

// Bad user input (config files, malformed arguments).
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The numerics broke an invariant they were supposed to keep
// (CFL violated mid-run, nonpositive value function, diverged ODE).
class numerical_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A control produced a covariance outside the uncertainty set.
class control_violation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Global cap on worker threads used by parallel_for. Results never depend
/// on this value; it only bounds wall time.
int max_workers();
void set_max_workers(int n);

/// Runs body(begin, end) over chunks of [0, n). Chunk boundaries are a
/// function of n only, so any write pattern indexed by the loop variable is
/// reproducible regardless of thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

/// Fixed-order pairwise summation; deterministic and more accurate than a
/// running sum for long arrays.
double pairwise_sum(std::span<const double> xs);

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;  // standard error of the mean
};

MeanSe mean_se(std::span<const double> xs);

inline double sqr(double x) { return x * x; }

}  // namespace gcalc
