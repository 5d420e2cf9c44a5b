#include "revorbit/kernels.hpp"

#include <omp.h>

#include <cstdlib>
#include <exception>
#include <string>

namespace revorbit::kernels {

int thread_cap() {
    if (const char* env = std::getenv("REVORBIT_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
    }
    return omp_get_max_threads();
}

namespace {

// Runs body(i) for i in [0, n) across threads. The first exception (lowest
// index) is rethrown after the loop so failures do not depend on scheduling.
template <class Body>
void parallel_for(long n, Body body) {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(dynamic) num_threads(thread_cap())
    for (long i = 0; i < n; ++i) {
        try {
            body(i);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

} // namespace

std::vector<ApsidalResult> apsidal_sweep_serial(const EffectiveProfile& w, const std::vector<double>& energies,
                                                double u0, const ApsidalOptions& opts) {
    std::vector<ApsidalResult> out;
    out.reserve(energies.size());
    for (double E : energies) out.push_back(apsidal_angle(w, E, u0, opts));
    return out;
}

std::vector<ApsidalResult> apsidal_sweep_parallel(const EffectiveProfile& w, const std::vector<double>& energies,
                                                  double u0, const ApsidalOptions& opts) {
    std::vector<ApsidalResult> out(energies.size());
    parallel_for(static_cast<long>(energies.size()), [&](long i) {
        const auto k = static_cast<std::size_t>(i);
        out[k] = apsidal_angle(w, energies[k], u0, opts);
    });
    return out;
}

std::vector<QuarticRoots> quartic_grid_serial(const Surface& s, const std::vector<double>& grid) {
    std::vector<QuarticRoots> out;
    out.reserve(grid.size());
    for (double u : grid) out.push_back(beta_quartic(s, u));
    return out;
}

std::vector<QuarticRoots> quartic_grid_parallel(const Surface& s, const std::vector<double>& grid) {
    std::vector<QuarticRoots> out(grid.size());
    parallel_for(static_cast<long>(grid.size()), [&](long i) {
        const auto k = static_cast<std::size_t>(i);
        out[k] = beta_quartic(s, grid[k]);
    });
    return out;
}

std::vector<double> h_grid_serial(const Surface& s, const std::vector<double>& grid) {
    std::vector<double> out;
    out.reserve(grid.size());
    for (double u : grid) out.push_back(h_function(s, u));
    return out;
}

std::vector<double> h_grid_parallel(const Surface& s, const std::vector<double>& grid) {
    std::vector<double> out(grid.size());
    parallel_for(static_cast<long>(grid.size()), [&](long i) {
        const auto k = static_cast<std::size_t>(i);
        out[k] = h_function(s, grid[k]);
    });
    return out;
}

std::vector<double> laplace_beltrami_serial(const CentralPotential& p, const Surface& s,
                                            const std::vector<double>& grid) {
    std::vector<double> out;
    out.reserve(grid.size());
    for (double u : grid) out.push_back(laplace_beltrami_residual(p, s, u));
    return out;
}

std::vector<double> laplace_beltrami_parallel(const CentralPotential& p, const Surface& s,
                                              const std::vector<double>& grid) {
    std::vector<double> out(grid.size());
    parallel_for(static_cast<long>(grid.size()), [&](long i) {
        const auto k = static_cast<std::size_t>(i);
        out[k] = laplace_beltrami_residual(p, s, grid[k]);
    });
    return out;
}

} // namespace revorbit::kernels
