#pragma once

#include "revorbit/analysis.hpp"

#include <vector>

// Grid kernels in serial and OpenMP form. Both variants produce identical
// output in grid order; the serial ones are the reference for tests.
namespace revorbit::kernels {

/// Thread count for parallel kernels: REVORBIT_THREADS when set to a positive
/// integer, otherwise the OpenMP default.
int thread_cap();

std::vector<ApsidalResult> apsidal_sweep_serial(const EffectiveProfile& w, const std::vector<double>& energies,
                                                double u0, const ApsidalOptions& opts = {});
std::vector<ApsidalResult> apsidal_sweep_parallel(const EffectiveProfile& w, const std::vector<double>& energies,
                                                  double u0, const ApsidalOptions& opts = {});

std::vector<QuarticRoots> quartic_grid_serial(const Surface& s, const std::vector<double>& grid);
std::vector<QuarticRoots> quartic_grid_parallel(const Surface& s, const std::vector<double>& grid);

std::vector<double> h_grid_serial(const Surface& s, const std::vector<double>& grid);
std::vector<double> h_grid_parallel(const Surface& s, const std::vector<double>& grid);

std::vector<double> laplace_beltrami_serial(const CentralPotential& p, const Surface& s,
                                            const std::vector<double>& grid);
std::vector<double> laplace_beltrami_parallel(const CentralPotential& p, const Surface& s,
                                              const std::vector<double>& grid);

} // namespace revorbit::kernels
