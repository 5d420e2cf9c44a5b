#include "revorbit/error.hpp"
#include "revorbit/kernels.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cstdlib>

namespace {

using namespace revorbit;
using namespace revorbit::testing;

TEST(Kernels, ApsidalSweepMatchesSerial) {
    const auto s = unit_sphere();
    const EffectiveProfile w(s, harmonic(1.0, s), 1.0);
    const CircularOrbit c = stable_circular_orbit(w);
    const auto es = energy_grid(w, c, 16);
    const auto a = kernels::apsidal_sweep_serial(w, es, c.u0);
    const auto b = kernels::apsidal_sweep_parallel(w, es, c.u0);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a[i].E, es[i]);
        EXPECT_EQ(a[i].delta_phi, b[i].delta_phi);
        EXPECT_EQ(a[i].period, b[i].period);
        EXPECT_EQ(a[i].u1, b[i].u1);
    }
}

TEST(Kernels, GridKernelsMatchSerial) {
    const auto s = torus();
    const auto grid = s->interior_grid(2048);
    const auto qa = kernels::quartic_grid_serial(*s, grid);
    const auto qb = kernels::quartic_grid_parallel(*s, grid);
    const auto ha = kernels::h_grid_serial(*s, grid);
    const auto hb = kernels::h_grid_parallel(*s, grid);
    const auto la = kernels::laplace_beltrami_serial(gravitational(1.0, s), *s, grid);
    const auto lb = kernels::laplace_beltrami_parallel(gravitational(1.0, s), *s, grid);
    ASSERT_EQ(qa.size(), grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        EXPECT_EQ(qa[i].z1, qb[i].z1);
        EXPECT_EQ(qa[i].z2, qb[i].z2);
        EXPECT_EQ(qa[i].real, qb[i].real);
        EXPECT_EQ(ha[i], hb[i]);
        EXPECT_EQ(la[i], lb[i]);
    }
}

TEST(Kernels, ErrorsPropagateFromWorkers) {
    const auto s = plane();
    const EffectiveProfile w(s, gravitational(1.0, s), 1.0);
    const std::vector<double> es{-0.4, -0.3, 0.5, -0.2};
    EXPECT_THROW(kernels::apsidal_sweep_serial(w, es, 1.0), Unbound);
    EXPECT_THROW(kernels::apsidal_sweep_parallel(w, es, 1.0), Unbound);
}

TEST(Kernels, ThreadCapFromEnvironment) {
    ::setenv("REVORBIT_THREADS", "2", 1);
    EXPECT_EQ(kernels::thread_cap(), 2);
    ::setenv("REVORBIT_THREADS", "1", 1);
    EXPECT_EQ(kernels::thread_cap(), 1);
    ::setenv("REVORBIT_THREADS", "zero", 1);
    const int fallback = kernels::thread_cap();
    ::unsetenv("REVORBIT_THREADS");
    EXPECT_EQ(fallback, kernels::thread_cap());
    EXPECT_GE(fallback, 1);
}

TEST(Kernels, SingleThreadGivesSameResults) {
    const auto s = unit_sphere();
    const auto grid = s->interior_grid(300);
    ::setenv("REVORBIT_THREADS", "1", 1);
    const auto one = kernels::h_grid_parallel(*s, grid);
    ::unsetenv("REVORBIT_THREADS");
    EXPECT_EQ(one, kernels::h_grid_parallel(*s, grid));
}

} // namespace
