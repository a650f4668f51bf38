// Serial reference loops against the OpenMP kernels on the ensemble paths.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>

#include <omp.h>

#include "parax/analysis.hpp"
#include "parax/homog.hpp"

using namespace parax;

namespace {

double time_it(const std::function<void()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool same(const std::vector<EnsembleStats>& a, const std::vector<EnsembleStats>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!a[i].bitwise_equal(b[i])) return false;
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    const int workers = argc > 1 ? std::atoi(argv[1]) : omp_get_max_threads();
    std::printf("workers: %d (hardware threads: %d)\n", workers, omp_get_num_procs());
    std::printf("%-22s %10s %10s %8s %s\n", "kernel", "serial_s", "omp_s", "speedup", "bitwise");

    const GridPtr g = make_grid(64, 8.0);
    const SpectralField u0 = gaussian_beam(g, 1.0, 1.0);

    {
        const ModelParams p = make_params(1.0, 1.0, 0.1, 0.5, 0.0, 1.0);
        const std::vector<double> zs{0.0, 10.0, 20.0, 40.0};
        std::vector<EnsembleStats> s, o;
        const double ts = time_it([&] { s = spde_ensemble(u0, p, zs, 400, 7, Exec::serial); });
        const double to = time_it([&] { o = spde_ensemble(u0, p, zs, 400, 7, Exec::parallel, workers); });
        std::printf("%-22s %10.3f %10.3f %8.2f %s\n", "spde_ensemble", ts, to, ts / to, same(s, o) ? "yes" : "NO");
    }
    {
        const ModelParams p = make_params(1.0, 1.0, 0.2, 1.0, 0.05, 1.0);
        const std::vector<double> zs{0.25, 0.5};
        std::vector<EnsembleStats> s, o;
        const double ts = time_it([&] { s = full_ensemble(u0, p, 0.5, zs, 16, 7, 0.1, 0.0, Exec::serial); });
        const double to = time_it([&] { o = full_ensemble(u0, p, 0.5, zs, 16, 7, 0.1, 0.0, Exec::parallel, workers); });
        std::printf("%-22s %10.3f %10.3f %8.2f %s\n", "full_ensemble", ts, to, ts / to, same(s, o) ? "yes" : "NO");
    }
    {
        const auto tuples = default_verification_grid(2000, 1);
        AppendixReport s, o;
        const double ts = time_it([&] { s = verify_appendix_a(tuples, {}, 1e-10, Exec::serial); });
        const double to = time_it([&] { o = verify_appendix_a(tuples, {}, 1e-10, Exec::parallel, workers); });
        const bool eq = s.max_rel_err == o.max_rel_err && s.max_residual == o.max_residual;
        std::printf("%-22s %10.3f %10.3f %8.2f %s\n", "verify_appendix_a", ts, to, ts / to, eq ? "yes" : "NO");
    }
    return 0;
}
