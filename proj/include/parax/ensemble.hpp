#pragma once

#include <cstdint>
#include <exception>
#include <span>
#include <vector>

#include <omp.h>

#include "parax/exec.hpp"
#include "parax/grid.hpp"

namespace parax {

/// Running sums of a complex field and of its squared modulus over an
/// index-ordered set of paths.
///
/// Sums are kept as a binary tree over globally aligned power-of-two blocks
/// of path indices, so the floating-point result depends only on the index
/// range [first, end), never on how the range was split between workers.
/// merge(later) with later.first_index() == end_index() is bitwise equal to
/// adding the later paths one by one.
class EnsembleStats {
public:
    explicit EnsembleStats(std::size_t field_size = 0, std::uint64_t first_index = 0);

    void add(std::span<const cplx> sample);
    void merge(const EnsembleStats& later);

    std::uint64_t count() const { return end_ - first_; }
    std::uint64_t first_index() const { return first_; }
    std::uint64_t end_index() const { return end_; }
    std::size_t field_size() const { return size_; }

    std::vector<cplx> sum() const;
    std::vector<double> sum_sq() const;
    std::vector<cplx> mean() const;
    /// Running mean of |u|^2.
    std::vector<double> second_moment() const;
    /// Unbiased sample variance of u (E|u - mean|^2).
    std::vector<double> variance() const;
    /// Standard error of the mean, sqrt(variance / count).
    std::vector<double> standard_error() const;

    bool bitwise_equal(const EnsembleStats& other) const;

private:
    struct Block {
        std::uint64_t start = 0;
        std::uint64_t size = 0;
        std::vector<cplx> sum;
        std::vector<double> sum_sq;
    };
    void push(Block b);
    void totals(std::vector<cplx>& s, std::vector<double>& q) const;

    std::size_t size_;
    std::uint64_t first_;
    std::uint64_t end_;
    std::vector<Block> stack_;
};

/// Run fn(path, outputs) for path = 0..n_paths-1 and accumulate each of the
/// n_outputs fields. fn must resize/fill outputs[j] to field_size and
/// depend on nothing but the path index. Results are bitwise independent of
/// exec and worker count.
template <class PathFn>
std::vector<EnsembleStats> run_paths(std::uint64_t n_paths, std::size_t n_outputs, std::size_t field_size,
                                     PathFn&& fn, Exec exec = Exec::parallel, int workers = 0) {
    std::vector<EnsembleStats> total(n_outputs, EnsembleStats(field_size, 0));
    if (exec == Exec::serial) {
        std::vector<std::vector<cplx>> out(n_outputs);
        for (std::uint64_t p = 0; p < n_paths; ++p) {
            fn(p, out);
            for (std::size_t j = 0; j < n_outputs; ++j) total[j].add(out[j]);
        }
        return total;
    }
    const int nt = workers > 0 ? workers : omp_get_max_threads();
    std::vector<std::vector<EnsembleStats>> partial(static_cast<std::size_t>(nt));
    std::exception_ptr err;
#pragma omp parallel num_threads(nt)
    {
        const auto t = static_cast<std::uint64_t>(omp_get_thread_num());
        const auto team = static_cast<std::uint64_t>(omp_get_num_threads());
        const std::uint64_t lo = n_paths * t / team;
        const std::uint64_t hi = n_paths * (t + 1) / team;
        std::vector<EnsembleStats> local(n_outputs, EnsembleStats(field_size, lo));
        std::vector<std::vector<cplx>> out(n_outputs);
        try {
            for (std::uint64_t p = lo; p < hi; ++p) {
                fn(p, out);
                for (std::size_t j = 0; j < n_outputs; ++j) local[j].add(out[j]);
            }
        } catch (...) {
#pragma omp critical(parax_run_paths_err)
            if (!err) err = std::current_exception();
        }
        partial[t] = std::move(local);
    }
    if (err) std::rethrow_exception(err);
    for (auto& chunk : partial) {
        if (chunk.empty()) continue;
        for (std::size_t j = 0; j < n_outputs; ++j) total[j].merge(chunk[j]);
    }
    return total;
}

}  // namespace parax
