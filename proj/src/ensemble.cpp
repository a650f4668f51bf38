#include "parax/ensemble.hpp"

#include <cmath>
#include <cstring>

#include "parax/errors.hpp"

namespace parax {

EnsembleStats::EnsembleStats(std::size_t field_size, std::uint64_t first_index)
    : size_(field_size), first_(first_index), end_(first_index) {}

void EnsembleStats::push(Block b) {
    while (!stack_.empty()) {
        Block& top = stack_.back();
        if (top.size != b.size || top.start + top.size != b.start || top.start % (2 * top.size) != 0) break;
        for (std::size_t i = 0; i < size_; ++i) {
            top.sum[i] += b.sum[i];
            top.sum_sq[i] += b.sum_sq[i];
        }
        top.size *= 2;
        b = std::move(top);
        stack_.pop_back();
    }
    stack_.push_back(std::move(b));
}

void EnsembleStats::add(std::span<const cplx> sample) {
    if (sample.size() != size_) throw UsageError("sample size does not match accumulator field size");
    Block b;
    b.start = end_;
    b.size = 1;
    b.sum.assign(sample.begin(), sample.end());
    b.sum_sq.resize(size_);
    for (std::size_t i = 0; i < size_; ++i) b.sum_sq[i] = std::norm(sample[i]);
    ++end_;
    push(std::move(b));
}

void EnsembleStats::merge(const EnsembleStats& later) {
    if (later.size_ != size_) throw UsageError("merging accumulators of different field size");
    if (later.count() == 0) return;
    if (later.first_ != end_) throw UsageError("merge requires contiguous path ranges in index order");
    for (const Block& b : later.stack_) push(b);
    end_ = later.end_;
}

void EnsembleStats::totals(std::vector<cplx>& s, std::vector<double>& q) const {
    s.assign(size_, cplx{});
    q.assign(size_, 0.0);
    for (std::size_t b = 0; b < stack_.size(); ++b) {
        const Block& blk = stack_[b];
        for (std::size_t i = 0; i < size_; ++i) {
            s[i] += blk.sum[i];
            q[i] += blk.sum_sq[i];
        }
    }
}

std::vector<cplx> EnsembleStats::sum() const {
    std::vector<cplx> s;
    std::vector<double> q;
    totals(s, q);
    return s;
}

std::vector<double> EnsembleStats::sum_sq() const {
    std::vector<cplx> s;
    std::vector<double> q;
    totals(s, q);
    return q;
}

std::vector<cplx> EnsembleStats::mean() const {
    if (count() == 0) throw UsageError("mean of an empty ensemble");
    auto s = sum();
    const double inv = 1.0 / static_cast<double>(count());
    for (auto& v : s) v *= inv;
    return s;
}

std::vector<double> EnsembleStats::second_moment() const {
    if (count() == 0) throw UsageError("second moment of an empty ensemble");
    auto q = sum_sq();
    const double inv = 1.0 / static_cast<double>(count());
    for (auto& v : q) v *= inv;
    return q;
}

std::vector<double> EnsembleStats::variance() const {
    if (count() < 2) throw UsageError("variance needs at least two paths");
    std::vector<cplx> s;
    std::vector<double> q;
    totals(s, q);
    const double n = static_cast<double>(count());
    std::vector<double> var(size_);
    for (std::size_t i = 0; i < size_; ++i) var[i] = std::max(0.0, (q[i] - std::norm(s[i]) / n) / (n - 1.0));
    return var;
}

std::vector<double> EnsembleStats::standard_error() const {
    auto v = variance();
    const double n = static_cast<double>(count());
    for (auto& x : v) x = std::sqrt(x / n);
    return v;
}

bool EnsembleStats::bitwise_equal(const EnsembleStats& o) const {
    if (size_ != o.size_ || first_ != o.first_ || end_ != o.end_ || stack_.size() != o.stack_.size()) return false;
    for (std::size_t b = 0; b < stack_.size(); ++b) {
        const Block& x = stack_[b];
        const Block& y = o.stack_[b];
        if (x.start != y.start || x.size != y.size) return false;
        if (std::memcmp(x.sum.data(), y.sum.data(), size_ * sizeof(cplx)) != 0) return false;
        if (std::memcmp(x.sum_sq.data(), y.sum_sq.data(), size_ * sizeof(double)) != 0) return false;
    }
    return true;
}

}  // namespace parax
