#include "flexbench/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <numeric>

#include "flexbench/errors.hpp"

namespace flexbench {

namespace {

// Union area of boxes [p, ref] in 2-D, kept incrementally as points arrive.
class Staircase {
public:
    Staircase(double rx, double ry) : rx_(rx), ry_(ry) {}

    void insert(double x, double y)
    {
        auto right = steps_.lower_bound(x);
        // Dominated by the step at or left of x?
        if (right != steps_.end() && right->first == x && right->second <= y) {
            return;
        }
        if (right != steps_.begin() && std::prev(right)->second <= y) {
            return;
        }
        while (right != steps_.end() && right->second >= y) {
            area_ -= exclusive(right);
            right = steps_.erase(right);
        }
        const double next_x = right == steps_.end() ? rx_ : right->first;
        const double prev_y = right == steps_.begin() ? ry_ : std::prev(right)->second;
        area_ += (next_x - x) * (prev_y - y);
        steps_.emplace_hint(right, x, y);
    }

    double area() const { return area_; }

private:
    using Iter = std::map<double, double>::iterator;

    double exclusive(Iter it)
    {
        const double next_x = std::next(it) == steps_.end() ? rx_ : std::next(it)->first;
        const double prev_y = it == steps_.begin() ? ry_ : std::prev(it)->second;
        return (next_x - it->first) * (prev_y - it->second);
    }

    double rx_;
    double ry_;
    double area_ = 0.0;
    std::map<double, double> steps_; // x ascending, y descending
};

double hv2(std::vector<const double*>& pts, const double* ref)
{
    std::sort(pts.begin(), pts.end(), [](const double* a, const double* b) {
        return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
    });
    double area = 0.0;
    double y_top = ref[1];
    for (const double* p : pts) {
        if (p[1] < y_top) {
            area += (ref[0] - p[0]) * (y_top - p[1]);
            y_top = p[1];
        }
    }
    return area;
}

double hv3(std::vector<const double*>& pts, const double* ref)
{
    std::sort(pts.begin(), pts.end(), [](const double* a, const double* b) { return a[2] < b[2]; });
    Staircase stairs(ref[0], ref[1]);
    double volume = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        stairs.insert(pts[i][0], pts[i][1]);
        const double z_next = i + 1 < pts.size() ? pts[i + 1][2] : ref[2];
        volume += stairs.area() * (z_next - pts[i][2]);
    }
    return volume;
}

// Slices along the last coordinate down to the 3-D sweep.
double hv_rec(std::vector<const double*>& pts, const double* ref, std::size_t d)
{
    if (pts.empty()) {
        return 0.0;
    }
    if (d == 1) {
        double lo = ref[0];
        for (const double* p : pts) {
            lo = std::min(lo, p[0]);
        }
        return ref[0] - lo;
    }
    if (d == 2) {
        return hv2(pts, ref);
    }
    if (d == 3) {
        return hv3(pts, ref);
    }
    const std::size_t k = d - 1;
    std::sort(pts.begin(), pts.end(), [k](const double* a, const double* b) { return a[k] < b[k]; });
    double volume = 0.0;
    std::vector<const double*> slice;
    slice.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        slice.push_back(pts[i]);
        const double next = i + 1 < pts.size() ? pts[i + 1][k] : ref[k];
        const double depth = next - pts[i][k];
        if (depth > 0.0) {
            std::vector<const double*> work = slice;
            volume += hv_rec(work, ref, k) * depth;
        }
    }
    return volume;
}

} // namespace

double hypervolume(std::span<const Point> front, std::span<const double> ref)
{
    if (front.empty()) {
        return 0.0;
    }
    const std::size_t d = front.front().size();
    if (d == 0) {
        throw DomainError("hypervolume: points must have at least one coordinate");
    }
    std::vector<double> r(ref.begin(), ref.end());
    if (r.empty()) {
        r.assign(d, 1.0);
    }
    if (r.size() != d) {
        throw DomainError("hypervolume: reference point dimension mismatch");
    }
    std::vector<const double*> pts;
    pts.reserve(front.size());
    for (const auto& p : front) {
        if (p.size() != d) {
            throw DomainError("hypervolume: points of mixed dimension");
        }
        bool inside = true;
        for (std::size_t i = 0; i < d; ++i) {
            inside = inside && p[i] < r[i];
        }
        if (inside) {
            pts.push_back(p.data());
        }
    }
    return hv_rec(pts, r.data(), d);
}

std::optional<std::uint64_t> computational_effort(std::span<const std::optional<std::uint64_t>> checkpoints,
                                                  std::uint64_t granularity, double z)
{
    if (granularity == 0) {
        throw DomainError("computational_effort: granularity must be positive");
    }
    if (!(z > 0.0 && z < 1.0)) {
        throw DomainError("computational_effort: z must lie in (0, 1)");
    }
    std::vector<std::uint64_t> hits;
    for (const auto& c : checkpoints) {
        if (c) {
            if (*c == 0 || *c % granularity != 0) {
                throw DomainError("computational_effort: checkpoints must be positive multiples of the granularity");
            }
            hits.push_back(*c);
        }
    }
    if (hits.empty()) {
        return std::nullopt;
    }
    std::sort(hits.begin(), hits.end());
    const double total = static_cast<double>(checkpoints.size());
    std::optional<std::uint64_t> best;
    std::size_t succeeded = 0;
    for (std::uint64_t k = granularity; k <= hits.back(); k += granularity) {
        while (succeeded < hits.size() && hits[succeeded] <= k) {
            ++succeeded;
        }
        if (succeeded == 0) {
            continue;
        }
        const double p = static_cast<double>(succeeded) / total;
        std::uint64_t runs = 1;
        if (p < 1.0) {
            runs = static_cast<std::uint64_t>(std::ceil(std::log(1.0 - z) / std::log(1.0 - p)));
        }
        const std::uint64_t effort = k * std::max<std::uint64_t>(runs, 1);
        if (!best || effort < *best) {
            best = effort;
        }
    }
    return best;
}

Aggregates cost_aggregates(std::span<const double> costs)
{
    if (costs.empty()) {
        throw DomainError("cost_aggregates: no defined costs");
    }
    const auto [lo, hi] = std::minmax_element(costs.begin(), costs.end());
    const double sum = std::accumulate(costs.begin(), costs.end(), 0.0);
    return {*hi, sum / static_cast<double>(costs.size()), *lo};
}

Aggregates cost_aggregates(const CostMatrix& m)
{
    std::vector<double> values;
    for (std::size_t t = 0; t < m.cells.size(); ++t) {
        for (std::size_t s = 0; s < m.cells[t].size(); ++s) {
            const bool same = t < m.targets.size() && s < m.sources.size() && m.targets[t] == m.sources[s];
            if (!same && m.cells[t][s]) {
                values.push_back(*m.cells[t][s]);
            }
        }
    }
    return cost_aggregates(values);
}

double success_threshold(double reference_hv, double fraction)
{
    if (!(reference_hv > 0.0 && reference_hv <= 1.0) || !(fraction > 0.0 && fraction <= 1.0)) {
        throw DomainError("success_threshold: arguments must lie in (0, 1]");
    }
    return fraction * reference_hv;
}

} // namespace flexbench
