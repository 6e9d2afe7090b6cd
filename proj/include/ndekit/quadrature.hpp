#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace ndekit {

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = false;
};

namespace detail {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
inline constexpr double gk21_x[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};
inline constexpr double gk21_wk[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077958109831074, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
inline constexpr double gk21_wg[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk21(F& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    // On very short segments a node can round onto an endpoint; keep it inside.
    const double lo = std::min(a, b), hi = std::max(a, b);
    auto at = [&](double x) {
        if (x <= lo) x = std::nextafter(lo, hi);
        else if (x >= hi) x = std::nextafter(hi, lo);
        return f(x);
    };
    const double fc = at(c);
    double resk = gk21_wk[10] * fc;
    double resg = 0.0;
    for (int j = 0; j < 10; ++j) {
        const double dx = h * gk21_x[j];
        const double fsum = at(c - dx) + at(c + dx);
        resk += gk21_wk[j] * fsum;
        if (j % 2 == 1) resg += gk21_wg[j / 2] * fsum;
    }
    return {a, b, resk * h, std::fabs((resk - resg) * h)};
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod: always bisect the segment with the largest
// error estimate. Deterministic for identical inputs.
template <class F>
QuadratureResult integrate(F f, double a, double b, double rel_tol = 1e-12,
                           double abs_tol = 0.0, int max_segments = 4000) {
    QuadratureResult out;
    if (a == b) {
        out.converged = true;
        return out;
    }
    std::priority_queue<detail::Segment> heap;
    auto first = detail::gk21(f, a, b);
    heap.push(first);
    double total = first.value;
    double err = first.error;
    int segments = 1;
    out.evaluations = 21;
    while (err > std::max(abs_tol, rel_tol * std::fabs(total)) && segments < max_segments) {
        auto worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= std::min(worst.a, worst.b) || mid >= std::max(worst.a, worst.b)) {
            heap.push(worst);  // cannot split further in double precision
            break;
        }
        auto left = detail::gk21(f, worst.a, mid);
        auto right = detail::gk21(f, mid, worst.b);
        out.evaluations += 42;
        heap.push(left);
        heap.push(right);
        ++segments;
        total += left.value + right.value - worst.value;
        err += left.error + right.error - worst.error;
    }
    // Final re-summation removes drift from the incremental updates.
    double sum = 0.0, esum = 0.0;
    std::vector<detail::Segment> all;
    all.reserve(heap.size());
    while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
    }
    std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
    for (const auto& s : all) {
        sum += s.value;
        esum += s.error;
    }
    out.value = sum;
    out.error = esum;
    out.converged = esum <= std::max(abs_tol, rel_tol * std::fabs(sum)) * 1.0000001 ||
                    esum <= 1e-15 * std::fabs(sum);
    return out;
}

}  // namespace ndekit
