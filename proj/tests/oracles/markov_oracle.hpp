#pragma once

// Exact stationary mean queue length of the corpus model, computed from its
// Markov chain rather than by simulation.
//
// End-of-tick state is (q waiting, b clerk busy). One tick:
//   1. with probability pa a customer joins the queue
//   2. an idle clerk takes the head of the queue, if any
//   3. a busy clerk finishes with probability ps
// The waiting count is truncated at `levels` states (arrivals at the cap are
// dropped). Starting from the model's initial state (2 waiting, clerk idle),
// the distribution is pushed forward until the L1 change drops below `tol`.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

struct ChainResult {
    double mean_waiting = 0.0;
    std::size_t iterations = 0;
    double last_delta = 0.0;
    double mass_at_cap = 0.0;
};

inline ChainResult queue_chain_mean(double pa, double ps, std::size_t levels = 10000, double tol = 1e-12,
                                    std::size_t max_iter = 50000000) {
    const std::size_t n = levels;  // q in [0, n)
    std::vector<double> p0(n, 0.0), p1(n, 0.0), n0(n), n1(n);
    p0[2] = 1.0;
    std::size_t hi = 3;  // states >= hi carry no mass
    ChainResult r;
    for (std::size_t it = 1; it <= max_iter; ++it) {
        const std::size_t lim = std::min(n, hi + 1);
        std::fill(n0.begin(), n0.begin() + lim, 0.0);
        std::fill(n1.begin(), n1.begin() + lim, 0.0);
        for (std::size_t q = 0; q < hi; ++q) {
            for (int b = 0; b < 2; ++b) {
                const double m = b ? p1[q] : p0[q];
                if (m == 0.0) continue;
                for (int a = 0; a < 2; ++a) {
                    const double pm = m * (a ? pa : 1.0 - pa);
                    if (pm == 0.0) continue;
                    std::size_t q1 = std::min(q + a, n - 1);
                    int b1 = b;
                    if (b1 == 0 && q1 > 0) {
                        --q1;
                        b1 = 1;
                    }
                    if (b1 == 1) {
                        n0[q1] += pm * ps;
                        n1[q1] += pm * (1.0 - ps);
                    } else {
                        n0[q1] += pm;
                    }
                }
            }
        }
        double delta = 0.0;
        for (std::size_t q = 0; q < lim; ++q) delta += std::fabs(n0[q] - p0[q]) + std::fabs(n1[q] - p1[q]);
        std::copy(n0.begin(), n0.begin() + lim, p0.begin());
        std::copy(n1.begin(), n1.begin() + lim, p1.begin());
        hi = lim;
        r.iterations = it;
        r.last_delta = delta;
        if (delta < tol) break;
    }
    for (std::size_t q = 0; q < n; ++q) r.mean_waiting += static_cast<double>(q) * (p0[q] + p1[q]);
    r.mass_at_cap = p0[n - 1] + p1[n - 1];
    return r;
}

}  // namespace oracle
