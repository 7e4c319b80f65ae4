#pragma once

// Coordinate pattern search: derivative-free local minimization for the
// small rugged objectives of the sweep harness.  Objectives return +inf
// (or any huge value) outside their validity domain.

#include <functional>
#include <limits>
#include <vector>

namespace nrat {

struct PatternSearchResult {
    std::vector<double> x;
    double value = std::numeric_limits<double>::infinity();
    long evals = 0;
};

inline PatternSearchResult pattern_search(
    const std::function<double(const std::vector<double>&)>& f, std::vector<double> x0,
    double step0, double step_min, long max_evals) {
    PatternSearchResult r;
    r.x = std::move(x0);
    r.value = f(r.x);
    r.evals = 1;
    double h = step0;
    size_t n = r.x.size();
    while (h > step_min && r.evals < max_evals) {
        bool improved = false;
        size_t best_i = 0;
        double best_sign = 0.0, best_val = r.value;
        for (size_t i = 0; i < n && r.evals < max_evals; ++i) {
            for (double s : {1.0, -1.0}) {
                std::vector<double> y = r.x;
                y[i] += s * h;
                double v = f(y);
                ++r.evals;
                if (v < best_val) {
                    best_val = v;
                    best_i = i;
                    best_sign = s;
                    improved = true;
                }
            }
        }
        if (improved) {
            r.x[best_i] += best_sign * h;
            r.value = best_val;
        } else {
            h *= 0.5;
        }
    }
    return r;
}

}  // namespace nrat
