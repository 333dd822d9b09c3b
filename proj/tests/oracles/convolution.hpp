#pragma once

#include <vector>

namespace oracle {

// Full linear convolution, y[n] = sum_k x[k] h[n-k].
inline std::vector<double> convolve(const std::vector<double>& x, const std::vector<double>& h) {
    if (x.empty() || h.empty()) return {};
    std::vector<double> y(x.size() + h.size() - 1, 0.0);
    for (std::size_t n = 0; n < y.size(); ++n) {
        long double acc = 0.0L;
        for (std::size_t k = 0; k < x.size(); ++k) {
            if (n < k) break;
            const std::size_t j = n - k;
            if (j < h.size()) acc += static_cast<long double>(x[k]) * h[j];
        }
        y[n] = static_cast<double>(acc);
    }
    return y;
}

}  // namespace oracle
