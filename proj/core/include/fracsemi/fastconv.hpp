#pragma once

#include <memory>
#include <vector>

namespace fracsemi {

// Multiplies by a symmetric Toeplitz matrix T (T_ij = t_{|i-j|}) in
// O(n log n) via circulant embedding. Plans are created once at construction;
// multiply() is const and safe to call from several threads at once.
class ToeplitzConvolver {
public:
    explicit ToeplitzConvolver(const std::vector<double>& first_column);
    ~ToeplitzConvolver();

    ToeplitzConvolver(const ToeplitzConvolver&) = delete;
    ToeplitzConvolver& operator=(const ToeplitzConvolver&) = delete;

    int size() const { return n_; }
    void multiply(const double* x, double* out) const;

private:
    struct Plans;
    int n_ = 0;
    int m_ = 0;  // circulant length, power of two >= 2n
    std::vector<double> spectrum_;  // real spectrum of the symmetric embedding
    std::unique_ptr<Plans> plans_;
};

}  // namespace fracsemi
