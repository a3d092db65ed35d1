#include "fracsemi/fastconv.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace fracsemi {

namespace {
// The FFTW planner is not thread-safe; executing plans on distinct buffers is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

int next_pow2(int v) {
    int p = 1;
    while (p < v) p <<= 1;
    return p;
}
}  // namespace

struct ToeplitzConvolver::Plans {
    fftw_plan forward = nullptr;   // r2c, length m
    fftw_plan backward = nullptr;  // c2r, length m
};

ToeplitzConvolver::ToeplitzConvolver(const std::vector<double>& first_column) {
    n_ = static_cast<int>(first_column.size());
    if (n_ < 1) throw std::invalid_argument("ToeplitzConvolver: empty column");
    m_ = next_pow2(2 * n_);

    const int nc = m_ / 2 + 1;
    plans_ = std::make_unique<Plans>();

    double* real = fftw_alloc_real(static_cast<size_t>(m_));
    fftw_complex* cplx = fftw_alloc_complex(static_cast<size_t>(nc));
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plans_->forward = fftw_plan_dft_r2c_1d(m_, real, cplx, FFTW_ESTIMATE);
        plans_->backward = fftw_plan_dft_c2r_1d(m_, cplx, real, FFTW_ESTIMATE);
    }

    // circulant embedding of the symmetric Toeplitz column:
    // [t_0, t_1, .., t_{n-1}, 0.., t_{n-1}, .., t_1]
    std::memset(real, 0, sizeof(double) * static_cast<size_t>(m_));
    for (int k = 0; k < n_; ++k) real[k] = first_column[static_cast<size_t>(k)];
    for (int k = 1; k < n_; ++k) real[m_ - k] = first_column[static_cast<size_t>(k)];
    fftw_execute_dft_r2c(plans_->forward, real, cplx);

    // embedding is real and even, so the spectrum is real
    spectrum_.resize(static_cast<size_t>(nc));
    for (int k = 0; k < nc; ++k) spectrum_[static_cast<size_t>(k)] = cplx[k][0];

    fftw_free(real);
    fftw_free(cplx);
}

ToeplitzConvolver::~ToeplitzConvolver() {
    if (plans_) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        if (plans_->forward) fftw_destroy_plan(plans_->forward);
        if (plans_->backward) fftw_destroy_plan(plans_->backward);
    }
}

void ToeplitzConvolver::multiply(const double* x, double* out) const {
    const int nc = m_ / 2 + 1;
    double* real = fftw_alloc_real(static_cast<size_t>(m_));
    fftw_complex* cplx = fftw_alloc_complex(static_cast<size_t>(nc));

    std::memset(real, 0, sizeof(double) * static_cast<size_t>(m_));
    std::memcpy(real, x, sizeof(double) * static_cast<size_t>(n_));
    fftw_execute_dft_r2c(plans_->forward, real, cplx);
    for (int k = 0; k < nc; ++k) {
        cplx[k][0] *= spectrum_[static_cast<size_t>(k)];
        cplx[k][1] *= spectrum_[static_cast<size_t>(k)];
    }
    fftw_execute_dft_c2r(plans_->backward, cplx, real);

    const double scale = 1.0 / m_;
    for (int i = 0; i < n_; ++i) out[i] = real[i] * scale;

    fftw_free(real);
    fftw_free(cplx);
}

}  // namespace fracsemi
