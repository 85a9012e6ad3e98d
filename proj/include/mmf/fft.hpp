#pragma once

// RAII wrapper around FFTW's real<->halfcomplex transforms.
//
// Plan creation/destruction in FFTW is not thread safe, so both are guarded
// by a process-wide mutex; fftw_execute on distinct plans is safe. Plans use
// FFTW_ESTIMATE so that the chosen algorithm (and hence the bit pattern of
// results) does not depend on runtime measurement.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <cstring>
#include <mutex>
#include <stdexcept>

namespace mmf {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

// Fixed-size transform pair: real[n] <-> complex[n/2+1].
class RealFft {
  public:
    explicit RealFft(std::size_t n) : n_(n) {
        if (n < 2) {
            throw std::invalid_argument("RealFft: size must be >= 2");
        }
        real_ = fftw_alloc_real(n_);
        cplx_ = fftw_alloc_complex(n_ / 2 + 1);
        if (real_ == nullptr || cplx_ == nullptr) {
            fftw_free(real_);
            fftw_free(cplx_);
            throw std::bad_alloc();
        }
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fwd_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), real_, cplx_,
                                    FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), cplx_, real_,
                                    FFTW_ESTIMATE);
        if (fwd_ == nullptr || bwd_ == nullptr) {
            throw std::runtime_error("RealFft: plan creation failed");
        }
    }

    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    ~RealFft() {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        if (fwd_ != nullptr) fftw_destroy_plan(fwd_);
        if (bwd_ != nullptr) fftw_destroy_plan(bwd_);
        fftw_free(real_);
        fftw_free(cplx_);
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t spectrum_size() const noexcept { return n_ / 2 + 1; }

    // out[k], k = 0..n/2, unnormalized DFT of in[0..n).
    void forward(const double* in, std::complex<double>* out) {
        std::memcpy(real_, in, n_ * sizeof(double));
        fftw_execute(fwd_);
        for (std::size_t k = 0; k < spectrum_size(); ++k) {
            out[k] = {cplx_[k][0], cplx_[k][1]};
        }
    }

    // Unnormalized inverse of the halfcomplex spectrum; caller divides by n
    // (or whatever normalization the algorithm requires).
    void backward(const std::complex<double>* in, double* out) {
        for (std::size_t k = 0; k < spectrum_size(); ++k) {
            cplx_[k][0] = in[k].real();
            cplx_[k][1] = in[k].imag();
        }
        fftw_execute(bwd_);
        std::memcpy(out, real_, n_ * sizeof(double));
    }

  private:
    std::size_t n_;
    double* real_ = nullptr;
    fftw_complex* cplx_ = nullptr;
    fftw_plan fwd_ = nullptr;
    fftw_plan bwd_ = nullptr;
};

}  // namespace mmf
