#pragma once

// Exact synthesis of fractional Gaussian noise by circulant embedding.
//
// The lag-k autocovariance of unit-variance fGn with Hurst index H is
//   gamma(k) = ((k+1)^{2H} - 2 k^{2H} + (k-1)^{2H}) / 2.
// Embedding the n x n Toeplitz covariance into a circulant of size m >= 2n
// makes the covariance diagonal in Fourier space; sampling independent
// complex Gaussians per frequency and transforming back yields a sample with
// the exact target covariance (up to the nonnegativity of the embedding
// eigenvalues, which is checked at runtime).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mmf/fft.hpp"
#include "mmf/rng.hpp"

namespace mmf {

// Raised when a numerical construction breaks an internal guarantee, e.g. the
// circulant embedding produces materially negative eigenvalues.
class NumericError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct FgnSample {
    std::vector<double> values;
    double hurst = 0.5;
};

inline double fgn_autocovariance(double hurst, std::int64_t lag) {
    const double k = static_cast<double>(lag < 0 ? -lag : lag);
    if (k == 0.0) return 1.0;
    const double two_h = 2.0 * hurst;
    return 0.5 * (std::pow(k + 1.0, two_h) - 2.0 * std::pow(k, two_h) +
                  std::pow(k - 1.0, two_h));
}

// Smallest even 5-smooth integer >= n; keeps FFTW in its fast codelets.
inline std::size_t next_fast_size(std::size_t n) {
    if (n < 2) return 2;
    for (std::size_t m = n;; ++m) {
        std::size_t r = m;
        while (r % 2 == 0) r /= 2;
        while (r % 3 == 0) r /= 3;
        while (r % 5 == 0) r /= 5;
        if (r == 1 && m % 2 == 0) return m;
    }
}

// n draws of zero-mean unit-variance fGn with the given Hurst index.
inline FgnSample generate_fgn(std::size_t n, double hurst, Rng& rng) {
    if (n < 2) {
        throw std::invalid_argument("generate_fgn: n must be >= 2");
    }
    if (!(hurst > 0.0) || !(hurst < 1.0)) {
        throw std::invalid_argument("generate_fgn: hurst must be in (0, 1)");
    }

    const std::size_t m = next_fast_size(2 * n);
    const std::size_t half = m / 2;

    // First row of the circulant: gamma out to lag m/2, then mirrored.
    std::vector<double> row(m);
    for (std::size_t j = 0; j <= half; ++j) {
        row[j] = fgn_autocovariance(hurst, static_cast<std::int64_t>(j));
    }
    for (std::size_t j = half + 1; j < m; ++j) {
        row[j] = row[m - j];
    }

    RealFft fft(m);
    std::vector<std::complex<double>> spectrum(fft.spectrum_size());
    fft.forward(row.data(), spectrum.data());

    std::vector<double> eigenvalues(half + 1);
    double max_eig = 0.0;
    for (std::size_t k = 0; k <= half; ++k) {
        eigenvalues[k] = spectrum[k].real();
        max_eig = std::max(max_eig, eigenvalues[k]);
    }
    const double tolerance = 1e-10 * std::max(1.0, max_eig);
    for (std::size_t k = 0; k <= half; ++k) {
        if (eigenvalues[k] < -tolerance) {
            throw NumericError(
                "generate_fgn: circulant embedding eigenvalue is negative "
                "beyond tolerance");
        }
        eigenvalues[k] = std::max(eigenvalues[k], 0.0);
    }

    // Hermitian spectral noise with Var = eigenvalue per frequency.
    std::vector<std::complex<double>> noise(fft.spectrum_size());
    noise[0] = {std::sqrt(eigenvalues[0]) * rng.normal(), 0.0};
    for (std::size_t k = 1; k < half; ++k) {
        const double amp = std::sqrt(0.5 * eigenvalues[k]);
        const double re = rng.normal();
        const double im = rng.normal();
        noise[k] = {amp * re, amp * im};
    }
    noise[half] = {std::sqrt(eigenvalues[half]) * rng.normal(), 0.0};

    std::vector<double> full(m);
    fft.backward(noise.data(), full.data());

    FgnSample sample;
    sample.hurst = hurst;
    sample.values.resize(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (std::size_t i = 0; i < n; ++i) {
        sample.values[i] = full[i] * scale;
    }
    return sample;
}

}  // namespace mmf
