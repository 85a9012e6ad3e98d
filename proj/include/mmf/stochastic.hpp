#pragma once

// Order-flow input streams: the +-1 direction series with Hurst index H_s and
// the heavy-tailed relative-price series with Student-t marginals (tail index
// alpha_x) and Hurst index H_x.
//
// Long memory in the relative prices is imposed by the iterative amplitude
// adjusted Fourier transform (IAAFT): the algorithm alternates between
// forcing the power spectrum of an independently generated fGn sample with
// the target Hurst index and restoring the exact Student-t sample by rank
// reordering, so the output is a permutation of the input draws.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "mmf/fft.hpp"
#include "mmf/fgn.hpp"
#include "mmf/rng.hpp"

namespace mmf {

struct SignSeries {
    std::vector<int> values;  // each exactly +1 or -1
    double target_hurst = 0.5;
};

struct IaaftDiagnostics {
    int iterations = 0;
    bool converged = false;
    // RMS mismatch between the surrogate's amplitude spectrum and the target,
    // relative to the RMS of the target spectrum.
    double spectrum_rms = std::numeric_limits<double>::quiet_NaN();
};

struct RelativePriceSeries {
    std::vector<double> values;  // log-price units
    double tail_index = std::numeric_limits<double>::quiet_NaN();
    double target_hurst = 0.5;
    IaaftDiagnostics diagnostics;
};

// Thresholds fGn at zero; ties map to +1. The arcsine law ties the sign
// autocorrelation to the Gaussian one with the same power-law decay, so the
// asymptotic Hurst index carries over.
inline SignSeries signs_from_fgn(const FgnSample& fgn) {
    if (fgn.values.empty()) {
        throw std::invalid_argument("signs_from_fgn: input is empty");
    }
    SignSeries signs;
    signs.target_hurst = fgn.hurst;
    signs.values.resize(fgn.values.size());
    for (std::size_t i = 0; i < fgn.values.size(); ++i) {
        signs.values[i] = fgn.values[i] >= 0.0 ? 1 : -1;
    }
    return signs;
}

// n i.i.d. Student-t draws with `dof` degrees of freedom, location 0, unit
// scale, via the normal/chi-square ratio.
inline std::vector<double> sample_student_t(std::size_t n, double dof, Rng& rng) {
    if (n < 1) {
        throw std::invalid_argument("sample_student_t: n must be >= 1");
    }
    if (!(dof > 0.0)) {
        throw std::invalid_argument("sample_student_t: dof must be positive");
    }
    std::vector<double> draws(n);
    for (auto& d : draws) {
        d = rng.student_t(dof);
    }
    return draws;
}

namespace detail {

// Ascending order of `values` with index tie-break, so the rank permutation
// is deterministic even with repeated values.
inline std::vector<std::uint32_t> argsort(std::span<const double> values) {
    std::vector<std::uint32_t> index(values.size());
    std::iota(index.begin(), index.end(), 0u);
    std::sort(index.begin(), index.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (values[a] != values[b]) return values[a] < values[b];
        return a < b;
    });
    return index;
}

}  // namespace detail

// IAAFT surrogate: exact permutation of `target_amplitudes` whose power
// spectrum approximates that of `spectrum_source`. Stops when the rank
// permutation repeats between successive iterations or after max_iter
// iterations, whichever comes first; the iteration always ends on the
// amplitude-adjustment step.
inline RelativePriceSeries iaaft(std::span<const double> target_amplitudes,
                                 std::span<const double> spectrum_source,
                                 int max_iter = 100) {
    const std::size_t n = target_amplitudes.size();
    if (n != spectrum_source.size()) {
        throw std::invalid_argument("iaaft: input lengths differ");
    }
    if (n < 4) {
        throw std::invalid_argument("iaaft: inputs must have length >= 4");
    }
    if (max_iter < 1) {
        throw std::invalid_argument("iaaft: max_iter must be >= 1");
    }

    std::vector<double> sorted_amplitudes(target_amplitudes.begin(),
                                          target_amplitudes.end());
    std::sort(sorted_amplitudes.begin(), sorted_amplitudes.end());

    RealFft fft(n);
    const std::size_t bins = fft.spectrum_size();
    std::vector<std::complex<double>> spectrum(bins);
    fft.forward(spectrum_source.data(), spectrum.data());
    std::vector<double> target_magnitude(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        target_magnitude[k] = std::abs(spectrum[k]);
    }

    RelativePriceSeries out;
    out.values.assign(target_amplitudes.begin(), target_amplitudes.end());

    std::vector<double> filtered(n);
    std::vector<std::uint32_t> previous_ranks = detail::argsort(out.values);
    const double inv_n = 1.0 / static_cast<double>(n);

    for (int iter = 1; iter <= max_iter; ++iter) {
        // Spectrum step: impose target magnitudes, keep phases.
        fft.forward(out.values.data(), spectrum.data());
        for (std::size_t k = 0; k < bins; ++k) {
            const double mag = std::abs(spectrum[k]);
            if (mag > 0.0) {
                spectrum[k] *= target_magnitude[k] / mag;
            } else {
                spectrum[k] = {target_magnitude[k], 0.0};
            }
        }
        fft.backward(spectrum.data(), filtered.data());
        for (auto& v : filtered) v *= inv_n;

        // Amplitude step: rank-reorder the exact input sample.
        const std::vector<std::uint32_t> ranks = detail::argsort(filtered);
        for (std::size_t j = 0; j < n; ++j) {
            out.values[ranks[j]] = sorted_amplitudes[j];
        }

        out.diagnostics.iterations = iter;
        if (ranks == previous_ranks) {
            out.diagnostics.converged = true;
            break;
        }
        previous_ranks = ranks;
    }

    fft.forward(out.values.data(), spectrum.data());
    double mismatch = 0.0;
    double reference = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
        const double d = std::abs(spectrum[k]) - target_magnitude[k];
        mismatch += d * d;
        reference += target_magnitude[k] * target_magnitude[k];
    }
    out.diagnostics.spectrum_rms =
        reference > 0.0 ? std::sqrt(mismatch / reference) : 0.0;
    return out;
}

// Convenience overload carrying the Hurst index of the spectrum source along.
inline RelativePriceSeries iaaft(std::span<const double> target_amplitudes,
                                 const FgnSample& spectrum_source,
                                 int max_iter = 100) {
    RelativePriceSeries out = iaaft(target_amplitudes, spectrum_source.values, max_iter);
    out.target_hurst = spectrum_source.hurst;
    return out;
}

// Full relative-price pipeline: Student-t marginals with tail index alpha_x,
// long memory from an independent fGn spectrum with Hurst index hurst_x.
inline RelativePriceSeries generate_relative_prices(std::size_t n, double alpha_x,
                                                    double hurst_x, Rng& amplitude_rng,
                                                    Rng& spectrum_rng,
                                                    int max_iter = 100) {
    const auto amplitudes = sample_student_t(n, alpha_x, amplitude_rng);
    const auto source = generate_fgn(n, hurst_x, spectrum_rng);
    RelativePriceSeries series = iaaft(amplitudes, source, max_iter);
    series.tail_index = alpha_x;
    return series;
}

}  // namespace mmf
