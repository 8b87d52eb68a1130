// SPDX-License-Identifier: Apache-2.0

#ifndef RESTORELAB_FFT_H_
#define RESTORELAB_FFT_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace restorelab {

/// Real-input forward transform of length n = in.size(); returns the n/2+1
/// non-redundant bins. Unnormalized.
std::vector<std::complex<double>> rfft(std::span<const double> in);

/// Inverse of rfft for a length-n signal (bins.size() must be n/2+1).
/// Normalized by 1/n so that irfft(rfft(x), n) == x.
std::vector<double> irfft(std::span<const std::complex<double>> bins,
                          std::size_t n);

/// Smallest power of two >= n.
std::size_t next_pow2(std::size_t n);

}  // namespace restorelab

#endif  // RESTORELAB_FFT_H_
