// SPDX-License-Identifier: Apache-2.0
//
// Lowpass IIR design (analog prototype -> prewarped bilinear transform ->
// cascade of biquads) and causal filtering.

#ifndef RESTORELAB_IIR_H_
#define RESTORELAB_IIR_H_

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "restorelab/audio.h"

namespace restorelab {

enum class FilterFamily { kButterworth, kChebyshev1, kBessel, kElliptic };

inline constexpr FilterFamily kAllFilterFamilies[] = {
    FilterFamily::kButterworth, FilterFamily::kChebyshev1,
    FilterFamily::kBessel, FilterFamily::kElliptic};

std::string to_string(FilterFamily family);
FilterFamily filter_family_from_string(const std::string& name);

/// Transposed direct-form II biquad; a0 is normalized to 1.
struct Biquad {
  double b0 = 1.0, b1 = 0.0, b2 = 0.0;
  double a1 = 0.0, a2 = 0.0;
};

struct IirDesignOptions {
  double passband_ripple_db = 0.05;  // Chebyshev I and elliptic
  double stopband_atten_db = 60.0;   // elliptic
};

class IirFilter {
 public:
  IirFilter(FilterFamily family, int order, double cutoff_hz, int sample_rate,
            std::vector<Biquad> sections,
            std::vector<std::complex<double>> poles);

  FilterFamily family() const { return family_; }
  int order() const { return order_; }
  double cutoff_hz() const { return cutoff_hz_; }
  int sample_rate() const { return sample_rate_; }
  const std::vector<Biquad>& sections() const { return sections_; }
  const std::vector<std::complex<double>>& poles() const { return poles_; }

  std::complex<double> response(double freq_hz) const;
  double magnitude_db(double freq_hz) const;
  double max_pole_radius() const;

 private:
  FilterFamily family_;
  int order_;
  double cutoff_hz_;
  int sample_rate_;
  std::vector<Biquad> sections_;
  std::vector<std::complex<double>> poles_;
};

/// Designs a lowpass with unit DC gain. Butterworth and Bessel are -3 dB at
/// the cutoff; Chebyshev I and elliptic sit at the bottom of the passband
/// ripple there. Throws std::invalid_argument for an out-of-range cutoff or
/// order, and std::domain_error when the discretized poles are not safely
/// inside the unit circle.
IirFilter design_lowpass(FilterFamily family, double cutoff_hz, int order,
                         int sample_rate, const IirDesignOptions& opts = {});

/// Causal single-pass filtering; output has the input's length.
AudioBuffer filter(const AudioBuffer& audio, const IirFilter& f);

/// Normalized analog lowpass prototype (cutoff 1 rad/s). Exposed for tests.
struct AnalogPrototype {
  std::vector<std::complex<double>> zeros;
  std::vector<std::complex<double>> poles;
  double gain = 1.0;
};
AnalogPrototype analog_prototype(FilterFamily family, int order,
                                 const IirDesignOptions& opts = {});

}  // namespace restorelab

#endif  // RESTORELAB_IIR_H_
