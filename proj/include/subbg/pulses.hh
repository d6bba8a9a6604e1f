// Synthetic phase-readout chain and pulse reduction: two-exponential pulse
// synthesis in stationary noise, IQ-arc conversion, level triggering,
// noise-whitened two-template amplitude fits, and spectrum building.
#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "subbg/response.hh"
#include "subbg/rng.hh"
#include "subbg/spectrum.hh"

namespace subbg {

struct PulseShapeParams {
    double rise_us = 2.0;
    double fast_us = 60.0;
    double slow_us = 240.0;
    double fast_fraction = 0.35;  // fast/slow amplitude ratio

    void validate() const;
};

// One-sided phase-noise power spectral density, rad^2/Hz.
class NoiseModel {
  public:
    NoiseModel(std::vector<double> freq_hz, std::vector<double> psd);

    // white level with a 1/f corner; f_min regularizes the 1/f pole
    static NoiseModel white_one_over_f(double white_rad2_hz,
                                       double corner_hz, double f_min_hz,
                                       double f_max_hz, int n = 2048);

    double rms() const;
    double psd_at(double f_hz) const;
    const std::vector<double>& freq() const { return f_; }
    const std::vector<double>& psd() const { return s_; }
    void scale(double factor);

    // autocovariance at lag m*dt
    double autocovariance(double lag_s) const;

  private:
    std::vector<double> f_, s_;
};

struct PulseRecord {
    double sample_period_s = 800e-9;
    int pre_trigger = 256;
    std::vector<double> samples;  // phase, radians
    int64_t trigger_index = 0;    // position in the parent stream
    double timestamp_s = 0.0;
    bool pileup = false;
};

// Resonator transmission arc in the complex plane; the phase angle teta
// about the arc center encodes the signal.
struct ResonanceArc {
    std::complex<double> center{0.0, 0.0};
    double radius = 1.0;
    double phase_offset = 0.0;

    std::complex<double> to_iq(double theta) const;
    double to_phase(const std::complex<double>& iq) const;
};

void iq_project(const std::vector<double>& theta, const ResonanceArc& arc,
                std::vector<double>& i_out, std::vector<double>& q_out);
std::vector<double> iq_to_phase(const std::vector<double>& i_in,
                                const std::vector<double>& q_in,
                                const ResonanceArc& arc);

struct StreamEvent {
    double time_s;
    double energy_kev;
};

// theta(t) = sum over events of
//   a_f (e^{-t/tf} - e^{-t/tr}) + a_s (e^{-t/ts} - e^{-t/tr})
// with a_s = tkid_forward(E) and a_f = fast_fraction * a_s, plus stationary
// Gaussian noise shaped by the PSD (spectral synthesis, power-of-two block).
std::vector<double> synthesize_stream(const std::vector<StreamEvent>& events,
                                      const PulseShapeParams& shape,
                                      const NoiseModel& noise,
                                      const TkidResponseModel& model,
                                      double duration_s, double dt_s,
                                      Rng& rng, bool add_noise = true);

// Level trigger: a record is cut whenever four consecutive samples exceed
// 3 x rms; retrigger holdoff equals the record length.
struct TriggerConfig {
    int pre = 256;
    int post = 1792;
    double threshold_sigma = 3.0;
    int consecutive = 4;
};
std::vector<PulseRecord> trigger(const std::vector<double>& stream, double rms,
                                 double dt_s, const TriggerConfig& cfg = {});

struct TwoTemplateFitResult {
    double a_fast = 0.0;
    double a_slow = 0.0;
    double baseline = 0.0;
    double a_slow_sigma = 0.0;  // GLS prediction from the noise model
};

// Generalized least squares in the noise-whitened domain for
// y = a_f T_f + a_s T_s + b. 1; insensitive to any constant offset.
class TwoTemplateFitter {
  public:
    TwoTemplateFitter(const PulseShapeParams& shape, const NoiseModel& noise,
                      int length, int pre, double dt_s);

    TwoTemplateFitResult fit(const std::vector<double>& samples) const;

    const std::vector<double>& template_fast() const { return tf_; }
    const std::vector<double>& template_slow() const { return ts_; }
    double predicted_sigma_slow() const { return sigma_slow_; }

  private:
    int n_, pre_;
    double dt_;
    std::vector<double> tf_, ts_;
    // whitened filter rows for (a_f, a_s, baseline)
    std::vector<double> filt_[3];
    double sigma_slow_ = 0.0;
};

// Convert fitted slow amplitudes to energy against an anchor line found in
// the amplitude distribution near the expected response, then histogram.
struct ReduceResult {
    EnergySpectrum spectrum;
    double theta_ref = 0.0;  // anchor amplitude used for calibration
    std::size_t n_used = 0;
    std::size_t n_pileup = 0;
};
ReduceResult reduce_to_spectrum(const std::vector<TwoTemplateFitResult>& fits,
                                const std::vector<PulseRecord>& records,
                                const TkidResponseModel& model,
                                double anchor_e_kev, double livetime_s,
                                const BinningScheme& binning);

// Scale a noise PSD so that the two-template slow-amplitude estimate
// reaches the requested FWHM (keV) for events at `at_kev`.
NoiseModel calibrate_noise_for_fwhm(const NoiseModel& base,
                                    const PulseShapeParams& shape,
                                    const TkidResponseModel& model,
                                    double fwhm_kev, double at_kev,
                                    int length, int pre, double dt_s);

// Long exposures are synthesized per event window rather than as one
// contiguous stream: Poisson-timed events whose windows overlap are merged
// into a common segment (natural pile-up), each segment gets fresh noise,
// and the level trigger runs on every segment.
struct SegmentedRunConfig {
    double dt_s = 800e-9;
    TriggerConfig trig;
    PulseShapeParams shape;
    double duration_s = 1.0;
    double event_rate_hz = 1.0;
};

struct SegmentedRunResult {
    std::vector<PulseRecord> records;
    std::vector<TwoTemplateFitResult> fits;
    double rms = 0.0;
    std::size_t n_events = 0;
};

SegmentedRunResult run_segmented(const SegmentedRunConfig& cfg,
                                 const NoiseModel& noise,
                                 const TkidResponseModel& model,
                                 const std::function<double(Rng&)>& energy_kev,
                                 Rng& rng);

// Raw stream file: text header, then little-endian float32 samples.
void write_stream(const std::string& path, const std::vector<double>& stream,
                  double dt_s);
std::vector<double> read_stream(const std::string& path, double* dt_out);

// Record metadata CSV.
void write_records_csv(const std::string& path,
                       const std::vector<PulseRecord>& records,
                       const std::vector<TwoTemplateFitResult>& fits);

// in-place radix-2 FFT, sign=+1 inverse convention without normalization
void fft_radix2(std::vector<std::complex<double>>& a, int sign);

}  // namespace subbg
