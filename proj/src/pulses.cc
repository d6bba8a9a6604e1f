#include "subbg/pulses.hh"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "subbg/units.hh"

namespace subbg {

using namespace constants;

void PulseShapeParams::validate() const {
    if (!(rise_us > 0.0 && rise_us < fast_us && fast_us < slow_us))
        throw std::invalid_argument("pulse shape needs rise < fast < slow");
    if (fast_fraction < 0.0)
        throw std::invalid_argument("fast fraction must be non-negative");
}

NoiseModel::NoiseModel(std::vector<double> freq_hz, std::vector<double> psd)
    : f_(std::move(freq_hz)), s_(std::move(psd)) {
    if (f_.size() != s_.size() || f_.size() < 2)
        throw std::invalid_argument("noise PSD needs matching grids");
    for (std::size_t i = 0; i < f_.size(); ++i) {
        if (s_[i] < 0.0) throw std::invalid_argument("PSD must be >= 0");
        if (i > 0 && f_[i] <= f_[i - 1])
            throw std::invalid_argument("PSD frequency grid must ascend");
    }
}

NoiseModel NoiseModel::white_one_over_f(double white, double corner,
                                        double f_min, double f_max, int n) {
    std::vector<double> f(n), s(n);
    for (int i = 0; i < n; ++i) {
        f[i] = f_min * std::pow(f_max / f_min, double(i) / (n - 1));
        s[i] = white * (1.0 + corner / f[i]);
    }
    return NoiseModel(std::move(f), std::move(s));
}

double NoiseModel::rms() const {
    double var = 0.0;
    for (std::size_t i = 1; i < f_.size(); ++i)
        var += 0.5 * (s_[i] + s_[i - 1]) * (f_[i] - f_[i - 1]);
    return std::sqrt(var);
}

double NoiseModel::psd_at(double f) const {
    if (f <= f_.front()) return s_.front();
    if (f >= f_.back()) return s_.back();
    auto it = std::upper_bound(f_.begin(), f_.end(), f);
    std::size_t i = static_cast<std::size_t>(it - f_.begin());
    double t = (std::log(f) - std::log(f_[i - 1])) /
               (std::log(f_[i]) - std::log(f_[i - 1]));
    return s_[i - 1] + t * (s_[i] - s_[i - 1]);
}

void NoiseModel::scale(double factor) {
    for (auto& v : s_) v *= factor;
}

double NoiseModel::autocovariance(double lag) const {
    // linear resampling dense enough to resolve the cosine at this lag
    double f_max = f_.back();
    int n = std::clamp(static_cast<int>(32.0 * f_max * std::abs(lag)), 4096,
                       1 << 20);
    double df = f_max / n;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
        double f = (k + 0.5) * df;
        acc += psd_at(f) * std::cos(2.0 * pi * f * lag) * df;
    }
    return acc;
}

std::complex<double> ResonanceArc::to_iq(double theta) const {
    return center + std::polar(radius, phase_offset + theta);
}

double ResonanceArc::to_phase(const std::complex<double>& iq) const {
    return std::arg((iq - center) * std::polar(1.0, -phase_offset));
}

void iq_project(const std::vector<double>& theta, const ResonanceArc& arc,
                std::vector<double>& i_out, std::vector<double>& q_out) {
    i_out.resize(theta.size());
    q_out.resize(theta.size());
    for (std::size_t k = 0; k < theta.size(); ++k) {
        auto z = arc.to_iq(theta[k]);
        i_out[k] = z.real();
        q_out[k] = z.imag();
    }
}

std::vector<double> iq_to_phase(const std::vector<double>& i_in,
                                const std::vector<double>& q_in,
                                const ResonanceArc& arc) {
    if (i_in.size() != q_in.size())
        throw std::invalid_argument("I/Q stream length mismatch");
    std::vector<double> out(i_in.size());
    for (std::size_t k = 0; k < i_in.size(); ++k)
        out[k] = arc.to_phase({i_in[k], q_in[k]});
    return out;
}

void fft_radix2(std::vector<std::complex<double>>& a, int sign) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)))
        throw std::invalid_argument("FFT length must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = sign * 2.0 * pi / double(len);
        std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                auto u = a[i + j];
                auto v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

namespace {

double pulse_shape_at(double t_s, double tau_s, double rise_s) {
    if (t_s <= 0.0) return 0.0;
    return std::exp(-t_s / tau_s) - std::exp(-t_s / rise_s);
}

// Gaussian noise block shaped by the PSD via hermitian spectral synthesis.
std::vector<double> noise_block(const NoiseModel& noise, std::size_t n,
                                double dt, Rng& rng) {
    std::vector<std::complex<double>> spec(n, {0.0, 0.0});
    double df = 1.0 / (double(n) * dt);
    for (std::size_t k = 1; k < n / 2; ++k) {
        double s = noise.psd_at(double(k) * df);
        double amp = std::sqrt(0.5 * s * df);
        spec[k] = {amp * rng.normal(), amp * rng.normal()};
        spec[n - k] = std::conj(spec[k]);
    }
    {
        double s = noise.psd_at(double(n / 2) * df);
        spec[n / 2] = {std::sqrt(s * df) * rng.normal(), 0.0};
    }
    fft_radix2(spec, +1);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = spec[i].real();
    return out;
}

}  // namespace

std::vector<double> synthesize_stream(const std::vector<StreamEvent>& events,
                                      const PulseShapeParams& shape,
                                      const NoiseModel& noise,
                                      const TkidResponseModel& model,
                                      double duration_s, double dt_s, Rng& rng,
                                      bool add_noise) {
    shape.validate();
    std::size_t n_raw = static_cast<std::size_t>(std::ceil(duration_s / dt_s));
    std::size_t n = 1;
    while (n < n_raw) n <<= 1;
    std::vector<double> stream(n, 0.0);
    if (add_noise) stream = noise_block(noise, n, dt_s, rng);
    double tr = shape.rise_us * 1e-6;
    double tf = shape.fast_us * 1e-6;
    double ts = shape.slow_us * 1e-6;
    for (const auto& ev : events) {
        if (ev.time_s < 0.0 || ev.time_s > duration_s)
            throw std::invalid_argument("event time outside stream duration");
        double a_s = model.forward(ev.energy_kev);
        double a_f = shape.fast_fraction * a_s;
        std::size_t i0 = static_cast<std::size_t>(ev.time_s / dt_s);
        // pulses are negligible after ~12 slow time constants
        std::size_t i1 = std::min(
            n, i0 + static_cast<std::size_t>(12.0 * ts / dt_s));
        for (std::size_t i = i0; i < i1; ++i) {
            double t = double(i) * dt_s - ev.time_s;
            stream[i] += a_f * pulse_shape_at(t, tf, tr) +
                         a_s * pulse_shape_at(t, ts, tr);
        }
    }
    stream.resize(n_raw);
    return stream;
}

std::vector<PulseRecord> trigger(const std::vector<double>& stream, double rms,
                                 double dt_s, const TriggerConfig& cfg) {
    if (rms <= 0.0) throw std::invalid_argument("trigger needs rms > 0");
    std::vector<PulseRecord> out;
    const double thr = cfg.threshold_sigma * rms;
    const int len = cfg.pre + cfg.post;
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(stream.size());
    std::ptrdiff_t i = cfg.pre;
    while (i + cfg.consecutive <= n) {
        bool fire = true;
        for (int k = 0; k < cfg.consecutive; ++k)
            if (stream[i + k] <= thr) {
                fire = false;
                break;
            }
        if (!fire) {
            ++i;
            continue;
        }
        if (i + cfg.post > n) break;  // incomplete record at stream end
        PulseRecord rec;
        rec.sample_period_s = dt_s;
        rec.pre_trigger = cfg.pre;
        rec.trigger_index = i;
        rec.timestamp_s = double(i) * dt_s;
        rec.samples.assign(stream.begin() + (i - cfg.pre),
                           stream.begin() + (i + cfg.post));
        // flag a second qualifying crossing inside the post region
        for (std::ptrdiff_t j = i + cfg.consecutive;
             j + cfg.consecutive <= std::min<std::ptrdiff_t>(i + cfg.post, n);
             ++j) {
            bool below = false;
            for (int k = 0; k < cfg.consecutive; ++k)
                if (stream[j - 1 - k] > thr) below = true;
            // require the stream to dip below threshold before retriggering
            if (below) continue;
            bool again = true;
            for (int k = 0; k < cfg.consecutive; ++k)
                if (stream[j + k] <= thr) {
                    again = false;
                    break;
                }
            if (again) {
                rec.pileup = true;
                break;
            }
        }
        out.push_back(std::move(rec));
        i += len;  // holdoff
    }
    return out;
}

TwoTemplateFitter::TwoTemplateFitter(const PulseShapeParams& shape,
                                     const NoiseModel& noise, int length,
                                     int pre, double dt_s)
    : n_(length), pre_(pre), dt_(dt_s) {
    shape.validate();
    if (length <= 0 || (length & (length - 1)))
        throw std::invalid_argument("record length must be a power of two");
    double tr = shape.rise_us * 1e-6;
    double tf = shape.fast_us * 1e-6;
    double ts = shape.slow_us * 1e-6;
    tf_.resize(n_);
    ts_.resize(n_);
    for (int i = 0; i < n_; ++i) {
        double t = double(i - pre_) * dt_;
        tf_[i] = pulse_shape_at(t, tf, tr);
        ts_[i] = pulse_shape_at(t, ts, tr);
    }
    // collinearity guard
    double dot = 0.0, nf = 0.0, ns = 0.0;
    for (int i = 0; i < n_; ++i) {
        dot += tf_[i] * ts_[i];
        nf += tf_[i] * tf_[i];
        ns += ts_[i] * ts_[i];
    }
    if (nf <= 0.0 || ns <= 0.0 || dot * dot > (1.0 - 1e-9) * nf * ns)
        throw std::invalid_argument("templates collinear on the record grid");

    // Toeplitz noise covariance from the PSD, sampled on a linear frequency
    // grid fine enough for the longest lag in the record
    std::vector<double> r(n_, 0.0);
    {
        const int m_freq = 8 * n_;
        double f_max = noise.freq().back();
        double df = f_max / m_freq;
        std::vector<double> s_lin(m_freq);
        for (int k = 0; k < m_freq; ++k)
            s_lin[k] = noise.psd_at((k + 0.5) * df);
        for (int m = 0; m < n_; ++m) {
            double w = 2.0 * pi * m * dt_ * df;
            double acc = 0.0;
            for (int k = 0; k < m_freq; ++k)
                acc += s_lin[k] * std::cos(w * (k + 0.5));
            r[m] = acc * df;
        }
    }
    r[0] *= 1.0 + 1e-12;
    std::vector<double> chol(static_cast<std::size_t>(n_) * n_, 0.0);
    auto at = [&](int i, int j) -> double& {
        return chol[static_cast<std::size_t>(i) * n_ + j];
    };
    for (int i = 0; i < n_; ++i) {
        for (int j = 0; j <= i; ++j) {
            double sum = r[std::abs(i - j)];
            for (int k = 0; k < j; ++k) sum -= at(i, k) * at(j, k);
            if (i == j) {
                if (sum <= 0.0)
                    throw std::runtime_error("noise covariance not positive definite");
                at(i, j) = std::sqrt(sum);
            } else {
                at(i, j) = sum / at(j, j);
            }
        }
    }
    auto fwd = [&](const std::vector<double>& b) {
        // L y = b
        std::vector<double> y(n_);
        for (int i = 0; i < n_; ++i) {
            double sum = b[i];
            for (int k = 0; k < i; ++k) sum -= at(i, k) * y[k];
            y[i] = sum / at(i, i);
        }
        return y;
    };
    auto bwd = [&](const std::vector<double>& b) {
        // L^T x = b
        std::vector<double> x(n_);
        for (int i = n_ - 1; i >= 0; --i) {
            double sum = b[i];
            for (int k = i + 1; k < n_; ++k) sum -= at(k, i) * x[k];
            x[i] = sum / at(i, i);
        }
        return x;
    };

    // whiten the design and orthonormalize it (modified Gram-Schmidt); the
    // estimator is then beta = Rq^-1 Q^T L^-1 y, applied per record through
    // the precomputed filter rows F = L^-T Q Rq^-T
    std::vector<double> ones(n_, 1.0);
    std::vector<std::vector<double>> w{fwd(tf_), fwd(ts_), fwd(ones)};
    double rq[3][3] = {{0}};
    for (int c = 0; c < 3; ++c) {
        for (int p = 0; p < c; ++p) {
            double dot = 0.0;
            for (int i = 0; i < n_; ++i) dot += w[p][i] * w[c][i];
            rq[p][c] = dot;
            for (int i = 0; i < n_; ++i) w[c][i] -= dot * w[p][i];
        }
        double nrm = 0.0;
        for (int i = 0; i < n_; ++i) nrm += w[c][i] * w[c][i];
        nrm = std::sqrt(nrm);
        if (nrm < 1e-140)
            throw std::runtime_error("two-template design is singular");
        rq[c][c] = nrm;
        for (int i = 0; i < n_; ++i) w[c][i] /= nrm;
    }
    // G = Q Rq^-T: each sample row solves Rq g = q by back substitution
    std::vector<std::vector<double>> g(3, std::vector<double>(n_));
    for (int i = 0; i < n_; ++i) {
        double q0 = w[0][i], q1 = w[1][i], q2 = w[2][i];
        double g2 = q2 / rq[2][2];
        double g1 = (q1 - rq[1][2] * g2) / rq[1][1];
        double g0 = (q0 - rq[0][1] * g1 - rq[0][2] * g2) / rq[0][0];
        g[0][i] = g0;
        g[1][i] = g1;
        g[2][i] = g2;
    }
    for (int a = 0; a < 3; ++a) filt_[a] = bwd(g[a]);
    // covariance of the estimates is Rq^-1 Rq^-T
    {
        double e1[3] = {0.0, 1.0, 0.0};
        // solve Rq^T z = e1 then sigma^2 = z.z
        double z0 = e1[0] / rq[0][0];
        double z1 = (e1[1] - rq[0][1] * z0) / rq[1][1];
        double z2 = (e1[2] - rq[0][2] * z0 - rq[1][2] * z1) / rq[2][2];
        sigma_slow_ = std::sqrt(z0 * z0 + z1 * z1 + z2 * z2);
    }
}

TwoTemplateFitResult TwoTemplateFitter::fit(
    const std::vector<double>& samples) const {
    if (static_cast<int>(samples.size()) != n_)
        throw std::invalid_argument("record length mismatch");
    TwoTemplateFitResult out;
    double est[3] = {0.0, 0.0, 0.0};
    for (int a = 0; a < 3; ++a)
        for (int i = 0; i < n_; ++i) est[a] += filt_[a][i] * samples[i];
    out.a_fast = est[0];
    out.a_slow = est[1];
    out.baseline = est[2];
    out.a_slow_sigma = sigma_slow_;
    return out;
}

ReduceResult reduce_to_spectrum(const std::vector<TwoTemplateFitResult>& fits,
                                const std::vector<PulseRecord>& records,
                                const TkidResponseModel& model,
                                double anchor_e_kev, double livetime_s,
                                const BinningScheme& binning) {
    if (fits.size() != records.size())
        throw std::invalid_argument("fits/records size mismatch");
    if (fits.empty())
        return {EnergySpectrum(binning, livetime_s), 0.0, 0, 0};
    // locate the calibration cluster: histogram a_slow near the nominal
    // response and take the populated peak
    double nominal = model.forward(anchor_e_kev);
    std::vector<double> window;
    for (std::size_t k = 0; k < fits.size(); ++k) {
        if (records[k].pileup) continue;
        double a = fits[k].a_slow;
        if (a > 0.3 * nominal && a < 3.0 * nominal) window.push_back(a);
    }
    if (window.empty())
        throw std::runtime_error("no calibration cluster near the anchor");
    const int nb = 60;
    double lo = 0.3 * nominal, hi = 3.0 * nominal;
    std::vector<int> h(nb, 0);
    for (double a : window) {
        int i = static_cast<int>((a - lo) / (hi - lo) * nb);
        i = std::clamp(i, 0, nb - 1);
        ++h[i];
    }
    int ib = static_cast<int>(std::max_element(h.begin(), h.end()) - h.begin());
    double peak_lo = lo + (hi - lo) * ib / nb;
    double peak_hi = lo + (hi - lo) * (ib + 1) / nb;
    // refine: mean within +-25% of the peak bin center
    double c0 = 0.5 * (peak_lo + peak_hi);
    double sum = 0.0;
    int cnt = 0;
    for (double a : window)
        if (std::abs(a - c0) < 0.25 * c0) {
            sum += a;
            ++cnt;
        }
    double theta_ref = cnt > 0 ? sum / cnt : c0;

    ReduceResult out{EnergySpectrum(binning, livetime_s), theta_ref, 0, 0};
    for (std::size_t k = 0; k < fits.size(); ++k) {
        if (records[k].pileup) {
            ++out.n_pileup;
            continue;
        }
        double a = fits[k].a_slow;
        if (a <= 0.0) continue;
        double e = model.calibrate(a, theta_ref, anchor_e_kev);
        out.spectrum.accumulate(e);
        ++out.n_used;
    }
    return out;
}

void write_stream(const std::string& path, const std::vector<double>& stream,
                  double dt_s) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path);
    char head[128];
    std::snprintf(head, sizeof head,
                  "subbg_stream v1\nsample_period_ns=%.6g\nn_samples=%zu\n\n",
                  dt_s * 1e9, stream.size());
    os.write(head, static_cast<std::streamsize>(std::strlen(head)));
    std::vector<float> f32(stream.begin(), stream.end());
    os.write(reinterpret_cast<const char*>(f32.data()),
             static_cast<std::streamsize>(f32.size() * sizeof(float)));
}

std::vector<double> read_stream(const std::string& path, double* dt_out) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::string line;
    double dt_ns = 0.0;
    std::size_t n = 0;
    while (std::getline(is, line)) {
        if (line.empty()) break;
        if (line.rfind("sample_period_ns=", 0) == 0)
            dt_ns = std::stod(line.substr(17));
        if (line.rfind("n_samples=", 0) == 0) n = std::stoull(line.substr(10));
    }
    if (dt_ns <= 0.0 || n == 0)
        throw std::runtime_error(path + ": malformed stream header");
    std::vector<float> f32(n);
    is.read(reinterpret_cast<char*>(f32.data()),
            static_cast<std::streamsize>(n * sizeof(float)));
    if (!is) throw std::runtime_error(path + ": truncated stream data");
    if (dt_out) *dt_out = dt_ns * 1e-9;
    return std::vector<double>(f32.begin(), f32.end());
}

void write_records_csv(const std::string& path,
                       const std::vector<PulseRecord>& records,
                       const std::vector<TwoTemplateFitResult>& fits) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "record,trigger_index,timestamp_s,pileup,a_fast,a_slow,baseline\n";
    char buf[200];
    for (std::size_t k = 0; k < records.size(); ++k) {
        double af = k < fits.size() ? fits[k].a_fast : 0.0;
        double as = k < fits.size() ? fits[k].a_slow : 0.0;
        double bl = k < fits.size() ? fits[k].baseline : 0.0;
        std::snprintf(buf, sizeof buf, "%zu,%lld,%.9f,%d,%.9g,%.9g,%.9g\n", k,
                      static_cast<long long>(records[k].trigger_index),
                      records[k].timestamp_s, records[k].pileup ? 1 : 0, af,
                      as, bl);
        os << buf;
    }
}

}  // namespace subbg

namespace subbg {

NoiseModel calibrate_noise_for_fwhm(const NoiseModel& base,
                                    const PulseShapeParams& shape,
                                    const TkidResponseModel& model,
                                    double fwhm_kev, double at_kev,
                                    int length, int pre, double dt_s) {
    TwoTemplateFitter probe(shape, base, length, pre, dt_s);
    // local slope of the response converts amplitude noise to energy
    double de = 0.01 * at_kev;
    double slope = (model.forward(at_kev + de) - model.forward(at_kev - de)) /
                   (2.0 * de);
    double sigma_e = probe.predicted_sigma_slow() / slope;
    double target_sigma = fwhm_kev / constants::fwhm_over_sigma;
    NoiseModel out = base;
    out.scale(target_sigma * target_sigma / (sigma_e * sigma_e));
    return out;
}

SegmentedRunResult run_segmented(const SegmentedRunConfig& cfg,
                                 const NoiseModel& noise,
                                 const TkidResponseModel& model,
                                 const std::function<double(Rng&)>& energy_kev,
                                 Rng& rng) {
    SegmentedRunResult out;
    out.rms = noise.rms();
    // Poisson event times over the exposure
    std::vector<double> times;
    double t = 0.0;
    while (true) {
        t += rng.exponential(1.0 / cfg.event_rate_hz);
        if (t >= cfg.duration_s) break;
        times.push_back(t);
    }
    out.n_events = times.size();
    const double dt = cfg.dt_s;
    const int len = cfg.trig.pre + cfg.trig.post;
    const double lead = (cfg.trig.pre + 32) * dt;
    const double tail = (cfg.trig.post + 3 * len) * dt;
    std::size_t i = 0;
    while (i < times.size()) {
        // group events whose windows overlap
        std::size_t j = i;
        double span_end = times[i] + tail;
        while (j + 1 < times.size() && times[j + 1] - lead < span_end) {
            ++j;
            span_end = times[j] + tail;
        }
        double t0 = times[i] - lead;
        double dur = span_end - t0;
        std::vector<StreamEvent> evs;
        for (std::size_t k = i; k <= j; ++k)
            evs.push_back({times[k] - t0, energy_kev(rng)});
        auto stream =
            synthesize_stream(evs, cfg.shape, noise, model, dur, dt, rng);
        auto recs = trigger(stream, out.rms, dt, cfg.trig);
        for (auto& r : recs) {
            r.timestamp_s += t0;
            out.records.push_back(std::move(r));
        }
        i = j + 1;
    }
    TwoTemplateFitter fitter(cfg.shape, noise, len, cfg.trig.pre, dt);
    for (const auto& r : out.records) out.fits.push_back(fitter.fit(r.samples));
    return out;
}

}  // namespace subbg
