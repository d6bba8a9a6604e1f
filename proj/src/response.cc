#include "subbg/response.hh"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "subbg/units.hh"

namespace subbg {

using namespace constants;

double NaiResolution::sigma(double e_kev) const {
    return scale_a * std::sqrt(std::max(e_kev, 0.0));
}

NaiResolution NaiResolution::from_fwhm(double fwhm_kev, double at_kev) {
    return {fwhm_kev / fwhm_over_sigma / std::sqrt(at_kev)};
}

EnergySpectrum nai_smear(const EnergySpectrum& spec, const NaiResolution& res,
                         bool strict) {
    const auto& b = spec.binning();
    EnergySpectrum out(b, spec.livetime());
    if (res.scale_a <= 0.0) {
        out.merge(spec, EnergySpectrum::MergeMode::KeepLivetime);
        return out;
    }
    if (strict) {
        for (std::size_t i = 0; i < b.nbins(); ++i) {
            if (spec.counts()[i] == 0.0) continue;
            double sigma = res.sigma(b.center(i));
            if (sigma < 0.5 * b.width(i))
                throw std::invalid_argument(
                    "nai_smear: binning too coarse for the resolution kernel");
        }
    }
    const double inv_sqrt2 = 0.7071067811865476;
    for (std::size_t i = 0; i < b.nbins(); ++i) {
        double c = spec.counts()[i];
        if (c == 0.0) continue;
        double e0 = b.center(i);
        double sigma = res.sigma(e0);
        // kernel truncated to the histogram domain and renormalized
        double norm = 0.5 * (std::erf((b.hi() - e0) / sigma * inv_sqrt2) -
                             std::erf((b.lo() - e0) / sigma * inv_sqrt2));
        if (norm <= 0.0) continue;
        for (std::size_t j = 0; j < b.nbins(); ++j) {
            double w = 0.5 *
                       (std::erf((b.edges()[j + 1] - e0) / sigma * inv_sqrt2) -
                        std::erf((b.edges()[j] - e0) / sigma * inv_sqrt2)) /
                       norm;
            if (w > 0.0)
                out.add_to_bin(j, c * w, spec.sumw2()[i] * w * w);
        }
    }
    return out;
}

TkidResponseModel::TkidResponseModel(const Params& p) : p_(p) {
    gap_mk_ = p_.gap_factor * p_.tc_mk;
    // heat capacity scale: the largest calibrated event heats the island by
    // max_frac_dt of the base temperature
    double t0 = p_.t0_mk;
    double t1 = t0 * (1.0 + p_.max_frac_dt);
    c3_ = 4.0 * p_.max_event_kev /
          (t1 * t1 * t1 * t1 - t0 * t0 * t0 * t0);
    resp_ = 1.0;
    double raw_ref = forward(p_.e_ref_kev);
    resp_ = p_.theta_ref_rad / raw_ref;
}

double TkidResponseModel::n_qp(double t_mk) const {
    return std::sqrt(t_mk) * std::exp(-gap_mk_ / t_mk);
}

double TkidResponseModel::delta_t(double e_kev) const {
    double t0 = p_.t0_mk;
    double t4 = t0 * t0 * t0 * t0 + 4.0 * e_kev / c3_;
    return std::sqrt(std::sqrt(t4)) - t0;
}

double TkidResponseModel::forward(double e_kev) const {
    if (e_kev < 0.0 || e_kev > 2.0e4)
        throw std::domain_error("tkid_forward: energy outside [0, 20 MeV]");
    if (e_kev == 0.0) return 0.0;
    double t0 = p_.t0_mk;
    return resp_ * (n_qp(t0 + delta_t(e_kev)) - n_qp(t0));
}

double TkidResponseModel::calibrate(double theta, double theta_ref,
                                    double e_ref_kev) const {
    if (theta < 0.0) throw std::domain_error("tkid_calibrate: negative theta");
    if (theta == 0.0) return 0.0;
    // rescale so the anchor maps exactly, then invert by bisection
    double target = theta * forward(e_ref_kev) / theta_ref;
    double hi = 2.0e4;
    if (target > forward(hi))
        throw std::domain_error("tkid_calibrate: theta beyond map range");
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (forward(mid) < target)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-9 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

double FrameCouplingModel::coupling(const Vec3& pos) const {
    double r_cheby = std::max(std::abs(pos.x), std::abs(pos.y));
    if (r_cheby > effective_outer_cm) return 0.0;
    // distance to the nearest of the four corner legs
    double d_min = 1e30;
    for (double sx : {-1.0, 1.0})
        for (double sy : {-1.0, 1.0}) {
            double dx = pos.x - sx * leg_half_cm;
            double dy = pos.y - sy * leg_half_cm;
            d_min = std::min(d_min, std::sqrt(dx * dx + dy * dy));
        }
    double c = leg_coupling * std::exp(-d_min / decay_length_cm);
    return std::clamp(std::max(c, far_coupling), 0.0, 1.0);
}

double FrameCouplingModel::apparent_energy(double deposit_kev,
                                           const Vec3& pos) const {
    return deposit_kev * coupling(pos);
}

double FrameCouplingModel::apparent_energy(double deposit_kev,
                                           Rng& rng) const {
    Vec3 pos;
    do {
        pos.x = rng.uniform(-effective_outer_cm, effective_outer_cm);
        pos.y = rng.uniform(-effective_outer_cm, effective_outer_cm);
    } while (std::max(std::abs(pos.x), std::abs(pos.y)) < leg_half_cm);
    return apparent_energy(deposit_kev, pos);
}

}  // namespace subbg
