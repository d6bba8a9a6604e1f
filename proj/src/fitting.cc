#include "subbg/fitting.hh"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "subbg/rng.hh"

namespace subbg {

double nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                   std::vector<double>& x, const std::vector<double>& lo,
                   const std::vector<double>& hi, const SimplexOptions& opt) {
    const std::size_t n = x.size();
    auto clamp = [&](std::vector<double>& p) {
        for (std::size_t i = 0; i < n; ++i)
            p[i] = std::clamp(p[i], lo[i], hi[i]);
    };
    std::vector<std::vector<double>> s(n + 1, x);
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        double step = 0.1 * std::max(std::abs(x[i]), 1e-3 * (hi[i] - lo[i]));
        s[i + 1][i] += step;
        clamp(s[i + 1]);
    }
    for (std::size_t i = 0; i <= n; ++i) fv[i] = f(s[i]);

    for (int it = 0; it < opt.max_iter; ++it) {
        // order
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> s2;
        std::vector<double> f2;
        for (auto i : idx) {
            s2.push_back(s[i]);
            f2.push_back(fv[i]);
        }
        s = std::move(s2);
        fv = std::move(f2);
        double spread = std::abs(fv[n] - fv[0]);
        if (spread < opt.tol * (std::abs(fv[0]) + opt.tol)) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += s[i][j] / n;

        auto blend = [&](double t) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j)
                p[j] = centroid[j] + t * (centroid[j] - s[n][j]);
            clamp(p);
            return p;
        };
        auto xr = blend(1.0);
        double fr = f(xr);
        if (fr < fv[0]) {
            auto xe = blend(2.0);
            double fe = f(xe);
            if (fe < fr) {
                s[n] = xe;
                fv[n] = fe;
            } else {
                s[n] = xr;
                fv[n] = fr;
            }
        } else if (fr < fv[n - 1]) {
            s[n] = xr;
            fv[n] = fr;
        } else {
            auto xc = blend(fr < fv[n] ? 0.5 : -0.5);
            double fc = f(xc);
            if (fc < std::min(fr, fv[n])) {
                s[n] = xc;
                fv[n] = fc;
            } else {
                // shrink toward the best point
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j)
                        s[i][j] = s[0][j] + 0.5 * (s[i][j] - s[0][j]);
                    clamp(s[i]);
                    fv[i] = f(s[i]);
                }
            }
        }
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fv[i] < fv[best]) best = i;
    x = s[best];
    return fv[best];
}

namespace {

double poisson_deviance(const std::vector<double>& model,
                        const std::vector<double>& data) {
    double c = 0.0;
    for (std::size_t i = 0; i < model.size(); ++i) {
        double m = std::max(model[i], 1e-12);
        double d = data[i];
        c += (d > 0.0) ? 2.0 * (m - d + d * std::log(d / m)) : 2.0 * m;
    }
    return c;
}

// invert a small symmetric matrix by Gauss-Jordan; returns false if singular
bool invert(std::vector<std::vector<double>>& a) {
    const std::size_t n = a.size();
    std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-300) return false;
        std::swap(a[piv], a[col]);
        std::swap(inv[piv], inv[col]);
        double d = a[col][col];
        for (std::size_t j = 0; j < n; ++j) {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            double fct = a[r][col];
            for (std::size_t j = 0; j < n; ++j) {
                a[r][j] -= fct * a[col][j];
                inv[r][j] -= fct * inv[col][j];
            }
        }
    }
    a = std::move(inv);
    return true;
}

}  // namespace

ActivityFit fit_activities(
    const EnergySpectrum& measured,
    const std::map<ChainSegment, EnergySpectrum>& templates,
    const EnergySpectrum& fixed_cosmic, const ActivityFitOptions& opt) {
    const auto& b = measured.binning();
    for (const auto& [seg, t] : templates)
        if (!(t.binning() == b))
            throw std::invalid_argument("template binning mismatch");
    if (!(fixed_cosmic.binning() == b))
        throw std::invalid_argument("cosmic binning mismatch");

    // free parameters: one activity per group plus the resolution scale
    std::vector<std::vector<ChainSegment>> groups;
    if (opt.tie_u_chain) {
        groups = {{ChainSegment::K40},
                  {ChainSegment::UPre, ChainSegment::UPost},
                  {ChainSegment::ThA},
                  {ChainSegment::ThB}};
    } else {
        groups = {{ChainSegment::K40},
                  {ChainSegment::UPre},
                  {ChainSegment::UPost},
                  {ChainSegment::ThA},
                  {ChainSegment::ThB}};
    }
    std::vector<const EnergySpectrum*> group_templates;
    std::vector<double> group_total;
    for (auto& g : groups) {
        double tot = 0.0;
        for (auto seg : g) {
            auto it = templates.find(seg);
            if (it == templates.end())
                throw std::invalid_argument("missing template for segment");
            tot += it->second.total_count();
        }
        if (tot <= 0.0)
            throw std::invalid_argument("degenerate (all-zero) template");
        group_total.push_back(tot);
        group_templates.push_back(nullptr);  // summed below per evaluation
    }

    // window mask and data counts
    std::vector<std::size_t> win;
    std::vector<double> data;
    for (std::size_t i = 0; i < b.nbins(); ++i) {
        double c = b.center(i);
        if (c >= opt.window_lo_kev && c <= opt.window_hi_kev) {
            win.push_back(i);
            data.push_back(measured.counts()[i]);
        }
    }
    if (win.empty()) throw std::invalid_argument("empty fit window");
    double t_meas = measured.livetime();

    // pre-sum the per-group unsmeared rate templates
    std::vector<EnergySpectrum> group_rate;
    for (auto& g : groups) {
        EnergySpectrum sum(b, 1.0);
        for (auto seg : g) {
            const EnergySpectrum& t = templates.at(seg);
            for (std::size_t i = 0; i < b.nbins(); ++i)
                sum.add_to_bin(i, t.counts()[i] / t.livetime(), 0.0);
        }
        group_rate.push_back(std::move(sum));
    }

    const std::size_t np = groups.size() + 1;
    auto model_counts = [&](const std::vector<double>& p) {
        NaiResolution res{p.back()};
        EnergySpectrum model(b, 1.0);
        for (std::size_t g = 0; g < groups.size(); ++g) {
            EnergySpectrum sm = nai_smear(group_rate[g], res, false);
            for (std::size_t i = 0; i < b.nbins(); ++i)
                model.add_to_bin(i, p[g] * sm.counts()[i], 0.0);
        }
        std::vector<double> out(win.size());
        for (std::size_t k = 0; k < win.size(); ++k) {
            std::size_t i = win[k];
            double rate = model.counts()[i] +
                          fixed_cosmic.counts()[i] / fixed_cosmic.livetime();
            out[k] = rate * t_meas;
        }
        return out;
    };
    auto objective = [&](const std::vector<double>& p) {
        return poisson_deviance(model_counts(p), data);
    };

    // data-driven starting point: split the measured rate across groups
    double data_rate = 0.0;
    for (double d : data) data_rate += d / t_meas;
    std::vector<double> x0(np), lo(np, 0.0), hi(np);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        double tpl_rate = 0.0;
        for (auto i : win) tpl_rate += group_rate[g].counts()[i];
        x0[g] = std::max(data_rate / groups.size() / std::max(tpl_rate, 1e-12),
                         1e-3);
        hi[g] = 1e5;
    }
    x0[np - 1] = 1.3;
    lo[np - 1] = 0.2;
    hi[np - 1] = 5.0;

    Rng rng(opt.seed);
    std::vector<double> best_x = x0;
    double best_f = 1e300;
    for (int start = 0; start < opt.n_starts; ++start) {
        std::vector<double> x = x0;
        if (start > 0)
            for (auto& v : x) v *= std::exp(rng.uniform(-0.7, 0.7));
        for (std::size_t i = 0; i < np; ++i) x[i] = std::clamp(x[i], lo[i], hi[i]);
        double f = nelder_mead(objective, x, lo, hi);
        if (f < best_f) {
            best_f = f;
            best_x = x;
        }
    }

    // parameter errors from the quadratic shape of the deviance surface
    std::vector<std::vector<double>> hess(np, std::vector<double>(np, 0.0));
    std::vector<double> step(np);
    for (std::size_t i = 0; i < np; ++i)
        step[i] = std::max(1e-4 * std::abs(best_x[i]), 1e-6);
    double f0 = objective(best_x);
    for (std::size_t i = 0; i < np; ++i)
        for (std::size_t j = i; j < np; ++j) {
            auto shifted = [&](double si, double sj) {
                auto x = best_x;
                x[i] += si;
                x[j] += sj;
                return objective(x);
            };
            double h;
            if (i == j) {
                h = (shifted(step[i], 0.0) - 2.0 * f0 +
                     shifted(-step[i], 0.0)) /
                    (step[i] * step[i]);
            } else {
                h = (shifted(step[i], step[j]) - shifted(step[i], -step[j]) -
                     shifted(-step[i], step[j]) + shifted(-step[i], -step[j])) /
                    (4.0 * step[i] * step[j]);
            }
            // deviance curvature -> information matrix is half of it
            hess[i][j] = hess[j][i] = 0.5 * h;
        }
    bool ok = invert(hess);

    ActivityFit out;
    out.deviance = best_f;
    out.window_lo_kev = opt.window_lo_kev;
    out.window_hi_kev = opt.window_hi_kev;
    out.converged = true;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        double err = ok && hess[g][g] > 0.0 ? std::sqrt(hess[g][g]) : 0.0;
        for (auto seg : groups[g]) out.activities[seg] = {best_x[g], err};
    }
    double aerr = ok && hess[np - 1][np - 1] > 0.0
                      ? std::sqrt(hess[np - 1][np - 1])
                      : 0.0;
    out.resolution_a = {best_x[np - 1], aerr};
    return out;
}

CosmicScaleFit fit_cosmic_scales(const EnergySpectrum& measured,
                                 const EnergySpectrum& em_component,
                                 const EnergySpectrum& had_component,
                                 double window_lo_kev) {
    const auto& b = measured.binning();
    if (!(em_component.binning() == b) || !(had_component.binning() == b))
        throw std::invalid_argument("component binning mismatch");
    double s_ee = 0, s_eh = 0, s_hh = 0, s_ed = 0, s_hd = 0;
    int ndf = 0;
    double chi2_base = 0.0;
    std::vector<double> es, hs, ds, ws;
    for (std::size_t i = 0; i < b.nbins(); ++i) {
        if (b.center(i) < window_lo_kev) continue;
        double d = measured.counts()[i] / measured.livetime();
        double e = em_component.counts()[i] / em_component.livetime();
        double h = had_component.counts()[i] / had_component.livetime();
        if (e == 0.0 && h == 0.0 && d == 0.0) continue;
        // Poisson variance of the measured rate
        double var = std::max(measured.counts()[i], 1.0) /
                     (measured.livetime() * measured.livetime());
        double w = 1.0 / var;
        s_ee += w * e * e;
        s_eh += w * e * h;
        s_hh += w * h * h;
        s_ed += w * e * d;
        s_hd += w * h * d;
        es.push_back(e);
        hs.push_back(h);
        ds.push_back(d);
        ws.push_back(w);
        ++ndf;
    }
    if (ndf < 2) throw std::invalid_argument("cosmic fit window is empty");
    double det = s_ee * s_hh - s_eh * s_eh;
    if (std::abs(det) < 1e-300)
        throw std::runtime_error("cosmic fit design is singular");
    CosmicScaleFit out;
    out.em_scale.value = (s_ed * s_hh - s_hd * s_eh) / det;
    out.hadronic_mu_scale.value = (s_hd * s_ee - s_ed * s_eh) / det;
    out.em_scale.error = std::sqrt(s_hh / det);
    out.hadronic_mu_scale.error = std::sqrt(s_ee / det);
    for (std::size_t k = 0; k < ds.size(); ++k) {
        double r = ds[k] - out.em_scale.value * es[k] -
                   out.hadronic_mu_scale.value * hs[k];
        chi2_base += ws[k] * r * r;
    }
    out.chi2 = chi2_base;
    out.ndf = ndf - 2;
    return out;
}

double spectrum_mode_kev(const EnergySpectrum& spec, double lo_kev,
                         double hi_kev) {
    const auto& b = spec.binning();
    double best = -1.0;
    std::size_t ib = 0;
    for (std::size_t i = 0; i < b.nbins(); ++i) {
        double c = b.center(i);
        if (c < lo_kev || c > hi_kev) continue;
        double r = spec.rate_density(i);
        if (r > best) {
            best = r;
            ib = i;
        }
    }
    if (best < 0.0) throw std::invalid_argument("empty window");
    // parabolic refinement on rate density when neighbors exist
    if (ib > 0 && ib + 1 < b.nbins()) {
        double y0 = spec.rate_density(ib - 1);
        double y1 = spec.rate_density(ib);
        double y2 = spec.rate_density(ib + 1);
        double denom = y0 - 2.0 * y1 + y2;
        if (std::abs(denom) > 1e-300) {
            double shift = 0.5 * (y0 - y2) / denom;
            shift = std::clamp(shift, -1.0, 1.0);
            return b.center(ib) + shift * b.width(ib);
        }
    }
    return b.center(ib);
}

}  // namespace subbg
