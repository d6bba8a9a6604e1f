#include "subbg/transport.hh"

#include <algorithm>
#include <cmath>

#include "subbg/neutron.hh"
#include "subbg/straggling.hh"
#include "subbg/units.hh"

namespace subbg {

using namespace constants;

namespace {

constexpr double kStepEps = 1e-7;  // cm, nudge across boundaries

struct Tracker {
    const SlabStack& geom;
    const TransportOptions& opt;
    Rng& rng;
    DepositRecord& rec;
    std::vector<ParticleState> stack;
    bool tracking_primary = false;

    void note_entry(const Region& reg, double e_kev) {
        if (!tracking_primary || !geom.is_sensitive(reg)) return;
        int t = geom.volume_tally(reg.index);
        if (rec.primary_entry_kev[t] < 0.0) rec.primary_entry_kev[t] = e_kev;
    }

    void deposit(const Region& reg, const Vec3& pos, double e_kev) {
        if (e_kev <= 0.0) return;
        rec.deposited_total_kev += e_kev;
        if (geom.is_sensitive(reg)) {
            int t = geom.volume_tally(reg.index);
            rec.deposits[t] += e_kev;
            if (!rec.has_hit[t]) {
                rec.has_hit[t] = true;
                rec.first_hit[t] = pos;
            }
        }
    }

    void escape(const ParticleState& p) {
        rec.escaped_kev += p.e_kin_kev;
        if (p.species == Species::Gamma && p.dir.z > 0.0 &&
            p.pos.z >= opt.escape_plane_z)
            ++rec.photons_escaped_top;
    }

    void run(const ParticleState& primary) {
        stack.push_back(primary);
        bool first = true;
        while (!stack.empty()) {
            ParticleState p = stack.back();
            stack.pop_back();
            tracking_primary = first;
            first = false;
            switch (p.species) {
                case Species::Gamma: photon(p); break;
                case Species::EMinus: electron(p, false); break;
                case Species::EPlus: electron(p, true); break;
                case Species::Neutron: neutron(p); break;
                default: heavy(p); break;
            }
        }
    }

    void photon(ParticleState p) {
        while (true) {
            if (geom.outside_world(p.pos)) {
                escape(p);
                return;
            }
            Region reg = geom.locate(p.pos);
            note_entry(reg, p.e_kin_kev);
            const Material* mat = geom.material(reg);
            double t_b = geom.next_boundary(p.pos, p.dir, reg);
            if (!mat) {
                if (t_b > 1e29) {
                    escape(p);
                    return;
                }
                p.pos = p.pos + p.dir * (t_b + kStepEps);
                continue;
            }
            // table spans 10 keV - 20 MeV; clamp the lookup above the grid
            double e_eval = std::min(p.e_kin_kev, mat->photon_table().e_max());
            PhotonMu mu = mat->photon_mu(e_eval);
            double s = rng.exponential(1.0 / mu.total());
            if (s >= t_b) {
                p.pos = p.pos + p.dir * (t_b + kStepEps);
                continue;
            }
            p.pos = p.pos + p.dir * s;
            double u = rng.uniform() * mu.total();
            if (u < mu.photoelectric) {
                // full absorption; photoelectron continues forward
                ParticleState e;
                e.species = Species::EMinus;
                e.e_kin_kev = p.e_kin_kev;
                e.dir = p.dir;
                e.pos = p.pos;
                e.weight = p.weight;
                if (e.e_kin_kev < opt.cutoff_kev)
                    deposit(reg, p.pos, e.e_kin_kev);
                else
                    stack.push_back(e);
                return;
            }
            if (u < mu.photoelectric + mu.compton) {
                double frac, cos_g;
                sample_klein_nishina(p.e_kin_kev, rng, frac, cos_g);
                double e_scat = p.e_kin_kev * frac;
                double e_el = p.e_kin_kev - e_scat;
                double phi = 2.0 * pi * rng.uniform();
                // electron momentum balances the scatter in-plane
                double k = p.e_kin_kev / electron_mass_kev;
                double tan_e = 1.0 / ((1.0 + k) *
                                      std::tan(0.5 * std::acos(
                                          std::clamp(cos_g, -1.0, 1.0))));
                double theta_e = std::atan(tan_e);
                ParticleState e;
                e.species = Species::EMinus;
                e.e_kin_kev = e_el;
                e.dir = rotate_direction(p.dir, std::cos(theta_e), phi + pi);
                e.pos = p.pos;
                e.weight = p.weight;
                if (e.e_kin_kev < opt.cutoff_kev)
                    deposit(reg, p.pos, e.e_kin_kev);
                else
                    stack.push_back(e);
                p.dir = rotate_direction(p.dir, cos_g, phi);
                p.e_kin_kev = e_scat;
                if (p.e_kin_kev < opt.cutoff_kev) {
                    deposit(reg, p.pos, p.e_kin_kev);
                    return;
                }
                continue;
            }
            // pair production
            {
                ++rec.n_pair_conversions;
                double avail = p.e_kin_kev - pair_threshold_kev;
                double split = rng.uniform();
                ParticleState em, ep;
                em.species = Species::EMinus;
                ep.species = Species::EPlus;
                em.e_kin_kev = avail * split;
                ep.e_kin_kev = avail * (1.0 - split);
                em.dir = ep.dir = p.dir;
                em.pos = ep.pos = p.pos;
                em.weight = ep.weight = p.weight;
                if (em.e_kin_kev < opt.cutoff_kev)
                    deposit(reg, p.pos, em.e_kin_kev);
                else
                    stack.push_back(em);
                if (ep.e_kin_kev < opt.cutoff_kev) {
                    deposit(reg, p.pos, ep.e_kin_kev);
                    annihilate(ep.pos, p.weight);
                } else {
                    stack.push_back(ep);
                }
                return;
            }
        }
    }

    void annihilate(const Vec3& pos, double weight) {
        ++rec.n_annihilations;
        ParticleState g1, g2;
        g1.species = g2.species = Species::Gamma;
        g1.e_kin_kev = g2.e_kin_kev = electron_mass_kev;
        g1.pos = g2.pos = pos;
        g1.weight = g2.weight = weight;
        Rng& r = rng;
        r.isotropic(g1.dir.x, g1.dir.y, g1.dir.z);
        g2.dir = g1.dir * -1.0;
        stack.push_back(g1);
        stack.push_back(g2);
    }

    void electron(ParticleState p, bool positron) {
        while (true) {
            if (geom.outside_world(p.pos)) {
                escape(p);
                return;
            }
            Region reg = geom.locate(p.pos);
            note_entry(reg, p.e_kin_kev);
            const Material* mat = geom.material(reg);
            double t_b = geom.next_boundary(p.pos, p.dir, reg);
            if (!mat) {
                if (t_b > 1e29) {
                    escape(p);
                    return;
                }
                p.pos = p.pos + p.dir * (t_b + kStepEps);
                continue;
            }
            if (p.e_kin_kev < opt.cutoff_kev) {
                deposit(reg, p.pos, p.e_kin_kev);
                if (positron) annihilate(p.pos, p.weight);
                return;
            }
            const RangeTable& rt = range_table(*mat, Species::EMinus);
            double range = rt.range(p.e_kin_kev);
            if (geom.is_sensitive(reg)) {
                double chord = std::min(t_b, 1e6);
                if (range <= chord) {
                    p.pos = p.pos + p.dir * range;
                    deposit(reg, p.pos, p.e_kin_kev);
                    if (positron) annihilate(p.pos, p.weight);
                    return;
                }
                double cap = opt.retain_knockon_cap
                                 ? geom.knockon_cap_kev(reg.index)
                                 : 0.0;
                double loss = straggled_loss(*mat, p.species, p.e_kin_kev,
                                             chord, rng, cap);
                deposit(reg, p.pos, loss);
                p.e_kin_kev -= loss;
                p.pos = p.pos + p.dir * (chord + kStepEps);
            } else {
                if (range <= t_b) {
                    p.pos = p.pos + p.dir * range;
                    rec.deposited_total_kev += p.e_kin_kev;
                    if (positron) annihilate(p.pos, p.weight);
                    return;
                }
                double e_new = rt.energy_at_range(range - t_b);
                rec.deposited_total_kev += p.e_kin_kev - e_new;
                p.e_kin_kev = e_new;
                p.pos = p.pos + p.dir * (t_b + kStepEps);
            }
        }
    }

    void heavy(ParticleState p) {
        const double e_floor = 1100.0;  // stopping model validity floor, keV
        while (true) {
            if (geom.outside_world(p.pos)) {
                escape(p);
                return;
            }
            Region reg = geom.locate(p.pos);
            note_entry(reg, p.e_kin_kev);
            const Material* mat = geom.material(reg);
            double t_b = geom.next_boundary(p.pos, p.dir, reg);
            if (!mat) {
                if (t_b > 1e29) {
                    escape(p);
                    return;
                }
                p.pos = p.pos + p.dir * (t_b + kStepEps);
                continue;
            }
            if (p.e_kin_kev < e_floor) {
                // sub-MeV heavy particles have sub-0.1 mm residual range
                deposit(reg, p.pos, p.e_kin_kev);
                return;
            }
            const RangeTable& rt = range_table(*mat, p.species);
            double range = rt.range(p.e_kin_kev);
            if (geom.is_sensitive(reg)) {
                double chord = std::min(t_b, 1e6);
                if (range <= chord) {
                    p.pos = p.pos + p.dir * range;
                    deposit(reg, p.pos, p.e_kin_kev);
                    return;
                }
                double cap = opt.retain_knockon_cap
                                 ? geom.knockon_cap_kev(reg.index)
                                 : 0.0;
                double loss = straggled_loss(*mat, p.species, p.e_kin_kev,
                                             chord, rng, cap);
                deposit(reg, p.pos, loss);
                p.e_kin_kev -= loss;
                p.pos = p.pos + p.dir * (chord + kStepEps);
            } else {
                if (range <= t_b) {
                    p.pos = p.pos + p.dir * range;
                    rec.deposited_total_kev += p.e_kin_kev;
                    return;
                }
                double e_new = rt.energy_at_range(range - t_b);
                rec.deposited_total_kev += p.e_kin_kev - e_new;
                p.e_kin_kev = e_new;
                p.pos = p.pos + p.dir * (t_b + kStepEps);
            }
        }
    }

    void neutron(ParticleState p) {
        while (true) {
            if (geom.outside_world(p.pos)) {
                escape(p);
                return;
            }
            Region reg = geom.locate(p.pos);
            note_entry(reg, p.e_kin_kev);
            const Material* mat = geom.material(reg);
            double t_b = geom.next_boundary(p.pos, p.dir, reg);
            if (!mat) {
                if (t_b > 1e29) {
                    escape(p);
                    return;
                }
                p.pos = p.pos + p.dir * (t_b + kStepEps);
                continue;
            }
            // elastic model is parameterized up to 1 GeV; clamp above
            double e_eval = std::min(p.e_kin_kev, 1e6);
            double sigma = neutron_macroscopic_sigma(*mat, e_eval);
            double s = rng.exponential(1.0 / sigma);
            if (s >= t_b) {
                p.pos = p.pos + p.dir * (t_b + kStepEps);
                continue;
            }
            p.pos = p.pos + p.dir * s;
            NeutronScatter sc = neutron_elastic(*mat, e_eval, rng);
            double recoil = sc.recoil_kev * (p.e_kin_kev / e_eval);
            deposit(reg, p.pos, recoil);
            p.e_kin_kev -= recoil;
            double phi = 2.0 * pi * rng.uniform();
            p.dir = rotate_direction(p.dir, sc.cos_lab, phi);
            if (p.e_kin_kev < opt.cutoff_kev) {
                deposit(reg, p.pos, p.e_kin_kev);
                return;
            }
        }
    }
};

}  // namespace

void sample_klein_nishina(double e_kev, Rng& rng, double& frac_out,
                          double& cos_theta_out) {
    // composition-rejection sampling of the scattered fraction eps = E'/E
    double k = e_kev / electron_mass_kev;
    double eps0 = 1.0 / (1.0 + 2.0 * k);
    double a1 = std::log(1.0 / eps0);
    double a2 = 0.5 * (1.0 - eps0 * eps0);
    double eps, sin2t;
    do {
        if (rng.uniform() * (a1 + a2) < a1)
            eps = eps0 * std::exp(a1 * rng.uniform());
        else
            eps = std::sqrt(eps0 * eps0 +
                            (1.0 - eps0 * eps0) * rng.uniform());
        double t = (1.0 - eps) / (k * eps);
        sin2t = t * (2.0 - t);
    } while (rng.uniform() > 1.0 - eps * sin2t / (1.0 + eps * eps));
    frac_out = eps;
    cos_theta_out = 1.0 - (1.0 - eps) / (k * eps);
}

DepositRecord transport_event(const ParticleState& primary,
                              const SlabStack& geom, Rng& rng,
                              const TransportOptions& opt) {
    DepositRecord rec(geom.tally_names().size());
    rec.primary_id = 0;
    rec.primary_species = primary.species;
    rec.weight = primary.weight;
    Tracker tr{geom, opt, rng, rec, {}};
    tr.run(primary);
    return rec;
}

}  // namespace subbg
