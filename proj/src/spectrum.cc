#include "subbg/spectrum.hh"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace subbg {

BinningScheme::BinningScheme(std::vector<double> edges)
    : edges_(std::move(edges)) {
    if (edges_.size() < 2)
        throw std::invalid_argument("binning needs at least two edges");
    if (edges_.front() < 0.0)
        throw std::invalid_argument("bin edges must be non-negative");
    for (std::size_t i = 1; i < edges_.size(); ++i)
        if (edges_[i] <= edges_[i - 1])
            throw std::invalid_argument("bin edges must be strictly increasing");
}

long BinningScheme::bin_index(double e) const {
    if (e < edges_.front()) return -1;
    if (e >= edges_.back()) return static_cast<long>(nbins());
    auto it = std::upper_bound(edges_.begin(), edges_.end(), e);
    return static_cast<long>(it - edges_.begin()) - 1;
}

bool BinningScheme::refines(const BinningScheme& coarse) const {
    for (double e : coarse.edges()) {
        auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
        if (it == edges_.end() || *it != e) return false;
    }
    return true;
}

BinningScheme make_paper_binning() {
    std::vector<double> edges;
    auto fill = [&](double lo, double hi, double pitch) {
        for (double e = lo; e < hi - 1e-9; e += pitch) edges.push_back(e);
    };
    fill(0.0, 1000.0, 20.0);
    fill(1000.0, 2000.0, 50.0);
    fill(2000.0, 5000.0, 200.0);
    fill(5000.0, 20000.0, 500.0);
    edges.push_back(20000.0);
    return BinningScheme(std::move(edges));
}

EnergySpectrum::EnergySpectrum(BinningScheme binning, double livetime_s)
    : binning_(std::move(binning)),
      livetime_(livetime_s),
      counts_(binning_.nbins(), 0.0),
      sumw2_(binning_.nbins(), 0.0) {
    if (livetime_ <= 0.0)
        throw std::invalid_argument("livetime must be positive");
}

void EnergySpectrum::set_livetime(double t) {
    if (t <= 0.0) throw std::invalid_argument("livetime must be positive");
    livetime_ = t;
}

void EnergySpectrum::accumulate(double deposit_kev, double weight) {
    if (weight < 0.0) throw std::invalid_argument("negative weight");
    long i = binning_.bin_index(deposit_kev);
    if (i < 0) {
        underflow_ += weight;
    } else if (i >= static_cast<long>(nbins())) {
        overflow_ += weight;
    } else {
        counts_[i] += weight;
        sumw2_[i] += weight * weight;
    }
}

void EnergySpectrum::add_to_bin(std::size_t i, double weight, double w2) {
    counts_[i] += weight;
    sumw2_[i] += w2;
}

double EnergySpectrum::total_count() const {
    double s = 0.0;
    for (double c : counts_) s += c;
    return s;
}

double EnergySpectrum::rate_density(std::size_t i) const {
    return counts_[i] / (livetime_ * binning_.width(i));
}

BudgetSummary EnergySpectrum::integrate(double e_min, double e_max) const {
    if (e_min >= e_max)
        throw std::invalid_argument("integrate: e_min must be below e_max");
    BudgetSummary out;
    out.e_min = e_min;
    out.e_max = e_max;
    double wsum = 0.0;
    double esum = 0.0;
    for (std::size_t i = 0; i < nbins(); ++i) {
        double lo = binning_.edges()[i];
        double hi = binning_.edges()[i + 1];
        double olo = std::max(lo, e_min);
        double ohi = std::min(hi, e_max);
        if (ohi <= olo) continue;
        // partial bins pro-rated assuming uniform density inside the bin
        double frac = (ohi - olo) / (hi - lo);
        double c = counts_[i] * frac;
        wsum += c;
        esum += c * 0.5 * (olo + ohi);
    }
    out.event_rate = wsum / livetime_;
    out.power = esum / livetime_;
    if (wsum > 0.0) {
        out.mean_energy = esum / wsum;
        out.mean_valid = true;
    }
    return out;
}

void EnergySpectrum::merge(const EnergySpectrum& other, MergeMode mode) {
    if (!(binning_ == other.binning_))
        throw std::invalid_argument("merge: binning mismatch");
    for (std::size_t i = 0; i < nbins(); ++i) {
        counts_[i] += other.counts_[i];
        sumw2_[i] += other.sumw2_[i];
    }
    underflow_ += other.underflow_;
    overflow_ += other.overflow_;
    if (mode == MergeMode::AddLivetime) livetime_ += other.livetime_;
}

EnergySpectrum EnergySpectrum::rebinned(const BinningScheme& coarse) const {
    if (!binning_.refines(coarse))
        throw std::invalid_argument("rebin: target edges not a subset");
    EnergySpectrum out(coarse, livetime_);
    out.underflow_ = underflow_;
    out.overflow_ = overflow_;
    for (std::size_t i = 0; i < nbins(); ++i) {
        double c = binning_.center(i);
        long j = coarse.bin_index(c);
        if (j < 0)
            out.underflow_ += counts_[i];
        else if (j >= static_cast<long>(coarse.nbins()))
            out.overflow_ += counts_[i];
        else {
            out.counts_[j] += counts_[i];
            out.sumw2_[j] += sumw2_[i];
        }
    }
    return out;
}

void EnergySpectrum::scale(double factor) {
    for (auto& c : counts_) c *= factor;
    for (auto& s : sumw2_) s *= factor * factor;
    underflow_ *= factor;
    overflow_ *= factor;
}

void EnergySpectrum::write_csv(std::ostream& os) const {
    char buf[160];
    std::snprintf(buf, sizeof buf, "# livetime_s=%.17g\n", livetime_);
    os << buf;
    os << "e_lo_keV,e_hi_keV,counts,rate_per_s_per_keV\n";
    for (std::size_t i = 0; i < nbins(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n",
                      binning_.edges()[i], binning_.edges()[i + 1], counts_[i],
                      rate_density(i));
        os << buf;
    }
}

void EnergySpectrum::write_csv_file(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    write_csv(os);
}

EnergySpectrum EnergySpectrum::read_csv(std::istream& is) {
    std::string line;
    double livetime = -1.0;
    std::vector<double> lo, hi, counts;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto pos = line.find("livetime_s=");
            if (pos != std::string::npos)
                livetime = std::stod(line.substr(pos + 11));
            continue;
        }
        if (line.find("e_lo_keV") == 0) continue;
        std::istringstream ss(line);
        double a, b, c;
        char comma;
        if (!(ss >> a >> comma >> b >> comma >> c))
            throw std::runtime_error("bad spectrum CSV row: " + line);
        lo.push_back(a);
        hi.push_back(b);
        counts.push_back(c);
    }
    if (livetime <= 0.0)
        throw std::runtime_error("spectrum CSV missing livetime_s header");
    if (lo.empty()) throw std::runtime_error("spectrum CSV has no bins");
    std::vector<double> edges = lo;
    edges.push_back(hi.back());
    EnergySpectrum out{BinningScheme(std::move(edges)), livetime};
    for (std::size_t i = 0; i < counts.size(); ++i)
        out.add_to_bin(i, counts[i], counts[i]);
    return out;
}

EnergySpectrum EnergySpectrum::read_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot read " + path);
    return read_csv(is);
}

BudgetSummary BudgetTally::summary(double livetime_s) const {
    BudgetSummary out;
    out.e_min = e_min_;
    out.e_max = e_max_;
    out.event_rate = wsum_ / livetime_s;
    out.power = wesum_ / livetime_s;
    if (wsum_ > 0.0) {
        out.mean_energy = wesum_ / wsum_;
        out.mean_valid = true;
    }
    return out;
}

}  // namespace subbg
