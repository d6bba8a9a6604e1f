// Deposited-energy histograms with variable binning, plus integration to
// event-rate / power / mean-energy budgets.
#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace subbg {

// Strictly increasing bin edges in keV.
class BinningScheme {
  public:
    explicit BinningScheme(std::vector<double> edges);

    std::size_t nbins() const { return edges_.size() - 1; }
    const std::vector<double>& edges() const { return edges_; }
    double lo() const { return edges_.front(); }
    double hi() const { return edges_.back(); }
    double width(std::size_t i) const { return edges_[i + 1] - edges_[i]; }
    double center(std::size_t i) const {
        return 0.5 * (edges_[i] + edges_[i + 1]);
    }

    // Bin index for a value, half-open [lo, hi) convention.  Returns -1 for
    // underflow and nbins() for overflow.
    long bin_index(double e) const;

    bool operator==(const BinningScheme& o) const { return edges_ == o.edges_; }

    // True if every edge of `coarse` appears among our edges.
    bool refines(const BinningScheme& coarse) const;

  private:
    std::vector<double> edges_;
};

// Unequal binning used for background-spectrum reporting: 50 bins per MeV
// below 1 MeV, 20 per MeV to 2 MeV, 5 per MeV to 5 MeV, 2 per MeV to 20 MeV.
BinningScheme make_paper_binning();

struct BudgetSummary {
    double event_rate = 0.0;   // s^-1
    double power = 0.0;        // keV s^-1
    double mean_energy = 0.0;  // keV; 0 and flagged invalid when rate == 0
    double e_min = 0.0;
    double e_max = 0.0;
    bool mean_valid = false;
};

// Weighted deposited-energy histogram with a livetime.  Weighted counts are
// reals; per-bin sums of squared weights support Poisson error estimates
// under biased sampling.
class EnergySpectrum {
  public:
    enum class MergeMode { AddLivetime, KeepLivetime };

    EnergySpectrum(BinningScheme binning, double livetime_s);

    const BinningScheme& binning() const { return binning_; }
    double livetime() const { return livetime_; }
    void set_livetime(double t);

    std::size_t nbins() const { return binning_.nbins(); }
    const std::vector<double>& counts() const { return counts_; }
    const std::vector<double>& sumw2() const { return sumw2_; }
    double underflow() const { return underflow_; }
    double overflow() const { return overflow_; }

    void accumulate(double deposit_kev, double weight = 1.0);

    // Direct bin fill used by smearing and synthesis paths.
    void add_to_bin(std::size_t i, double weight, double w2);

    double total_count() const;

    // Counts / (livetime * bin width), i.e. s^-1 keV^-1.
    double rate_density(std::size_t i) const;

    // Integral [e_min, e_max] with uniform-density pro-rating of partial
    // bins; power uses bin-center energies.
    BudgetSummary integrate(double e_min, double e_max) const;

    void merge(const EnergySpectrum& other, MergeMode mode);

    // Rebin onto a coarser scheme whose edges are a subset of ours;
    // preserves total count exactly.
    EnergySpectrum rebinned(const BinningScheme& coarse) const;

    void scale(double factor);

    void write_csv(std::ostream& os) const;
    void write_csv_file(const std::string& path) const;
    static EnergySpectrum read_csv(std::istream& is);
    static EnergySpectrum read_csv_file(const std::string& path);

  private:
    BinningScheme binning_;
    double livetime_;
    std::vector<double> counts_;
    std::vector<double> sumw2_;
    double underflow_ = 0.0;
    double overflow_ = 0.0;
};

// Exact windowed tallies accumulated per event, independent of any binning.
class BudgetTally {
  public:
    BudgetTally(double e_min, double e_max) : e_min_(e_min), e_max_(e_max) {}

    void add(double deposit_kev, double weight = 1.0) {
        if (deposit_kev >= e_min_ && deposit_kev <= e_max_) {
            wsum_ += weight;
            wesum_ += weight * deposit_kev;
        }
    }
    void merge(const BudgetTally& o) {
        wsum_ += o.wsum_;
        wesum_ += o.wesum_;
    }
    BudgetSummary summary(double livetime_s) const;

  private:
    double e_min_, e_max_;
    double wsum_ = 0.0, wesum_ = 0.0;
};

}  // namespace subbg
