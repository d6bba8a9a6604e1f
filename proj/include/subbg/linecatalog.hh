// Decay-chain gamma/x-ray emission catalogs and specific-activity config.
#pragma once

#include <string>
#include <vector>

namespace subbg {

struct EmissionLine {
    std::string isotope;
    double energy_kev;
    double intensity;  // photons per decay of the segment parent
};

// Chain segments: K40 plus the U and Th chains split at the radon step.
enum class ChainSegment { K40, UPre, UPost, ThA, ThB };
const char* segment_name(ChainSegment s);
ChainSegment segment_from_name(const std::string& name);

class LineCatalog {
  public:
    // CSV schema: segment,isotope,E_keV,intensity_per_decay
    static LineCatalog load(const std::string& path);
    static const LineCatalog& bundled();

    const std::vector<EmissionLine>& lines(ChainSegment s) const;

    // Total photons emitted per parent decay of the segment.
    double intensity_sum(ChainSegment s) const;

    std::size_t total_lines() const;

  private:
    std::vector<EmissionLine> lines_[5];
};

// Specific activities in Bq/kg plus the source-slab parameters.
struct ActivityConfig {
    double k40 = 0.0;
    double u_chain = 0.0;  // applied to both U segments (secular equilibrium)
    double th_a = 0.0;
    double th_b = 0.0;

    double activity(ChainSegment s) const;

    // Reference-laboratory values.
    static ActivityConfig reference();
};

}  // namespace subbg
