#include "subbg/linecatalog.hh"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "subbg/material.hh"

namespace subbg {

const char* segment_name(ChainSegment s) {
    switch (s) {
        case ChainSegment::K40: return "K40";
        case ChainSegment::UPre: return "U-pre";
        case ChainSegment::UPost: return "U-post";
        case ChainSegment::ThA: return "Th-a";
        case ChainSegment::ThB: return "Th-b";
    }
    return "?";
}

ChainSegment segment_from_name(const std::string& name) {
    for (int i = 0; i < 5; ++i) {
        auto s = static_cast<ChainSegment>(i);
        if (name == segment_name(s)) return s;
    }
    throw std::invalid_argument("unknown chain segment: " + name);
}

LineCatalog LineCatalog::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    LineCatalog cat;
    std::string line;
    std::getline(is, line);  // header
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string seg, iso, e_s, i_s;
        std::getline(ss, seg, ',');
        std::getline(ss, iso, ',');
        std::getline(ss, e_s, ',');
        std::getline(ss, i_s, ',');
        double e = std::stod(e_s);
        double inten = std::stod(i_s);
        if (e < 50.0)
            throw std::runtime_error(path + ": line below 50 keV at row "
                                     + std::to_string(lineno));
        if (inten <= 0.0 || inten > 10.0)
            throw std::runtime_error(path + ": intensity out of (0,10] at row "
                                     + std::to_string(lineno));
        cat.lines_[static_cast<int>(segment_from_name(seg))].push_back(
            {iso, e, inten});
    }
    return cat;
}

const LineCatalog& LineCatalog::bundled() {
    static LineCatalog cat =
        load(MaterialLibrary::data_dir() + "/lines/chains.csv");
    return cat;
}

const std::vector<EmissionLine>& LineCatalog::lines(ChainSegment s) const {
    return lines_[static_cast<int>(s)];
}

double LineCatalog::intensity_sum(ChainSegment s) const {
    double sum = 0.0;
    for (const auto& l : lines(s)) sum += l.intensity;
    return sum;
}

std::size_t LineCatalog::total_lines() const {
    std::size_t n = 0;
    for (const auto& v : lines_) n += v.size();
    return n;
}

double ActivityConfig::activity(ChainSegment s) const {
    switch (s) {
        case ChainSegment::K40: return k40;
        case ChainSegment::UPre:
        case ChainSegment::UPost: return u_chain;
        case ChainSegment::ThA: return th_a;
        case ChainSegment::ThB: return th_b;
    }
    return 0.0;
}

ActivityConfig ActivityConfig::reference() {
    ActivityConfig c;
    c.k40 = 1030.0;
    c.u_chain = 76.0;
    c.th_a = 126.0;
    c.th_b = 82.0;
    return c;
}

}  // namespace subbg
