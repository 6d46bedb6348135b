#pragma once

#include <string>
#include <vector>

#include "dlwe/solution_spec.hpp"

namespace dlwe {

enum class PeakKind { Single, Multi, Unclassified };
enum class Provenance { Detected, Predicted };

inline const char *to_string(PeakKind k) {
    switch (k) {
        case PeakKind::Single: return "single";
        case PeakKind::Multi: return "multi";
        case PeakKind::Unclassified: return "unclassified";
    }
    return "?";
}

inline const char *to_string(Provenance p) {
    return p == Provenance::Detected ? "detected" : "predicted";
}

struct Peak {
    double r = 0;
    double s = 0;
    double height = 0;   // field value v at the peak (0 for predicted maps)
    PeakKind kind = PeakKind::Unclassified;
    int group = -1;      // group id; multi-peak groups first, then singles
    bool refined = true;
};

/// Set of peak records at one time slice, either detected from a field grid
/// or predicted from the leading-order stationarity condition.
struct PeakMap {
    SolutionSpec spec;
    double t = 0;
    Provenance provenance = Provenance::Detected;
    std::vector<Peak> peaks;
    bool classified = false;
    bool classification_consistent = true;
    std::string note;

    std::vector<Peak> singles() const {
        std::vector<Peak> out;
        for (const Peak &p : peaks)
            if (p.kind == PeakKind::Single) out.push_back(p);
        return out;
    }
    std::vector<Peak> multis() const {
        std::vector<Peak> out;
        for (const Peak &p : peaks)
            if (p.kind == PeakKind::Multi) out.push_back(p);
        return out;
    }
};

}  // namespace dlwe
