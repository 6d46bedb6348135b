// Build the 6-lump solution attached to the partition (1,1), print its tau
// inventory, and locate the peaks at t = 10.
#include <iostream>

#include "dlwe/field.hpp"
#include "dlwe/predict.hpp"

int main() {
    using namespace dlwe;

    SolutionSpec spec = SolutionSpec::with_defaults(Partition({1, 1}));
    std::cout << "partition (1,1): M = " << spec.M << " lumps, degree vector (";
    for (std::size_t k = 0; k < spec.m.size(); ++k) std::cout << (k ? "," : "") << spec.m.entry(k);
    std::cout << ")\n";

    TauPolynomial tau = build_tau(spec);
    std::cout << "tau has " << tau.poly.term_count() << " monomials, degree "
              << tau.poly.rs_degree() << " in (r,s)\n";

    Rational t(10);
    FieldSlice slice(tau, t);
    FieldGrid grid = grid_eval(slice, auto_window(spec, 10.0, 151, 151));
    PeakMap detected = detect_peaks(grid, slice);
    classify_groups(detected);

    std::cout << "detected " << detected.peaks.size() << " peaks at t = 10:\n";
    for (const Peak &p : detected.peaks)
        std::cout << "  (" << p.r << ", " << p.s << ")  v = " << p.height << "  ["
                  << to_string(p.kind) << " group " << p.group << "]\n";

    PeakMap predicted = predict_peaks(spec, t);
    std::cout << "leading-condition roots predict " << predicted.peaks.size() << " positions\n";
    return 0;
}
