#pragma once

#include <array>
#include <utility>

#include "dlwe/partition.hpp"
#include "dlwe/rational.hpp"
#include "dlwe/rst_poly.hpp"

namespace dlwe {

/// Everything needed to pin one multi-lump solution: the partition, the two
/// rational parameters b and omega, and the optional gamma constants. The
/// derived quantities (degree vector, k0 = b*(omega + i), a = omega*b, lump
/// count M = N + n*m_n) are computed once here.
struct SolutionSpec {
    Partition lam;
    Rational b;
    Rational omega;
    std::array<Complexq, 3> gamma{};

    MultiIndex m;
    long n;
    long mn;
    long N;
    long M;
    Rational a;
    Complexq k0;

    SolutionSpec(Partition lam_, Rational b_, Rational omega_,
                 std::array<Complexq, 3> gamma_ = {})
        : lam(std::move(lam_)),
          b(std::move(b_)),
          omega(std::move(omega_)),
          gamma(std::move(gamma_)),
          m(degree_vector(lam)),
          n(static_cast<long>(lam.size())),
          mn(m.entries().back()),
          N(lam.weight()),
          M(N + n * mn),
          a(omega * b),
          k0(b * omega, b) {
        b.canonicalize();
        omega.canonicalize();
        a.canonicalize();
        if (b == 0) throw ParameterError("SolutionSpec: b must be nonzero");
        if (omega == 0) throw ParameterError("SolutionSpec: omega must be nonzero");
    }

    /// Defaults used throughout: b = omega = 1/2.
    static SolutionSpec with_defaults(Partition lam_) {
        return SolutionSpec(std::move(lam_), Rational(1, 2), Rational(1, 2));
    }

    SigmaSubstitution substitution() const {
        SigmaSubstitution sub(b, omega);
        sub.gamma = gamma;
        return sub;
    }
};

}  // namespace dlwe
