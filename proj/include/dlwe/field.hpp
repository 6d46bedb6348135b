#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "dlwe/peaks.hpp"
#include "dlwe/rst_poly.hpp"
#include "dlwe/solution_spec.hpp"
#include "dlwe/tau.hpp"

namespace dlwe {

class SingularPointError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Travelling coordinates: r = x' + 3(a^2-b^2) y', s = 6ab y' with
/// x' = x + ((a^2+b^2)/a) t and y' = y + t/(3a).
inline std::pair<Rational, Rational> to_rs(const Rational &x, const Rational &y, const Rational &t,
                                           const SolutionSpec &spec) {
    const Rational &a = spec.a, &b = spec.b;
    Rational xp = x + (a * a + b * b) / a * t;
    Rational yp = y + t / (3 * a);
    return {xp + 3 * (a * a - b * b) * yp, 6 * a * b * yp};
}

/// Inverse of to_rs at the same t.
inline std::pair<Rational, Rational> from_rs(const Rational &r, const Rational &s, const Rational &t,
                                             const SolutionSpec &spec) {
    const Rational &a = spec.a, &b = spec.b;
    Rational yp = s / (6 * a * b);
    Rational xp = r - 3 * (a * a - b * b) * yp;
    return {xp - (a * a + b * b) / a * t, yp - t / (3 * a)};
}

/// Rows of d(r,s)/d(x,y): ((1, 3(a^2-b^2)), (0, 6ab)). Constant in (x,y,t).
struct RsJacobian {
    Rational dr_dx, dr_dy, ds_dx, ds_dy;
};

inline RsJacobian rs_jacobian(const SolutionSpec &spec) {
    const Rational &a = spec.a, &b = spec.b;
    return {Rational(1), 3 * (a * a - b * b), Rational(0), 6 * a * b};
}

/// The tau function as an exact real-coefficient polynomial in (r, s, t).
struct TauPolynomial {
    SolutionSpec spec;
    RstPoly poly;
};

/// Assembles tau = sum_r |Q(r)|^2 / (2b)^{2|r|} through an existing builder
/// (reusing its caches), exactly.
inline TauPolynomial build_tau(TauBuilder &builder) {
    const SolutionSpec &spec = builder.spec();
    SigmaSubstitution sub = spec.substitution();
    RstPoly acc;
    for (const MultiIndex &r : builder.indices()) {
        TauTerm term = builder.q_of_r(r);
        RstPoly image = substitute_sigma(term.combo, sub);
        acc += Complexq(pow(2 * spec.b, -2 * term.weight)) * image.modulus_squared();
    }
    return TauPolynomial{spec, acc.real_checked()};
}

inline TauPolynomial build_tau(const SolutionSpec &spec) {
    TauBuilder builder(spec);
    return build_tau(builder);
}

/// Exact field value v = -2 (tau_xy tau - tau_x tau_y) / tau^2 at a rational
/// point given in (r, s, t); throws on tau = 0.
inline Rational v_field_exact(const TauPolynomial &tau, const Rational &r, const Rational &s,
                              const Rational &t) {
    RsJacobian j = rs_jacobian(tau.spec);
    RstPoly tr = tau.poly.diff(RstVar::R);
    RstPoly ts = tau.poly.diff(RstVar::S);
    RstPoly trr = tr.diff(RstVar::R);
    RstPoly trs = tr.diff(RstVar::S);

    Rational tv = tau.poly.evaluate(r, s, t).re;
    if (tv == 0) throw SingularPointError("v_field: tau vanishes at the requested point");
    Rational trv = tr.evaluate(r, s, t).re;
    Rational tsv = ts.evaluate(r, s, t).re;
    Rational trrv = trr.evaluate(r, s, t).re;
    Rational trsv = trs.evaluate(r, s, t).re;

    Rational tx = trv;
    Rational ty = j.dr_dy * trv + j.ds_dy * tsv;
    Rational txy = j.dr_dy * trrv + j.ds_dy * trsv;
    return Rational(-2) * (txy * tv - tx * ty) / (tv * tv);
}

/// Compiled evaluator of tau and the field at a fixed time slice. Holds
/// Horner forms of tau and its (r, s) derivatives up to second order.
class FieldSlice {
  public:
    FieldSlice(const TauPolynomial &tau, const Rational &t)
        : spec_(tau.spec), t_(t.get_d()) {
        RstPoly at = tau.poly.at_time(t);
        RstPoly tr = at.diff(RstVar::R);
        RstPoly ts = at.diff(RstVar::S);
        tau_ = Horner2D<double>(at);
        tau_r_ = Horner2D<double>(tr);
        tau_s_ = Horner2D<double>(ts);
        tau_rr_ = Horner2D<double>(tr.diff(RstVar::R));
        tau_rs_ = Horner2D<double>(tr.diff(RstVar::S));
        tau_ss_ = Horner2D<double>(ts.diff(RstVar::S));
        RsJacobian j = rs_jacobian(spec_);
        c_ry_ = j.dr_dy.get_d();
        c_sy_ = j.ds_dy.get_d();
    }

    const SolutionSpec &spec() const { return spec_; }
    double t() const { return t_; }

    double tau(double r, double s) const { return tau_(r, s); }
    double tau_r(double r, double s) const { return tau_r_(r, s); }
    double tau_s(double r, double s) const { return tau_s_(r, s); }
    double tau_rr(double r, double s) const { return tau_rr_(r, s); }
    double tau_rs(double r, double s) const { return tau_rs_(r, s); }
    double tau_ss(double r, double s) const { return tau_ss_(r, s); }

    /// A rounding-error scale for tau at (r, s).
    double tau_error_scale(double r, double s) const {
        return tau_.magnitude_bound(r, s) * 1e-15;
    }

    /// v via the quotient form of the second log-derivative.
    double v(double r, double s) const {
        double tv = tau_(r, s);
        if (!(tv > 0)) throw SingularPointError("FieldSlice: tau not positive at node");
        double tx = tau_r_(r, s);
        double ty = c_ry_ * tx + c_sy_ * tau_s_(r, s);
        double txy = c_ry_ * tau_rr_(r, s) + c_sy_ * tau_rs_(r, s);
        return -2.0 * (txy * tv - tx * ty) / (tv * tv);
    }

    /// Same field through the expanded log-derivative path (ratio first);
    /// used as the cross-check of the quotient form.
    double v_logform(double r, double s) const {
        double tv = tau_(r, s);
        if (!(tv > 0)) throw SingularPointError("FieldSlice: tau not positive at node");
        double tx = tau_r_(r, s) / tv;
        double ty = (c_ry_ * tau_r_(r, s) + c_sy_ * tau_s_(r, s)) / tv;
        double txy = (c_ry_ * tau_rr_(r, s) + c_sy_ * tau_rs_(r, s)) / tv;
        return -2.0 * (txy - tx * ty);
    }

    /// Lump response: the (r, s)-Laplacian of ln tau. Each lump is a sharp
    /// dip of ln tau, so this field carries one single-signed bump per lump,
    /// unlike v whose mixed derivative splits every lump into four lobes.
    double lump_response(double r, double s) const {
        double tv = tau_(r, s);
        if (!(tv > 0)) throw SingularPointError("FieldSlice: tau not positive at node");
        double tr = tau_r_(r, s), ts = tau_s_(r, s);
        return (tau_rr_(r, s) + tau_ss_(r, s)) / tv - (tr * tr + ts * ts) / (tv * tv);
    }

  private:
    SolutionSpec spec_;
    double t_;
    Horner2D<double> tau_, tau_r_, tau_s_, tau_rr_, tau_rs_, tau_ss_;
    double c_ry_ = 0, c_sy_ = 0;
};

struct GridWindow {
    double r_min, r_max, s_min, s_max;
    std::size_t nr = 301, ns = 301;
};

/// Default square window: half-width 4*sqrt(|t|+1)*(M+1)/n.
inline GridWindow auto_window(const SolutionSpec &spec, double t, std::size_t nr = 301,
                              std::size_t ns = 301) {
    double half = 4.0 * std::sqrt(std::abs(t) + 1.0) * static_cast<double>(spec.M + 1) /
                  static_cast<double>(spec.n);
    return GridWindow{-half, half, -half, half, nr, ns};
}

/// Field values on a rectangular grid; nodes where tau failed to be positive
/// are recorded instead of clamped.
struct FieldGrid {
    GridWindow window;
    double t = 0;
    std::vector<double> v;  // row-major, r index outer
    std::vector<std::pair<std::size_t, std::size_t>> singular_nodes;

    double r_at(std::size_t i) const {
        return window.r_min + (window.r_max - window.r_min) * static_cast<double>(i) /
                                  static_cast<double>(window.nr - 1);
    }
    double s_at(std::size_t j) const {
        return window.s_min + (window.s_max - window.s_min) * static_cast<double>(j) /
                                  static_cast<double>(window.ns - 1);
    }
    double value(std::size_t i, std::size_t j) const { return v[i * window.ns + j]; }
};

inline FieldGrid grid_eval(const FieldSlice &slice, const GridWindow &window) {
    if (window.nr < 2 || window.ns < 2) throw std::invalid_argument("grid_eval: need nr, ns >= 2");
    FieldGrid grid;
    grid.window = window;
    grid.t = slice.t();
    grid.v.assign(window.nr * window.ns, 0.0);
    for (std::size_t i = 0; i < window.nr; ++i) {
        double r = grid.r_at(i);
        for (std::size_t j = 0; j < window.ns; ++j) {
            double s = grid.s_at(j);
            double tv = slice.tau(r, s);
            if (!(tv > 0) || !std::isfinite(tv)) {
                grid.singular_nodes.emplace_back(i, j);
                grid.v[i * window.ns + j] = 0.0;
                continue;
            }
            grid.v[i * window.ns + j] = slice.v(r, s);
        }
    }
    return grid;
}

struct DetectParams {
    double threshold_rel = 1e-3;  // lump response >= threshold_rel * its max
    double dedup_cells = 2.0;     // dedup radius in grid cells
    int newton_max_iter = 50;
    double grad_tol = 1e-10;      // target |grad tau| / tau for the polish
};

/// Locates lumps on an evaluated grid. Candidates are strict local maxima of
/// the lump response (one bump per lump); each is polished onto the exact
/// tau-stationary point when one exists nearby, and otherwise placed by a
/// sub-cell quadratic fit of the response. Peaks carrying the refined flag
/// satisfy |grad tau|/tau <= grad_tol.
inline PeakMap detect_peaks(const FieldGrid &grid, const FieldSlice &slice,
                            const DetectParams &params = {}) {
    const GridWindow &w = grid.window;
    const double NEG = -std::numeric_limits<double>::infinity();
    std::vector<double> lam(w.nr * w.ns, NEG);
    for (std::size_t i = 0; i < w.nr; ++i)
        for (std::size_t j = 0; j < w.ns; ++j) {
            double tv = slice.tau(grid.r_at(i), grid.s_at(j));
            if (tv > 0 && std::isfinite(tv)) lam[i * w.ns + j] = slice.lump_response(grid.r_at(i), grid.s_at(j));
        }
    double lmax = 0;
    for (double x : lam)
        if (std::isfinite(x)) lmax = std::max(lmax, x);
    double threshold = params.threshold_rel * lmax;
    double cell = std::min((w.r_max - w.r_min) / static_cast<double>(w.nr - 1),
                           (w.s_max - w.s_min) / static_cast<double>(w.ns - 1));

    struct Candidate {
        double r, s, height, strength;
        bool refined;
    };
    std::vector<Candidate> cands;

    for (std::size_t i = 1; i + 1 < w.nr; ++i)
        for (std::size_t j = 1; j + 1 < w.ns; ++j) {
            double c = lam[i * w.ns + j];
            if (!(c >= threshold)) continue;
            bool strict = true;
            for (int di = -1; di <= 1 && strict; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    if (lam[(i + di) * w.ns + (j + dj)] >= c) {
                        strict = false;
                        break;
                    }
                }
            if (!strict) continue;

            double r0 = grid.r_at(i), s0 = grid.s_at(j);
            // stationarity polish: damped Newton on grad tau = 0
            double cr = r0, cs = s0;
            bool converged = false;
            for (int it = 0; it < params.newton_max_iter; ++it) {
                double tv = slice.tau(cr, cs);
                if (!(tv > 0) || !std::isfinite(tv)) break;
                double gr = slice.tau_r(cr, cs), gs = slice.tau_s(cr, cs);
                if (std::hypot(gr, gs) <= params.grad_tol * tv) {
                    converged = true;
                    break;
                }
                double hrr = slice.tau_rr(cr, cs), hrs = slice.tau_rs(cr, cs), hss = slice.tau_ss(cr, cs);
                double det = hrr * hss - hrs * hrs;
                if (det == 0 || !std::isfinite(det)) break;
                double dr = -(hss * gr - hrs * gs) / det;
                double ds = -(-hrs * gr + hrr * gs) / det;
                // backtrack on |grad tau|^2 so the iteration cannot wander
                double merit = gr * gr + gs * gs, alpha = 1.0;
                int back = 0;
                for (; back < 30; ++back) {
                    double nr = cr + alpha * dr, ns = cs + alpha * ds;
                    double ngr = slice.tau_r(nr, ns), ngs = slice.tau_s(nr, ns);
                    if (ngr * ngr + ngs * ngs < merit) {
                        cr = nr;
                        cs = ns;
                        break;
                    }
                    alpha /= 2;
                }
                if (back == 30) break;
            }

            Candidate cand{};
            if (converged && std::hypot(cr - r0, cs - s0) <= 2 * cell) {
                cand = {cr, cs, 0.0, 0.0, true};
            } else {
                // sub-cell paraboloid fit of the response on the 3x3 stencil
                auto f = [&](int di, int dj) { return lam[(i + di) * w.ns + (j + dj)]; };
                double gr = (f(1, 0) - f(-1, 0)) / 2, gs = (f(0, 1) - f(0, -1)) / 2;
                double hrr = f(1, 0) - 2 * f(0, 0) + f(-1, 0);
                double hss = f(0, 1) - 2 * f(0, 0) + f(0, -1);
                double hrs = (f(1, 1) - f(1, -1) - f(-1, 1) + f(-1, -1)) / 4;
                double det = hrr * hss - hrs * hrs;
                double dr = 0, ds = 0;
                if (det != 0 && std::isfinite(det)) {
                    dr = -(hss * gr - hrs * gs) / det;
                    ds = -(-hrs * gr + hrr * gs) / det;
                    dr = std::clamp(dr, -1.0, 1.0);
                    ds = std::clamp(ds, -1.0, 1.0);
                }
                double hr = (w.r_max - w.r_min) / static_cast<double>(w.nr - 1);
                double hs = (w.s_max - w.s_min) / static_cast<double>(w.ns - 1);
                cand = {r0 + dr * hr, s0 + ds * hs, 0.0, 0.0, false};
            }
            double tv = slice.tau(cand.r, cand.s);
            if (!(tv > 0) || !std::isfinite(tv)) {
                cand.r = r0;
                cand.s = s0;
                cand.refined = false;
            }
            cand.height = slice.v(cand.r, cand.s);
            cand.strength = slice.lump_response(cand.r, cand.s);
            cands.push_back(cand);
        }

    // dedup: strongest response first, suppress anything within the radius
    double radius = params.dedup_cells * cell;
    std::sort(cands.begin(), cands.end(),
              [](const Candidate &a, const Candidate &b) { return a.strength > b.strength; });
    std::vector<Candidate> kept;
    for (const Candidate &c : cands) {
        bool dup = false;
        for (const Candidate &k : kept)
            if (std::hypot(c.r - k.r, c.s - k.s) <= radius) {
                dup = true;
                break;
            }
        if (!dup) kept.push_back(c);
    }
    std::sort(kept.begin(), kept.end(), [](const Candidate &a, const Candidate &b) {
        return a.r != b.r ? a.r < b.r : a.s < b.s;
    });

    PeakMap map{slice.spec(), slice.t(), Provenance::Detected, {}};
    for (const Candidate &c : kept)
        map.peaks.push_back(Peak{c.r, c.s, c.height, PeakKind::Unclassified, -1, c.refined});
    return map;
}

}  // namespace dlwe
