#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dlwe/field.hpp"
#include "dlwe/matching.hpp"
#include "dlwe/peaks.hpp"
#include "dlwe/rst_poly.hpp"
#include "dlwe/schur.hpp"
#include "dlwe/solution_spec.hpp"
#include "dlwe/tau.hpp"

namespace dlwe {

/// The leading-order stationarity condition: the bracketed combination of
/// the top Cauchy-Binet term (Q(0) without its i^{|0|} prefactor), with the
/// coordinates substituted and time frozen. Its zero set approximates all M
/// peak positions.
struct LeadingCondition {
    SolutionSpec spec;
    Rational t;
    RstPoly l0;  // complex coefficients, variables (r, s) only
};

inline LeadingCondition leading_condition(const SolutionSpec &spec, const Rational &t) {
    SchurTable table(spec.mn);
    SigmaSubstitution sub = spec.substitution();
    long mn = spec.mn;
    std::size_t n = static_cast<std::size_t>(spec.n);

    // substituted Schur polynomials at the frozen time, and their conjugates
    std::vector<RstPoly> ps(static_cast<std::size_t>(mn) + 1), psc(static_cast<std::size_t>(mn) + 1);
    for (long k = 0; k <= mn; ++k) {
        ps[k] = substitute_sigma(table.p(k), sub).at_time(t);
        psc[k] = ps[k].conj();
    }
    auto q_sub = [&](long a, long b) -> RstPoly {
        if (a < 0 || b < 0) return RstPoly::zero();
        RstPoly head = (a >= 1 ? ps[a - 1] : RstPoly::zero()) + spec.k0 * ps[a];
        return head * psc[b];
    };
    std::map<std::pair<long, long>, RstPoly> q_cache;
    auto q_at = [&](long a, long b) -> const RstPoly & {
        auto key = std::make_pair(a, b);
        auto it = q_cache.find(key);
        if (it == q_cache.end()) it = q_cache.emplace(key, q_sub(a, b)).first;
        return it->second;
    };
    auto z_sub = [&](long m, long nn, long l) {
        RstPoly acc;
        for (long j = 0; j <= l; ++j) {
            const RstPoly &q = q_at(m - l + j, nn - j);
            if (q.is_zero()) continue;
            Complexq c(binomial(static_cast<unsigned long>(l), static_cast<unsigned long>(j)));
            if (j % 2 == 1) c = -c;
            acc += c * q;
        }
        return acc;
    };

    // rows 0..n-1 of U * P, with P_{l,j} = i^l Z_{m_j, mn, l}
    Matrix<Rational> u = u_matrix(mn, spec.b);
    std::size_t dim = static_cast<std::size_t>(2 * mn + 1);
    Matrix<RstPoly> up(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        long mj = spec.m.entry(j);
        for (std::size_t l = 0; l < dim; ++l) {
            long row = static_cast<long>(l);
            if (row > mj + mn) break;  // Z vanishes beyond m_j + mn
            RstPoly p_lj = Complexq::i_pow(row) * z_sub(mj, mn, row);
            if (p_lj.is_zero()) continue;
            for (std::size_t i = 0; i < n && i <= l; ++i) {
                const Rational &w = u(i, l);
                if (w == 0) continue;
                up(i, j) += Complexq(w) * p_lj;
            }
        }
    }
    RstPoly q0 = determinant(up);
    long zero_sum = static_cast<long>(n * (n - 1) / 2);
    return LeadingCondition{spec, t, Complexq::i_pow(-zero_sum) * q0};
}

/// Evaluates a complex bivariate polynomial together with its (r, s)
/// gradient in one Horner sweep.
class GradientEvaluator {
  public:
    GradientEvaluator() = default;

    explicit GradientEvaluator(const RstPoly &p) {
        long dr = std::max(p.degree(RstVar::R), 0L);
        long ds = std::max(p.degree(RstVar::S), 0L);
        rows_.assign(dr + 1, std::vector<std::complex<double>>(ds + 1, {0.0, 0.0}));
        for (const auto &[m, c] : p.terms()) rows_[m.r][m.s] += c.to_complex();
    }

    struct Value {
        std::complex<double> f, fr, fs;
    };

    Value operator()(double r, double s) const {
        std::complex<double> f{0, 0}, fr{0, 0}, fs{0, 0};
        for (std::size_t i = rows_.size(); i-- > 0;) {
            const auto &row = rows_[i];
            std::complex<double> g{0, 0}, gs{0, 0};
            for (std::size_t j = row.size(); j-- > 0;) {
                gs = gs * s + g;  // derivative of the partial Horner value
                g = g * s + row[j];
            }
            fr = fr * r + f;
            f = f * r + g;
            fs = fs * r + gs;
        }
        return {f, fr, fs};
    }

    double magnitude_bound(double r, double s) const {
        double ar = std::abs(r), as = std::abs(s), acc = 0, pr = 1;
        for (const auto &row : rows_) {
            double ps = 1;
            for (const auto &c : row) {
                acc += std::abs(c) * pr * ps;
                ps *= as;
            }
            pr *= ar;
        }
        return acc;
    }

  private:
    std::vector<std::vector<std::complex<double>>> rows_;
};

struct PredictParams {
    double window_coeff = 4.0;      // auto window: coeff*sqrt(|t|+1)*(M+1)/n
    long seeds_per_axis_factor = 4; // lattice of (factor*M)^2 seeds
    double core_coeff = 4.0;        // extra seed box of half-width coeff*sqrt(|t|+1)
    double dedup_frac = 1e-3;       // merge radius as a fraction of the window width
    int newton_max_iter = 60;
    double residual_frac = 1e-9;    // accept when |l0| <= frac * local magnitude
    std::optional<GridWindow> window;  // overrides the auto window

    // Roots are first located at a far time slice, where every root basin is
    // wide and the multi-peak groups appear as tight clusters, then followed
    // down to the target time with sqrt(|t|)-rescaled Newton restarts. This
    // also assigns each root its group lineage.
    bool continuation = true;
    double t_far = 400.0;           // |t| of the far slice
    double cluster_coeff = 0.5;     // group-cluster radius: coeff*sqrt(|t_far|)
};

/// Rescales (r, s) -> (scale*r, scale*s) and normalizes the largest
/// coefficient magnitude to 1; conditioning for root finding.
inline RstPoly scale_rs(const RstPoly &p, double scale) {
    RstPoly out;
    // exact scaling is unnecessary here: this polynomial feeds the floating
    // Newton solver only
    double logmax = -1e300;
    for (const auto &[m, c] : p.terms()) {
        double mag = std::abs(c.to_complex());
        if (mag == 0) continue;
        double lg = std::log(mag) + (m.r + m.s) * std::log(scale);
        logmax = std::max(logmax, lg);
    }
    for (const auto &[m, c] : p.terms()) {
        std::complex<double> v = c.to_complex();
        double lg = (m.r + m.s) * std::log(scale) - logmax;
        std::complex<double> scaled = v * std::exp(lg);
        // re-wrap as exact to reuse RstPoly plumbing; the binary64 values are
        // what the evaluator will see anyway
        out += RstPoly::monomial(m, Complexq(Rational(scaled.real()), Rational(scaled.imag())));
    }
    return out;
}

namespace detail {

struct RootPoint {
    double r, s, residual;
    PeakKind kind = PeakKind::Unclassified;
    int group = -1;
};

/// Newton solver for l0 = 0 at one time slice, globalized by backtracking on
/// |l0|^2 so iterates descend the residual into the nearest root basin.
class RootSolver {
  public:
    RootSolver(const SolutionSpec &spec, const Rational &t, const PredictParams &params)
        : params_(params) {
        LeadingCondition lc = leading_condition(spec, t);
        GridWindow window = params.window ? *params.window : auto_window(spec, t.get_d());
        half_r_ = std::max(std::abs(window.r_min), std::abs(window.r_max));
        half_s_ = std::max(std::abs(window.s_min), std::abs(window.s_max));
        scale_ = std::max(half_r_, half_s_);
        eval_ = GradientEvaluator(scale_rs(lc.l0, scale_));
    }

    double scale() const { return scale_; }

    /// Newton from an unscaled seed; appends the root (unscaled) on success.
    bool refine_from(double r0, double s0, RootPoint *out) const {
        double u = r0 / scale_, w = s0 / scale_;
        auto v = eval_(u, w);
        double merit = std::norm(v.f);
        for (int it = 0; it < params_.newton_max_iter; ++it) {
            double mag = std::max(eval_.magnitude_bound(u, w), 1e-300);
            if (std::abs(v.f) <= 1e-12 * mag) break;
            double fu = v.f.real(), fv = v.f.imag();
            double a = v.fr.real(), b = v.fs.real(), c = v.fr.imag(), d = v.fs.imag();
            double det = a * d - b * c;
            if (det == 0 || !std::isfinite(det)) return false;
            double du = -(d * fu - b * fv) / det;
            double dw = -(-c * fu + a * fv) / det;
            double alpha = 1.0;
            int back = 0;
            for (; back < 40; ++back) {
                double nu = u + alpha * du, nw = w + alpha * dw;
                if (std::isfinite(nu) && std::isfinite(nw) && std::abs(nu) <= 4 && std::abs(nw) <= 4) {
                    auto nv = eval_(nu, nw);
                    if (std::norm(nv.f) < merit) {
                        u = nu;
                        w = nw;
                        v = nv;
                        merit = std::norm(nv.f);
                        break;
                    }
                }
                alpha /= 2;
            }
            if (back == 40) break;
            if (alpha * std::hypot(du, dw) < 1e-13) break;
        }
        double mag = std::max(eval_.magnitude_bound(u, w), 1e-300);
        double resid = std::abs(eval_(u, w).f) / mag;
        if (resid > params_.residual_frac) return false;
        *out = RootPoint{u * scale_, w * scale_, resid};
        return true;
    }

    /// Full lattice sweep (window plus core box), deduplicated.
    std::vector<RootPoint> sweep(long M, double t) const {
        std::vector<RootPoint> roots;
        long per_axis = params_.seeds_per_axis_factor * M;
        auto lattice = [&](double box_r, double box_s) {
            for (long i = 0; i < per_axis; ++i)
                for (long j = 0; j < per_axis; ++j) {
                    double r = -box_r + 2 * box_r * (static_cast<double>(i) + 0.5) / static_cast<double>(per_axis);
                    double s = -box_s + 2 * box_s * (static_cast<double>(j) + 0.5) / static_cast<double>(per_axis);
                    RootPoint root;
                    if (refine_from(r, s, &root)) roots.push_back(root);
                }
        };
        lattice(half_r_, half_s_);
        double core = params_.core_coeff * std::sqrt(std::abs(t) + 1.0);
        if (core < 0.5 * std::min(half_r_, half_s_)) lattice(core, core);
        return dedup(roots, params_.dedup_frac * 2.0 * scale_);
    }

    static std::vector<RootPoint> dedup(std::vector<RootPoint> roots, double radius) {
        std::sort(roots.begin(), roots.end(),
                  [](const RootPoint &a, const RootPoint &b) { return a.residual < b.residual; });
        std::vector<RootPoint> kept;
        for (const RootPoint &r : roots) {
            bool dup = false;
            for (const RootPoint &k : kept)
                if (std::hypot(r.r - k.r, r.s - k.s) <= radius) {
                    dup = true;
                    break;
                }
            if (!dup) kept.push_back(r);
        }
        return kept;
    }

  private:
    PredictParams params_;
    GradientEvaluator eval_;
    double half_r_ = 0, half_s_ = 0, scale_ = 1;
};

/// Single-linkage components at a given radius (union-find).
inline std::vector<int> linkage_components(const std::vector<RootPoint> &roots, double radius,
                                           int *count_out) {
    std::size_t count = roots.size();
    std::vector<int> parent(count);
    for (std::size_t i = 0; i < count; ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = i + 1; j < count; ++j)
            if (std::hypot(roots[i].r - roots[j].r, roots[i].s - roots[j].s) <= radius) {
                int a = find(static_cast<int>(i)), b = find(static_cast<int>(j));
                if (a != b) parent[a] = b;
            }
    std::vector<int> comp(count, -1);
    int next = 0;
    for (std::size_t i = 0; i < count; ++i) {
        int root = find(static_cast<int>(i));
        if (comp[root] < 0) comp[root] = next++;
    }
    std::vector<int> out(count);
    for (std::size_t i = 0; i < count; ++i) out[i] = comp[find(static_cast<int>(i))];
    if (count_out) *count_out = next;
    return out;
}

/// Groups the far-slice roots into multi-peak clusters. At the far slice the
/// group members sit a few units apart while distinct groups and singles are
/// a sqrt(|t|) scale apart, so a linking radius realizing the expected
/// decomposition (mn clusters of n, N singletons) exists; the sweep over
/// candidate radii picks the best-matching one.
inline void assign_lineage(std::vector<RootPoint> &roots, long n, long mn, long N) {
    std::size_t count = roots.size();
    if (count == 0) return;
    if (n < 2) {
        for (RootPoint &r : roots) {
            r.kind = PeakKind::Single;
            r.group = -1;
        }
        return;
    }
    std::vector<double> dists;
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = i + 1; j < count; ++j)
            dists.push_back(std::hypot(roots[i].r - roots[j].r, roots[i].s - roots[j].s));
    std::sort(dists.begin(), dists.end());
    dists.erase(std::unique(dists.begin(), dists.end()), dists.end());

    long best_score = std::numeric_limits<long>::max();
    std::vector<int> best_comp;
    auto consider = [&](double radius) {
        int ncomp = 0;
        std::vector<int> comp = linkage_components(roots, radius, &ncomp);
        std::vector<long> size(ncomp, 0);
        for (std::size_t i = 0; i < count; ++i) ++size[comp[i]];
        long full = 0, single = 0, other = 0;
        for (long s : size) {
            if (s == n) ++full;
            else if (s == 1) ++single;
            else ++other;
        }
        long score = std::labs(full - mn) + std::labs(single - N) + 2 * other;
        if (score < best_score) {
            best_score = score;
            best_comp = std::move(comp);
        }
    };
    consider(0.0);
    for (std::size_t k = 0; k + 1 < dists.size() && best_score > 0; ++k)
        consider((dists[k] + dists[k + 1]) / 2);

    std::vector<long> size;
    int ncomp = 1 + *std::max_element(best_comp.begin(), best_comp.end());
    size.assign(ncomp, 0);
    for (std::size_t i = 0; i < count; ++i) ++size[best_comp[i]];
    for (std::size_t i = 0; i < count; ++i) {
        if (size[best_comp[i]] == n) {
            roots[i].kind = PeakKind::Multi;
            roots[i].group = best_comp[i];
        } else {
            roots[i].kind = PeakKind::Single;
            roots[i].group = -1;
        }
    }
}

}  // namespace detail

/// Root-based peak prediction. Roots of the leading condition are located at
/// a far time slice (wide basins, clean group clusters), then followed down
/// to the target time; a direct lattice sweep at the target time supplements
/// anything the continuation lost. At most M positions are returned.
inline PeakMap predict_peaks(const SolutionSpec &spec, const Rational &t,
                             const PredictParams &params = {}) {
    double td = t.get_d();
    if (td == 0) throw std::invalid_argument("predict_peaks: |t| must be positive");

    std::vector<detail::RootPoint> roots;
    GridWindow target_window = params.window ? *params.window : auto_window(spec, td);
    double target_width = std::max(target_window.r_max - target_window.r_min,
                                   target_window.s_max - target_window.s_min);
    double dedup_radius = params.dedup_frac * target_width;

    if (params.continuation) {
        double far = std::max(params.t_far, std::abs(td));
        double sign = td > 0 ? 1.0 : -1.0;

        // time ladder from the far slice down to the target, ratio <= 1.3
        std::vector<double> ladder{std::abs(td)};
        for (double cur = std::abs(td); cur * 1.3 < far; cur *= 1.3) ladder.push_back(cur * 1.3);
        ladder.push_back(far);
        std::reverse(ladder.begin(), ladder.end());

        PredictParams auto_params = params;
        auto_params.window.reset();  // intermediate slices size their own window
        {
            Rational t_far_exact(sign * ladder.front());
            detail::RootSolver far_solver(spec, t_far_exact, auto_params);
            roots = far_solver.sweep(spec.M, sign * ladder.front());
            detail::assign_lineage(roots, spec.n, spec.mn, spec.N);
        }
        for (std::size_t step = 1; step < ladder.size(); ++step) {
            bool is_target = step + 1 == ladder.size();
            double shrink = std::sqrt(ladder[step] / ladder[step - 1]);
            Rational t_exact = is_target ? t : Rational(sign * ladder[step]);
            detail::RootSolver solver(spec, t_exact, is_target ? params : auto_params);
            std::vector<detail::RootPoint> next;

            // singles restart from their rescaled positions
            for (const detail::RootPoint &root : roots) {
                if (root.kind == PeakKind::Multi) continue;
                detail::RootPoint moved;
                if (solver.refine_from(root.r * shrink, root.s * shrink, &moved)) {
                    moved.kind = root.kind;
                    moved.group = root.group;
                    next.push_back(moved);
                }
            }

            // groups are tracked as units: every member restarts, and a local
            // seed disc around the rescaled centroid recovers members whose
            // basins were crossed during the step
            std::map<int, std::vector<const detail::RootPoint *>> groups;
            for (const detail::RootPoint &root : roots)
                if (root.kind == PeakKind::Multi) groups[root.group].push_back(&root);
            for (const auto &[label, members] : groups) {
                double cr = 0, cs = 0, extent = 0;
                for (const auto *m : members) {
                    cr += m->r;
                    cs += m->s;
                }
                cr = cr / static_cast<double>(members.size()) * shrink;
                cs = cs / static_cast<double>(members.size()) * shrink;
                for (const auto *a : members)
                    for (const auto *b : members)
                        extent = std::max(extent, std::hypot(a->r - b->r, a->s - b->s));
                extent = std::max(extent * shrink, 8 * dedup_radius);

                std::vector<detail::RootPoint> landed;
                auto try_seed = [&](double r0, double s0) {
                    detail::RootPoint moved;
                    if (!solver.refine_from(r0, s0, &moved)) return;
                    if (std::hypot(moved.r - cr, moved.s - cs) > 2.5 * extent) return;
                    for (const detail::RootPoint &k : landed)
                        if (std::hypot(moved.r - k.r, moved.s - k.s) <= dedup_radius) return;
                    landed.push_back(moved);
                };
                for (const auto *m : members) try_seed(m->r * shrink, m->s * shrink);
                if (static_cast<long>(landed.size()) < spec.n) {
                    const int rings = 3, spokes = 8;
                    for (int ri = 1; ri <= rings && static_cast<long>(landed.size()) < spec.n; ++ri)
                        for (int k = 0; k < spokes; ++k) {
                            double ang = 2 * M_PI * k / spokes + 0.3 * ri;
                            double rad = extent * ri / rings;
                            try_seed(cr + rad * std::cos(ang), cs + rad * std::sin(ang));
                        }
                }
                for (detail::RootPoint &root : landed) {
                    root.kind = PeakKind::Multi;
                    root.group = label;
                    next.push_back(root);
                }
            }

            // collided lineages collapse here
            roots = detail::RootSolver::dedup(std::move(next), dedup_radius);
        }
        // supplement with a direct sweep at the target time
        detail::RootSolver fresh(spec, t, params);
        for (detail::RootPoint &extra : fresh.sweep(spec.M, td)) {
            bool known = false;
            for (const detail::RootPoint &root : roots)
                if (std::hypot(root.r - extra.r, root.s - extra.s) <= dedup_radius) {
                    known = true;
                    break;
                }
            if (!known) roots.push_back(extra);
        }
    } else {
        detail::RootSolver solver(spec, t, params);
        roots = solver.sweep(spec.M, td);
    }

    PeakMap map{spec, td, Provenance::Predicted, {}};
    if (static_cast<long>(roots.size()) > spec.M) {
        std::sort(roots.begin(), roots.end(),
                  [](const detail::RootPoint &a, const detail::RootPoint &b) { return a.residual < b.residual; });
        roots.resize(static_cast<std::size_t>(spec.M));
        map.note = "extra roots beyond M discarded by residual order";
    } else if (static_cast<long>(roots.size()) < spec.M) {
        map.note = "shortfall: found " + std::to_string(roots.size()) + " of " +
                   std::to_string(spec.M) + " expected roots";
    }
    for (const detail::RootPoint &root : roots)
        map.peaks.push_back(Peak{root.r, root.s, 0.0, root.kind, root.group, true});
    std::sort(map.peaks.begin(), map.peaks.end(),
              [](const Peak &a, const Peak &b) { return a.r != b.r ? a.r < b.r : a.s < b.s; });
    return map;
}

struct ClassifyParams {
    double band_coeff = 1.5;  // band half-width: coeff * sqrt(|t|)
    double link_coeff = 3.0;  // chain linking distance: coeff * sqrt(|t|) / n
};

namespace detail {

/// Renumbers groups deterministically and records the decomposition
/// consistency: exactly mn multi-peak groups of n members plus N singles.
inline void finish_classification(PeakMap &map) {
    long n = map.spec.n;
    // collect multi groups by their current labels; lineage kinds are kept
    // even when a group is missing members (consistency records the defect)
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t k = 0; k < map.peaks.size(); ++k)
        if (map.peaks[k].kind == PeakKind::Multi && map.peaks[k].group >= 0)
            groups[map.peaks[k].group].push_back(k);

    // deterministic numbering: groups ordered by their centroid
    std::vector<std::pair<Point2, int>> order;
    for (const auto &[label, members] : groups) {
        Point2 c{0, 0};
        for (std::size_t k : members) {
            c.r += map.peaks[k].r;
            c.s += map.peaks[k].s;
        }
        c.r /= static_cast<double>(members.size());
        c.s /= static_cast<double>(members.size());
        order.emplace_back(c, label);
    }
    std::sort(order.begin(), order.end(), [](const auto &a, const auto &b) {
        return a.first.r != b.first.r ? a.first.r < b.first.r : a.first.s < b.first.s;
    });
    int next = 0;
    std::map<int, int> renum;
    for (const auto &[c, label] : order) renum[label] = ++next;
    for (Peak &p : map.peaks)
        if (p.kind == PeakKind::Multi) p.group = renum[p.group];
    for (Peak &p : map.peaks)
        if (p.kind != PeakKind::Multi) {
            p.kind = PeakKind::Single;
            p.group = ++next;
        }

    long multi_groups = static_cast<long>(groups.size());
    bool groups_full = true;
    for (const auto &[label, members] : groups)
        if (static_cast<long>(members.size()) != n) groups_full = false;
    long singles = 0;
    for (const Peak &p : map.peaks)
        if (p.kind == PeakKind::Single) ++singles;
    map.classified = true;
    map.classification_consistent = groups_full && (multi_groups == map.spec.mn) &&
                                    (singles == map.spec.N) &&
                                    (static_cast<long>(map.peaks.size()) == map.spec.M);
}

}  // namespace detail

/// Geometric grouping: peaks near the dominant axis (r-axis for t > 0,
/// s-axis for t < 0) are chained by proximity; chains of exactly n become
/// multi-peak groups. Used when the lineage route is unavailable.
inline void classify_groups_geometric(PeakMap &map, const ClassifyParams &params = {}) {
    long n = map.spec.n;
    double root = std::sqrt(std::abs(map.t));
    double band = params.band_coeff * root;
    double link = params.link_coeff * root / static_cast<double>(n);
    bool along_r = map.t >= 0;

    std::vector<std::size_t> in_band;
    for (std::size_t k = 0; k < map.peaks.size(); ++k) {
        double off = along_r ? map.peaks[k].s : map.peaks[k].r;
        if (std::abs(off) <= band) in_band.push_back(k);
        map.peaks[k].kind = PeakKind::Single;
        map.peaks[k].group = -1;
    }
    std::sort(in_band.begin(), in_band.end(), [&](std::size_t a, std::size_t b) {
        double xa = along_r ? map.peaks[a].r : map.peaks[a].s;
        double xb = along_r ? map.peaks[b].r : map.peaks[b].s;
        return xa < xb;
    });

    std::vector<std::vector<std::size_t>> chains;
    for (std::size_t k : in_band) {
        if (!chains.empty()) {
            std::size_t last = chains.back().back();
            double d = std::hypot(map.peaks[k].r - map.peaks[last].r, map.peaks[k].s - map.peaks[last].s);
            if (d <= link) {
                chains.back().push_back(k);
                continue;
            }
        }
        chains.push_back({k});
    }
    int label = 0;
    for (const auto &chain : chains) {
        if (static_cast<long>(chain.size()) != n || n < 2) continue;
        ++label;
        for (std::size_t k : chain) {
            map.peaks[k].kind = PeakKind::Multi;
            map.peaks[k].group = label;
        }
    }
    detail::finish_classification(map);
}

/// Assigns kinds and group ids. Predicted maps already carry their group
/// lineage from the continuation; detected maps inherit kinds from the
/// predicted skeleton by optimal position matching. The geometric chain rule
/// is the fallback when prediction is unavailable.
inline void classify_groups(PeakMap &map, const ClassifyParams &params = {}) {
    if (map.peaks.empty()) {
        detail::finish_classification(map);
        return;
    }
    bool has_lineage = false;
    for (const Peak &p : map.peaks)
        if (p.kind != PeakKind::Unclassified) has_lineage = true;

    if (!has_lineage) {
        if (map.t == 0) {
            classify_groups_geometric(map, params);
            return;
        }
        try {
            PeakMap predicted = predict_peaks(map.spec, Rational(map.t));
            std::vector<Point2> a, b;
            for (const Peak &p : map.peaks) a.push_back({p.r, p.s});
            for (const Peak &p : predicted.peaks) b.push_back({p.r, p.s});
            for (const MatchedPair &m : match_points(a, b)) {
                map.peaks[m.from].kind = predicted.peaks[m.to].kind;
                map.peaks[m.from].group = predicted.peaks[m.to].group;
            }
        } catch (const std::exception &) {
            classify_groups_geometric(map, params);
            return;
        }
    }
    detail::finish_classification(map);
}

struct PatternParams {
    double mirror_tol_frac = 0.05;   // Hausdorff / diameter
    double lattice_rms_frac = 0.05;  // RMS residual / nearest-neighbour spacing
};

struct PatternCheck {
    std::string name;
    bool pass = false;
    double metric = 0;
    std::string note;
};

struct PatternReport {
    std::vector<long> partition;
    double t = 0;
    std::vector<PatternCheck> checks;
};

namespace detail {

inline std::vector<Point2> single_points(const PeakMap &map) {
    std::vector<Point2> pts;
    for (const Peak &p : map.singles()) pts.push_back({p.r, p.s});
    return pts;
}

/// Splits sorted values into k clusters at the k-1 largest gaps; returns the
/// cluster index per input position, or nullopt if k exceeds the count.
inline std::optional<std::vector<std::size_t>> gap_cluster(const std::vector<double> &values,
                                                           std::size_t k,
                                                           std::vector<std::size_t> *sizes = nullptr) {
    std::size_t n = values.size();
    if (k == 0 || n < k) return std::nullopt;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::pair<double, std::size_t>> gaps;  // (gap, position after which to cut)
    for (std::size_t i = 0; i + 1 < n; ++i)
        gaps.emplace_back(values[order[i + 1]] - values[order[i]], i);
    std::sort(gaps.begin(), gaps.end(), [](auto &a, auto &b) { return a.first > b.first; });
    std::vector<std::size_t> cuts;
    for (std::size_t i = 0; i + 1 < k; ++i) cuts.push_back(gaps[i].second);
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::size_t> cluster(n, 0);
    std::size_t cidx = 0, cut = 0;
    if (sizes) sizes->assign(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
        while (cut < cuts.size() && i > cuts[cut]) {
            ++cidx;
            ++cut;
        }
        cluster[order[i]] = cidx;
        if (sizes) ++(*sizes)[cidx];
    }
    return cluster;
}

/// Least-squares affine lattice fit: points ~ o + i*e1 + j*e2 with known
/// integer indices. Returns RMS residual / min lattice spacing.
inline double lattice_residual(const std::vector<Point2> &pts, const std::vector<std::size_t> &gi,
                               const std::vector<std::size_t> &gj) {
    std::size_t n = pts.size();
    // normal equations for the 6 parameters (or, os, e1r, e1s, e2r, e2s)
    double a[3][3] = {{0}}, br[3] = {0}, bs[3] = {0};
    for (std::size_t k = 0; k < n; ++k) {
        double x[3] = {1.0, static_cast<double>(gi[k]), static_cast<double>(gj[k])};
        for (int p = 0; p < 3; ++p) {
            for (int q = 0; q < 3; ++q) a[p][q] += x[p] * x[q];
            br[p] += x[p] * pts[k].r;
            bs[p] += x[p] * pts[k].s;
        }
    }
    // solve the two 3x3 systems by Gaussian elimination
    auto solve3 = [&](double m[3][3], double rhs[3], double out[3]) {
        double mm[3][4];
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) mm[i][j] = m[i][j];
            mm[i][3] = rhs[i];
        }
        for (int col = 0; col < 3; ++col) {
            int piv = col;
            for (int row = col + 1; row < 3; ++row)
                if (std::abs(mm[row][col]) > std::abs(mm[piv][col])) piv = row;
            std::swap(mm[piv], mm[col]);
            if (mm[col][col] == 0) return false;
            for (int row = 0; row < 3; ++row) {
                if (row == col) continue;
                double f = mm[row][col] / mm[col][col];
                for (int j = col; j < 4; ++j) mm[row][j] -= f * mm[col][j];
            }
        }
        for (int i = 0; i < 3; ++i) out[i] = mm[i][3] / mm[i][i];
        return true;
    };
    double cr[3], cs[3];
    double acopy[3][3];
    std::copy(&a[0][0], &a[0][0] + 9, &acopy[0][0]);
    if (!solve3(a, br, cr)) return 1e9;
    if (!solve3(acopy, bs, cs)) return 1e9;

    double sq = 0;
    for (std::size_t k = 0; k < n; ++k) {
        double pr = cr[0] + cr[1] * gi[k] + cr[2] * gj[k];
        double ps = cs[0] + cs[1] * gi[k] + cs[2] * gj[k];
        sq += (pr - pts[k].r) * (pr - pts[k].r) + (ps - pts[k].s) * (ps - pts[k].s);
    }
    double rms = std::sqrt(sq / static_cast<double>(n));
    double e1 = std::hypot(cr[1], cs[1]), e2 = std::hypot(cr[2], cs[2]);
    double spacing = std::min(e1 > 0 ? e1 : 1e9, e2 > 0 ? e2 : 1e9);
    if (spacing <= 0 || spacing >= 1e9) return 1e9;
    return rms / spacing;
}

/// Fits the singles to an R x C affine lattice (either orientation);
/// returns the best residual ratio.
inline double lattice_fit_metric(const std::vector<Point2> &pts, std::size_t rows, std::size_t cols) {
    if (pts.size() != rows * cols) return 1e9;
    // principal axes of the point cloud
    double mr = 0, ms = 0;
    for (const Point2 &p : pts) {
        mr += p.r;
        ms += p.s;
    }
    mr /= pts.size();
    ms /= pts.size();
    double crr = 0, css = 0, crs = 0;
    for (const Point2 &p : pts) {
        crr += (p.r - mr) * (p.r - mr);
        css += (p.s - ms) * (p.s - ms);
        crs += (p.r - mr) * (p.s - ms);
    }
    double theta = 0.5 * std::atan2(2 * crs, crr - css);
    double c = std::cos(theta), s = std::sin(theta);

    double best = 1e9;
    for (int orient = 0; orient < 2; ++orient) {
        std::size_t ki = orient == 0 ? rows : cols;
        std::size_t kj = orient == 0 ? cols : rows;
        std::vector<double> pi(pts.size()), pj(pts.size());
        for (std::size_t k = 0; k < pts.size(); ++k) {
            double x = (pts[k].r - mr) * c + (pts[k].s - ms) * s;
            double y = -(pts[k].r - mr) * s + (pts[k].s - ms) * c;
            pi[k] = orient == 0 ? y : x;
            pj[k] = orient == 0 ? x : y;
        }
        std::vector<std::size_t> sizes_i, sizes_j;
        auto gi = gap_cluster(pi, ki, &sizes_i);
        auto gj = gap_cluster(pj, kj, &sizes_j);
        if (!gi || !gj) continue;
        bool ok = std::all_of(sizes_i.begin(), sizes_i.end(), [&](std::size_t v) { return v == kj; }) &&
                  std::all_of(sizes_j.begin(), sizes_j.end(), [&](std::size_t v) { return v == ki; });
        if (!ok) continue;
        best = std::min(best, lattice_residual(pts, *gi, *gj));
    }
    return best;
}

/// Orientation of a triangular point pattern along the axis: +1 when the
/// level counts decrease as the coordinate grows (apex on the + side), -1
/// for the reverse, 0 when the counts are not monotone.
inline int triangle_orientation(const std::vector<Point2> &pts, std::size_t levels, bool along_r) {
    std::vector<double> coord(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) coord[k] = along_r ? pts[k].r : pts[k].s;
    std::vector<std::size_t> sizes;
    auto cluster = gap_cluster(coord, levels, &sizes);
    if (!cluster) return 0;
    bool desc = true, asc = true;
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        if (sizes[i] <= sizes[i + 1]) desc = false;
        if (sizes[i] >= sizes[i + 1]) asc = false;
    }
    if (desc) return 1;
    if (asc) return -1;
    return 0;
}

inline double skewness_sign_metric(const std::vector<Point2> &pts, bool along_r) {
    double mean = 0;
    for (const Point2 &p : pts) mean += along_r ? p.r : p.s;
    mean /= pts.size();
    double third = 0;
    for (const Point2 &p : pts) {
        double d = (along_r ? p.r : p.s) - mean;
        third += d * d * d;
    }
    return third;
}

inline double mirror_metric(const std::vector<Point2> &pts, bool mirror_r) {
    std::vector<Point2> reflected;
    for (const Point2 &p : pts) reflected.push_back(mirror_r ? Point2{-p.r, p.s} : Point2{p.r, -p.s});
    double diam = diameter(pts);
    if (diam == 0) return 1e9;
    return hausdorff(pts, reflected) / diam;
}

}  // namespace detail

/// Shape predicates driven by the special-partition classification; operates
/// on the single peaks of a classified map.
inline PatternReport pattern_checks(const PeakMap &map, const PatternParams &params = {}) {
    PatternReport report;
    report.partition = map.spec.lam.parts();
    report.t = map.t;
    std::vector<Point2> singles = detail::single_points(map);
    auto tags = classify_special(map.spec.lam);
    bool tpos = map.t > 0;

    if (singles.size() < 2) {
        report.checks.push_back({"enough_singles", false, static_cast<double>(singles.size()),
                                 "too few single peaks for pattern checks"});
        return report;
    }

    if (tags.count(SpecialShape::Rectangular)) {
        std::size_t rows = map.spec.lam.size();
        std::size_t cols = static_cast<std::size_t>(map.spec.lam.largest());
        double metric = detail::lattice_fit_metric(singles, rows, cols);
        report.checks.push_back({"rectangular_lattice", metric <= params.lattice_rms_frac, metric,
                                 std::to_string(rows) + "x" + std::to_string(cols) + " affine lattice fit"});
    }
    if (tags.count(SpecialShape::Triangular)) {
        int orient = detail::triangle_orientation(singles, map.spec.lam.size(), tpos);
        int expect = tpos ? 1 : -1;
        report.checks.push_back({"triangle_orientation", orient == expect, static_cast<double>(orient),
                                 tpos ? "expect apex toward +r" : "expect apex toward -r"});
    }
    if (tags.count(SpecialShape::Trapezoidal)) {
        double skew = detail::skewness_sign_metric(singles, tpos);
        bool pass = tpos ? skew > 0 : skew < 0;
        report.checks.push_back({"trapezoid_orientation", pass, skew, "third-moment orientation"});
    }
    if (tags.count(SpecialShape::Odd) || tags.count(SpecialShape::Even)) {
        // split axis is the s-axis for t > 0 (r-axis after the quarter turn)
        double metric = detail::mirror_metric(singles, tpos);
        report.checks.push_back({tpos ? "s_axis_mirror" : "r_axis_mirror",
                                 metric <= params.mirror_tol_frac, metric,
                                 "mirror symmetry of single peaks"});
    }
    if (tags.count(SpecialShape::Square)) {
        double metric = detail::mirror_metric(singles, !tpos);
        report.checks.push_back({tpos ? "r_axis_mirror" : "s_axis_mirror",
                                 metric <= params.mirror_tol_frac, metric,
                                 "mirror symmetry of single peaks"});
    }
    if (report.checks.empty())
        report.checks.push_back({"no_special_shape", true, 0, "no special-shape predicates apply"});
    return report;
}

/// Conclusion-(iii) metric: Hausdorff distance between the single-peak sets
/// of lambda at +T and of its conjugate at -T, over the configuration
/// diameter.
inline double conjugate_duality_metric(const PeakMap &plus, const PeakMap &minus) {
    std::vector<Point2> a = detail::single_points(plus);
    std::vector<Point2> b = detail::single_points(minus);
    double diam = std::max(diameter(a), diameter(b));
    if (diam == 0) return 1e9;
    return hausdorff(a, b) / diam;
}

}  // namespace dlwe
