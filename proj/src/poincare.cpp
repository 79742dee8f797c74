#include "ringtrio/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

namespace ringtrio {

namespace {

OdeState<4> pack(const PhasePoint& z) { return {z.x, z.y, z.px, z.py}; }

PhasePoint unpack(const OdeState<4>& y) {
    return {(double)y[0], (double)y[1], (double)y[2], (double)y[3]};
}

}  // namespace

std::vector<CrossingRecord> section_crossings(const PhasePoint& z0,
                                              int n_crossings, double t_max,
                                              const SectionSpec& spec,
                                              const OdeOptions& opt) {
    if (n_crossings <= 0) throw std::invalid_argument("section_crossings: n <= 0");
    const int ic = spec.cross_index;
    if (ic != 0 && ic != 1)
        throw std::invalid_argument("section_crossings: cross_index must be 0 or 1");
    const int ip = ic + 2;  // conjugate momentum index
    std::vector<CrossingRecord> out;
    out.reserve(n_crossings);
    Dop853<4, HamiltonianFlow> stepper{HamiltonianFlow{}, opt};
    stepper.reset(0, pack(z0));
    while ((int)out.size() < n_crossings && stepper.t() < t_max) {
        const auto span = stepper.step(t_max);
        const long double g0 = span.y0[ic] - spec.level;
        const long double g1 = span.y1[ic] - spec.level;
        if (g0 == 0 || !((g0 > 0) != (g1 > 0) || g1 == 0)) continue;
        const auto [tc, yc] = locate_crossing<4, HamiltonianFlow>(
            HamiltonianFlow{}, opt, span, ic, spec.level, 1e-11);
        if (yc[ip] > 0) out.push_back({(double)tc, unpack(yc)});
    }
    return out;
}

std::vector<std::array<double, 2>> section_boundary(double eps, int n_points) {
    if (n_points < 8) throw std::invalid_argument("section_boundary: too few points");
    // turning points of the x = 0 line: v(0, y) = eps
    auto vline = [](double y) { return potential(0, y); };
    auto bisect = [&](double lo, double hi) {
        for (int it = 0; it < 200; ++it) {
            const double mid = (lo + hi) / 2;
            ((vline(mid) < eps) ? lo : hi) = mid;
        }
        return (lo + hi) / 2;
    };
    const double y_lo = bisect(0.0, kTriangleYMin + 2e-6);
    const double y_hi = bisect(0.0, kTriangleYMax - 2e-6);
    std::vector<std::array<double, 2>> curve;
    curve.reserve(n_points + 1);
    const int half = n_points / 2;
    for (int k = 0; k <= half; ++k) {
        // cosine-spaced sweep resolves the turning regions
        const double u = 0.5 - 0.5 * std::cos(M_PI * k / half);
        const double y = y_lo + (y_hi - y_lo) * u;
        const double rest = std::max(0.0, eps - vline(y));
        curve.push_back({y, 2 * std::sqrt(rest)});
    }
    for (int k = half; k >= 0; --k)
        curve.push_back({curve[k][0], -curve[k][1]});
    return curve;
}

double box_counting_dimension(const std::vector<SectionPoint>& pts) {
    if (pts.size() < 32) throw std::invalid_argument("box_counting_dimension: too few points");
    double ylo = pts[0].y, yhi = ylo, plo = pts[0].py, phi = plo;
    for (const auto& p : pts) {
        ylo = std::min(ylo, p.y);
        yhi = std::max(yhi, p.y);
        plo = std::min(plo, p.py);
        phi = std::max(phi, p.py);
    }
    const double sy = std::max(yhi - ylo, 1e-12);
    const double sp = std::max(phi - plo, 1e-12);
    // occupied box counts at dyadic resolutions, skipping levels where the
    // point count itself limits the occupancy
    std::vector<double> lx, ln;
    for (int k = 2; k <= 7; ++k) {
        const int n = 1 << k;
        std::set<int> boxes;
        for (const auto& p : pts) {
            const int iy = std::min(n - 1, (int)((p.y - ylo) / sy * n));
            const int ip = std::min(n - 1, (int)((p.py - plo) / sp * n));
            boxes.insert(iy * n + ip);
        }
        if ((double)boxes.size() > 0.35 * (double)pts.size()) break;
        lx.push_back(k * std::log(2.0));
        ln.push_back(std::log((double)boxes.size()));
    }
    if (lx.size() < 2) return 2.0;  // saturated immediately: treat as area-filling
    // least-squares slope
    double mx = 0, mn = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        mn += ln[i];
    }
    mx /= lx.size();
    mn /= lx.size();
    double num = 0, den = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        num += (lx[i] - mx) * (ln[i] - mn);
        den += (lx[i] - mx) * (lx[i] - mx);
    }
    return num / den;
}

OrbitClassification classify_points(const std::vector<SectionPoint>& pts,
                                    double lambda, const ClassifyOptions& copt) {
    if (pts.size() < 500)
        throw std::invalid_argument("classify_points: need at least 500 crossings");
    OrbitClassification c;
    c.lambda = lambda;
    c.t_char = (pts.back().t - pts.front().t) / (double)(pts.size() - 1);
    c.box_dimension = box_counting_dimension(pts);
    c.lambda_regular = lambda * c.t_char < copt.lambda_threshold;
    c.boxdim_regular = c.box_dimension < copt.boxdim_split;
    // the finite-sample box dimension is a lower bound on the true dimension:
    // a curve-like cloud cannot veto a clear Lyapunov chaos signal (young
    // chaotic orbits trace thin unstable-manifold filaments), but an
    // area-filling cloud does contradict a regular Lyapunov verdict
    if (!c.lambda_regular)
        c.kind = OrbitClass::Chaotic;
    else
        c.kind = c.boxdim_regular ? OrbitClass::Regular : OrbitClass::Indeterminate;
    return c;
}

OrbitClassification classify_orbit(const PhasePoint& z0,
                                   const ClassifyOptions& copt) {
    // orbits confined to the section plane itself (the x = 0 libration) never
    // cross transversally; vote with the Lyapunov exponent alone, taking the
    // characteristic time from the in-plane oscillation
    if (std::abs(z0.x) < 1e-12 && std::abs(z0.px) < 1e-12) {
        SectionSpec yspec;
        yspec.cross_index = 1;
        const auto recs = section_crossings(z0, 8, 200.0, yspec, copt.ode);
        if (recs.size() >= 2) {
            OrbitClassification c;
            c.lambda = lyapunov_exponent(z0, copt.t_lyapunov, 10.0, copt.ode);
            c.t_char = (recs.back().t - recs.front().t) / (double)(recs.size() - 1);
            c.box_dimension = 0;  // the trace is at most a curve segment
            c.lambda_regular = c.lambda * c.t_char < copt.lambda_threshold;
            c.boxdim_regular = true;
            c.kind = c.lambda_regular ? OrbitClass::Regular : OrbitClass::Indeterminate;
            return c;
        }
    }
    const auto recs =
        section_crossings(z0, copt.n_crossings, copt.t_max, SectionSpec{}, copt.ode);
    if ((int)recs.size() < copt.n_crossings)
        throw std::runtime_error("classify_orbit: time budget exhausted before enough crossings");
    std::vector<SectionPoint> pts;
    pts.reserve(recs.size());
    for (const auto& r : recs) pts.push_back({r.z.y, r.z.py, r.t, 0});
    const double lambda = lyapunov_exponent(z0, copt.t_lyapunov, 10.0, copt.ode);
    return classify_points(pts, lambda, copt);
}

SectionDataset section(const PhasePoint& z0, double eps, int n_crossings,
                       const ClassifyOptions& copt) {
    if (std::abs(energy(z0) - eps) > 1e-8)
        throw std::invalid_argument("section: start does not lie on the energy surface");
    SectionDataset ds;
    ds.energy = eps;
    ds.boundary = section_boundary(eps, 256);
    const auto recs = section_crossings(z0, n_crossings, copt.t_max, SectionSpec{}, copt.ode);
    for (const auto& r : recs) ds.points.push_back({r.z.y, r.z.py, r.t, 0});
    if ((int)ds.points.size() >= 500) {
        const double lambda = lyapunov_exponent(z0, copt.t_lyapunov, 10.0, copt.ode);
        ds.orbit_class.push_back(classify_points(ds.points, lambda, copt));
    }
    return ds;
}

namespace {

// y-extent of the allowed x = 0 section region at energy eps
std::pair<double, double> section_y_range(double eps) {
    auto vline = [](double y) { return potential(0, y); };
    auto bisect = [&](double lo, double hi) {
        for (int it = 0; it < 200; ++it) {
            const double mid = (lo + hi) / 2;
            ((vline(mid) < eps) ? lo : hi) = mid;
        }
        return (lo + hi) / 2;
    };
    return {bisect(0.0, kTriangleYMin + 2e-6), bisect(0.0, kTriangleYMax - 2e-6)};
}

}  // namespace

RegularFractionResult regular_fraction(double eps, int n_samples,
                                       std::uint64_t seed,
                                       const ClassifyOptions& copt) {
    if (n_samples < 100)
        throw std::invalid_argument("regular_fraction: need at least 100 samples");
    const auto [y_lo, y_hi] = section_y_range(eps);
    const double p_max = 2 * std::sqrt(eps);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uy(y_lo, y_hi), up(-p_max, p_max);

    RegularFractionResult res;
    double w_reg = 0, w_all = 0;
    for (int k = 0; k < n_samples; ++k) {
        double y, py, rest;
        do {
            y = uy(rng);
            py = up(rng);
            rest = eps - potential(0, y) - py * py / 4;
        } while (rest <= 1e-12);
        const PhasePoint z0{0.0, y, 2 * std::sqrt(rest), py};
        OrbitClassification c;
        try {
            c = classify_orbit(z0, copt);
        } catch (const std::exception&) {
            c.kind = OrbitClass::Indeterminate;
            c.t_char = 0;
        }
        ++res.n_total;
        if (c.kind == OrbitClass::Regular)
            ++res.n_regular;
        else if (c.kind == OrbitClass::Chaotic)
            ++res.n_chaotic;
        else
            ++res.n_indeterminate;
        if (c.t_char > 0) {
            w_all += c.t_char;
            if (c.kind == OrbitClass::Regular) w_reg += c.t_char;
        }
    }
    res.rho1 = (double)res.n_regular / res.n_total;
    res.rho1_liouville = w_all > 0 ? w_reg / w_all : 0;
    // normal-approximation binomial interval (95%)
    const double se = std::sqrt(res.rho1 * (1 - res.rho1) / res.n_total);
    res.ci_low = std::max(0.0, res.rho1 - 1.96 * se);
    res.ci_high = std::min(1.0, res.rho1 + 1.96 * se);
    return res;
}

double chaotic_overlap(const std::vector<SectionPoint>& a,
                       const std::vector<SectionPoint>& b, int grid) {
    if (a.empty() || b.empty()) throw std::invalid_argument("chaotic_overlap: empty cloud");
    double ylo = a[0].y, yhi = ylo, plo = a[0].py, phi = plo;
    for (const auto* cloud : {&a, &b})
        for (const auto& p : *cloud) {
            ylo = std::min(ylo, p.y);
            yhi = std::max(yhi, p.y);
            plo = std::min(plo, p.py);
            phi = std::max(phi, p.py);
        }
    const double sy = std::max(yhi - ylo, 1e-12), sp = std::max(phi - plo, 1e-12);
    auto boxes = [&](const std::vector<SectionPoint>& pts) {
        std::set<int> s;
        for (const auto& p : pts) {
            const int iy = std::min(grid - 1, (int)((p.y - ylo) / sy * grid));
            const int ip = std::min(grid - 1, (int)((p.py - plo) / sp * grid));
            s.insert(iy * grid + ip);
        }
        return s;
    };
    const std::set<int> ba = boxes(a), bb = boxes(b);
    const std::set<int>& small = ba.size() <= bb.size() ? ba : bb;
    const std::set<int>& big = ba.size() <= bb.size() ? bb : ba;
    int hit = 0;
    for (int id : small) hit += big.count(id);
    return (double)hit / (double)small.size();
}

}  // namespace ringtrio
