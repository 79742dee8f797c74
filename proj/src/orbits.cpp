#include "ringtrio/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "ringtrio/potential_core.hpp"

namespace ringtrio {

namespace {

constexpr double kPi = std::numbers::pi;

OdeState<4> pack(const PhasePoint& z) { return {z.x, z.y, z.px, z.py}; }

PhasePoint unpack4(const OdeState<4>& y) {
    return {(double)y[0], (double)y[1], (double)y[2], (double)y[3]};
}

double bisect_v_line(double eps, double from, double to) {
    // v(0, y) increases monotonically from the origin toward either wall
    double lo = from, hi = to;
    for (int it = 0; it < 200; ++it) {
        const double mid = (lo + hi) / 2;
        ((potential(0, mid) < eps) ? lo : hi) = mid;
    }
    return (lo + hi) / 2;
}

// Geometry of the section plane used for shooting: the crossing coordinate,
// the two in-plane coordinates (position, momentum), and the out-of-plane
// momentum fixed by the energy.
struct SectionFrame {
    SectionSpec spec;  // cross_index: 0 = x-plane, 1 = y-plane
    int iq() const { return 1 - spec.cross_index; }       // in-plane position
    int ipq() const { return iq() + 2; }                  // in-plane momentum
    int ip() const { return spec.cross_index + 2; }       // out-of-plane momentum
};

std::optional<PhasePoint> embed(const SectionFrame& fr, double q, double pq,
                                double eps) {
    OdeState<4> z{};
    z[fr.spec.cross_index] = fr.spec.level;
    z[fr.iq()] = q;
    z[fr.ipq()] = pq;
    if (!in_domain((double)z[0], (double)z[1])) return std::nullopt;
    const double rest = eps - potential((double)z[0], (double)z[1]) - pq * pq / 4;
    if (rest <= 0) return std::nullopt;
    z[fr.ip()] = 2 * std::sqrt(rest);
    return unpack4(z);
}

// derivative of the embedding w.r.t. (q, pq) at fixed energy
Eigen::Matrix<double, 4, 2> embed_jacobian(const SectionFrame& fr,
                                           const PhasePoint& z) {
    const Vec2 g = grad_potential(z.x, z.y);
    Eigen::Matrix<double, 4, 2> E = Eigen::Matrix<double, 4, 2>::Zero();
    const double pm = pack(z)[fr.ip()];
    const double pq = pack(z)[fr.ipq()];
    E(fr.iq(), 0) = 1;
    E(fr.ip(), 0) = -2 * g[fr.iq()] / pm;
    E(fr.ipq(), 1) = 1;
    E(fr.ip(), 1) = -pq / pm;  // p_out^2 = 4(eps - v) - p_in^2
    return E;
}

struct ReturnMapResult {
    Vec2 u;                   // section coordinates after n returns
    double t = 0;             // return time
    PhasePoint z_end;         // polished crossing state
    Eigen::Matrix2d DR;       // d(return)/du, only when computed variationally
    Mat4 M = Mat4::Identity();  // tangent map at the crossing
};

// Plain return map (no tangent): n-th crossing of the section with positive
// out-of-plane momentum.
std::optional<ReturnMapResult> return_map_plain(const SectionFrame& fr, Vec2 u,
                                                double eps, int n_return,
                                                const OdeOptions& opt,
                                                double t_budget = 500.0) {
    const auto z0 = embed(fr, u[0], u[1], eps);
    if (!z0) return std::nullopt;
    const int ic = fr.spec.cross_index, ip = fr.ip();
    Dop853<4, HamiltonianFlow> stepper{HamiltonianFlow{}, opt};
    stepper.reset(0, pack(*z0));
    int hits = 0;
    while (stepper.t() < t_budget) {
        const auto span = stepper.step(t_budget);
        const long double g0 = span.y0[ic] - fr.spec.level;
        const long double g1 = span.y1[ic] - fr.spec.level;
        if (g0 == 0 || !((g0 > 0) != (g1 > 0) || g1 == 0)) continue;
        const auto [tc, yc] = locate_crossing<4, HamiltonianFlow>(
            HamiltonianFlow{}, opt, span, ic, fr.spec.level, 1e-11);
        if (yc[ip] <= 0) continue;
        if (++hits == n_return) {
            ReturnMapResult r;
            r.u = Vec2((double)yc[fr.iq()], (double)yc[fr.ipq()]);
            r.t = (double)tc;
            r.z_end = unpack4(yc);
            return r;
        }
    }
    return std::nullopt;
}

// Variational return map: also transports the tangent block and projects it
// onto the section (removing the flow direction via the crossing-time shift).
std::optional<ReturnMapResult> return_map_var(const SectionFrame& fr, Vec2 u,
                                              double eps, int n_return,
                                              const OdeOptions& opt,
                                              double t_budget = 500.0) {
    const auto z0 = embed(fr, u[0], u[1], eps);
    if (!z0) return std::nullopt;
    const int ic = fr.spec.cross_index, ip = fr.ip();
    OdeState<20> w{};
    const auto z0p = pack(*z0);
    for (int i = 0; i < 4; ++i) w[i] = z0p[i];
    for (int j = 0; j < 4; ++j) w[4 + 5 * j] = 1;
    Dop853<20, VariationalFlow> stepper{VariationalFlow{}, opt};
    stepper.reset(0, w);
    int hits = 0;
    while (stepper.t() < t_budget) {
        const auto span = stepper.step(t_budget);
        const long double g0 = span.y0[ic] - fr.spec.level;
        const long double g1 = span.y1[ic] - fr.spec.level;
        if (g0 == 0 || !((g0 > 0) != (g1 > 0) || g1 == 0)) continue;
        const auto [tc, yc] = locate_crossing<20, VariationalFlow>(
            VariationalFlow{}, opt, span, ic, fr.spec.level, 1e-11);
        if (yc[ip] <= 0) continue;
        if (++hits < n_return) continue;

        ReturnMapResult r;
        r.t = (double)tc;
        OdeState<4> z1;
        for (int i = 0; i < 4; ++i) z1[i] = yc[i];
        r.z_end = unpack4(z1);
        r.u = Vec2((double)yc[fr.iq()], (double)yc[fr.ipq()]);
        for (int j = 0; j < 4; ++j)
            for (int i = 0; i < 4; ++i) r.M(i, j) = (double)yc[4 + 4 * j + i];
        // crossing-time correction: delta t = -(e_ic . M du)/zdot_ic
        OdeState<4> dz;
        HamiltonianFlow{}(0, z1, dz);
        Eigen::Vector4d f;
        for (int i = 0; i < 4; ++i) f[i] = (double)dz[i];
        const Mat4 proj = Mat4::Identity() -
                          f * Eigen::RowVector4d::Unit(ic) / f[ic];
        const Eigen::Matrix<double, 4, 2> E = embed_jacobian(fr, *z0);
        const Mat4 corrected = proj * r.M;
        Eigen::Matrix<double, 2, 4> P = Eigen::Matrix<double, 2, 4>::Zero();
        P(0, fr.iq()) = 1;
        P(1, fr.ipq()) = 1;
        r.DR = P * corrected * E;
        return r;
    }
    return std::nullopt;
}

SectionFrame frame_for(Family hint) {
    SectionFrame fr;
    fr.spec.cross_index = (hint == Family::A0) ? 1 : 0;
    return fr;
}

}  // namespace

std::string family_name(Family f) {
    switch (f) {
        case Family::A0: return "A0";
        case Family::A1: return "A1";
        case Family::A2: return "A2";
        case Family::B1: return "B1";
        case Family::B2: return "B2";
        case Family::B3: return "B3";
        case Family::Cp: return "C+";
        case Family::Cm: return "C-";
        case Family::Unknown: return "?";
    }
    return "?";
}

double period_A_quadrature(double eps, int n_nodes) {
    if (!(eps > 0)) throw std::invalid_argument("period_A_quadrature: eps <= 0");
    const double y_lo = bisect_v_line(eps, 0.0, kTriangleYMin + 2e-6);
    const double y_hi = bisect_v_line(eps, 0.0, kTriangleYMax - 2e-6);
    const double c = (y_hi + y_lo) / 2, r = (y_hi - y_lo) / 2;
    // T = 2 int dy / sqrt(eps - v);  y = c + r cos(theta) turns the endpoint
    // square roots into a smooth Chebyshev sum
    double sum = 0;
    for (int k = 1; k <= n_nodes; ++k) {
        const double theta = kPi * (2 * k - 1) / (2 * n_nodes);
        const double su = std::sin(theta);
        const double y = c + r * std::cos(theta);
        sum += r * su / std::sqrt(eps - potential(0, y));
    }
    return 2 * kPi / n_nodes * sum;
}

Family detect_family(const Trajectory& path) {
    const auto& s = path.samples;
    if (s.size() < 16) return Family::Unknown;
    double rmax = 0, rmin = 1e300;
    for (const auto& p : s) {
        const double r = std::hypot(p.z.x, p.z.y);
        rmax = std::max(rmax, r);
        rmin = std::min(rmin, r);
    }
    if (rmax <= 0) return Family::Unknown;
    if (rmin < 0.05 * rmax) {
        // median libration: principal axis angle picks the member
        double sxx = 0, syy = 0, sxy = 0;
        for (const auto& p : s) {
            sxx += p.z.x * p.z.x;
            syy += p.z.y * p.z.y;
            sxy += p.z.x * p.z.y;
        }
        double theta = 0.5 * std::atan2(2 * sxy, sxx - syy) * 180 / kPi;
        if (theta < -75) theta += 180;  // fold to (-75, 105]
        if (std::abs(theta - 90) < 15) return Family::A0;
        if (std::abs(theta - 30) < 15) return Family::A1;
        if (std::abs(theta + 30) < 15 || std::abs(theta - 150) < 15) return Family::A2;
        return Family::Unknown;
    }
    // winding number around the origin
    double w = 0;
    double prev = std::atan2(s[0].z.y, s[0].z.x);
    for (std::size_t i = 1; i < s.size(); ++i) {
        const double a = std::atan2(s[i].z.y, s[i].z.x);
        double d = a - prev;
        while (d > kPi) d -= 2 * kPi;
        while (d < -kPi) d += 2 * kPi;
        w += d;
        prev = a;
    }
    w /= 2 * kPi;
    if (std::abs(w - 1) < 0.25) return Family::Cp;
    if (std::abs(w + 1) < 0.25) return Family::Cm;
    // arc (family B): label by the mirror axis that maps the path onto itself
    const Mat2 mirrors[3] = {symmetry_op(SymKind::S).matrix,
                             symmetry_op(SymKind::SRinv).matrix,
                             symmetry_op(SymKind::SR).matrix};
    // axis angles: S fixes the y-axis (90 deg); S*Rinv fixes 30 deg; S*R 150
    double best = 1e300;
    int best_i = 0;
    const std::size_t stride = std::max<std::size_t>(1, s.size() / 64);
    for (int m = 0; m < 3; ++m) {
        double asym = 0;
        for (std::size_t i = 0; i < s.size(); i += stride) {
            const Vec2 q = mirrors[m] * Vec2(s[i].z.x, s[i].z.y);
            double dmin = 1e300;
            for (std::size_t j = 0; j < s.size(); j += stride)
                dmin = std::min(dmin, (q - Vec2(s[j].z.x, s[j].z.y)).squaredNorm());
            asym += dmin;
        }
        if (asym < best) {
            best = asym;
            best_i = m;
        }
    }
    return best_i == 0 ? Family::B1 : (best_i == 1 ? Family::B2 : Family::B3);
}

namespace {

PeriodicOrbit build_orbit(const SectionFrame& fr, Vec2 u, double eps,
                          const ReturnMapResult& rm, const ShootOptions& opt) {
    PeriodicOrbit orb;
    orb.energy = eps;
    orb.period = rm.t;
    orb.section = fr.spec;
    orb.start = *embed(fr, u[0], u[1], eps);
    orb.monodromy = rm.M;
    orb.transverse = rm.DR;
    orb.trace = rm.DR.trace();
    orb.stable = std::abs(orb.trace) <= 2;
    if (orb.stable) {
        orb.lyapunov = 0;
    } else {
        const double a = std::abs(orb.trace);
        orb.lyapunov = std::log((a + std::sqrt(a * a - 4)) / 2) / orb.period;
    }
    const auto z0 = pack(orb.start);
    const auto z1 = pack(rm.z_end);
    double r2 = 0;
    for (int i = 0; i < 4; ++i) r2 += (double)((z1[i] - z0[i]) * (z1[i] - z0[i]));
    orb.residual = std::sqrt(r2);
    orb.path = integrate(orb.start, orb.period, orb.period / opt.n_path_samples,
                         opt.ode);
    orb.family = detect_family(orb.path);
    return orb;
}

}  // namespace

PeriodicOrbit find_periodic(const PhasePoint& guess, double eps, Family hint,
                            const ShootOptions& opt) {
    const SectionFrame fr = frame_for(hint);
    if (!in_domain(guess.x, guess.y))
        throw std::invalid_argument("find_periodic: guess outside the domain");
    // project the guess onto the energy surface by rescaling its momentum
    const double vg = potential(guess.x, guess.y);
    if (vg >= eps)
        throw std::invalid_argument("find_periodic: guess outside the energy shell");
    const double p2 = guess.px * guess.px + guess.py * guess.py;
    if (p2 <= 0)
        throw std::invalid_argument("find_periodic: guess momentum vanishes");
    const double scale = std::sqrt(4 * (eps - vg) / p2);
    PhasePoint z{guess.x, guess.y, guess.px * scale, guess.py * scale};

    // bring the guess onto the section (first crossing with positive momentum)
    const auto zp = pack(z);
    Vec2 u;
    if (std::abs((double)zp[fr.spec.cross_index] - fr.spec.level) < 1e-12 &&
        (double)zp[fr.ip()] > 0) {
        u = Vec2((double)zp[fr.iq()], (double)zp[fr.ipq()]);
    } else {
        const auto recs = section_crossings(z, 1, 500.0, fr.spec, opt.ode);
        if (recs.empty())
            throw std::runtime_error("find_periodic: guess never crosses the section");
        const auto zc = pack(recs[0].z);
        u = Vec2((double)zc[fr.iq()], (double)zc[fr.ipq()]);
    }

    double fnorm = 1e300;
    for (int it = 0; it < opt.max_iterations; ++it) {
        const auto rm = return_map_var(fr, u, eps, opt.n_return, opt.ode);
        if (!rm)
            throw std::runtime_error("find_periodic: return map left the section");
        const Vec2 F = rm->u - u;
        fnorm = F.lpNorm<Eigen::Infinity>();
        if (fnorm <= opt.tol) return build_orbit(fr, u, eps, *rm, opt);
        const Eigen::Matrix2d J = rm->DR - Eigen::Matrix2d::Identity();
        if (std::abs(J.determinant()) < 1e-14)
            throw std::runtime_error("find_periodic: singular return-map jacobian");
        Vec2 du = -J.partialPivLu().solve(F);
        // keep the step inside the energy shell
        for (int half = 0; half < 12 && !embed(fr, u[0] + du[0], u[1] + du[1], eps);
             ++half)
            du /= 2;
        if (!embed(fr, u[0] + du[0], u[1] + du[1], eps))
            throw std::runtime_error("find_periodic: step left the energy shell");
        u += du;
    }
    throw std::runtime_error("find_periodic: no convergence after " +
                             std::to_string(opt.max_iterations) + " iterations");
}

PeriodicOrbit orbit_A_quadrature(double eps, const ShootOptions& opt) {
    // the orbit runs along x = 0; build the record directly and attach the
    // tangent information from one variational period
    const SectionFrame fr = frame_for(Family::A0);
    const Vec2 u(0.0, 0.0);
    auto rm = return_map_var(fr, u, eps, opt.n_return, opt.ode);
    if (!rm) throw std::runtime_error("orbit_A_quadrature: no section return");
    PeriodicOrbit orb = build_orbit(fr, u, eps, *rm, opt);
    orb.family = Family::A0;
    orb.period = period_A_quadrature(eps);
    return orb;
}

StabilityInfo stability(const PeriodicOrbit& orbit) {
    StabilityInfo s;
    s.trace = orbit.transverse.trace();
    s.stable = std::abs(s.trace) <= 2;
    if (s.stable) {
        s.lyapunov = 0;
    } else {
        const double a = std::abs(s.trace);
        s.lyapunov = std::log((a + std::sqrt(a * a - 4)) / 2) / orbit.period;
    }
    return s;
}

std::vector<PeriodicOrbit> continue_family(const PeriodicOrbit& seed,
                                           double eps_min, double eps_max,
                                           int steps, const ShootOptions& opt) {
    if (!(eps_min < eps_max) || steps < 2)
        throw std::invalid_argument("continue_family: bad range");
    const SectionFrame fr{seed.section};
    const auto sp = pack(seed.start);
    const Eigen::Vector3d w_seed((double)sp[fr.iq()], (double)sp[fr.ipq()],
                                 seed.energy);

    // fixed-energy Newton used to land exactly on the requested grid
    auto solve_at = [&](Vec2 u, double eps) -> std::optional<Vec2> {
        for (int it = 0; it < opt.max_iterations; ++it) {
            const auto rm = return_map_var(fr, u, eps, opt.n_return, opt.ode);
            if (!rm) return std::nullopt;
            const Vec2 F = rm->u - u;
            if (F.lpNorm<Eigen::Infinity>() <= opt.tol) return u;
            const Eigen::Matrix2d J = rm->DR - Eigen::Matrix2d::Identity();
            if (std::abs(J.determinant()) < 1e-14) return std::nullopt;
            Vec2 du = -J.partialPivLu().solve(F);
            for (int half = 0; half < 12 && !embed(fr, u[0] + du[0], u[1] + du[1], eps);
                 ++half)
                du /= 2;
            u += du;
        }
        return std::nullopt;
    };

    // pseudo-arclength corrector around the predictor, tangent tau; rejects
    // solutions that jump away from the predictor (branch hopping)
    auto correct = [&](Eigen::Vector3d w, const Eigen::Vector3d& tau,
                       const Eigen::Vector3d& w_pred,
                       double ds) -> std::optional<Eigen::Vector3d> {
        for (int it = 0; it < opt.max_iterations; ++it) {
            const auto rm = return_map_var(fr, w.head<2>(), w[2], opt.n_return, opt.ode);
            if (!rm) return std::nullopt;
            const Vec2 F = rm->u - w.head<2>();
            const double g = tau.dot(w - w_pred);
            if (F.lpNorm<Eigen::Infinity>() <= opt.tol && std::abs(g) <= 1e-10) {
                if ((w - w_pred).norm() > 2 * ds) return std::nullopt;
                return w;
            }
            const double de = 1e-6 * std::max(1.0, std::abs(w[2]));
            const auto rm2 = return_map_plain(fr, w.head<2>(), w[2] + de,
                                              opt.n_return, opt.ode);
            if (!rm2) return std::nullopt;
            Eigen::Matrix3d J;
            J.topLeftCorner<2, 2>() = rm->DR - Eigen::Matrix2d::Identity();
            J.topRightCorner<2, 1>() = (rm2->u - rm->u) / de;
            J.row(2) = tau.transpose();
            Eigen::Vector3d rhs;
            rhs << F[0], F[1], g;
            const Eigen::Vector3d dw = -J.partialPivLu().solve(rhs);
            Eigen::Vector3d trial = w + dw;
            int half = 0;
            while (half < 12 && !embed(fr, trial[0], trial[1], trial[2])) {
                trial = w + (trial - w) / 2;
                ++half;
            }
            w = trial;
        }
        return std::nullopt;
    };

    std::vector<double> targets(steps);
    for (int k = 0; k < steps; ++k)
        targets[k] = eps_min + (eps_max - eps_min) * k / (steps - 1);

    std::vector<PeriodicOrbit> out;
    auto emit_at = [&](double eps, Vec2 u_near) {
        const auto u = solve_at(u_near, eps);
        if (!u) throw std::runtime_error("continue_family: grid solve failed");
        const auto rm = return_map_var(fr, *u, eps, opt.n_return, opt.ode);
        out.push_back(build_orbit(fr, *u, eps, *rm, opt));
    };

    // sweep in both directions from the seed energy
    for (const int dir : {+1, -1}) {
        std::vector<double> goal;
        for (double e : targets)
            if ((dir > 0 && e >= seed.energy - 1e-12) ||
                (dir < 0 && e < seed.energy - 1e-12))
                goal.push_back(e);
        if (dir > 0)
            std::sort(goal.begin(), goal.end());
        else
            std::sort(goal.rbegin(), goal.rend());
        if (goal.empty()) continue;

        Eigen::Vector3d w_prev = w_seed;
        std::optional<Eigen::Vector3d> tau;  // secant tangent, set after step 1
        double ds = std::min((eps_max - eps_min) / (2.0 * steps),
                             0.05 * (1 + std::abs(seed.energy)));
        const double ds_max = (eps_max - eps_min) / 4;
        std::size_t gi = 0;
        while (gi < goal.size()) {
            std::optional<Eigen::Vector3d> w_new;
            if (!tau) {
                // first step: natural continuation over a small energy change
                const auto u1 = solve_at(w_prev.head<2>(), w_prev[2] + dir * ds);
                if (u1)
                    w_new = Eigen::Vector3d((*u1)[0], (*u1)[1], w_prev[2] + dir * ds);
            } else {
                const Eigen::Vector3d w_pred = w_prev + ds * *tau;
                w_new = correct(w_pred, *tau, w_pred, ds);
            }
            if (!w_new) {
                ds /= 2;
                if (ds < 1e-6)
                    throw std::runtime_error("continue_family: continuation stall");
                continue;
            }
            // emit every grid energy the accepted segment just crossed, seeding
            // the fixed-energy solve from the interpolated section point
            while (gi < goal.size() &&
                   (dir > 0 ? (*w_new)[2] >= goal[gi] - 1e-12
                            : (*w_new)[2] <= goal[gi] + 1e-12)) {
                const double e0 = w_prev[2], e1 = (*w_new)[2];
                const double s = std::abs(e1 - e0) < 1e-15
                                     ? 1.0
                                     : (goal[gi] - e0) / (e1 - e0);
                const Vec2 u_near =
                    (1 - s) * w_prev.head<2>() + s * w_new->head<2>();
                emit_at(goal[gi], u_near);
                ++gi;
            }
            tau = (*w_new - w_prev).normalized();
            if (dir * (*tau)[2] < 0) *tau = -*tau;  // keep marching toward the goal
            w_prev = *w_new;
            ds = std::min(ds * 1.6, ds_max);
        }
    }

    std::sort(out.begin(), out.end(),
              [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
                  return a.energy < b.energy;
              });
    return out;
}

PhasePoint seed_C(double eps, bool anticlockwise) {
    // harmonic circular orbit: kinetic and potential energies are equal, so
    // eps = (10/9) r^2 and |p| = 2 omega0 r.  The walls steepen quickly, so
    // cap the radius where the true potential reaches half the energy; the
    // tangential launch stays in the rotating orbit's attraction basin.
    double r0 = std::sqrt(0.9 * eps);
    if (!in_domain(0, -r0) || potential(0, -r0) > 0.5 * eps)
        r0 = -bisect_v_line(0.5 * eps, 0.0, kTriangleYMin + 2e-6);
    const double p = 2 * std::sqrt(eps - potential(0, -r0));
    return {0.0, -r0, anticlockwise ? p : -p, 0.0};
}

std::vector<PeriodicOrbit> discover_section_orbits(double eps, int grid,
                                                   const ShootOptions& opt) {
    const SectionFrame fr = frame_for(Family::Unknown);
    const double y_lo = bisect_v_line(eps, 0.0, kTriangleYMin + 2e-6);
    const double y_hi = bisect_v_line(eps, 0.0, kTriangleYMax - 2e-6);
    const double p_max = 2 * std::sqrt(eps);

    OdeOptions scan_ode = opt.ode;
    scan_ode.rtol = scan_ode.atol = 1e-10;

    // the momentum grid includes py = 0 exactly: the B1 and C fixed points
    // lie on that symmetry line
    const int npy = grid % 2 ? grid + 1 : grid;
    std::vector<std::vector<double>> dist(grid, std::vector<double>(npy - 1, 1e300));
    std::vector<std::vector<Vec2>> us(grid, std::vector<Vec2>(npy - 1));
    for (int i = 0; i < grid; ++i) {
        const double y = y_lo + (y_hi - y_lo) * (i + 0.5) / grid;
        for (int j = 1; j < npy; ++j) {
            const double py = -p_max + 2 * p_max * j / npy;
            const Vec2 u(y, py);
            us[i][j - 1] = u;
            if (eps - potential(0, y) - py * py / 4 < 1e-3 * eps) continue;
            const auto rm = return_map_plain(fr, u, eps, opt.n_return, scan_ode, 120.0);
            if (rm) dist[i][j - 1] = (rm->u - u).norm();
        }
    }

    std::vector<PeriodicOrbit> found;
    auto consider = [&](const Vec2& u) {
        const auto z = embed(fr, u[0], u[1], eps);
        if (!z) return;
        PeriodicOrbit orb;
        try {
            orb = find_periodic(*z, eps, Family::Unknown, opt);
        } catch (const std::exception&) {
            return;
        }
        const auto sp = pack(orb.start);
        const Vec2 uo((double)sp[fr.iq()], (double)sp[fr.ipq()]);
        for (const auto& other : found) {
            const auto so = pack(other.start);
            if ((uo - Vec2((double)so[fr.iq()], (double)so[fr.ipq()])).norm() < 1e-5)
                return;  // duplicate
        }
        found.push_back(std::move(orb));
    };

    const double cell = std::max((y_hi - y_lo) / grid, 2 * p_max / npy);
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < npy - 1; ++j) {
            const double d = dist[i][j];
            if (d > 1.5 * cell) continue;
            bool is_min = true;
            for (int di = -1; di <= 1 && is_min; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    const int ni = i + di, nj = j + dj;
                    if (ni < 0 || nj < 0 || ni >= grid || nj >= npy - 1) continue;
                    if (dist[ni][nj] < d) {
                        is_min = false;
                        break;
                    }
                }
            if (is_min) consider(us[i][j]);
        }

    // close the set under the point group and time reversal: a mapped start
    // lies exactly on the image orbit, so the polish converges immediately
    // even where the first-return map is branch-polluted for nearby seeds
    const auto ops = all_symmetry_ops();
    for (std::size_t k = 0; k < found.size(); ++k) {
        const PhasePoint z = found[k].start;
        for (const auto& op : ops) {
            for (const int tr : {+1, -1}) {
                PhasePoint img = apply_symmetry(op, z);
                img.px *= tr;
                img.py *= tr;
                try {
                    PeriodicOrbit orb = find_periodic(img, eps, Family::Unknown, opt);
                    const auto sp2 = pack(orb.start);
                    const Vec2 uo((double)sp2[fr.iq()], (double)sp2[fr.ipq()]);
                    bool dup = false;
                    for (const auto& other : found) {
                        const auto so = pack(other.start);
                        if ((uo - Vec2((double)so[fr.iq()], (double)so[fr.ipq()]))
                                .norm() < 1e-5) {
                            dup = true;
                            break;
                        }
                    }
                    if (!dup) found.push_back(std::move(orb));
                } catch (const std::exception&) {
                }
            }
        }
    }
    return found;
}

}  // namespace ringtrio
