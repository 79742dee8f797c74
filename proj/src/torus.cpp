// Fourier tori and EBK quantization: spectral line extraction (windowed
// peaks + projection-maximizing refinement), lattice-constrained fits,
// Percival / circuit actions, chart launches for families A and C, and the
// quantization root find.
#include "ringtrio/torus.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ringtrio/model.hpp"

namespace ringtrio {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

// Percival's action formula carries a global mass prefactor 2 m R^2 = 2 in
// working units (p = 2 dr/dt); the value is cross-validated against the
// circuit line integrals and recorded in FourierTorus::percival_prefactor.
constexpr double kPercivalPrefactor = 2.0;

// ---------------------------------------------------------------------------
// Spectral line machinery: a signal on a uniform time grid with a Hann
// window, supporting peak location (padded FFT + quadratic interpolation),
// frequency refinement (maximize the windowed projection modulus), exact
// projection, and line subtraction.

class NaffSignal {
  public:
    NaffSignal(std::vector<std::complex<double>> samples, double dt,
               bool real_signal)
        : res_(std::move(samples)), dt_(dt), real_(real_signal) {
        const std::size_t n = res_.size();
        w_.resize(n);
        wsum_ = 0;
        for (std::size_t i = 0; i < n; ++i) {
            w_[i] = 0.5 - 0.5 * std::cos(kTwoPi * (double)i / (double)(n - 1));
            wsum_ += w_[i];
        }
    }

    bool real_signal() const { return real_; }
    double dt() const { return dt_; }
    std::size_t size() const { return res_.size(); }
    double resolution() const { return kTwoPi / ((double)res_.size() * dt_); }

    // Hann-weighted projection <res, e^{i om t}>; equals the line amplitude
    // when the residual is a single line at om.
    std::complex<double> project(double om) const {
        std::complex<double> acc{0, 0};
        const std::complex<double> step = std::polar(1.0, -om * dt_);
        std::complex<double> rot{1, 0};
        for (std::size_t n = 0; n < res_.size(); ++n) {
            if ((n & 8191u) == 0)  // periodic re-anchor against drift
                rot = std::polar(1.0, -om * dt_ * (double)n);
            acc += w_[n] * res_[n] * rot;
            rot *= step;
        }
        return acc / wsum_;
    }

    // Exclude a small frequency neighbourhood from future peak scans (used
    // for content that provably cannot be represented on the lattice, e.g.
    // sidebands of a nearby secondary resonance; it stays in the residual
    // and is charged against the reconstruction target).
    void ban(double om, double half_width) {
        banned_.push_back({std::abs(om) - half_width,
                           std::abs(om) + half_width});
    }

    // Strongest spectral line estimate (om, |amplitude|).  Real signals are
    // scanned over positive frequencies only.
    std::pair<double, double> peak() const {
        const std::size_t n = res_.size();
        std::size_t nfft = 1;
        while (nfft < 2 * n) nfft <<= 1;
        std::vector<std::complex<double>> in(nfft, {0, 0}), out(nfft);
        for (std::size_t i = 0; i < n; ++i) in[i] = w_[i] * res_[i];
        fftw_plan plan = fftw_plan_dft_1d(
            (int)nfft, reinterpret_cast<fftw_complex*>(in.data()),
            reinterpret_cast<fftw_complex*>(out.data()), FFTW_FORWARD,
            FFTW_ESTIMATE);
        fftw_execute(plan);
        fftw_destroy_plan(plan);
        const double dw = kTwoPi / ((double)nfft * dt_);
        const std::size_t lo = 1;
        const std::size_t hi = real_ ? nfft / 2 : nfft - 1;
        std::size_t best = lo;
        double best_mag = -1;
        const auto is_banned = [&](std::size_t b) {
            double om = (double)b * dw;
            if (!real_ && om > std::numbers::pi / dt_) om = kTwoPi / dt_ - om;
            for (const auto& [blo, bhi] : banned_)
                if (om >= blo && om <= bhi) return true;
            return false;
        };
        for (std::size_t b = lo; b < hi; ++b) {
            const double m = std::abs(out[b]);
            if (m > best_mag && !is_banned(b)) {
                best_mag = m;
                best = b;
            }
        }
        // quadratic interpolation on log magnitude (exact for a Gaussian,
        // good to a small fraction of a bin for a Hann-windowed line)
        const auto mag = [&](std::size_t b) {
            return std::max(std::abs(out[b % nfft]), 1e-300);
        };
        const double lm = std::log(mag(best - 1)), l0 = std::log(mag(best)),
                     lp = std::log(mag(best + 1));
        double delta = 0;
        const double denom = lm - 2 * l0 + lp;
        if (std::abs(denom) > 1e-12) delta = 0.5 * (lm - lp) / denom;
        delta = std::clamp(delta, -0.5, 0.5);
        double om = ((double)best + delta) * dw;
        if (!real_ && om > std::numbers::pi / dt_) om -= kTwoPi / dt_;
        return {om, best_mag / wsum_};
    }

    // Refine a line frequency by maximizing |project(om)| around om0.
    double refine(double om0, double half_width) const {
        const double gr = (std::sqrt(5.0) - 1) / 2;
        double a = om0 - half_width, b = om0 + half_width;
        double c = b - gr * (b - a), d = a + gr * (b - a);
        double fc = std::norm(project(c)), fd = std::norm(project(d));
        while (b - a > 1e-12) {
            if (fc > fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = std::norm(project(c));
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = std::norm(project(d));
            }
        }
        return 0.5 * (a + b);
    }

    // Remove c e^{i om t} (and its conjugate pair for real signals).
    void subtract(double om, std::complex<double> c) {
        const std::complex<double> step = std::polar(1.0, om * dt_);
        std::complex<double> rot{1, 0};
        for (std::size_t n = 0; n < res_.size(); ++n) {
            if ((n & 8191u) == 0) rot = std::polar(1.0, om * dt_ * (double)n);
            if (real_)
                res_[n] -= 2 * std::real(c * rot);
            else
                res_[n] -= c * rot;
            rot *= step;
        }
    }

    double sup() const {
        double m = 0;
        for (const auto& v : res_) m = std::max(m, std::abs(v));
        return m;
    }

    // Remove the Hann-weighted mean (leakage-suppressed DC estimate, unlike
    // the plain sample mean) and return it.
    std::complex<double> peel_dc() {
        std::complex<double> acc{0, 0};
        for (std::size_t n = 0; n < res_.size(); ++n) acc += w_[n] * res_[n];
        acc /= wsum_;
        if (real_) acc = {acc.real(), 0.0};
        for (auto& v : res_) v -= acc;
        return acc;
    }

    double rms() const {
        double s = 0;
        for (const auto& v : res_) s += std::norm(v);
        return std::sqrt(s / (double)res_.size());
    }

  private:
    std::vector<std::complex<double>> res_;
    std::vector<double> w_;
    std::vector<std::pair<double, double>> banned_;
    double dt_;
    double wsum_;
    bool real_;
};

std::vector<std::complex<double>> to_complex(const std::vector<double>& s) {
    std::vector<std::complex<double>> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = {s[i], 0.0};
    return out;
}

// Peel the strongest free (un-snapped) lines; used for the fundamental
// frequencies and for degeneracy/ambiguity diagnostics.
struct FreeLine {
    double om;
    std::complex<double> c;
};

std::vector<FreeLine> peel_free(NaffSignal& sig, int n_lines, double floor) {
    std::vector<FreeLine> lines;
    for (int i = 0; i < n_lines; ++i) {
        const auto [om0, amp0] = sig.peak();
        if (amp0 < 0.5 * floor) break;
        const double om = sig.refine(om0, 1.5 * sig.resolution());
        const std::complex<double> c = sig.project(om);
        if (std::abs(c) < floor) break;
        sig.subtract(om, c);
        lines.push_back({om, c});
    }
    return lines;
}

// Family detection from the net winding of x + i y about the origin,
// skipping close approaches where the angle increment is ill-conditioned.
TorusFamily detect_family(const std::vector<std::complex<double>>& zeta,
                          double t_total) {
    double rmax = 0;
    for (const auto& z : zeta) rmax = std::max(rmax, std::abs(z));
    const double gate = 0.05 * rmax;
    double wound = 0, counted = 0;
    for (std::size_t n = 0; n + 1 < zeta.size(); ++n) {
        if (std::abs(zeta[n]) < gate || std::abs(zeta[n + 1]) < gate) continue;
        wound += std::arg(zeta[n + 1] / zeta[n]);
        counted += 1;
    }
    if (counted == 0) return TorusFamily::A;
    const double rate = wound / (t_total * counted / (double)(zeta.size() - 1));
    return std::abs(rate) > 0.3 ? TorusFamily::C : TorusFamily::A;
}

struct SignalData {
    std::vector<double> x, y;
    std::vector<std::complex<double>> zeta;
    double dt = 0;
    double t_total = 0;
    double mean_x = 0, mean_y = 0;
};

SignalData extract_signals(const Trajectory& traj) {
    if (traj.samples.size() < 4096)
        throw std::invalid_argument(
            "torus fit: trajectory too short (need >= 4096 samples)");
    SignalData d;
    const std::size_t n = traj.samples.size();
    d.dt = traj.samples[1].t - traj.samples[0].t;
    for (std::size_t i = 2; i < std::min<std::size_t>(n, 16); ++i) {
        const double step = traj.samples[i].t - traj.samples[i - 1].t;
        if (std::abs(step - d.dt) > 1e-9)
            throw std::invalid_argument("torus fit: non-uniform sampling");
    }
    d.t_total = traj.samples.back().t - traj.samples.front().t;
    d.x.resize(n);
    d.y.resize(n);
    d.zeta.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        d.x[i] = traj.samples[i].z.x;
        d.y[i] = traj.samples[i].z.y;
        d.zeta[i] = {d.x[i], d.y[i]};
        d.mean_x += d.x[i];
        d.mean_y += d.y[i];
    }
    d.mean_x /= (double)n;
    d.mean_y /= (double)n;
    for (std::size_t i = 0; i < n; ++i) {
        d.x[i] -= d.mean_x;
        d.y[i] -= d.mean_y;
    }
    return d;
}

double rms_of(const std::vector<double>& v) {
    double s = 0;
    for (double u : v) s += u * u;
    return std::sqrt(s / (double)v.size());
}

// Strongest line of a real signal with an ambiguity guard: a second line of
// comparable strength within a few resolution widths is unresolvable.
double dominant_line(const std::vector<double>& s, double dt,
                     const char* label) {
    NaffSignal sig(to_complex(s), dt, true);
    const auto lines = peel_free(sig, 2, 1e-12);
    if (lines.empty())
        throw std::invalid_argument(std::string("fundamental_frequencies: no ") +
                                    label + " line found");
    if (lines.size() > 1) {
        const double sep = std::abs(lines[1].om - lines[0].om);
        const double ratio = std::abs(lines[1].c) / std::abs(lines[0].c);
        if (ratio > 0.9 && sep < 8 * sig.resolution()) {
            std::ostringstream msg;
            msg << "fundamental_frequencies: ambiguous " << label
                << " peak, candidates " << lines[0].om << " and " << lines[1].om;
            throw std::runtime_error(msg.str());
        }
    }
    return std::abs(lines[0].om);
}

// ---------------------------------------------------------------------------
// Lattice snapping

struct SnapSpec {
    int k1_lim = 40;
    int k2_lim = 80;
    int k1_parity = -1;     // -1 none, else required k1 mod 2
    bool k2_nonzero_mod3 = false;
    double nyquist = 0;
    double min_freq = 0;    // reject unresolvable near-zero combinations
    double tol = 1e-3;
};

// The lattice is dense for large |k|, so among the points within tolerance
// the lowest-order one is preferred: a genuine line of an invariant torus
// has the smallest indices consistent with its frequency, while a
// high-order alias a hair closer is almost surely a mislabel.
std::array<int, 2> snap_to_lattice(double om, const std::array<double, 2>& W,
                                   const SnapSpec& sp) {
    std::array<int, 2> best{0, 0};
    double best_err = 1e300;
    int best_order = 1 << 30;
    bool found = false;
    for (int k1 = -sp.k1_lim; k1 <= sp.k1_lim; ++k1) {
        if (sp.k1_parity >= 0 && ((k1 % 2 + 2) % 2) != sp.k1_parity) continue;
        for (int k2 = -sp.k2_lim; k2 <= sp.k2_lim; ++k2) {
            if (sp.k2_nonzero_mod3 && ((k2 % 3 + 3) % 3) == 0) continue;
            const double line = k1 * W[0] + k2 * W[1];
            if (std::abs(line) > sp.nyquist) continue;
            if (std::abs(line) < sp.min_freq) continue;
            const double err = std::abs(line - om);
            const int order = std::abs(k1) + std::abs(k2);
            const bool in_tol = err <= sp.tol;
            bool better;
            if (in_tol && found)
                better = order < best_order ||
                         (order == best_order && err < best_err);
            else if (in_tol && !found)
                better = true;
            else if (!found)
                better = err < best_err;
            else
                better = false;
            if (better) {
                best_err = err;
                best_order = order;
                best = {k1, k2};
                found = found || in_tol;
            }
        }
    }
    if (!found) {
        std::ostringstream msg;
        msg << "fit_fourier: spectral line at " << om
            << " is off the frequency lattice (nearest " << best[0] << ","
            << best[1] << " misses by " << best_err
            << "); not an invariant torus of these frequencies";
        throw std::runtime_error(msg.str());
    }
    return best;
}

struct LatticeLine {
    std::array<int, 2> k;
    std::complex<double> c;
};

// Iterative peel of one real signal onto the lattice, then refinement
// sweeps that re-project every retained line on the current residual.
// The projection frequency is the exact lattice value: for a genuine torus
// it locates the line far better than any windowed estimate, so each
// subtraction is essentially complete.  Guards: a hard iteration cap, a
// floor on usable frequencies (below a few resolution widths the mirror
// line of a real signal overlaps and subtraction diverges), and a stall
// detector so off-torus signals terminate instead of churning.
std::vector<LatticeLine> peel_lattice(NaffSignal& sig,
                                      const std::array<double, 2>& W,
                                      const SnapSpec& sp, double floor,
                                      int budget, double sup_target,
                                      std::complex<double>& dc_out) {
    std::vector<LatticeLine> lines;
    dc_out = sig.peel_dc();
    double stall_ref = 1e300;
    for (int iter = 0; iter < 2 * budget && (int)lines.size() < budget;
         ++iter) {
        const double sup = sig.sup();
        if (sup <= 0.3 * sup_target) break;
        if (iter % 16 == 0) {
            if (sup > 0.999 * stall_ref) break;
            stall_ref = sup;
        }
        const auto [om0, amp0] = sig.peak();
        if (amp0 < 0.4 * floor) break;
        std::array<int, 2> k;
        if (std::abs(om0) < sp.min_freq) {
            // unresolvable this close to DC; leave it in the residual
            if (amp0 > sup_target)
                throw std::runtime_error(
                    "fit_fourier: strong unresolvable low-frequency content; "
                    "fit window too short for this torus");
            sig.ban(om0, sig.resolution());
            continue;
        }
        try {
            k = snap_to_lattice(om0, W, sp);
        } catch (const std::runtime_error&) {
            // Off-lattice line: fatal if strong (wrong lattice or not a
            // torus), otherwise banned and charged to the residual (e.g.
            // faint sidebands of a nearby secondary resonance).
            if (amp0 > sup_target) throw;
            sig.ban(om0, sig.resolution());
            continue;
        }
        double omk = k[0] * W[0] + k[1] * W[1];
        if (omk < 0) {  // canonical half for real signals
            k = {-k[0], -k[1]};
            omk = -omk;
        }
        const std::complex<double> c = sig.project(omk);
        if (std::abs(c) < floor) break;
        sig.subtract(omk, c);
        bool merged = false;
        for (auto& L : lines)
            if (L.k == k) {
                L.c += c;
                merged = true;
                break;
            }
        if (!merged) lines.push_back({k, c});
    }
    // Sweeps: re-project every retained line on the current residual until
    // the cross-talk between nearby lines has been ironed out.  Greedy
    // peeling leaves each coefficient contaminated by the window leakage of
    // its neighbours; every sweep shrinks that error geometrically.
    double prev_sup = sig.sup();
    for (int pass = 0; pass < 30; ++pass) {
        dc_out += sig.peel_dc();
        for (auto& L : lines) {
            const double omk = L.k[0] * W[0] + L.k[1] * W[1];
            const std::complex<double> dc = sig.project(omk);
            L.c += dc;
            sig.subtract(omk, dc);
        }
        const double now = sig.sup();
        if (now <= 0.25 * sup_target || now > 0.97 * prev_sup) break;
        prev_sup = now;
    }
    // prune anything the sweeps pushed below the floor
    std::vector<LatticeLine> kept;
    for (auto& L : lines)
        if (std::abs(L.c) >= floor)
            kept.push_back(L);
        else
            sig.subtract(L.k[0] * W[0] + L.k[1] * W[1], -L.c);
    return kept;
}

void check_incommensurate(const std::array<double, 2>& W, double resolution) {
    for (int q1 = -6; q1 <= 6; ++q1)
        for (int q2 = -6; q2 <= 6; ++q2) {
            if (q1 == 0 && q2 == 0) continue;
            if (std::abs(q1 * W[0] + q2 * W[1]) < 3 * resolution) {
                std::ostringstream msg;
                msg << "fit_fourier: near-resonant frequencies (" << q1 << ","
                    << q2 << ") . (" << W[0] << "," << W[1] << ") ~ 0";
                throw std::runtime_error(msg.str());
            }
        }
}

PhasePoint launch_C_at(double ystar, double s, double eps) {
    const double y0 = ystar + s;  // inward: away from the steep outer wall
    const double v0 = potential(0.0, y0);
    if (!(v0 < eps))
        throw std::invalid_argument(
            "torus_launch: offset leaves the energetically allowed region");
    return {0.0, y0, 2 * std::sqrt(eps - v0), 0.0};
}

// C+ periodic orbit at arbitrary energy, via continuation from the
// low-energy rotating seed.
PeriodicOrbit c_plus_orbit(double eps) {
    const double e_seed = 0.05;
    PeriodicOrbit cp = find_periodic(seed_C(e_seed, true), e_seed, Family::Cp);
    if (std::abs(eps - e_seed) < 1e-12) return cp;
    const int steps =
        std::max(3, (int)std::ceil(std::abs(eps - e_seed) / 0.7) + 1);
    const auto fam = continue_family(cp, std::min(eps, e_seed),
                                     std::max(eps, e_seed), steps);
    const PeriodicOrbit& a = fam.front();
    const PeriodicOrbit& b = fam.back();
    return std::abs(a.energy - eps) < std::abs(b.energy - eps) ? a : b;
}

// Loop action of a converged C orbit from its stored one-period path:
// (1/2pi) int p . dr = (1/2pi) int 2 (eps - v) dt, trapezoid over the path
// (spectrally accurate for a periodic integrand).
double loop_action_of(const PeriodicOrbit& cp) {
    const auto& p = cp.path.samples;
    double acc = 0;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        const double fa = 2 * (cp.energy - potential(p[i].z.x, p[i].z.y));
        const double fb =
            2 * (cp.energy - potential(p[i + 1].z.x, p[i + 1].z.y));
        acc += 0.5 * (fa + fb) * (p[i + 1].t - p[i].t);
    }
    return acc / kTwoPi;
}

// Walk a C+ orbit to the requested energy in bounded hops (the Newton
// finder wants a nearby guess).
void walk_c_orbit(PeriodicOrbit& cp, double eps) {
    int guard = 0;
    while (std::abs(cp.energy - eps) > 1e-12) {
        const double step =
            std::clamp(eps - cp.energy, -1.0, 1.0);
        cp = find_periodic(cp.start, cp.energy + step, Family::Cp);
        if (++guard > 200)
            throw std::runtime_error("torus: C+ continuation stalled");
    }
}

}  // namespace

std::string torus_family_name(TorusFamily f) {
    return f == TorusFamily::A ? "A" : "C";
}

std::array<double, 2> FourierTorus::position(double th1, double th2) const {
    std::complex<double> x{0, 0}, y{0, 0};
    for (const auto& [k, c] : coeffs) {
        const std::complex<double> e =
            std::polar(1.0, k[0] * th1 + k[1] * th2);
        x += c[0] * e;
        y += c[1] * e;
    }
    return {x.real(), y.real()};
}

std::array<double, 2> FourierTorus::momentum(double th1, double th2) const {
    std::complex<double> px{0, 0}, py{0, 0};
    for (const auto& [k, c] : coeffs) {
        const double kom = k[0] * omega[0] + k[1] * omega[1];
        const std::complex<double> e =
            std::complex<double>{0, 2 * kom} *
            std::polar(1.0, k[0] * th1 + k[1] * th2);
        px += c[0] * e;
        py += c[1] * e;
    }
    return {px.real(), py.real()};
}

std::array<double, 2> fundamental_frequencies(const Trajectory& traj) {
    const SignalData d = extract_signals(traj);
    const TorusFamily fam = detect_family(d.zeta, d.t_total);

    if (fam == TorusFamily::A) {
        const double rx = rms_of(d.x), ry = rms_of(d.y);
        if (rx < 1e-8 * ry)
            throw std::invalid_argument(
                "fundamental_frequencies: degenerate input (periodic orbit, "
                "only one independent frequency)");
        const double om_x = dominant_line(d.x, d.dt, "transverse");
        const double om_y = dominant_line(d.y, d.dt, "longitudinal");
        return {om_x, om_y};
    }

    // family C: the loop frequency is the dominant line of zeta = x + i y;
    // the radial line lives in sigma = |zeta| - mean, inside (1.5, 3) loop
    // widths (its lattice mirror 3 om_l - om_r falls below that window).
    std::vector<std::complex<double>> zeta = d.zeta;
    std::complex<double> zmean{0, 0};
    for (const auto& z : zeta) zmean += z;
    zmean /= (double)zeta.size();
    for (auto& z : zeta) z -= zmean;
    NaffSignal sigz(zeta, d.dt, false);
    const auto zl = peel_free(sigz, 1, 1e-12);
    if (zl.empty())
        throw std::invalid_argument(
            "fundamental_frequencies: no loop line found");
    const double om_l = std::abs(zl[0].om);

    std::vector<double> sigma(d.zeta.size());
    double smean = 0;
    for (std::size_t i = 0; i < d.zeta.size(); ++i) {
        sigma[i] = std::abs(d.zeta[i]);
        smean += sigma[i];
    }
    smean /= (double)sigma.size();
    for (auto& v : sigma) v -= smean;
    NaffSignal sigs(to_complex(sigma), d.dt, true);
    const auto lines = peel_free(sigs, 12, 1e-10);
    double best_amp = 0, om_r = 0, second = 0;
    for (const auto& L : lines) {
        const double om = std::abs(L.om);
        if (om < 1.5 * om_l || om > 2.97 * om_l) continue;
        if (std::abs(om - 3 * om_l) < 0.05 * om_l) continue;
        const double a = std::abs(L.c);
        if (a > best_amp) {
            second = best_amp;
            best_amp = a;
            om_r = om;
        } else {
            second = std::max(second, a);
        }
    }
    if (best_amp < 1e-8)
        throw std::invalid_argument(
            "fundamental_frequencies: degenerate input (no independent "
            "radial line; periodic orbit?)");
    if (second > 0.85 * best_amp) {
        std::ostringstream msg;
        msg << "fundamental_frequencies: ambiguous radial window, strongest "
            << om_r << " rivaled within 15%";
        throw std::runtime_error(msg.str());
    }
    return {om_r, om_l};
}

FourierTorus fit_fourier(const Trajectory& traj,
                         const std::array<double, 2>& omega, int k_max,
                         double coeff_floor, double residual_target) {
    if (!(omega[0] > 0) || !(omega[1] > 0))
        throw std::invalid_argument("fit_fourier: frequencies must be > 0");
    if (k_max < 2 || k_max > 3200)
        throw std::invalid_argument("fit_fourier: k_max out of range (2..3200)");
    const SignalData d = extract_signals(traj);
    check_incommensurate(omega, kTwoPi / d.t_total);
    const TorusFamily fam = detect_family(d.zeta, d.t_total);

    SnapSpec spx, spy;
    spx.nyquist = spy.nyquist = 0.95 * std::numbers::pi / d.dt;
    spx.min_freq = spy.min_freq = 4 * kTwoPi / d.t_total;
    if (fam == TorusFamily::A) {
        // S-reflection symmetry of the tube: x is odd, y is even
        spx.k1_parity = 1;
        spy.k1_parity = 0;
    } else {
        // threefold symmetry of the loop: x, y carry k_l != 0 mod 3 only
        spx.k2_nonzero_mod3 = spy.k2_nonzero_mod3 = true;
    }

    NaffSignal sigx(to_complex(d.x), d.dt, true);
    NaffSignal sigy(to_complex(d.y), d.dt, true);
    std::complex<double> dcx{0, 0}, dcy{0, 0};
    auto lines_x = peel_lattice(sigx, omega, spx, coeff_floor, k_max / 2,
                                residual_target, dcx);
    auto lines_y = peel_lattice(sigy, omega, spy, coeff_floor,
                                k_max - (int)lines_x.size(), residual_target,
                                dcy);

    FourierTorus torus;
    torus.family = fam;
    torus.omega = omega;
    torus.energy = traj.energy0;
    torus.percival_prefactor = kPercivalPrefactor;
    auto put = [&](const std::array<int, 2>& k, int comp,
                   std::complex<double> c) {
        auto& slot = torus.coeffs[k];
        slot[comp] += c;
        auto& conj_slot = torus.coeffs[{-k[0], -k[1]}];
        conj_slot[comp] += std::conj(c);
    };
    for (const auto& L : lines_x) put(L.k, 0, L.c);
    for (const auto& L : lines_y) put(L.k, 1, L.c);
    torus.coeffs[{0, 0}] = {
        std::complex<double>(d.mean_x + dcx.real(), 0.0),
        std::complex<double>(d.mean_y + dcy.real(), 0.0)};

    torus.residual = std::max(sigx.sup(), sigy.sup());
    if (torus.residual > residual_target) {
        std::ostringstream msg;
        msg << "fit_fourier: reconstruction residual " << torus.residual
            << " exceeds target " << residual_target
            << " (trajectory not on an invariant torus?)";
        throw std::runtime_error(msg.str());
    }

    torus.actions_percival = actions_percival(torus);
    if (fam == TorusFamily::A) {
        torus.actions_circuit = {action_circuit(torus, Circuit::Transverse),
                                 action_circuit(torus, Circuit::Longitudinal)};
    } else {
        torus.actions_circuit = {action_circuit(torus, Circuit::Radial),
                                 action_circuit(torus, Circuit::Loop)};
    }
    return torus;
}

std::array<double, 2> actions_percival(const FourierTorus& torus) {
    double j1 = 0, j2 = 0;
    for (const auto& [k, c] : torus.coeffs) {
        const double kom = k[0] * torus.omega[0] + k[1] * torus.omega[1];
        const double a2 = std::norm(c[0]) + std::norm(c[1]);
        j1 += k[0] * kom * a2;
        j2 += k[1] * kom * a2;
    }
    return {torus.percival_prefactor * j1, torus.percival_prefactor * j2};
}

double action_circuit(const FourierTorus& torus, Circuit circuit, int n_nodes,
                      double fixed_angle) {
    const bool family_A = torus.family == TorusFamily::A;
    const bool axis0 =
        circuit == Circuit::Transverse || circuit == Circuit::Radial;
    const bool matches =
        family_A ? (circuit == Circuit::Transverse ||
                    circuit == Circuit::Longitudinal)
                 : (circuit == Circuit::Radial || circuit == Circuit::Loop);
    if (!matches)
        throw std::invalid_argument(
            "action_circuit: circuit does not belong to this torus family");
    if (n_nodes < 64)
        throw std::invalid_argument("action_circuit: too few nodes");

    // (1/2pi) contour integral of p . dr = mean over the circle of
    // p . dr/dtheta, trapezoid = node mean for a periodic integrand
    double acc = 0;
    for (int j = 0; j < n_nodes; ++j) {
        const double th = kTwoPi * (double)j / (double)n_nodes;
        const double th1 = axis0 ? th : fixed_angle;
        const double th2 = axis0 ? fixed_angle : th;
        std::complex<double> px{0, 0}, py{0, 0}, dx{0, 0}, dy{0, 0};
        for (const auto& [k, c] : torus.coeffs) {
            const double kom = k[0] * torus.omega[0] + k[1] * torus.omega[1];
            const int ka = axis0 ? k[0] : k[1];
            const std::complex<double> e =
                std::polar(1.0, k[0] * th1 + k[1] * th2);
            px += c[0] * std::complex<double>{0, 2 * kom} * e;
            py += c[1] * std::complex<double>{0, 2 * kom} * e;
            dx += c[0] * std::complex<double>{0, (double)ka} * e;
            dy += c[1] * std::complex<double>{0, (double)ka} * e;
        }
        acc += px.real() * dx.real() + py.real() * dy.real();
    }
    return acc / (double)n_nodes;
}

PhasePoint torus_launch(TorusFamily family, double s, double eps) {
    if (!(eps > 0) || !(s > 0))
        throw std::invalid_argument("torus_launch: need s > 0 and eps > 0");
    if (family == TorusFamily::A) {
        if (!(s * s < 4 * eps))
            throw std::invalid_argument(
                "torus_launch: transverse momentum exceeds the energy");
        return {0.0, 0.0, s, std::sqrt(4 * eps - s * s)};
    }
    const PeriodicOrbit cp = c_plus_orbit(eps);
    return launch_C_at(cp.start.y, s, eps);
}

FourierTorus make_torus(TorusFamily family, double s, double eps,
                        const TorusOptions& opt) {
    const PhasePoint z0 = torus_launch(family, s, eps);
    const Trajectory tr = integrate(z0, opt.t_max, opt.dt, opt.ode);
    const auto om = fundamental_frequencies(tr);
    FourierTorus torus =
        fit_fourier(tr, om, opt.k_max, opt.coeff_floor, opt.residual_target);
    torus.family = family;
    return torus;
}

double action_A_longitudinal(double eps, int n_nodes) {
    if (!(eps > 0)) throw std::invalid_argument("action_A_longitudinal: eps");
    const auto f = [&](double y) { return potential(0.0, y) - eps; };
    const auto bisect = [&](double lo, double hi) {
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            if ((f(lo) > 0) == (f(mid) > 0))
                lo = mid;
            else
                hi = mid;
        }
        return 0.5 * (lo + hi);
    };
    const double ym = bisect(kTriangleYMin + 1e-5, 0.0);
    const double yp = bisect(kTriangleYMax - 1e-5, 0.0);
    // y = ym + (yp - ym) sin^2 u regularizes the square-root turning points
    double sum = 0;
    const double du = (std::numbers::pi / 2) / n_nodes;
    for (int i = 0; i <= n_nodes; ++i) {
        const double u = i * du;
        const double si = std::sin(u), co = std::cos(u);
        const double y = ym + (yp - ym) * si * si;
        const double ev = std::max(eps - potential(0.0, y), 0.0);
        const double g = std::sqrt(ev) * (yp - ym) * 2 * si * co;
        sum += (i == 0 || i == n_nodes) ? 0.5 * g : g;
    }
    return (2.0 / std::numbers::pi) * sum * du;
}

double action_C_loop(double eps, const ShootOptions& opt) {
    (void)opt;
    return loop_action_of(c_plus_orbit(eps));
}

std::array<double, 2> ebk_targets(TorusFamily family, std::array<int, 2> nu,
                                  double eta) {
    if (nu[0] < 0 || nu[1] < 0)
        throw std::invalid_argument("ebk_targets: quantum numbers must be >= 0");
    if (!(eta > 0)) throw std::invalid_argument("ebk_targets: eta must be > 0");
    if (family == TorusFamily::A)  // Maslov (2, 4)
        return {eta * (nu[0] + 0.5), eta * (nu[1] + 1.0)};
    // Family C, Maslov (2, 2).  The conventional longitudinal circuit winds
    // once in BOTH angles (it crosses the radial caustic pair, hence its
    // Maslov index 2), so its action is I_r + I_l in terms of the pure
    // single-angle circuits used internally:
    //   I_r = eta (nu_r + 1/2),  I_r + I_l = eta (nu_l + 1/2)
    // which leaves the pure-loop target below.
    if (nu[1] < nu[0])
        throw std::invalid_argument("ebk_targets: need nu_l >= nu_r");
    return {eta * (nu[0] + 0.5), eta * (double)(nu[1] - nu[0])};
}

std::vector<std::pair<std::string, std::string>> ebk_irreps(
    TorusFamily family, std::array<int, 2> nu) {
    if (family == TorusFamily::A) {
        if (nu[0] % 2 == 0)
            return {{"A1", "quasi"}, {"E", "quasi"}};
        return {{"A2", "quasi"}, {"E", "quasi"}};
    }
    if (nu[1] % 3 == 0) return {{"A1", "quasi"}, {"A2", "quasi"}};
    return {{"E", "exact"}};
}

namespace {

// One evaluation of the root-find map: chart (s, eps) -> circuit actions.
struct ChartEval {
    TorusFamily family;
    TorusOptions opt;
    PeriodicOrbit cp;  // warm C+ cache
    bool have_cp = false;

    FourierTorus operator()(double s, double eps) {
        PhasePoint z0;
        if (family == TorusFamily::A) {
            if (!(s > 0) || !(s * s < 4 * eps))
                throw std::invalid_argument("chart: s out of range");
            z0 = PhasePoint{0.0, 0.0, s, std::sqrt(4 * eps - s * s)};
        } else {
            if (!have_cp) {
                cp = c_plus_orbit(eps);
                have_cp = true;
            } else {
                walk_c_orbit(cp, eps);
            }
            if (!(s > 0) || s > 0.5 * std::abs(cp.start.y))
                throw std::invalid_argument("chart: s out of range");
            z0 = launch_C_at(cp.start.y, s, eps);
        }
        const Trajectory tr = integrate(z0, opt.t_max, opt.dt, opt.ode);
        const auto om = fundamental_frequencies(tr);
        FourierTorus torus = fit_fourier(tr, om, opt.k_max, opt.coeff_floor,
                                         opt.residual_target);
        torus.family = family;
        return torus;
    }
};

double invert_action_A(double target) {
    double lo = 1e-3, hi = 80.0;
    if (action_A_longitudinal(target > 1 ? 1e-3 : 1e-4) > target)
        throw std::runtime_error("ebk_search: longitudinal target too small");
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (action_A_longitudinal(mid, 4000) < target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double invert_action_C(double target, PeriodicOrbit& cp) {
    cp = find_periodic(seed_C(0.05, true), 0.05, Family::Cp);
    double eps = cp.energy, act = loop_action_of(cp);
    // secant with bounded energy hops, warm-started shooting
    double eps_prev = eps, act_prev = act;
    // first hop: harmonic scaling act ~ eps / omega0
    double eps_next = std::clamp(eps * target / act, 1e-3, 100.0);
    for (int i = 0; i < 80; ++i) {
        eps_next = std::clamp(eps_next, 1e-3, 100.0);
        walk_c_orbit(cp, eps_next);
        const double a = loop_action_of(cp);
        eps_prev = eps;
        act_prev = act;
        eps = eps_next;
        act = a;
        if (std::abs(act - target) < 1e-10 * std::max(1.0, target)) return eps;
        const double slope = (act - act_prev) / (eps - eps_prev);
        double step = slope != 0 ? (target - act) / slope : 0.1;
        step = std::clamp(step, -2.0, 2.0);
        eps_next = eps + step;
        if (std::abs(step) < 1e-13) return eps;
    }
    return eps;
}

}  // namespace

EbkLevel ebk_search(TorusFamily family, std::array<int, 2> nu, double eta,
                    const EbkOptions& opt) {
    const auto targets = ebk_targets(family, nu, eta);

    // initial chart guess
    double s = 0, eps = 0;
    ChartEval newton_eval{family, opt.newton, {}, false};
    if (family == TorusFamily::A) {
        eps = invert_action_A(targets[1]);
        const PeriodicOrbit a0 = orbit_A_quadrature(eps);
        const double rho =
            std::acos(std::clamp(a0.trace / 2.0, -1.0, 1.0));
        const double om_x0 = rho / a0.period;
        s = 2 * std::sqrt(std::max(targets[0] * std::max(om_x0, 0.05), 1e-12));
        s = std::clamp(s, 1e-3, 0.8 * 2 * std::sqrt(eps));
    } else {
        PeriodicOrbit cp;
        eps = invert_action_C(targets[1], cp);
        newton_eval.cp = cp;
        newton_eval.have_cp = true;
        // calibrate the radial scale with one coarse probe
        TorusOptions probe_opt = opt.newton;
        probe_opt.t_max = std::min(opt.newton.t_max, 600.0);
        ChartEval probe{family, probe_opt, cp, true};
        s = 0;
        for (double s_probe : {2e-3, 1e-3, 3.5e-3, 5e-4}) {
            try {
                const FourierTorus t0 = probe(s_probe, eps);
                const double ir0 = std::max(t0.actions_circuit[0], 1e-12);
                s = std::clamp(s_probe * std::sqrt(targets[0] / ir0), 5e-5,
                               0.04);
                break;
            } catch (const std::exception&) {
                // try a different probe radius
            }
        }
        if (s == 0)
            throw std::runtime_error(
                "ebk_search: cannot probe the radial action scale near "
                "epsilon = " + std::to_string(eps));
    }

    auto F = [&](double s_, double e_) {
        const FourierTorus t = newton_eval(s_, e_);
        return std::array<double, 3>{t.actions_circuit[0] - targets[0],
                                     t.actions_circuit[1] - targets[1],
                                     t.energy};
    };

    const double tol = opt.action_tol * eta;
    auto norm_inf = [](const std::array<double, 3>& v) {
        return std::max(std::abs(v[0]), std::abs(v[1]));
    };

    // The seed may land on a resonance chain or outside the island; scan a
    // few radial rescalings before giving up.
    std::string last_err;
    std::array<double, 3> f{};
    {
        const double s_seed = s;
        bool seeded = false;
        for (double fac : {1.0, 0.8, 1.25, 0.65, 1.55, 0.5, 2.0, 0.35}) {
            try {
                f = F(s_seed * fac, eps);
                s = s_seed * fac;
                seeded = true;
                break;
            } catch (const std::exception& e) {
                last_err = e.what();
            }
        }
        if (!seeded)
            throw std::runtime_error(
                "ebk_search: no regular torus near the seed (family " +
                torus_family_name(family) + ", nu " + std::to_string(nu[0]) +
                "," + std::to_string(nu[1]) + "); last fit error: " +
                last_err);
    }

    // finite-difference Jacobian, columns (s, eps); fall back to a backward
    // step when the forward trajectory fails to fit
    const double hs = opt.fd_step;
    const double he = opt.fd_step * std::max(1.0, std::abs(eps));
    auto fd_column = [&](bool vary_s) {
        const double h = vary_s ? hs : he;
        for (double sign : {1.0, -1.0}) {
            try {
                const auto fh = vary_s ? F(s + sign * h, eps)
                                       : F(s, eps + sign * h);
                return std::array<double, 2>{(fh[0] - f[0]) / (sign * h),
                                             (fh[1] - f[1]) / (sign * h)};
            } catch (const std::exception& e) {
                last_err = e.what();
            }
        }
        throw std::runtime_error(
            "ebk_search: cannot differentiate the action map (family " +
            torus_family_name(family) + ", nu " + std::to_string(nu[0]) +
            "," + std::to_string(nu[1]) + "); last fit error: " + last_err);
    };
    const auto col_s = fd_column(true);
    const auto col_e = fd_column(false);
    double J[2][2] = {{col_s[0], col_e[0]}, {col_s[1], col_e[1]}};

    int it = 0;
    for (; it < opt.max_iterations && norm_inf(f) > tol; ++it) {
        const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
        if (std::abs(det) < 1e-18)
            throw std::runtime_error("ebk_search: singular action Jacobian");
        double ds = (-f[0] * J[1][1] + f[1] * J[0][1]) / det;
        double de = (-J[0][0] * f[1] + J[1][0] * f[0]) / det;
        // trust region
        const double lim_s = std::max(0.5 * s, 5e-3);
        const double lim_e = std::max(0.1 * std::abs(eps), 0.2);
        const double shrink =
            std::max({1.0, std::abs(ds) / lim_s, std::abs(de) / lim_e});
        ds /= shrink;
        de /= shrink;
        bool accepted = false;
        for (int back = 0; back < 7; ++back) {
            const double s_try = s + ds, e_try = eps + de;
            if (s_try > 0 && e_try > 0) {
                try {
                    const auto f_try = F(s_try, e_try);
                    // Broyden update of the Jacobian
                    const double uu = ds * ds + de * de;
                    const double r0 = f_try[0] - f[0] - (J[0][0] * ds + J[0][1] * de);
                    const double r1 = f_try[1] - f[1] - (J[1][0] * ds + J[1][1] * de);
                    J[0][0] += r0 * ds / uu;
                    J[0][1] += r0 * de / uu;
                    J[1][0] += r1 * ds / uu;
                    J[1][1] += r1 * de / uu;
                    s = s_try;
                    eps = e_try;
                    f = f_try;
                    accepted = true;
                    break;
                } catch (const std::exception& e) {
                    last_err = e.what();  // fall through to a smaller step
                }
            }
            ds *= 0.5;
            de *= 0.5;
        }
        if (!accepted)
            throw std::runtime_error(
                "ebk_search: no torus with the requested actions in the "
                "regular region (family " +
                torus_family_name(family) + ", nu " + std::to_string(nu[0]) +
                "," + std::to_string(nu[1]) + "); last fit error: " +
                last_err);
    }
    if (norm_inf(f) > tol)
        throw std::runtime_error(
            "ebk_search: did not converge for family " +
            torus_family_name(family) + ", nu " + std::to_string(nu[0]) + "," +
            std::to_string(nu[1]));

    // final torus at full fit quality
    ChartEval final_eval{family, opt.final, newton_eval.cp,
                         newton_eval.have_cp};
    FourierTorus torus = final_eval(s, eps);
    const double miss =
        std::max(std::abs(torus.actions_circuit[0] - targets[0]),
                 std::abs(torus.actions_circuit[1] - targets[1]));
    if (miss > 1e-4 * eta)
        throw std::runtime_error(
            "ebk_search: final torus misses the quantized actions");

    EbkLevel level;
    level.family = family;
    level.nu = nu;
    level.energy = torus.energy;
    level.torus = std::move(torus);
    level.irreps = ebk_irreps(family, nu);
    level.chart_s = s;
    return level;
}

std::vector<EbkLevel> ebk_level_table(TorusFamily family, int nu1, int nu2_lo,
                                      int nu2_hi, double eta,
                                      const EbkOptions& opt) {
    std::vector<EbkLevel> table;
    for (int nu2 = nu2_lo; nu2 <= nu2_hi; ++nu2)
        table.push_back(ebk_search(family, {nu1, nu2}, eta, opt));
    return table;
}

}  // namespace ringtrio
