// Explicit Runge-Kutta integrator of order 8(5,3) (the Dormand-Prince 8th
// order method with the embedded 5th/3rd order error estimate popularized by
// Hairer, Norsett & Wanner) with standard step-size control.  States are
// carried in long double so long Hamiltonian runs keep their energy drift
// well below the double-precision results built on top of them.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>

namespace ringtrio {

struct OdeOptions {
    double rtol = 1e-12;
    double atol = 1e-12;
    double h_max = 0.0;  // 0 = unlimited
    double h_init = 0.0;  // 0 = automatic
    std::uint64_t max_steps = 400000000;
};

struct OdeStats {
    std::uint64_t n_accepted = 0;
    std::uint64_t n_rejected = 0;
    std::uint64_t n_evals = 0;
};

template <int N>
using OdeState = std::array<long double, N>;

// One accepted step with endpoint derivatives.  eval() is a cubic Hermite
// interpolant, accurate enough to bracket and seed event searches (the final
// event refinement re-integrates the true flow, see locate_crossing).
template <int N>
struct OdeStepSpan {
    long double t0 = 0, t1 = 0;
    OdeState<N> y0{}, y1{}, f0{}, f1{};

    OdeState<N> eval(long double t) const {
        const long double h = t1 - t0;
        const long double u = (t - t0) / h;
        const long double b0 = (1 + 2 * u) * (1 - u) * (1 - u);
        const long double b1 = u * (1 - u) * (1 - u) * h;
        const long double b2 = u * u * (3 - 2 * u);
        const long double b3 = u * u * (u - 1) * h;
        OdeState<N> y;
        for (int i = 0; i < N; ++i)
            y[i] = b0 * y0[i] + b1 * f0[i] + b2 * y1[i] + b3 * f1[i];
        return y;
    }
};

namespace dop853 {

// Node, stage and weight coefficients (Hairer, Norsett & Wanner).
inline constexpr double c2 = 0.526001519587677318785587544488e-01;
inline constexpr double c3 = 0.789002279381515978178381316732e-01;
inline constexpr double c4 = 0.118350341907227396726757197510e+00;
inline constexpr double c5 = 0.281649658092772603273242802490e+00;
inline constexpr double c6 = 0.333333333333333333333333333333e+00;
inline constexpr double c7 = 0.25e+00;
inline constexpr double c8 = 0.307692307692307692307692307692e+00;
inline constexpr double c9 = 0.651282051282051282051282051282e+00;
inline constexpr double c10 = 0.6e+00;
inline constexpr double c11 = 0.857142857142857142857142857142e+00;

inline constexpr double a21 = 5.26001519587677318785587544488e-2;
inline constexpr double a31 = 1.97250569845378994544595329183e-2;
inline constexpr double a32 = 5.91751709536136983633785987549e-2;
inline constexpr double a41 = 2.95875854768068491816892993775e-2;
inline constexpr double a43 = 8.87627564304205475450678981324e-2;
inline constexpr double a51 = 2.41365134159266685502369798665e-1;
inline constexpr double a53 = -8.84549479328286085344864962717e-1;
inline constexpr double a54 = 9.24834003261792003115737966543e-1;
inline constexpr double a61 = 3.7037037037037037037037037037e-2;
inline constexpr double a64 = 1.70828608729473871279604482173e-1;
inline constexpr double a65 = 1.25467687566822425016691814123e-1;
inline constexpr double a71 = 3.7109375e-2;
inline constexpr double a74 = 1.70252211019544039314978060272e-1;
inline constexpr double a75 = 6.02165389804559606850219397283e-2;
inline constexpr double a76 = -1.7578125e-2;
inline constexpr double a81 = 3.70920001185047927108779319836e-2;
inline constexpr double a84 = 1.70383925712239993810214054705e-1;
inline constexpr double a85 = 1.07262030446373284651809199168e-1;
inline constexpr double a86 = -1.53194377486244017527936158236e-2;
inline constexpr double a87 = 8.27378916381402288758473766002e-3;
inline constexpr double a91 = 6.24110958716075717114429577812e-1;
inline constexpr double a94 = -3.36089262944694129406857109825e0;
inline constexpr double a95 = -8.68219346841726006818189891453e-1;
inline constexpr double a96 = 2.75920996994467083049415600797e1;
inline constexpr double a97 = 2.01540675504778934086186788979e1;
inline constexpr double a98 = -4.34898841810699588477366255144e1;
inline constexpr double a101 = 4.77662536438264365890433908527e-1;
inline constexpr double a104 = -2.48811461997166764192642586468e0;
inline constexpr double a105 = -5.90290826836842996371446475743e-1;
inline constexpr double a106 = 2.12300514481811942347288949897e1;
inline constexpr double a107 = 1.52792336328824235832596922938e1;
inline constexpr double a108 = -3.32882109689848629194453265587e1;
inline constexpr double a109 = -2.03312017085086261358222928593e-2;
inline constexpr double a111 = -9.3714243008598732571704021658e-1;
inline constexpr double a114 = 5.18637242884406370830023853209e0;
inline constexpr double a115 = 1.09143734899672957818500254654e0;
inline constexpr double a116 = -8.14978701074692612513997267357e0;
inline constexpr double a117 = -1.85200656599969598641566180701e1;
inline constexpr double a118 = 2.27394870993505042818970056734e1;
inline constexpr double a119 = 2.49360555267965238987089396762e0;
inline constexpr double a1110 = -3.0467644718982195003823669022e0;
inline constexpr double a121 = 2.27331014751653820792359768449e0;
inline constexpr double a124 = -1.05344954667372501984066689879e1;
inline constexpr double a125 = -2.00087205822486249909675718444e0;
inline constexpr double a126 = -1.79589318631187989172765950534e1;
inline constexpr double a127 = 2.79488845294199600508499808837e1;
inline constexpr double a128 = -2.85899827713502369474065508674e0;
inline constexpr double a129 = -8.87285693353062954433549289258e0;
inline constexpr double a1210 = 1.23605671757943030647266201528e1;
inline constexpr double a1211 = 6.43392746015763530355970484046e-1;

inline constexpr double b1 = 5.42937341165687622380535766363e-2;
inline constexpr double b6 = 4.45031289275240888144113950566e0;
inline constexpr double b7 = 1.89151789931450038304281599044e0;
inline constexpr double b8 = -5.8012039600105847814672114227e0;
inline constexpr double b9 = 3.1116436695781989440891606237e-1;
inline constexpr double b10 = -1.52160949662516078556178806805e-1;
inline constexpr double b11 = 2.01365400804030348374776537501e-1;
inline constexpr double b12 = 4.47106157277725905176885569043e-2;

// 3rd-order error weights (applied to the 8th-order increment).
inline constexpr double e31 = 0.244094488188976377952755905512e+00;
inline constexpr double e32 = 0.733846688281611857341361741547e+00;
inline constexpr double e33 = 0.220588235294117647058823529412e-01;

// 5th-order error weights.
inline constexpr double e51 = 0.1312004499419488073250102996e-01;
inline constexpr double e56 = -0.1225156446376204440720569753e+01;
inline constexpr double e57 = -0.4957589496572501915214079952e+00;
inline constexpr double e58 = 0.1664377182454986536961530415e+01;
inline constexpr double e59 = -0.3503288487499736816886487290e+00;
inline constexpr double e510 = 0.3341791187130174790297318841e+00;
inline constexpr double e511 = 0.8192320648511571246570742613e-01;
inline constexpr double e512 = -0.2235530786388629525884427845e-01;

}  // namespace dop853

template <int N, class F>
class Dop853 {
public:
    explicit Dop853(F f, OdeOptions opt = {}) : f_(std::move(f)), opt_(opt) {}

    void reset(long double t, const OdeState<N>& y) {
        t_ = t;
        y_ = y;
        f_(t_, y_, k1_);
        ++stats_.n_evals;
        habs_ = opt_.h_init > 0 ? opt_.h_init : 0;
    }

    long double t() const { return t_; }
    const OdeState<N>& y() const { return y_; }
    const OdeState<N>& dydt() const { return k1_; }
    const OdeStats& stats() const { return stats_; }
    const OdeOptions& options() const { return opt_; }

    // Take one accepted step toward t_end (never beyond).  After the call the
    // stepper sits at span.t1; when the remaining interval fits in one step,
    // t() lands on t_end exactly.
    OdeStepSpan<N> step(long double t_end) {
        if (t_end == t_) throw std::invalid_argument("ode step: zero interval");
        const long double dir = t_end > t_ ? 1 : -1;
        if (habs_ == 0) habs_ = initial_step(dir, t_end);
        bool rejected = false;
        for (;;) {
            if (stats_.n_accepted + stats_.n_rejected >= opt_.max_steps)
                throw std::runtime_error("ode step: step budget exhausted");
            long double h = dir * habs_;
            bool last = false;
            // Stretch by up to 1% to absorb the remaining interval in one
            // step; otherwise roundoff can leave a sliver below the underflow
            // guard when a natural step lands epsilon-short of t_end.
            if (dir * (t_ + 1.01L * h - t_end) >= 0) {
                h = t_end - t_;
                last = true;
            }
            if (std::abs(h) <= std::abs(t_) * 1e-18L)
                throw std::runtime_error("ode step: step size underflow");

            OdeState<N> y_new, f_new;
            const long double err = attempt(h, y_new);

            constexpr double kAlpha = 0.125;  // 1/8 for an 8th order method
            constexpr double kSafe = 0.9;
            constexpr double kMinScale = 1.0 / 3.0;
            constexpr double kMaxScale = 6.0;
            if (err <= 1) {
                double scale = err == 0 ? kMaxScale
                                        : kSafe * std::pow((double)err, -kAlpha);
                scale = std::min(std::max(scale, kMinScale), kMaxScale);
                if (rejected) scale = std::min(scale, 1.0);
                const long double t_new = last ? t_end : t_ + h;
                f_(t_new, y_new, f_new);
                ++stats_.n_evals;
                ++stats_.n_accepted;
                OdeStepSpan<N> span{t_, t_new, y_, y_new, k1_, f_new};
                t_ = t_new;
                y_ = y_new;
                k1_ = f_new;
                // A step truncated to hit t_end says nothing about the natural
                // step size, so only untruncated steps update it.
                if (!last) habs_ = std::abs(h) * scale;
                if (opt_.h_max > 0) habs_ = std::min(habs_, (long double)opt_.h_max);
                return span;
            }
            double scale = kSafe * std::pow((double)err, -kAlpha);
            scale = std::max(scale, kMinScale);
            habs_ = std::abs(h) * scale;
            rejected = true;
            ++stats_.n_rejected;
        }
    }

    void advance_to(long double t_end) {
        while (t_ != t_end) step(t_end);
    }

private:
    // One trial step of size h from (t_, y_); fills y_new and returns the
    // scaled error estimate of the 8(5,3) pair.
    long double attempt(long double h, OdeState<N>& y_new) {
        namespace d = dop853;
        OdeState<N> w, k2, k3, k4, k5, k6, k7, k8, k9, k10, k11, k12;
        const OdeState<N>& k1 = k1_;
        auto stage = [&](long double c, const OdeState<N>& arg, OdeState<N>& out) {
            f_(t_ + c * h, arg, out);
            ++stats_.n_evals;
        };
        for (int i = 0; i < N; ++i) w[i] = y_[i] + h * (d::a21 * k1[i]);
        stage(d::c2, w, k2);
        for (int i = 0; i < N; ++i)
            w[i] = y_[i] + h * (d::a31 * k1[i] + d::a32 * k2[i]);
        stage(d::c3, w, k3);
        for (int i = 0; i < N; ++i)
            w[i] = y_[i] + h * (d::a41 * k1[i] + d::a43 * k3[i]);
        stage(d::c4, w, k4);
        for (int i = 0; i < N; ++i)
            w[i] = y_[i] + h * (d::a51 * k1[i] + d::a53 * k3[i] + d::a54 * k4[i]);
        stage(d::c5, w, k5);
        for (int i = 0; i < N; ++i)
            w[i] = y_[i] + h * (d::a61 * k1[i] + d::a64 * k4[i] + d::a65 * k5[i]);
        stage(d::c6, w, k6);
        for (int i = 0; i < N; ++i)
            w[i] = y_[i] + h * (d::a71 * k1[i] + d::a74 * k4[i] + d::a75 * k5[i] +
                                d::a76 * k6[i]);
        stage(d::c7, w, k7);
        for (int i = 0; i < N; ++i)
            w[i] = y_[i] + h * (d::a81 * k1[i] + d::a84 * k4[i] + d::a85 * k5[i] +
                                d::a86 * k6[i] + d::a87 * k7[i]);
        stage(d::c8, w, k8);
        for (int i = 0; i < N; ++i)
            w[i] = y_[i] + h * (d::a91 * k1[i] + d::a94 * k4[i] + d::a95 * k5[i] +
                                d::a96 * k6[i] + d::a97 * k7[i] + d::a98 * k8[i]);
        stage(d::c9, w, k9);
        for (int i = 0; i < N; ++i)
            w[i] = y_[i] + h * (d::a101 * k1[i] + d::a104 * k4[i] + d::a105 * k5[i] +
                                d::a106 * k6[i] + d::a107 * k7[i] + d::a108 * k8[i] +
                                d::a109 * k9[i]);
        stage(d::c10, w, k10);
        for (int i = 0; i < N; ++i)
            w[i] = y_[i] + h * (d::a111 * k1[i] + d::a114 * k4[i] + d::a115 * k5[i] +
                                d::a116 * k6[i] + d::a117 * k7[i] + d::a118 * k8[i] +
                                d::a119 * k9[i] + d::a1110 * k10[i]);
        stage(d::c11, w, k11);
        for (int i = 0; i < N; ++i)
            w[i] = y_[i] + h * (d::a121 * k1[i] + d::a124 * k4[i] + d::a125 * k5[i] +
                                d::a126 * k6[i] + d::a127 * k7[i] + d::a128 * k8[i] +
                                d::a129 * k9[i] + d::a1210 * k10[i] +
                                d::a1211 * k11[i]);
        stage(1.0, w, k12);

        long double err3 = 0, err5 = 0;
        for (int i = 0; i < N; ++i) {
            const long double inc = d::b1 * k1[i] + d::b6 * k6[i] + d::b7 * k7[i] +
                                    d::b8 * k8[i] + d::b9 * k9[i] + d::b10 * k10[i] +
                                    d::b11 * k11[i] + d::b12 * k12[i];
            y_new[i] = y_[i] + h * inc;
            const long double sc =
                opt_.atol + opt_.rtol * std::max(std::abs(y_[i]), std::abs(y_new[i]));
            const long double e3 =
                inc - d::e31 * k1[i] - d::e32 * k9[i] - d::e33 * k12[i];
            const long double e5 = d::e51 * k1[i] + d::e56 * k6[i] + d::e57 * k7[i] +
                                   d::e58 * k8[i] + d::e59 * k9[i] +
                                   d::e510 * k10[i] + d::e511 * k11[i] +
                                   d::e512 * k12[i];
            err3 += (e3 / sc) * (e3 / sc);
            err5 += (e5 / sc) * (e5 / sc);
        }
        const long double deno = err5 + 0.01L * err3;
        if (deno <= 0) return 0;
        return std::abs(h) * err5 * std::sqrt(1 / (N * deno));
    }

    // Step-size guess from the derivative magnitudes (standard h_init rule).
    long double initial_step(long double dir, long double t_end) {
        long double d0 = 0, d1 = 0;
        for (int i = 0; i < N; ++i) {
            const long double sc = opt_.atol + opt_.rtol * std::abs(y_[i]);
            d0 += (y_[i] / sc) * (y_[i] / sc);
            d1 += (k1_[i] / sc) * (k1_[i] / sc);
        }
        long double h0 = (d0 < 1e-10L || d1 < 1e-10L)
                             ? 1e-6L
                             : 0.01L * std::sqrt(d0 / d1);
        h0 = std::min(h0, std::abs(t_end - t_));
        OdeState<N> y1, f1;
        for (int i = 0; i < N; ++i) y1[i] = y_[i] + dir * h0 * k1_[i];
        f_(t_ + dir * h0, y1, f1);
        ++stats_.n_evals;
        long double d2 = 0;
        for (int i = 0; i < N; ++i) {
            const long double sc = opt_.atol + opt_.rtol * std::abs(y_[i]);
            d2 += ((f1[i] - k1_[i]) / sc) * ((f1[i] - k1_[i]) / sc);
        }
        d2 = std::sqrt(d2) / h0;
        const long double dm = std::max(std::sqrt(d1), d2);
        long double h1 = dm <= 1e-15L ? std::max(1e-6L, h0 * 1e-3L)
                                      : std::pow(0.01L / dm, 1.0L / 8.0L);
        long double h = std::min(100 * h0, h1);
        h = std::min(h, std::abs(t_end - t_));
        if (opt_.h_max > 0) h = std::min(h, (long double)opt_.h_max);
        return h;
    }

    F f_;
    OdeOptions opt_;
    long double t_ = 0;
    OdeState<N> y_{};
    OdeState<N> k1_{};
    long double habs_ = 0;
    OdeStats stats_{};
};

// Locates the time in [span.t0, span.t1] where component `comp` crosses
// `target`, assuming span.y0/y1 straddle it.  The Hermite interpolant only
// seeds the search; the returned state is obtained by integrating the true
// flow from the start of the span and polishing t with Newton steps, so the
// result lies on the trajectory to integrator accuracy.
template <int N, class F>
std::pair<long double, OdeState<N>> locate_crossing(F f, const OdeOptions& opt,
                                                    const OdeStepSpan<N>& span,
                                                    int comp, long double target,
                                                    double tol = 1e-12) {
    // bisection on the interpolant
    long double lo = span.t0, hi = span.t1;
    const bool rising = span.y1[comp] > span.y0[comp];
    for (int it = 0; it < 60; ++it) {
        const long double mid = (lo + hi) / 2;
        const long double g = span.eval(mid)[comp] - target;
        if ((g > 0) == rising)
            hi = mid;
        else
            lo = mid;
    }
    long double t_guess = (lo + hi) / 2;

    Dop853<N, F> stepper(f, opt);
    stepper.reset(span.t0, span.y0);
    if (t_guess != span.t0) stepper.advance_to(t_guess);
    const long double width = span.t1 - span.t0;
    for (int it = 0; it < 30; ++it) {
        const long double g = stepper.y()[comp] - target;
        if (std::abs(g) <= tol) break;
        const long double gdot = stepper.dydt()[comp];
        if (gdot == 0) throw std::runtime_error("locate_crossing: stationary crossing");
        long double dt = -g / gdot;
        const long double cap = std::abs(width);
        if (std::abs(dt) > cap) dt = dt > 0 ? cap : -cap;
        stepper.advance_to(stepper.t() + dt);
    }
    if (std::abs(stepper.y()[comp] - target) > tol)
        throw std::runtime_error("locate_crossing: no convergence");
    return {stepper.t(), stepper.y()};
}

}  // namespace ringtrio
