// Classical subcommands: trajectory export, the periodic-orbit census with
// period-vs-energy tables, and the surface of section with the regular
// fraction summary.
#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "ringtrio/dynamics.hpp"
#include "ringtrio/orbits.hpp"
#include "ringtrio/poincare.hpp"

namespace ringtrio::cli {

namespace {

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok.erase(0, tok.find_first_not_of(" \t"));
        tok.erase(tok.find_last_not_of(" \t") + 1);
        if (!tok.empty()) out.push_back(tok);
    }
    return out;
}

nlohmann::json orbit_record(const PeriodicOrbit& o) {
    nlohmann::json rec;
    rec["family"] = family_name(o.family);
    rec["energy"] = o.energy;
    rec["period"] = o.period;
    rec["trace"] = o.trace;
    rec["stable"] = o.stable;
    rec["lyapunov"] = o.lyapunov;
    rec["residual"] = o.residual;
    rec["initial_condition"] = {o.start.x, o.start.y, o.start.px, o.start.py};
    return rec;
}

const char* class_name(OrbitClass k) {
    switch (k) {
        case OrbitClass::Regular: return "regular";
        case OrbitClass::Chaotic: return "chaotic";
        default: return "indeterminate";
    }
}

}  // namespace

std::vector<KeySpec> trajectory_schema() {
    return {
        {"x", "0", "initial x"},
        {"y", "0", "initial y"},
        {"px", "0", "initial px"},
        {"py", "5.2915026221291814", "initial py (default puts eps = 7)"},
        {"t_final", "20", "integration time"},
        {"dt_sample", "0.01", "sampling interval"},
        {"rtol", "1e-13", "integrator relative tolerance"},
        {"out", "out/trajectory", "output directory"},
        {"seed", "1", "recorded in artifacts (no randomness here)"},
    };
}

void run_trajectory(const Config& cfg) {
    OdeOptions ode = default_ode_options();
    ode.rtol = ode.atol = cfg.positive("rtol");
    const double t_final = cfg.positive("t_final");
    const double dt = cfg.positive("dt_sample");
    const PhasePoint z0{cfg.num("x"), cfg.num("y"), cfg.num("px"), cfg.num("py")};
    const Trajectory tr = integrate(z0, t_final, dt, ode);

    std::string csv = csv_stamp(cfg) + "t,x,y,px,py,E\n";
    for (const auto& s : tr.samples)
        csv += fmt(s.t) + "," + fmt(s.z.x) + "," + fmt(s.z.y) + "," +
               fmt(s.z.px) + "," + fmt(s.z.py) + "," + fmt(energy(s.z)) + "\n";

    nlohmann::json extra;
    extra["energy"] = tr.energy0;
    extra["max_energy_drift"] = tr.max_energy_drift;
    extra["n_samples"] = tr.samples.size();
    write_artifacts("trajectory", cfg, {{"trajectory.csv", csv}}, extra);
}

std::vector<KeySpec> orbits_schema() {
    return {
        {"energy", "7", "census energy"},
        {"energy_min", "1", "period table: lowest energy"},
        {"energy_max", "10", "period table: highest energy"},
        {"energy_steps", "10", "period table: number of grid energies"},
        {"families", "A,C", "period table families (subset of A,B,C)"},
        {"grid", "40", "census section-scan resolution"},
        {"rtol", "1e-13", "integrator relative tolerance"},
        {"out", "out/orbits", "output directory"},
        {"seed", "1", "recorded in artifacts (no randomness here)"},
    };
}

void run_orbits(const Config& cfg) {
    ShootOptions opt;
    opt.ode.rtol = opt.ode.atol = cfg.positive("rtol");
    const double eps = cfg.positive("energy");
    const double emin = cfg.positive("energy_min");
    const double emax = cfg.positive("energy_max");
    const int steps = cfg.integer("energy_steps");
    if (emax <= emin) throw ConfigError("energy_max must exceed energy_min");
    if (steps < 2) throw ConfigError("energy_steps must be at least 2");

    // census at the requested energy: the in-plane libration from quadrature
    // plus every transversal fixed point of the section scan
    std::vector<PeriodicOrbit> census;
    census.push_back(orbit_A_quadrature(eps, opt));
    for (auto& o : discover_section_orbits(eps, cfg.integer("grid"), opt))
        census.push_back(std::move(o));
    std::sort(census.begin(), census.end(),
              [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
                  return family_name(a.family) < family_name(b.family);
              });
    nlohmann::json records = nlohmann::json::array();
    for (const auto& o : census) records.push_back(orbit_record(o));
    nlohmann::json doc;
    doc["config_hash"] = cfg.hash_hex();
    doc["seed"] = cfg.u64("seed");
    doc["energy"] = eps;
    doc["orbits"] = records;

    // period tables over [energy_min, energy_max]
    std::string csv = csv_stamp(cfg) + "family,energy,period,trace,stable,lyapunov\n";
    for (const auto& fam : split_list(cfg.str("families"))) {
        std::vector<PeriodicOrbit> branch;
        if (fam == "A") {
            branch = continue_family(orbit_A_quadrature(0.5 * (emin + emax), opt),
                                     emin, emax, steps, opt);
        } else if (fam == "C") {
            const auto seed = find_periodic(seed_C(0.05, true), 0.05, Family::Cp, opt);
            branch = continue_family(seed, emin, emax, steps, opt);
        } else if (fam == "B") {
            const PeriodicOrbit* b = nullptr;
            for (const auto& o : census)
                if (o.family == Family::B1 || o.family == Family::B2 ||
                    o.family == Family::B3) {
                    b = &o;
                    break;
                }
            if (!b)
                throw std::runtime_error(
                    "no family-B orbit in the census to seed the period table");
            branch = continue_family(*b, emin, emax, steps, opt);
        } else {
            throw ConfigError("unknown family in 'families': " + fam);
        }
        for (const auto& o : branch)
            csv += fam + "," + fmt(o.energy) + "," + fmt(o.period) + "," +
                   fmt(o.trace) + "," + (o.stable ? "1" : "0") + "," +
                   fmt(o.lyapunov) + "\n";
    }

    nlohmann::json extra;
    extra["census_size"] = census.size();
    write_artifacts("orbits", cfg,
                    {{"orbits.json", doc.dump(2) + "\n"}, {"periods.csv", csv}},
                    extra);
}

std::vector<KeySpec> sos_schema() {
    return {
        {"energy", "7", "section energy"},
        {"starts", "24", "number of sampled initial conditions"},
        {"crossings", "600", "crossings collected per start (>= 500)"},
        {"seed", "1", "sampling seed"},
        {"rtol", "1e-10", "integrator relative tolerance"},
        {"out", "out/sos", "output directory"},
    };
}

void run_sos(const Config& cfg) {
    const double eps = cfg.positive("energy");
    const int starts = cfg.integer("starts");
    const int crossings = cfg.integer("crossings");
    if (starts < 1) throw ConfigError("starts must be at least 1");
    if (crossings < 500)
        throw ConfigError("crossings must be at least 500 (classification needs it)");
    ClassifyOptions copt;
    copt.n_crossings = crossings;
    copt.ode.rtol = copt.ode.atol = cfg.positive("rtol");

    // uniform sampling over the allowed (y, py) section rectangle, rejecting
    // energetically forbidden draws; the same measure as the regular-fraction
    // estimator so the summary is comparable
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
    const double p_max = 2 * std::sqrt(eps);
    std::mt19937_64 rng(cfg.u64("seed"));
    std::uniform_real_distribution<double> uy(y_lo, y_hi), up(-p_max, p_max);

    std::string csv = csv_stamp(cfg) + "orbit_id,y,py,class\n";
    int n_reg = 0, n_cha = 0, n_ind = 0;
    long total_points = 0;
    for (int id = 0; id < starts; ++id) {
        double y, py, rest;
        do {
            y = uy(rng);
            py = up(rng);
            rest = eps - potential(0, y) - py * py / 4;
        } while (rest <= 1e-12);
        const PhasePoint z0{0, y, 2 * std::sqrt(rest), py};
        const auto recs =
            section_crossings(z0, crossings, copt.t_max, SectionSpec{}, copt.ode);
        std::vector<SectionPoint> pts;
        pts.reserve(recs.size());
        for (const auto& r : recs) pts.push_back({r.z.y, r.z.py, r.t, id});
        OrbitClass kind = OrbitClass::Indeterminate;
        if ((int)pts.size() >= 500) {
            const double lam =
                lyapunov_exponent(z0, copt.t_lyapunov, 10.0, copt.ode);
            kind = classify_points(pts, lam, copt).kind;
        }
        if (kind == OrbitClass::Regular)
            ++n_reg;
        else if (kind == OrbitClass::Chaotic)
            ++n_cha;
        else
            ++n_ind;
        const char* label = class_name(kind);
        for (const auto& p : pts)
            csv += std::to_string(id) + "," + fmt(p.y) + "," + fmt(p.py) + "," +
                   label + "\n";
        total_points += (long)pts.size();
    }

    std::string bcsv = csv_stamp(cfg) + "y,py\n";
    for (const auto& q : section_boundary(eps, 512))
        bcsv += fmt(q[0]) + "," + fmt(q[1]) + "\n";

    const double rho1 = (double)n_reg / starts;
    const double se = std::sqrt(std::max(0.0, rho1 * (1 - rho1) / starts));
    nlohmann::json summary;
    summary["config_hash"] = cfg.hash_hex();
    summary["seed"] = cfg.u64("seed");
    summary["energy"] = eps;
    summary["rho1"] = rho1;
    summary["ci_low"] = std::max(0.0, rho1 - 1.96 * se);
    summary["ci_high"] = std::min(1.0, rho1 + 1.96 * se);
    summary["counts"] = {{"regular", n_reg},
                         {"chaotic", n_cha},
                         {"indeterminate", n_ind},
                         {"total", starts}};
    summary["crossings_per_start"] = crossings;
    summary["total_crossings"] = total_points;

    write_artifacts("sos", cfg,
                    {{"section.csv", csv},
                     {"boundary.csv", bcsv},
                     {"summary.json", summary.dump(2) + "\n"}});
}

}  // namespace ringtrio::cli
