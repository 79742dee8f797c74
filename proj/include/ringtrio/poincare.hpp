// Surfaces of section, orbit classification, and the classical regular
// fraction of the energy surface.
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ringtrio/dynamics.hpp"

namespace ringtrio {

// A transversal section plane: coordinate `cross_index` passes through
// `level` with the conjugate momentum (`cross_index` + 2) positive.  The
// default is the x = 0, px > 0 plane used throughout.
struct SectionSpec {
    int cross_index = 0;
    double level = 0.0;
};

struct CrossingRecord {
    double t = 0;
    PhasePoint z;
};

struct SectionPoint {
    double y = 0, py = 0, t = 0;
    int orbit_id = 0;
};

enum class OrbitClass { Regular, Chaotic, Indeterminate };

struct ClassifyOptions {
    double lambda_threshold = 0.05;  // on lambda * T_char
    double boxdim_split = 1.5;
    double t_lyapunov = 2000.0;
    int n_crossings = 600;
    double t_max = 40000.0;  // time budget for collecting crossings
    OdeOptions ode;          // lighter tolerance is fine for statistics

    ClassifyOptions() {
        ode = default_ode_options();
        ode.rtol = ode.atol = 1e-10;
    }
};

struct OrbitClassification {
    OrbitClass kind = OrbitClass::Indeterminate;
    double lambda = 0;         // largest Lyapunov exponent
    double t_char = 0;         // mean section return time
    double box_dimension = 0;  // of the section points
    bool lambda_regular = false;
    bool boxdim_regular = false;
};

struct SectionDataset {
    double energy = 0;
    std::vector<SectionPoint> points;
    std::vector<OrbitClassification> orbit_class;  // indexed by orbit_id
    // closed curve p_y^2/4 + v(0, y) = eps bounding the section (also the
    // image of the orbit that lies inside the section plane itself)
    std::vector<std::array<double, 2>> boundary;
};

// Integrates from z0 and returns up to n_crossings transversal crossings of
// the section (time-ordered, each polished onto the trajectory so that the
// crossing coordinate is zero to 1e-10).  Stops early at t_max.
std::vector<CrossingRecord> section_crossings(
    const PhasePoint& z0, int n_crossings, double t_max,
    const SectionSpec& spec = {}, const OdeOptions& opt = default_ode_options());

// Energetically allowed boundary of the x = 0 section at energy eps,
// sampled as n_points (y, py) pairs along the closed curve.
std::vector<std::array<double, 2>> section_boundary(double eps, int n_points);

// Section dataset for one start: its crossings plus classification.
SectionDataset section(const PhasePoint& z0, double eps, int n_crossings,
                       const ClassifyOptions& copt = {});

// Classification from precollected crossings plus a separately measured
// Lyapunov exponent; both votes are recorded.
OrbitClassification classify_points(const std::vector<SectionPoint>& pts,
                                    double lambda,
                                    const ClassifyOptions& copt = {});

// Convenience: collect crossings, measure lambda, classify.
OrbitClassification classify_orbit(const PhasePoint& z0,
                                   const ClassifyOptions& copt = {});

// Box-counting dimension of a section point cloud.
double box_counting_dimension(const std::vector<SectionPoint>& pts);

struct RegularFractionResult {
    double rho1 = 0;           // regular fraction, section-area measure
    double ci_low = 0, ci_high = 0;
    double rho1_liouville = 0;  // return-time (energy-surface volume) weights
    int n_regular = 0, n_chaotic = 0, n_indeterminate = 0, n_total = 0;
};

// Samples (y, py) uniformly in the allowed x = 0 section region, classifies
// each orbit and returns the regular fraction.  rho1 uses the plain section
// area measure; rho1_liouville weights each sample by its mean return time,
// which converts section area into energy-surface volume.
RegularFractionResult regular_fraction(double eps, int n_samples,
                                       std::uint64_t seed,
                                       const ClassifyOptions& copt = {});

// Pairwise coverage overlap of the chaotic samples' section clouds: the
// fraction of occupied boxes of the sparser cloud that the denser cloud also
// occupies.  A single ergodic zone gives values near 1.
double chaotic_overlap(const std::vector<SectionPoint>& a,
                       const std::vector<SectionPoint>& b, int grid = 24);

}  // namespace ringtrio
