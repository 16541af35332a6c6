// The mechanical comparator: a mobile rigid body tied to fixed anchors by
// zero-rest-length springs under viscous drag, plus the closed-form and
// grid-search alignment oracles and the forced-rotation sweep.
#pragma once

#include <cstddef>
#include <vector>

#include "constel/core.hpp"

namespace constel {

struct PhysicsParams {
    double k = 1.0;              ///< spring stiffness
    double k_v = 0.0;            ///< drag coefficient; <= 0 resolves to 2*sqrt(k*l)
    double dt = 0.01;            ///< timestep
    std::size_t max_steps = 200000;
    double eps_kinetic = 0.0;    ///< settle threshold; <= 0 resolves to 1e-9*k*diameter^2
    std::size_t settle_window = 50;  ///< consecutive quiet steps required
};

/// Mobile rigid body: unit point masses joined by weightless rigid bars.
struct RigidBody {
    std::vector<Vec2> local_points;  ///< relative to the centroid, immutable after assembly
    double mass = 0.0;               ///< one unit per point
    double inertia = 0.0;            ///< sum of m_i * |r_i|^2 about the centroid
    RigidTransform pose;             ///< centroid position + rotation
    Vec2 lin_vel{};
    double ang_vel = 0.0;

    Vec2 world_point(std::size_t i) const { return pose.apply(local_points[i]); }
};

std::vector<Vec2> world_points(const RigidBody& body);

/// Body (mobile) + anchors (infinite mass, fixed); spring i links body point
/// i to anchor i.
struct SpringSystem {
    RigidBody body;
    std::vector<Vec2> anchors;
    PhysicsParams params;        ///< resolved: k_v and eps_kinetic are concrete
    bool lock_rotation = false;  ///< translation-only relaxation (rotation sweep)
};

struct TrajectorySample {
    std::size_t step = 0;
    double potential = 0.0;
    double kinetic = 0.0;
    RigidTransform pose;
};

struct SimResult {
    double e_min = 0.0;    ///< settled spring potential energy
    double sim_phi = 0.0;  ///< settled sum of point-to-anchor distances
    std::size_t steps = 0;
    bool converged = false;
    RigidTransform final_pose;
    /// Settled energy measurably above the closed-form optimum; a possible
    /// meta-stable state.
    bool energy_suspicious = false;
    std::vector<TrajectorySample> trajectory;  ///< present when sampling was requested
};

/// Max pairwise distance of a point set (0 for fewer than two points).
double diameter(const std::vector<Vec2>& pts);

/// Builds the system: body centered at its centroid, unit mass per point,
/// inertia from the local offsets, zero initial velocity, pose placing the
/// body at its given coordinates. Throws on size mismatch or when dt violates
/// the stability bound 2*sqrt(m_total / (k*l)).
SpringSystem assemble(const std::vector<Vec2>& a, const std::vector<Vec2>& b,
                      const PhysicsParams& p);

/// One semi-implicit Euler step: Hooke spring force -k*(p_i - b_i) and drag
/// -k_v * v_i per point; velocities update before positions. The angular
/// update is skipped when inertia < 1e-12.
void step(SpringSystem& s);

double potential_energy(const SpringSystem& s);
double kinetic_energy(const SpringSystem& s);

/// Steps until kinetic energy stays below eps_kinetic for settle_window
/// consecutive steps, or max_steps is reached (reported, not an error).
/// trajectory_stride > 0 samples every that many steps (plus first and last).
SimResult simulate(SpringSystem s, std::size_t trajectory_stride = 0);

struct KabschResult {
    RigidTransform transform;
    double residual_sq = 0.0;
};

/// Closed-form rigid transform minimizing the sum of squared point-to-point
/// distances (centroid alignment + optimal rotation); the analytic optimum of
/// the spring energy landscape.
KabschResult kabsch_align(const std::vector<Vec2>& a, const std::vector<Vec2>& b);

struct GridSearchSpec {
    std::size_t theta_samples = 72;
    std::size_t trans_samples = 9;   ///< per translation axis
    double trans_span = 0.0;         ///< half-width around centroid alignment; <= 0 auto
    double tol = 1e-4;               ///< refinement stops once steps fall below this
    std::size_t refine_from = 3;     ///< refine this many best coarse nodes
};

struct BruteForceResult {
    double value = 0.0;          ///< min sum of unsquared distances found
    RigidTransform argmin;
};

/// Deterministic approximation of the minimum total remaining distance over
/// all rigid transforms: coarse grid over (dx, dy, theta) followed by
/// pattern-search refinement with step halving down to grid.tol.
BruteForceResult brute_force_sim(const std::vector<Vec2>& a, const std::vector<Vec2>& b,
                                 const GridSearchSpec& grid = {});

/// c^(-sim_value) in (0, 1]; throws unless c > 1.
double similarity_score(double sim_value, double c);

struct SweepSample {
    double theta = 0.0;
    double e_settled = 0.0;
};

struct SweepResult {
    std::vector<SweepSample> curve;
    double refined_theta = 0.0;
    double refined_energy = 0.0;
};

struct SweepParams {
    double increment = 10.0 * std::numbers::pi / 180.0;
    double refine_stop = 0.5 * std::numbers::pi / 180.0;  ///< halve until below this
    PhysicsParams physics;
    bool parallel = true;   ///< sweep samples are independent simulations
};

/// Rotates a about center by each sampled angle, relaxes with rotation locked
/// and records the settled energy; then refines around the best sample by
/// halving the increment. OpenMP kernel across samples.
SweepResult rotation_sweep(const std::vector<Vec2>& a, const std::vector<Vec2>& b,
                           Vec2 center, const SweepParams& sp = {});

}  // namespace constel
