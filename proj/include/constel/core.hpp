// Core domain types for oriented-point constellations: minutiae, rigid
// transforms, local coordinate frames and the per-minutia matching score.
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace constel {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Coincident-minutia rejection tolerance (px) at ingestion.
inline constexpr double kDupEpsilon = 1e-6;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
inline Vec2& operator+=(Vec2& a, Vec2 b) { a.x += b.x; a.y += b.y; return a; }

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double norm_sq(Vec2 a) { return a.x * a.x + a.y * a.y; }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }

/// Reduce an angle to the canonical range [0, 2*pi).
double canonical_angle(double a);

/// Signed minimal angular difference a - b, in (-pi, pi].
double angle_diff(double a, double b);

/// An oriented feature point. theta is kept canonical in [0, 2*pi).
struct Minutia {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    Minutia() = default;
    Minutia(double x_, double y_, double theta_)
        : x(x_), y(y_), theta(canonical_angle(theta_)) {}

    Vec2 pos() const { return {x, y}; }
};

/// Rotation by theta about the origin followed by translation by (dx, dy).
struct RigidTransform {
    double dx = 0.0;
    double dy = 0.0;
    double theta = 0.0;

    Vec2 apply(Vec2 p) const {
        const double c = std::cos(theta), s = std::sin(theta);
        return {c * p.x - s * p.y + dx, s * p.x + c * p.y + dy};
    }

    RigidTransform inverse() const;

    /// Composition: result.apply(p) == second.apply(this->apply(p)).
    RigidTransform then(const RigidTransform& second) const;
};

inline Vec2 apply_rigid(Vec2 p, const RigidTransform& t) { return t.apply(p); }

inline Minutia apply_rigid(const Minutia& m, const RigidTransform& t) {
    const Vec2 p = t.apply(m.pos());
    return {p.x, p.y, m.theta + t.theta};
}

/// Re-express m in the local frame anchored at center: origin at the center's
/// position, x-axis along the center's orientation.
Minutia to_local_frame(const Minutia& center, const Minutia& m);

/// Exact inverse of to_local_frame with the same center.
Minutia from_local_frame(const Minutia& center, const Minutia& m_local);

/// Weights and penalties of the per-minutia score and its aggregation.
struct ScoreParams {
    double sigma_x = 5.0;       ///< position variance (px)
    double sigma_theta = 0.3;   ///< orientation variance (rad)
    double k_na = 75.0 * 75.0 / 4.0;        ///< non-association penalty
    double s_max = 3.0 * 75.0 * 75.0 / 4.0; ///< association gating cap; +inf disables

    /// Weight of the squared angle term, the sigma_x / sigma_theta ratio.
    double theta_weight() const { return sigma_x / sigma_theta; }
};

/// ScoreParams with k_na = rho^2/4 and s_max = 3*rho^2/4 tied to the
/// extraction radius.
ScoreParams default_score_params(double rho);

/// Squared position distance plus the weighted squared wrapped orientation
/// difference. Both minutiae must be expressed in the same frame.
double minutia_score(const Minutia& a, const Minutia& b, const ScoreParams& p);

struct Constellation {
    std::string id;
    std::vector<Minutia> minutiae;

    std::size_t size() const { return minutiae.size(); }
    bool empty() const { return minutiae.empty(); }
};

/// Builds a constellation, rejecting minutiae that coincide in position
/// within kDupEpsilon. Throws std::invalid_argument naming the offending pair.
Constellation make_constellation(std::string id, std::vector<Minutia> minutiae);

Constellation apply_rigid(const Constellation& c, const RigidTransform& t);

}  // namespace constel
