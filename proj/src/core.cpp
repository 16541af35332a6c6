#include "constel/core.hpp"

#include <stdexcept>

namespace constel {

double canonical_angle(double a) {
    double r = std::fmod(a, kTwoPi);
    if (r < 0.0) r += kTwoPi;
    if (r >= kTwoPi) r = 0.0;  // fmod rounding can land exactly on 2*pi
    return r;
}

double angle_diff(double a, double b) {
    double d = std::fmod(a - b, kTwoPi);
    if (d <= -std::numbers::pi) d += kTwoPi;
    else if (d > std::numbers::pi) d -= kTwoPi;
    return d;
}

RigidTransform RigidTransform::inverse() const {
    const double c = std::cos(theta), s = std::sin(theta);
    return {-(c * dx + s * dy), -(c * dy - s * dx), -theta};
}

RigidTransform RigidTransform::then(const RigidTransform& second) const {
    const Vec2 t = second.apply({dx, dy});
    return {t.x, t.y, theta + second.theta};
}

Minutia to_local_frame(const Minutia& center, const Minutia& m) {
    const double c = std::cos(center.theta), s = std::sin(center.theta);
    const double px = m.x - center.x, py = m.y - center.y;
    return {c * px + s * py, -s * px + c * py, m.theta - center.theta};
}

Minutia from_local_frame(const Minutia& center, const Minutia& m_local) {
    const double c = std::cos(center.theta), s = std::sin(center.theta);
    return {c * m_local.x - s * m_local.y + center.x,
            s * m_local.x + c * m_local.y + center.y,
            m_local.theta + center.theta};
}

ScoreParams default_score_params(double rho) {
    if (rho <= 0.0) throw std::invalid_argument("rho must be positive");
    ScoreParams p;
    p.k_na = rho * rho / 4.0;
    p.s_max = 3.0 * rho * rho / 4.0;
    return p;
}

double minutia_score(const Minutia& a, const Minutia& b, const ScoreParams& p) {
    const double dx = a.x - b.x, dy = a.y - b.y;
    const double dth = angle_diff(a.theta, b.theta);
    return dx * dx + dy * dy + p.theta_weight() * dth * dth;
}

Constellation make_constellation(std::string id, std::vector<Minutia> minutiae) {
    for (std::size_t i = 0; i < minutiae.size(); ++i) {
        if (!std::isfinite(minutiae[i].x) || !std::isfinite(minutiae[i].y))
            throw std::invalid_argument("constellation '" + id + "': minutia " +
                                        std::to_string(i) + " has a non-finite coordinate");
        for (std::size_t j = i + 1; j < minutiae.size(); ++j)
            if (dist(minutiae[i].pos(), minutiae[j].pos()) < kDupEpsilon)
                throw std::invalid_argument("constellation '" + id + "': minutiae " +
                                            std::to_string(i) + " and " + std::to_string(j) +
                                            " coincide");
    }
    return {std::move(id), std::move(minutiae)};
}

Constellation apply_rigid(const Constellation& c, const RigidTransform& t) {
    Constellation out;
    out.id = c.id;
    out.minutiae.reserve(c.size());
    for (const Minutia& m : c.minutiae) out.minutiae.push_back(apply_rigid(m, t));
    return out;
}

}  // namespace constel
