#include "constel/spring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

namespace constel {

std::vector<Vec2> world_points(const RigidBody& body) {
    std::vector<Vec2> out;
    out.reserve(body.local_points.size());
    for (std::size_t i = 0; i < body.local_points.size(); ++i)
        out.push_back(body.world_point(i));
    return out;
}

double diameter(const std::vector<Vec2>& pts) {
    double d = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            d = std::max(d, dist(pts[i], pts[j]));
    return d;
}

namespace {

Vec2 centroid(const std::vector<Vec2>& pts) {
    Vec2 c{};
    for (const Vec2& p : pts) c += p;
    return (1.0 / static_cast<double>(pts.size())) * c;
}

}  // namespace

SpringSystem assemble(const std::vector<Vec2>& a, const std::vector<Vec2>& b,
                      const PhysicsParams& p) {
    if (a.size() != b.size()) throw std::invalid_argument("point sets differ in size");
    if (a.empty()) throw std::invalid_argument("cannot assemble an empty system");
    if (p.k <= 0.0 || p.dt <= 0.0) throw std::invalid_argument("k and dt must be positive");

    const auto l = static_cast<double>(a.size());
    const double dt_bound = 2.0 * std::sqrt(l / (p.k * l));
    if (p.dt >= dt_bound)
        throw std::invalid_argument("dt " + std::to_string(p.dt) +
                                    " violates the stability bound " + std::to_string(dt_bound));

    SpringSystem s;
    const Vec2 c = centroid(a);
    s.body.local_points.reserve(a.size());
    for (const Vec2& pt : a) s.body.local_points.push_back(pt - c);
    s.body.mass = l;
    s.body.inertia = 0.0;
    for (const Vec2& r : s.body.local_points) s.body.inertia += norm_sq(r);
    s.body.pose = {c.x, c.y, 0.0};
    s.anchors = b;
    s.params = p;
    if (s.params.k_v <= 0.0) s.params.k_v = 2.0 * std::sqrt(p.k * l);
    if (s.params.eps_kinetic <= 0.0) {
        std::vector<Vec2> all = a;
        all.insert(all.end(), b.begin(), b.end());
        const double d = diameter(all);
        s.params.eps_kinetic = 1e-9 * p.k * std::max(d * d, 1.0);
    }
    return s;
}

void step(SpringSystem& s) {
    RigidBody& body = s.body;
    const double c = std::cos(body.pose.theta), si = std::sin(body.pose.theta);
    Vec2 force{};
    double torque = 0.0;
    for (std::size_t i = 0; i < body.local_points.size(); ++i) {
        const Vec2 lp = body.local_points[i];
        const Vec2 r = {c * lp.x - si * lp.y, si * lp.x + c * lp.y};
        const Vec2 p = {r.x + body.pose.dx, r.y + body.pose.dy};
        const Vec2 v = {body.lin_vel.x - body.ang_vel * r.y,
                        body.lin_vel.y + body.ang_vel * r.x};
        const Vec2 f = {-s.params.k * (p.x - s.anchors[i].x) - s.params.k_v * v.x,
                        -s.params.k * (p.y - s.anchors[i].y) - s.params.k_v * v.y};
        force += f;
        torque += cross(r, f);
    }
    const double dt = s.params.dt;
    body.lin_vel += (dt / body.mass) * force;
    if (!s.lock_rotation && body.inertia >= 1e-12)
        body.ang_vel += dt * torque / body.inertia;
    else
        body.ang_vel = 0.0;
    body.pose.dx += dt * body.lin_vel.x;
    body.pose.dy += dt * body.lin_vel.y;
    body.pose.theta += dt * body.ang_vel;
}

double potential_energy(const SpringSystem& s) {
    double e = 0.0;
    for (std::size_t i = 0; i < s.anchors.size(); ++i)
        e += norm_sq(s.body.world_point(i) - s.anchors[i]);
    return 0.5 * s.params.k * e;
}

double kinetic_energy(const SpringSystem& s) {
    return 0.5 * s.body.mass * norm_sq(s.body.lin_vel) +
           0.5 * s.body.inertia * s.body.ang_vel * s.body.ang_vel;
}

namespace {

// Analytic optimum of the settled potential: Kabsch when rotation is free,
// centroid alignment at the frozen rotation when it is locked.
double optimum_energy(const SpringSystem& s) {
    if (!s.lock_rotation)
        return 0.5 * s.params.k * kabsch_align(world_points(s.body), s.anchors).residual_sq;
    const double c = std::cos(s.body.pose.theta), si = std::sin(s.body.pose.theta);
    const Vec2 cb = centroid(s.anchors);
    double rsq = 0.0;
    for (std::size_t i = 0; i < s.anchors.size(); ++i) {
        const Vec2 lp = s.body.local_points[i];
        const Vec2 r = {c * lp.x - si * lp.y, si * lp.x + c * lp.y};
        rsq += norm_sq(r - (s.anchors[i] - cb));
    }
    return 0.5 * s.params.k * rsq;
}

}  // namespace

SimResult simulate(SpringSystem s, std::size_t trajectory_stride) {
    const double e_opt = optimum_energy(s);
    SimResult r;
    const auto record = [&](std::size_t n) {
        r.trajectory.push_back({n, potential_energy(s), kinetic_energy(s), s.body.pose});
    };
    if (trajectory_stride > 0) record(0);

    std::size_t n = 0, quiet = 0;
    while (n < s.params.max_steps) {
        step(s);
        ++n;
        if (trajectory_stride > 0 && n % trajectory_stride == 0) record(n);
        if (kinetic_energy(s) < s.params.eps_kinetic) {
            if (++quiet >= s.params.settle_window) {
                r.converged = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }
    if (trajectory_stride > 0 && r.trajectory.back().step != n) record(n);

    r.steps = n;
    r.final_pose = s.body.pose;
    r.e_min = potential_energy(s);
    for (std::size_t i = 0; i < s.anchors.size(); ++i)
        r.sim_phi += dist(s.body.world_point(i), s.anchors[i]);
    // Slack mirrors the equilibrium-optimality tolerance plus an absolute term
    // for near-zero optima, where the settle threshold dominates.
    const std::vector<Vec2> pts = world_points(s.body);
    std::vector<Vec2> all = pts;
    all.insert(all.end(), s.anchors.begin(), s.anchors.end());
    const double d = diameter(all);
    r.energy_suspicious = r.e_min > 1.01 * e_opt + 1e-6 * s.params.k * d * d;
    return r;
}

KabschResult kabsch_align(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("point sets differ in size");
    if (a.empty()) throw std::invalid_argument("cannot align empty point sets");
    const Vec2 ca = centroid(a), cb = centroid(b);
    double sd = 0.0, sc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Vec2 pa = a[i] - ca, pb = b[i] - cb;
        sd += dot(pa, pb);
        sc += cross(pa, pb);
    }
    const double theta = (sd == 0.0 && sc == 0.0) ? 0.0 : std::atan2(sc, sd);
    const double c = std::cos(theta), s = std::sin(theta);
    KabschResult out;
    out.transform = {cb.x - (c * ca.x - s * ca.y), cb.y - (s * ca.x + c * ca.y), theta};
    for (std::size_t i = 0; i < a.size(); ++i)
        out.residual_sq += norm_sq(out.transform.apply(a[i]) - b[i]);
    return out;
}

namespace {

struct Objective {
    const std::vector<Vec2>& a;
    const std::vector<Vec2>& b;
    Vec2 ca, cb;

    // Sum of unsquared distances with the body rotated about its centroid by
    // theta and offset by (ox, oy) from centroid alignment.
    double operator()(double theta, double ox, double oy) const {
        const double c = std::cos(theta), s = std::sin(theta);
        double total = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) {
            const Vec2 p = a[i] - ca;
            const Vec2 q = {c * p.x - s * p.y + cb.x + ox, s * p.x + c * p.y + cb.y + oy};
            total += dist(q, b[i]);
        }
        return total;
    }
};

struct Node {
    double value, theta, ox, oy;
    bool operator<(const Node& o) const {
        return std::tie(value, theta, ox, oy) < std::tie(o.value, o.theta, o.ox, o.oy);
    }
};

Node refine(const Objective& f, Node n, double step_theta, double step_xy, double tol) {
    while (step_theta > tol || step_xy > tol) {
        bool improved = false;
        const Node trials[] = {
            {0.0, n.theta - step_theta, n.ox, n.oy}, {0.0, n.theta + step_theta, n.ox, n.oy},
            {0.0, n.theta, n.ox - step_xy, n.oy},    {0.0, n.theta, n.ox + step_xy, n.oy},
            {0.0, n.theta, n.ox, n.oy - step_xy},    {0.0, n.theta, n.ox, n.oy + step_xy},
        };
        for (Node t : trials) {
            t.value = f(t.theta, t.ox, t.oy);
            if (t.value < n.value) {
                n = t;
                improved = true;
            }
        }
        if (!improved) {
            step_theta *= 0.5;
            step_xy *= 0.5;
        }
    }
    return n;
}

}  // namespace

BruteForceResult brute_force_sim(const std::vector<Vec2>& a, const std::vector<Vec2>& b,
                                 const GridSearchSpec& grid) {
    if (a.size() != b.size()) throw std::invalid_argument("point sets differ in size");
    if (a.empty()) throw std::invalid_argument("cannot align empty point sets");
    if (grid.theta_samples == 0 || grid.trans_samples == 0 || grid.tol <= 0.0)
        throw std::invalid_argument("degenerate grid spec");

    const Objective f{a, b, centroid(a), centroid(b)};
    const double span = grid.trans_span > 0.0
                            ? grid.trans_span
                            : 0.5 * std::max({diameter(a), diameter(b), 1.0});
    const double dtheta = kTwoPi / static_cast<double>(grid.theta_samples);
    const double dxy = grid.trans_samples > 1
                           ? 2.0 * span / static_cast<double>(grid.trans_samples - 1)
                           : span;

    std::vector<Node> nodes;
    nodes.reserve(grid.theta_samples * grid.trans_samples * grid.trans_samples + 1);
    for (std::size_t it = 0; it < grid.theta_samples; ++it) {
        const double th = static_cast<double>(it) * dtheta;
        for (std::size_t ix = 0; ix < grid.trans_samples; ++ix) {
            const double ox = grid.trans_samples > 1
                                  ? -span + static_cast<double>(ix) * dxy
                                  : 0.0;
            for (std::size_t iy = 0; iy < grid.trans_samples; ++iy) {
                const double oy = grid.trans_samples > 1
                                      ? -span + static_cast<double>(iy) * dxy
                                      : 0.0;
                nodes.push_back({f(th, ox, oy), th, ox, oy});
            }
        }
    }
    // The squared-distance optimum is a strong seed for the unsquared one.
    const KabschResult kb = kabsch_align(a, b);
    const Vec2 off = kb.transform.apply(f.ca) - f.cb;
    nodes.push_back({f(kb.transform.theta, off.x, off.y), kb.transform.theta, off.x, off.y});
    std::sort(nodes.begin(), nodes.end());

    Node best = nodes.front();
    const std::size_t tries = std::min<std::size_t>(std::max<std::size_t>(grid.refine_from, 1),
                                                    nodes.size());
    for (std::size_t i = 0; i < tries; ++i) {
        const Node r = refine(f, nodes[i], dtheta, dxy, grid.tol);
        if (r < best) best = r;
    }

    const double c = std::cos(best.theta), s = std::sin(best.theta);
    BruteForceResult out;
    out.value = best.value;
    out.argmin = {f.cb.x + best.ox - (c * f.ca.x - s * f.ca.y),
                  f.cb.y + best.oy - (s * f.ca.x + c * f.ca.y), best.theta};
    return out;
}

double similarity_score(double sim_value, double c) {
    if (c <= 1.0) throw std::invalid_argument("similarity base must exceed 1");
    return std::pow(c, -sim_value);
}

namespace {

double settled_energy(const std::vector<Vec2>& a, const std::vector<Vec2>& b,
                      Vec2 center, double theta, const PhysicsParams& p) {
    const double c = std::cos(theta), s = std::sin(theta);
    std::vector<Vec2> rotated;
    rotated.reserve(a.size());
    for (const Vec2& pt : a) {
        const Vec2 q = pt - center;
        rotated.push_back({c * q.x - s * q.y + center.x, s * q.x + c * q.y + center.y});
    }
    SpringSystem sys = assemble(rotated, b, p);
    sys.lock_rotation = true;
    return simulate(std::move(sys)).e_min;
}

}  // namespace

SweepResult rotation_sweep(const std::vector<Vec2>& a, const std::vector<Vec2>& b,
                           Vec2 center, const SweepParams& sp) {
    if (sp.increment <= 0.0 || sp.refine_stop <= 0.0)
        throw std::invalid_argument("sweep increments must be positive");
    assemble(a, b, sp.physics);  // fail fast before the parallel region

    const auto n = static_cast<std::size_t>(std::ceil(kTwoPi / sp.increment - 1e-9));
    SweepResult r;
    r.curve.resize(n);
    if (sp.parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(n); ++k) {
            const double th = -std::numbers::pi + static_cast<double>(k) * sp.increment;
            r.curve[k] = {th, settled_energy(a, b, center, th, sp.physics)};
        }
    } else {
        for (std::size_t k = 0; k < n; ++k) {
            const double th = -std::numbers::pi + static_cast<double>(k) * sp.increment;
            r.curve[k] = {th, settled_energy(a, b, center, th, sp.physics)};
        }
    }

    std::size_t best = 0;
    for (std::size_t k = 1; k < n; ++k)
        if (r.curve[k].e_settled < r.curve[best].e_settled) best = k;
    r.refined_theta = r.curve[best].theta;
    r.refined_energy = r.curve[best].e_settled;

    double step_th = sp.increment;
    while (step_th > sp.refine_stop) {
        step_th *= 0.5;
        for (const double th : {r.refined_theta - step_th, r.refined_theta + step_th}) {
            const double e = settled_energy(a, b, center, th, sp.physics);
            if (e < r.refined_energy) {
                r.refined_energy = e;
                r.refined_theta = th;
            }
        }
    }
    return r;
}

}  // namespace constel
