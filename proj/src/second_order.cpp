#include "constel/second_order.hpp"

#include <algorithm>
#include <stdexcept>

namespace constel {

void validate(const SecondOrderParams& p) {
    if (p.rho1 <= 0.0) throw std::invalid_argument("rho1 must be positive");
    if (p.rho2 <= p.rho1) throw std::invalid_argument("rho2 must exceed rho1");
    if (p.l_min > p.l_max) throw std::invalid_argument("l_min must not exceed l_max");
}

std::vector<Vicinity> filter_significant(std::vector<Vicinity> vs,
                                         std::size_t l_min, std::size_t l_max) {
    std::erase_if(vs, [&](const Vicinity& v) {
        return v.neighbor_count() < l_min || v.neighbor_count() > l_max;
    });
    std::sort(vs.begin(), vs.end(), [](const Vicinity& a, const Vicinity& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a.source_index < b.source_index;
    });

    std::vector<Vicinity> kept;
    for (Vicinity& v : vs) {
        const bool inside = std::any_of(kept.begin(), kept.end(), [&](const Vicinity& k) {
            return dist(v.center.pos(), k.center.pos()) < k.rho;
        });
        if (!inside) kept.push_back(std::move(v));
    }
    std::sort(kept.begin(), kept.end(), [](const Vicinity& a, const Vicinity& b) {
        return a.source_index < b.source_index;
    });
    return kept;
}

Minutia barycenter(const Vicinity& v) {
    if (v.members.empty()) throw std::invalid_argument("empty vicinity");
    Vec2 mean{};
    for (const Minutia& m : v.members) mean += m.pos();
    mean = (1.0 / static_cast<double>(v.size())) * mean;
    return from_local_frame(v.center, {mean.x, mean.y, 0.0});
}

std::vector<Vicinity> extract_second_order(const Constellation& c, const SecondOrderParams& p) {
    validate(p);
    const std::vector<Vicinity> sig =
        filter_significant(extract_vicinities(c, p.rho1), p.l_min, p.l_max);

    Constellation derived;
    derived.id = c.id;
    derived.minutiae.reserve(sig.size());
    for (const Vicinity& v : sig) derived.minutiae.push_back(barycenter(v));

    std::vector<Vicinity> out = extract_vicinities(derived, p.rho2);
    for (Vicinity& v : out) v.order = 2;
    return out;
}

TwoPassResult match_two_pass(const Constellation& candidate, const Constellation& templ,
                             const RepresentativeDB& db1, const RepresentativeDB& db2,
                             const SecondOrderParams& p, double t_score1, double t_score2) {
    validate(p);
    if (db1.order != 1) throw std::invalid_argument("db1 must hold order-1 vicinities");
    if (db2.order != 2) throw std::invalid_argument("db2 must hold order-2 vicinities");
    if (db1.rho != p.rho1 || db2.rho != p.rho2)
        throw std::invalid_argument("DB radii do not match the second-order params");

    TwoPassResult r;
    r.hamming1 = hamming(compute_feature_vector(candidate, db1, t_score1),
                         compute_feature_vector(templ, db1, t_score1));
    r.hamming2 = hamming(compute_feature_vector(extract_second_order(candidate, p), db2, t_score2),
                         compute_feature_vector(extract_second_order(templ, p), db2, t_score2));
    r.match = r.hamming1 <= p.t1 && r.hamming2 <= p.t2;
    return r;
}

}  // namespace constel
