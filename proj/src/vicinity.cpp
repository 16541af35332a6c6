#include "constel/vicinity.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

#include "constel/synth.hpp"

namespace constel {

std::vector<Vicinity> extract_vicinities(const Constellation& c, double rho) {
    if (rho <= 0.0) throw std::invalid_argument("rho must be positive");
    std::vector<Vicinity> out;
    out.reserve(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        const Minutia& center = c.minutiae[i];
        Vicinity v;
        v.center = center;
        v.order = 1;
        v.source_index = i;
        v.rho = rho;
        for (std::size_t j = 0; j < c.size(); ++j)
            if (dist(c.minutiae[j].pos(), center.pos()) < rho)
                v.members.push_back(to_local_frame(center, c.minutiae[j]));
        out.push_back(std::move(v));
    }
    return out;
}

VicinityScore vicinity_score(const Vicinity& a, const Vicinity& b, const ScoreParams& p) {
    if (a.order != b.order) throw std::invalid_argument("vicinity orders differ");
    if (a.members.empty() || b.members.empty())
        throw std::invalid_argument("vicinity has no members");

    CostMatrix m = make_cost_matrix(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            m.at(i, j) = minutia_score(a.members[i], b.members[j], p);

    const Assignment full = solve(pad_to_square(m));

    VicinityScore sc;
    std::vector<char> row_hit(a.size(), 0), col_hit(b.size(), 0);
    for (const auto& [r, c] : full.pairs) {
        const double s = m.at(r, c);
        if (s > p.s_max) continue;  // gated: dissolves into both NAR and NAS
        sc.assignment.pairs.emplace_back(r, c);
        sc.assignment.total_cost += s;
        row_hit[r] = 1;
        col_hit[c] = 1;
    }
    for (std::size_t r = 0; r < a.size(); ++r)
        if (!row_hit[r]) sc.assignment.unassigned_rows.push_back(r);
    for (std::size_t c = 0; c < b.size(); ++c)
        if (!col_hit[c]) sc.assignment.unassigned_cols.push_back(c);
    sc.nar = sc.assignment.unassigned_rows.size();
    sc.nas = sc.assignment.unassigned_cols.size();
    sc.value = sc.assignment.total_cost +
               static_cast<double>(sc.nar + sc.nas) * p.k_na;
    return sc;
}

namespace {

struct Fnv1a {
    std::uint64_t h = 1469598103934665603ull;

    void byte(std::uint8_t b) {
        h ^= b;
        h *= 1099511628211ull;
    }
    void word(std::uint64_t w) {
        for (int i = 0; i < 8; ++i) byte(static_cast<std::uint8_t>(w >> (8 * i)));
    }
    void real(double d) {
        std::uint64_t b;
        std::memcpy(&b, &d, sizeof b);
        word(b);
    }
};

}  // namespace

std::uint64_t db_content_hash(const RepresentativeDB& db) {
    // source_index is excluded: it carries provenance, not content, and must
    // not change the id across save/load.
    Fnv1a f;
    f.word(static_cast<std::uint64_t>(db.order));
    f.real(db.rho);
    f.word(db.l_min);
    f.word(db.l_max);
    f.real(db.d_min);
    f.real(db.params.sigma_x);
    f.real(db.params.sigma_theta);
    f.real(db.params.k_na);
    f.real(db.params.s_max);
    f.word(db.reps.size());
    for (const Vicinity& r : db.reps) {
        f.real(r.center.x);
        f.real(r.center.y);
        f.real(r.center.theta);
        f.word(r.members.size());
        for (const Minutia& m : r.members) {
            f.real(m.x);
            f.real(m.y);
            f.real(m.theta);
        }
    }
    return f.h;
}

void refresh_id(RepresentativeDB& db) { db.id = db_content_hash(db); }

RepresentativeDB build_representative_db(std::vector<Vicinity> candidates, int order,
                                         double rho, std::size_t l_min, std::size_t l_max,
                                         double d_min, std::size_t n_target,
                                         const ScoreParams& p, std::uint64_t rng_seed) {
    if (n_target == 0) throw std::invalid_argument("n_target must be at least 1");
    synth::Rng rng(rng_seed);
    rng.shuffle(candidates);

    RepresentativeDB db;
    db.order = order;
    db.rho = rho;
    db.l_min = l_min;
    db.l_max = l_max;
    db.d_min = d_min;
    db.params = p;
    for (Vicinity& cand : candidates) {
        if (db.reps.size() == n_target) break;
        if (cand.size() < l_min || cand.size() > l_max) continue;
        bool distinct = true;
        for (const Vicinity& rep : db.reps) {
            if (vicinity_score(cand, rep, p).value <= d_min) {
                distinct = false;
                break;
            }
        }
        if (distinct) db.reps.push_back(std::move(cand));
    }
    if (db.reps.size() < n_target)
        throw std::runtime_error("representative pool exhausted: kept " +
                                 std::to_string(db.reps.size()) + " of " +
                                 std::to_string(n_target));
    refresh_id(db);
    return db;
}

RepresentativeDB build_representative_db(const std::vector<Constellation>& pool,
                                         double rho, std::size_t l_min, std::size_t l_max,
                                         double d_min, std::size_t n_target,
                                         const ScoreParams& p, std::uint64_t rng_seed) {
    std::vector<Vicinity> cands;
    for (const Constellation& c : pool) {
        std::vector<Vicinity> vs = extract_vicinities(c, rho);
        cands.insert(cands.end(), std::make_move_iterator(vs.begin()),
                     std::make_move_iterator(vs.end()));
    }
    return build_representative_db(std::move(cands), 1, rho, l_min, l_max, d_min, n_target,
                                   p, rng_seed);
}

namespace {

std::uint8_t feature_bit(const std::vector<Vicinity>& vics, const Vicinity& rep,
                         const ScoreParams& p, double t) {
    for (const Vicinity& v : vics)
        if (vicinity_score(v, rep, p).value < t) return 1;
    return 0;
}

}  // namespace

FeatureVector compute_feature_vector(const std::vector<Vicinity>& vics, const RepresentativeDB& db,
                                     double t, bool parallel) {
    if (t <= 0.0) throw std::invalid_argument("threshold must be positive");
    for (const Vicinity& v : vics)
        if (v.order != db.order) throw std::invalid_argument("vicinity order does not match DB order");

    FeatureVector fv;
    fv.threshold = t;
    fv.db_id = db.id;
    fv.bits.assign(db.size(), 0);
    const auto n = static_cast<std::ptrdiff_t>(db.size());
    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t i = 0; i < n; ++i)
            fv.bits[i] = feature_bit(vics, db.reps[i], db.params, t);
    } else {
        for (std::ptrdiff_t i = 0; i < n; ++i)
            fv.bits[i] = feature_bit(vics, db.reps[i], db.params, t);
    }
    return fv;
}

FeatureVector compute_feature_vector(const Constellation& c, const RepresentativeDB& db, double t) {
    return compute_feature_vector(extract_vicinities(c, db.rho), db, t, true);
}

FeatureVector compute_feature_vector_serial(const Constellation& c, const RepresentativeDB& db,
                                            double t) {
    return compute_feature_vector(extract_vicinities(c, db.rho), db, t, false);
}

std::size_t hamming(const FeatureVector& u, const FeatureVector& v) {
    if (u.db_id != v.db_id || u.threshold != v.threshold || u.size() != v.size())
        throw std::invalid_argument("incomparable vectors");
    std::size_t d = 0;
    for (std::size_t i = 0; i < u.size(); ++i) d += u.bits[i] != v.bits[i];
    return d;
}

std::string feature_vector_hex(const FeatureVector& v) {
    static const char kDigits[] = "0123456789abcdef";
    std::string out;
    out.reserve((v.size() + 3) / 4);
    for (std::size_t i = 0; i < v.size(); i += 4) {
        int nib = 0;
        for (std::size_t b = 0; b < 4 && i + b < v.size(); ++b)
            if (v.bits[i + b]) nib |= 1 << (3 - static_cast<int>(b));
        out.push_back(kDigits[nib]);
    }
    return out;
}

std::vector<std::uint8_t> bits_from_hex(const std::string& hex, std::size_t nbits) {
    if (hex.size() != (nbits + 3) / 4)
        throw std::invalid_argument("hex length does not match bit count");
    std::vector<std::uint8_t> bits(nbits, 0);
    for (std::size_t d = 0; d < hex.size(); ++d) {
        const char ch = hex[d];
        int nib;
        if (ch >= '0' && ch <= '9') nib = ch - '0';
        else if (ch >= 'a' && ch <= 'f') nib = ch - 'a' + 10;
        else if (ch >= 'A' && ch <= 'F') nib = ch - 'A' + 10;
        else throw std::invalid_argument("invalid hex digit");
        for (std::size_t b = 0; b < 4; ++b) {
            const std::size_t i = 4 * d + b;
            const bool set = nib & (1 << (3 - static_cast<int>(b)));
            if (i < nbits) bits[i] = set ? 1 : 0;
            else if (set) throw std::invalid_argument("nonzero padding bits in hex");
        }
    }
    return bits;
}

}  // namespace constel
