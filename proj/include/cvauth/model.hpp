/*
 * Protocol model: parameter set, response phase map, and the
 * challenge-response table the verifier measures against.
 *
 * A probe state |sqrt(mu_P) e^{i 2 pi k / N}> keyed by challenge k returns as
 * the response state |sqrt(mu_R) e^{i chi_k}>. The verifier homodynes the
 * response along quadrature angle theta in {0, pi/2}; the honest outcome is
 * Gaussian with mean sqrt(2 mu_R) cos(chi_k - theta) and width
 * sigma = 1 / sqrt(2 eta). A response is accepted into the bin when it falls
 * within delta / 2 of the expected mean, delta = delta_over_sigma * sigma.
 */
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvauth/math.hpp"
#include "cvauth/rng.hpp"

namespace cvauth {

// Verifier quadrature angles; challenges use theta = 0 or theta = pi / 2
// with equal probability.
inline constexpr std::array<double, 2> kThetaGrid = {0.0, kPi / 2.0};

// ── parameters ───────────────────────────────────────────────────────────────

struct ProtocolParams {
    int n_states = 2;               // N, size of the phase alphabet
    double mu_probe = 0.0;          // mean photon number of the probe
    double mu_response = 0.0;       // mean photon number of the response
    double eta = 0.5;               // detection efficiency, in (0, 1]
    double delta_over_sigma = 2.0;  // bin width in units of sigma
    double epsilon = 1e-3;          // accept threshold on |p_in - P_in0|
    std::uint64_t n_queries = 1;    // M, queries per session
    // Normalization applied to the mean gap of an emulated response before it
    // enters the in-bin probability; matches the reference deviation curves.
    // Setting 1 recovers the unnormalized physical gap.
    double gap_scale = kTwoSqrt2;

    double sigma() const { return 1.0 / std::sqrt(2.0 * eta); }
    double delta() const { return delta_over_sigma * sigma(); }

    void validate() const {
        if (n_states < 2) throw std::invalid_argument("params: n_states must be >= 2");
        if (!(mu_probe >= 0.0)) throw std::invalid_argument("params: mu_probe must be >= 0");
        if (!(mu_response >= 0.0)) throw std::invalid_argument("params: mu_response must be >= 0");
        if (mu_response > mu_probe) {
            throw std::invalid_argument("params: mu_response must not exceed mu_probe");
        }
        if (!(eta > 0.0) || eta > 1.0) throw std::invalid_argument("params: eta must lie in (0, 1]");
        if (!(delta_over_sigma > 0.0)) {
            throw std::invalid_argument("params: delta_over_sigma must be positive");
        }
        if (!(epsilon > 0.0)) throw std::invalid_argument("params: epsilon must be positive");
        if (n_queries == 0) {
            throw std::invalid_argument("params: session must contain at least one query");
        }
        if (!(gap_scale > 0.0)) throw std::invalid_argument("params: gap_scale must be positive");
    }
};

// Expected homodyne outcome for response phase chi measured along theta.
inline double quadrature_mean(double chi, double theta, double mu_response) {
    return std::sqrt(2.0 * mu_response) * std::cos(chi - theta);
}

struct ResponsePhaseMap;
inline double quadrature_mean(int k, double theta, const ProtocolParams& params,
                              const ResponsePhaseMap& chi);

// ── response phase map ───────────────────────────────────────────────────────

enum class PhaseMapProvenance { kSymmetricDefault, kSeededRandom, kExplicit };

inline const char* provenance_name(PhaseMapProvenance p) {
    switch (p) {
        case PhaseMapProvenance::kSymmetricDefault: return "symmetric-default";
        case PhaseMapProvenance::kSeededRandom: return "seeded-random";
        case PhaseMapProvenance::kExplicit: return "explicit";
    }
    throw std::logic_error("provenance_name: unknown provenance");
}

// Assignment chi_k of a response phase to each challenge k. The default map
// chi_k = 2 pi k / N mirrors the probe alphabet; a device-specific map can be
// drawn from a seed or supplied outright.
struct ResponsePhaseMap {
    std::vector<double> chi;
    PhaseMapProvenance provenance = PhaseMapProvenance::kSymmetricDefault;
    std::uint64_t seed = 0;

    int n_states() const { return static_cast<int>(chi.size()); }

    static ResponsePhaseMap symmetric_default(int n) {
        if (n < 1) throw std::invalid_argument("phase map: n must be >= 1");
        ResponsePhaseMap m;
        m.chi.resize(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) m.chi[static_cast<std::size_t>(k)] = 2.0 * kPi * k / n;
        return m;
    }

    static ResponsePhaseMap seeded_random(int n, std::uint64_t seed) {
        if (n < 1) throw std::invalid_argument("phase map: n must be >= 1");
        ResponsePhaseMap m;
        m.provenance = PhaseMapProvenance::kSeededRandom;
        m.seed = seed;
        CounterRng rng(derive_key(seed, 0x636869ull));  // "chi" namespace
        m.chi.resize(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) m.chi[static_cast<std::size_t>(k)] = 2.0 * kPi * rng.next_unit();
        return m;
    }

    static ResponsePhaseMap explicit_map(std::vector<double> chi) {
        if (chi.empty()) throw std::invalid_argument("phase map: chi must be non-empty");
        ResponsePhaseMap m;
        m.provenance = PhaseMapProvenance::kExplicit;
        m.chi = std::move(chi);
        return m;
    }
};

inline double quadrature_mean(int k, double theta, const ProtocolParams& params,
                              const ResponsePhaseMap& chi) {
    if (k < 0 || k >= chi.n_states()) {
        throw std::out_of_range("quadrature_mean: challenge index out of range");
    }
    return quadrature_mean(chi.chi[static_cast<std::size_t>(k)], theta, params.mu_response);
}

// ── challenge-response table ─────────────────────────────────────────────────

namespace detail {

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Shortest-of-17-significant-digits decimal formatting; the printed form
// round-trips to the identical double, which is what makes table files and
// report files byte-stable.
inline std::string format_g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
}

}  // namespace detail

struct CRPRow {
    int k = 0;
    std::string mask_id;
    double mean_x = 0.0;  // expected outcome at theta = 0
    double mean_y = 0.0;  // expected outcome at theta = pi / 2
};

// Enrollment table of per-challenge expected quadrature means. Every row must
// lie on the circle mean_x^2 + mean_y^2 = 2 mu_response.
struct CRPTable {
    std::string table_id;
    int n_states = 0;
    double mu_response = 0.0;
    PhaseMapProvenance provenance = PhaseMapProvenance::kSymmetricDefault;
    std::uint64_t seed = 0;
    std::vector<CRPRow> rows;

    double mean(int k, int theta_idx) const {
        const CRPRow& r = rows.at(static_cast<std::size_t>(k));
        return theta_idx == 0 ? r.mean_x : r.mean_y;
    }

    void validate() const {
        if (n_states < 2) throw std::invalid_argument("crp table: n_states must be >= 2");
        if (!(mu_response >= 0.0)) {
            throw std::invalid_argument("crp table: mu_response must be >= 0");
        }
        if (static_cast<int>(rows.size()) != n_states) {
            throw std::invalid_argument("crp table: expected one row per challenge");
        }
        double r2 = 2.0 * mu_response;
        double tol = 1e-9 * std::max(1.0, r2);
        for (int k = 0; k < n_states; ++k) {
            const CRPRow& row = rows[static_cast<std::size_t>(k)];
            if (row.k != k) throw std::invalid_argument("crp table: rows must be keyed 0..N-1 in order");
            if (row.mask_id.empty()) throw std::invalid_argument("crp table: missing mask_id");
            double got = row.mean_x * row.mean_x + row.mean_y * row.mean_y;
            if (std::abs(got - r2) > tol) {
                throw std::invalid_argument("crp table: radius invariant violated at row " +
                                            std::to_string(k));
            }
        }
    }
};

inline std::string mask_id_for(const std::string& table_id, int k) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "m%016llx",
                  static_cast<unsigned long long>(detail::fnv1a64(table_id + ":" + std::to_string(k))));
    return std::string(buf);
}

inline CRPTable build_crp_table(const ProtocolParams& params, const ResponsePhaseMap& chi,
                                const std::string& table_id);

inline CRPTable build_crp_table(const std::string& table_id, double mu_response,
                                const ResponsePhaseMap& map) {
    CRPTable t;
    t.table_id = table_id;
    t.n_states = map.n_states();
    t.mu_response = mu_response;
    t.provenance = map.provenance;
    t.seed = map.seed;
    double amp = std::sqrt(2.0 * mu_response);
    t.rows.reserve(map.chi.size());
    for (int k = 0; k < t.n_states; ++k) {
        CRPRow row;
        row.k = k;
        row.mask_id = mask_id_for(table_id, k);
        double chi = map.chi[static_cast<std::size_t>(k)];
        row.mean_x = amp * std::cos(chi);
        row.mean_y = amp * std::sin(chi);
        t.rows.push_back(std::move(row));
    }
    t.validate();
    return t;
}

inline CRPTable build_crp_table(const ProtocolParams& params, const ResponsePhaseMap& chi,
                                const std::string& table_id) {
    if (chi.n_states() != params.n_states) {
        throw std::invalid_argument("build_crp_table: phase map size does not match n_states");
    }
    return build_crp_table(table_id, params.mu_response, chi);
}

// ── table persistence ────────────────────────────────────────────────────────
//
// Line 1: crp-table,<table_id>,<n_states>,<mu_response>,<provenance>,<seed>
// Lines 2..N+1: <k>,<mask_id>,<mean_x>,<mean_y>
// Floating-point fields carry 17 significant digits and round-trip exactly.

inline void write_crp(const CRPTable& t, std::ostream& out) {
    t.validate();
    out << "crp-table," << t.table_id << ',' << t.n_states << ','
        << detail::format_g17(t.mu_response) << ',' << provenance_name(t.provenance) << ','
        << t.seed << '\n';
    for (const CRPRow& row : t.rows) {
        out << row.k << ',' << row.mask_id << ',' << detail::format_g17(row.mean_x) << ','
            << detail::format_g17(row.mean_y) << '\n';
    }
}

namespace detail {

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_double(const std::string& s, const char* what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string("crp table: malformed ") + what);
    }
    if (pos != s.size()) throw std::invalid_argument(std::string("crp table: malformed ") + what);
    return v;
}

}  // namespace detail

inline CRPTable read_crp(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("crp table: empty input");
    auto head = detail::split_csv(line);
    if (head.size() != 6 || head[0] != "crp-table") {
        throw std::invalid_argument("crp table: bad header record");
    }
    CRPTable t;
    t.table_id = head[1];
    t.n_states = static_cast<int>(detail::parse_double(head[2], "n_states"));
    t.mu_response = detail::parse_double(head[3], "mu_response");
    if (head[4] == "symmetric-default") {
        t.provenance = PhaseMapProvenance::kSymmetricDefault;
    } else if (head[4] == "seeded-random") {
        t.provenance = PhaseMapProvenance::kSeededRandom;
    } else if (head[4] == "explicit") {
        t.provenance = PhaseMapProvenance::kExplicit;
    } else {
        throw std::invalid_argument("crp table: unknown provenance " + head[4]);
    }
    t.seed = static_cast<std::uint64_t>(std::stoull(head[5]));
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto f = detail::split_csv(line);
        if (f.size() != 4) throw std::invalid_argument("crp table: malformed row");
        CRPRow row;
        row.k = static_cast<int>(detail::parse_double(f[0], "row key"));
        row.mask_id = f[1];
        row.mean_x = detail::parse_double(f[2], "mean_x");
        row.mean_y = detail::parse_double(f[3], "mean_y");
        t.rows.push_back(std::move(row));
    }
    t.validate();
    return t;
}

inline void write_crp_file(const CRPTable& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("crp table: cannot open " + path + " for writing");
    write_crp(t, out);
}

inline CRPTable read_crp_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("crp table: cannot open " + path);
    return read_crp(in);
}

// Expected means table derived from params and a phase map; convenience for
// callers that do not persist an enrollment table.
inline CRPTable table_for(const ProtocolParams& params, const ResponsePhaseMap& map) {
    if (map.n_states() != params.n_states) {
        throw std::invalid_argument("table_for: phase map size does not match n_states");
    }
    return build_crp_table("ephemeral", params.mu_response, map);
}

}  // namespace cvauth
