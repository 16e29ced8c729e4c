/*
 * Parameter sweeps over the alphabet size N: per-N deviation of each attack,
 * the measurement-independent lower bound, and threshold extraction (first N
 * whose deviation exceeds a detection margin 2 epsilon). Writers emit CSV and
 * JSON with 17 significant digits so that equal inputs give equal bytes.
 */
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvauth/attacks.hpp"
#include "cvauth/bounds.hpp"
#include "cvauth/model.hpp"
#include "cvauth/verifier.hpp"

namespace cvauth {

inline constexpr std::array<Attack, 3> kAllAttacks = {Attack::kDH, Attack::kUD, Attack::kSR};

struct SweepSpec {
    std::vector<int> n_grid;
    ProtocolParams base;  // n_states is overridden per grid point
    std::vector<Attack> attacks = {Attack::kDH, Attack::kUD, Attack::kSR};
    bool include_lower_bound = true;
    double dh_tol = 1e-12;

    bool has_attack(Attack a) const {
        for (Attack x : attacks) {
            if (x == a) return true;
        }
        return false;
    }

    void validate() const {
        if (n_grid.empty()) throw std::invalid_argument("sweep: empty n grid");
        for (std::size_t i = 0; i < n_grid.size(); ++i) {
            if (n_grid[i] < 2) throw std::invalid_argument("sweep: grid values must be >= 2");
            if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
                throw std::invalid_argument("sweep: grid must be strictly increasing");
            }
        }
        if (attacks.empty() && !include_lower_bound) {
            throw std::invalid_argument("sweep: nothing to compute");
        }
    }
};

struct SweepRow {
    int n = 0;
    double p_in_honest = 0.0;
    std::array<std::optional<BinStatistics>, 3> attack_stats;  // indexed dh, ud, sr
    std::optional<LowerBoundReport> bound;
};

inline std::size_t attack_slot(Attack a) { return static_cast<std::size_t>(a); }

inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    spec.validate();
    spec.base.validate();
    std::vector<SweepRow> rows;
    rows.reserve(spec.n_grid.size());
    for (int n : spec.n_grid) {
        ProtocolParams p = spec.base;
        p.n_states = n;
        p.validate();
        CRPTable table = table_for(p, ResponsePhaseMap::symmetric_default(n));
        SweepRow row;
        row.n = n;
        row.p_in_honest = p_in_honest(p);
        for (Attack a : kAllAttacks) {
            if (!spec.has_attack(a)) continue;
            row.attack_stats[attack_slot(a)] =
                p_in_attacked(p, table, confusion_for(a, n, p.mu_probe, spec.dh_tol));
        }
        if (spec.include_lower_bound) row.bound = lower_bound(p, table);
        rows.push_back(std::move(row));
    }
    return rows;
}

// ── thresholds ───────────────────────────────────────────────────────────────

struct ThresholdEntry {
    Attack attack = Attack::kDH;
    std::optional<int> first_n;  // empty when the deviation never exceeds 2 epsilon
    double d_at_first = 0.0;
};

// First grid N with deviation strictly above two_epsilon, per attack present
// in the rows, in dh, ud, sr order.
inline std::vector<ThresholdEntry> thresholds(const std::vector<SweepRow>& rows,
                                              double two_epsilon) {
    std::vector<ThresholdEntry> out;
    for (Attack a : kAllAttacks) {
        bool any = false;
        ThresholdEntry e;
        e.attack = a;
        for (const SweepRow& row : rows) {
            const auto& st = row.attack_stats[attack_slot(a)];
            if (!st) continue;
            any = true;
            if (!e.first_n && st->deviation > two_epsilon) {
                e.first_n = row.n;
                e.d_at_first = st->deviation;
            }
        }
        if (any) out.push_back(e);
    }
    return out;
}

// ── grid parsing ─────────────────────────────────────────────────────────────

// Accepts "lo:hi" or "lo:hi:step" (inclusive) or a comma list "2,4,8".
inline std::vector<int> parse_grid(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("grid: empty specification");
    std::vector<int> out;
    if (text.find(':') != std::string::npos) {
        auto parts = detail::split_csv(text);
        if (parts.size() != 1) throw std::invalid_argument("grid: mix of ':' and ',' forms");
        std::vector<std::string> f;
        std::string cur;
        for (char c : text) {
            if (c == ':') {
                f.push_back(cur);
                cur.clear();
            } else {
                cur.push_back(c);
            }
        }
        f.push_back(cur);
        if (f.size() != 2 && f.size() != 3) throw std::invalid_argument("grid: expected lo:hi[:step]");
        int lo = static_cast<int>(detail::parse_double(f[0], "grid lo"));
        int hi = static_cast<int>(detail::parse_double(f[1], "grid hi"));
        int step = f.size() == 3 ? static_cast<int>(detail::parse_double(f[2], "grid step")) : 1;
        if (step < 1) throw std::invalid_argument("grid: step must be >= 1");
        if (hi < lo) throw std::invalid_argument("grid: hi must be >= lo");
        for (int n = lo; n <= hi; n += step) out.push_back(n);
    } else {
        for (const std::string& s : detail::split_csv(text)) {
            out.push_back(static_cast<int>(detail::parse_double(s, "grid value")));
        }
    }
    return out;
}

// ── writers ──────────────────────────────────────────────────────────────────

inline constexpr const char* kToolVersion = "1.0.0";

namespace detail {

inline void echo_params_json(const ProtocolParams& p, std::ostream& out) {
    out << "{\"mu_probe\":" << format_g17(p.mu_probe)
        << ",\"mu_response\":" << format_g17(p.mu_response) << ",\"eta\":" << format_g17(p.eta)
        << ",\"delta_over_sigma\":" << format_g17(p.delta_over_sigma)
        << ",\"epsilon\":" << format_g17(p.epsilon) << ",\"gap_scale\":" << format_g17(p.gap_scale)
        << "}";
}

inline void metadata_json(const ProtocolParams& p, std::uint64_t seed, std::ostream& out) {
    out << "{\"tool_version\":\"" << kToolVersion << "\",\"seed\":" << seed << ",\"params\":";
    echo_params_json(p, out);
    out << "}";
}

}  // namespace detail

inline void write_sweep_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows,
                            std::ostream& out) {
    out << "n,p_in_honest";
    for (Attack a : kAllAttacks) {
        if (!spec.has_attack(a)) continue;
        out << ",p_err_" << attack_name(a) << ",d_" << attack_name(a);
    }
    if (spec.include_lower_bound) {
        out << ",holevo_chi,p_err_low,p_max_in_error,d_low_raw,d_low";
    }
    out << '\n';
    for (const SweepRow& row : rows) {
        out << row.n << ',' << detail::format_g17(row.p_in_honest);
        for (Attack a : kAllAttacks) {
            if (!spec.has_attack(a)) continue;
            const auto& st = row.attack_stats[attack_slot(a)];
            out << ',' << detail::format_g17(st->p_err) << ',' << detail::format_g17(st->deviation);
        }
        if (spec.include_lower_bound) {
            const auto& b = *row.bound;
            out << ',' << detail::format_g17(b.chi) << ',' << detail::format_g17(b.p_err_low) << ','
                << detail::format_g17(b.p_max_in_error) << ',' << detail::format_g17(b.d_low_raw)
                << ',' << detail::format_g17(b.d_low);
        }
        out << '\n';
    }
}

inline void write_sweep_json(const SweepSpec& spec, const std::vector<SweepRow>& rows,
                             std::ostream& out, std::uint64_t seed = 0) {
    out << "{\"kind\":\"sweep\",\"metadata\":";
    detail::metadata_json(spec.base, seed, out);
    out << ",\"attacks\":[";
    bool first = true;
    for (Attack a : kAllAttacks) {
        if (!spec.has_attack(a)) continue;
        if (!first) out << ',';
        first = false;
        out << '"' << attack_name(a) << '"';
    }
    out << "],\"rows\":[";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const SweepRow& row = rows[i];
        if (i) out << ',';
        out << "{\"n\":" << row.n << ",\"p_in_honest\":" << detail::format_g17(row.p_in_honest);
        for (Attack a : kAllAttacks) {
            if (!spec.has_attack(a)) continue;
            const auto& st = row.attack_stats[attack_slot(a)];
            out << ",\"p_err_" << attack_name(a) << "\":" << detail::format_g17(st->p_err)
                << ",\"d_" << attack_name(a) << "\":" << detail::format_g17(st->deviation);
        }
        if (spec.include_lower_bound) {
            const auto& b = *row.bound;
            out << ",\"holevo_chi\":" << detail::format_g17(b.chi)
                << ",\"p_err_low\":" << detail::format_g17(b.p_err_low)
                << ",\"p_max_in_error\":" << detail::format_g17(b.p_max_in_error)
                << ",\"d_low_raw\":" << detail::format_g17(b.d_low_raw)
                << ",\"d_low\":" << detail::format_g17(b.d_low);
        }
        out << '}';
    }
    out << "]}\n";
}

inline void write_thresholds_csv(const std::vector<ThresholdEntry>& entries, double two_epsilon,
                                 std::ostream& out) {
    out << "attack,first_n,d_at_first_n,two_epsilon\n";
    for (const ThresholdEntry& e : entries) {
        out << attack_name(e.attack) << ',';
        if (e.first_n) {
            out << *e.first_n << ',' << detail::format_g17(e.d_at_first);
        } else {
            out << "none,none";
        }
        out << ',' << detail::format_g17(two_epsilon) << '\n';
    }
}

inline void write_thresholds_json(const std::vector<ThresholdEntry>& entries, double two_epsilon,
                                  std::ostream& out, const ProtocolParams& base = ProtocolParams{},
                                  std::uint64_t seed = 0) {
    out << "{\"kind\":\"threshold\",\"metadata\":";
    detail::metadata_json(base, seed, out);
    out << ",\"two_epsilon\":" << detail::format_g17(two_epsilon) << ",\"entries\":[";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const ThresholdEntry& e = entries[i];
        if (i) out << ',';
        out << "{\"attack\":\"" << attack_name(e.attack) << "\",";
        if (e.first_n) {
            out << "\"first_n\":" << *e.first_n
                << ",\"d_at_first_n\":" << detail::format_g17(e.d_at_first);
        } else {
            out << "\"first_n\":null,\"d_at_first_n\":null";
        }
        out << '}';
    }
    out << "]}\n";
}

}  // namespace cvauth
