/*
 * Measurement-independent lower bound on the deviation of any
 * intercept-resend attack. The accessible information about the challenge is
 * capped by the Holevo quantity chi = S(rho) of the probe ensemble, Fano's
 * inequality turns the information deficit log2 N - chi into a minimum
 * guessing-error probability p_err_low, and pairing it with the most
 * favorable wrong-guess in-bin probability P_max(in | error) gives
 *   D >= p_err_low (P_in0 - P_max(in | error)).
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cvauth/math.hpp"
#include "cvauth/model.hpp"
#include "cvauth/verifier.hpp"

namespace cvauth {

// Holevo quantity of the uniform symmetric ensemble, S(rho) in bits; the
// eigenvalues of rho are g_r / N.
inline double holevo_chi(int n, double mu_probe) {
    auto g = gram_spectrum(n, mu_probe);
    for (double& v : g) v /= n;
    return entropy_bits(g);
}

// Smallest guessing-error probability compatible with accessible information
// chi via Fano: h2(p) + p log2(N - 1) >= log2 N - chi. The left side is
// strictly increasing on [0, (N-1)/N], so the smallest admissible p is the
// root, found by bisection to 1e-12.
inline double perr_lower(int n, double chi) {
    if (n < 2) throw std::invalid_argument("perr_lower: n must be >= 2");
    double deficit = std::log2(static_cast<double>(n)) - chi;
    if (deficit <= 0.0) return 0.0;
    double pmax = (n - 1.0) / n;
    auto lhs = [n](double p) { return binary_entropy(p) + p * std::log2(n - 1.0); };
    if (lhs(pmax) <= deficit) return pmax;
    return bisect([&](double p) { return lhs(p) - deficit; }, 0.0, pmax, 1e-12);
}

// Largest theta-averaged in-bin probability over ordered wrong-guess pairs;
// with the symmetric phase map this is attained by adjacent challenges.
inline double p_max_in_error(const ProtocolParams& params, const CRPTable& table) {
    params.validate();
    table.validate();
    int n = params.n_states;
    if (table.n_states != n) {
        throw std::invalid_argument("p_max_in_error: table size does not match n_states");
    }
    double best = 0.0;
    for (int k = 0; k < n; ++k) {
        for (int kt = 0; kt < n; ++kt) {
            if (kt == k) continue;
            best = std::max(best, detail::p_in_pair_avg(table, k, kt, params));
        }
    }
    return best;
}

struct LowerBoundReport {
    double chi = 0.0;
    double p_err_low = 0.0;
    double p_max_in_error = 0.0;
    double d_low_raw = 0.0;  // p_err_low * (P_in0 - P_max), may be negative
    double d_low = 0.0;      // max(0, d_low_raw)
};

inline LowerBoundReport lower_bound(const ProtocolParams& params, const CRPTable& table) {
    LowerBoundReport r;
    r.chi = holevo_chi(params.n_states, params.mu_probe);
    r.p_err_low = perr_lower(params.n_states, r.chi);
    r.p_max_in_error = p_max_in_error(params, table);
    r.d_low_raw = r.p_err_low * (p_in_honest(params) - r.p_max_in_error);
    r.d_low = std::max(0.0, r.d_low_raw);
    return r;
}

inline LowerBoundReport lower_bound(const ProtocolParams& params) {
    return lower_bound(params,
                       table_for(params, ResponsePhaseMap::symmetric_default(params.n_states)));
}

}  // namespace cvauth
