/*
 * Verifier-side statistics: the honest in-bin probability, the in-bin
 * probability of a response whose mean is shifted off the enrolled one, and
 * the aggregate in-bin probability under an intercept-resend adversary
 * described by a confusion matrix.
 *
 * With bin half-width delta / 2 around the enrolled mean and outcome width
 * sigma, an unshifted response lands in the bin with probability
 *   P_in0 = erf(delta_bar / (2 sqrt 2)),          delta_bar = delta / sigma,
 * and a response whose mean sits at distance d from the bin center with
 *   P(in | d) = (erf((2 d + delta) / (2 sqrt 2 sigma))
 *              - erf((2 d - delta) / (2 sqrt 2 sigma))) / 2.
 */
#pragma once

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "cvauth/math.hpp"
#include "cvauth/model.hpp"

namespace cvauth {

// In-bin probability of the honest response.
inline double p_in_honest(const ProtocolParams& params) {
    return erf(params.delta_over_sigma / kTwoSqrt2);
}

// In-bin probability of a response whose mean is shifted by d from the bin
// center; even in d, and equal to p_in_honest at d = 0.
inline double p_in_given(double d, const ProtocolParams& params) {
    double s = params.sigma();
    double delta = params.delta();
    return 0.5 * (erf((2.0 * d + delta) / (kTwoSqrt2 * s)) -
                  erf((2.0 * d - delta) / (kTwoSqrt2 * s)));
}

// In-bin probability when challenge k was answered with the response enrolled
// for k_tilde, at quadrature angle theta, on the raw mean gap.
inline double p_in_given(int k, int k_tilde, double theta, const ProtocolParams& params,
                         const ResponsePhaseMap& chi) {
    double d = quadrature_mean(k, theta, params, chi) - quadrature_mean(k_tilde, theta, params, chi);
    return p_in_given(d, params);
}

// Forward declaration; defined in attacks.hpp.
struct ConfusionMatrix;

struct BinStatistics {
    double p_in_honest = 0.0;       // P_in0
    double p_in_attacked = 0.0;     // aggregate in-bin probability under attack
    double p_err = 0.0;             // adversary guessing error, 1 - avg P(k|k)
    double p_in_given_error = 0.0;  // in-bin probability conditioned on a wrong guess
    double deviation = 0.0;         // P_in0 - p_in_attacked
};

namespace detail {

// Theta-averaged in-bin probability of an emulated response enrolled as
// k_tilde when the challenge was k. The mean gap is normalized by gap_scale
// before entering the bin integral.
inline double p_in_pair_avg(const CRPTable& table, int k, int k_tilde,
                            const ProtocolParams& params) {
    double acc = 0.0;
    for (int t = 0; t < 2; ++t) {
        double d = (table.mean(k, t) - table.mean(k_tilde, t)) / params.gap_scale;
        acc += p_in_given(d, params);
    }
    return acc / 2.0;
}

}  // namespace detail

// Aggregate in-bin probability when the adversary resends the response for
// its guess k_tilde, with guesses distributed by the confusion matrix:
//   P_in = (1 - P_err) P_in0
//        + (1 / (2N)) sum_k sum_{k_tilde != k} P(k_tilde | k) sum_theta P(in | k, k_tilde, theta).
// Challenges and quadrature angles are uniform.
template <typename Confusion>
BinStatistics p_in_attacked(const ProtocolParams& params, const CRPTable& table,
                            const Confusion& confusion) {
    params.validate();
    table.validate();
    int n = params.n_states;
    if (table.n_states != n || confusion.n_states() != n) {
        throw std::invalid_argument("p_in_attacked: size mismatch between params, table, confusion");
    }
    BinStatistics out;
    out.p_in_honest = p_in_honest(params);

    KahanSum diag;
    for (int k = 0; k < n; ++k) diag.add(confusion.p(k, k));
    out.p_err = 1.0 - diag.value() / n;

    KahanSum cross;   // (1/N) sum_k sum_{k_tilde != k} P(k_tilde|k) <P(in|k,k_tilde)>_theta
    for (int k = 0; k < n; ++k) {
        for (int kt = 0; kt < n; ++kt) {
            if (kt == k) continue;
            double w = confusion.p(kt, k);
            if (w == 0.0) continue;
            cross.add(w * detail::p_in_pair_avg(table, k, kt, params));
        }
    }
    double cross_mean = cross.value() / n;
    out.p_in_attacked = (1.0 - out.p_err) * out.p_in_honest + cross_mean;
    out.p_in_given_error = out.p_err > 0.0 ? cross_mean / out.p_err : out.p_in_honest;
    out.deviation = out.p_in_honest - out.p_in_attacked;
    return out;
}

inline double deviation(const BinStatistics& stats) { return stats.deviation; }

// Accept rule on an observed in-bin fraction; strict inequality.
inline bool accept(double p_in_observed, const ProtocolParams& params) {
    return std::abs(p_in_observed - p_in_honest(params)) < params.epsilon;
}

}  // namespace cvauth
