/*
 * Intercept-resend attacks on the probe alphabet
 * {|sqrt(mu_P) e^{i 2 pi k / N}>}: the adversary measures the probe, guesses
 * the challenge, and emulates the response for the guess. Each attack is
 * summarized by its confusion matrix P(k_tilde | k).
 *
 *  - DH: dual-homodyne (heterodyne) measurement of both quadratures followed
 *    by a nearest-phase guess; outcome (x, y) is Gaussian with mean
 *    sqrt(2 mu_P) (cos, sin)(2 pi k / N) and unit width per axis.
 *  - UD: optimal unambiguous discrimination; conclusive outcomes are always
 *    correct, inconclusive ones (probability P_inc = 1 - min_r g_r) make the
 *    adversary respond uniformly at random.
 *  - SR: square-root measurement, the minimum-error strategy for symmetric
 *    pure-state sets; P(k_tilde | k) depends only on k_tilde - k through the
 *    discrete Fourier transform of sqrt(g_r).
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "cvauth/math.hpp"
#include "cvauth/model.hpp"
#include "cvauth/verifier.hpp"

namespace cvauth {

enum class Attack { kDH, kUD, kSR };

inline const char* attack_name(Attack a) {
    switch (a) {
        case Attack::kDH: return "dh";
        case Attack::kUD: return "ud";
        case Attack::kSR: return "sr";
    }
    throw std::logic_error("attack_name: unknown attack");
}

inline Attack attack_from_name(const std::string& s) {
    if (s == "dh") return Attack::kDH;
    if (s == "ud") return Attack::kUD;
    if (s == "sr") return Attack::kSR;
    throw std::invalid_argument("unknown attack name: " + s);
}

// ── confusion matrix ─────────────────────────────────────────────────────────

struct ConfusionMatrix {
    int n = 0;
    bool circulant = false;
    // circulant: n entries, P(k_tilde | k) = data[(k_tilde - k) mod n];
    // general: n x n row-major, data[k * n + k_tilde].
    std::vector<double> data;

    int n_states() const { return n; }

    double p(int k_tilde, int k) const {
        if (circulant) {
            int s = k_tilde - k;
            s %= n;
            if (s < 0) s += n;
            return data[static_cast<std::size_t>(s)];
        }
        return data[static_cast<std::size_t>(k) * static_cast<std::size_t>(n) +
                    static_cast<std::size_t>(k_tilde)];
    }

    // Average probability of a wrong guess under uniform challenges.
    double p_err() const {
        if (circulant) return 1.0 - data[0];
        KahanSum diag;
        for (int k = 0; k < n; ++k) diag.add(p(k, k));
        return 1.0 - diag.value() / n;
    }

    void validate(double tol = 1e-9) const {
        if (n < 1) throw std::invalid_argument("confusion: n must be >= 1");
        std::size_t want = circulant ? static_cast<std::size_t>(n)
                                     : static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
        if (data.size() != want) throw std::invalid_argument("confusion: storage size mismatch");
        int rows = circulant ? 1 : n;
        for (int k = 0; k < rows; ++k) {
            KahanSum row;
            for (int kt = 0; kt < n; ++kt) {
                double v = circulant ? data[static_cast<std::size_t>(kt)] : p(kt, k);
                if (v < -1e-12) throw std::runtime_error("confusion: negative entry");
                row.add(v);
            }
            if (std::abs(row.value() - 1.0) > tol) {
                throw std::runtime_error("confusion: row " + std::to_string(k) +
                                         " sums to " + std::to_string(row.value()));
            }
        }
    }
};

// ── dual-homodyne ────────────────────────────────────────────────────────────

namespace detail {

// Angular density (times 2 pi) of the dual-homodyne outcome relative to the
// sent phase: integrating the two-dimensional Gaussian over the radius gives
//   f(g) = exp(-mu) + sqrt(pi/2) a exp(-mu sin^2 g) (1 + erf(a / sqrt 2)),
// with a = sqrt(2 mu) cos g.
inline double dh_angular_density(double gamma, double mu) {
    double a = std::sqrt(2.0 * mu) * std::cos(gamma);
    return std::exp(-mu) +
           std::sqrt(kPi / 2.0) * a * std::exp(-mu * std::sin(gamma) * std::sin(gamma)) *
               (1.0 + erf(a / kSqrt2));
}

}  // namespace detail

// Dual-homodyne confusion matrix from the closed-form radial integral; the
// guess is the phase sector the outcome angle falls into, so
//   P(shift) = (1 / 2 pi) integral of f over [2 pi shift / N +- pi / N],
// and P(shift) = P(N - shift).
inline ConfusionMatrix dh_confusion(int n, double mu_probe, double tol = 1e-12) {
    if (n < 2) throw std::invalid_argument("dh_confusion: n must be >= 2");
    if (mu_probe < 0.0) throw std::invalid_argument("dh_confusion: mu_probe must be >= 0");
    ConfusionMatrix c;
    c.n = n;
    c.circulant = true;
    c.data.assign(static_cast<std::size_t>(n), 0.0);
    for (int s = 0; s <= n / 2; ++s) {
        double lo = 2.0 * kPi * s / n - kPi / n;
        double hi = 2.0 * kPi * s / n + kPi / n;
        double mass = integrate([mu_probe](double g) { return detail::dh_angular_density(g, mu_probe); },
                                lo, hi, tol) /
                      (2.0 * kPi);
        c.data[static_cast<std::size_t>(s)] = mass;
        if (s != 0 && s != n - s) c.data[static_cast<std::size_t>(n - s)] = mass;
    }
    c.validate();
    return c;
}

// Same matrix from direct two-dimensional quadrature of the Gaussian outcome
// density in polar coordinates; used to validate the closed form.
inline ConfusionMatrix dh_confusion_quadrature2d(int n, double mu_probe, double tol = 1e-10) {
    if (n < 2) throw std::invalid_argument("dh_confusion_quadrature2d: n must be >= 2");
    double radius = std::sqrt(2.0 * mu_probe);
    double rmax = radius + 12.0;
    ConfusionMatrix c;
    c.n = n;
    c.circulant = true;
    c.data.assign(static_cast<std::size_t>(n), 0.0);
    for (int s = 0; s <= n / 2; ++s) {
        double lo = 2.0 * kPi * s / n - kPi / n;
        double hi = 2.0 * kPi * s / n + kPi / n;
        auto sector = [radius, rmax, tol](double gamma) {
            double cg = std::cos(gamma);
            auto radial = [radius, cg](double r) {
                double e = -0.5 * (r * r - 2.0 * r * radius * cg + radius * radius);
                return r * std::exp(e);
            };
            // The integrand peaks where 1/r = r - radius cos(gamma); splitting
            // there keeps the peak at an interval endpoint so the adaptive rule
            // cannot step over it.
            double b = radius * cg;
            double peak = 0.5 * (b + std::sqrt(b * b + 4.0));
            return integrate(radial, 0.0, peak, 0.05 * tol) +
                   integrate(radial, peak, rmax, 0.05 * tol);
        };
        double mass = integrate(sector, lo, hi, tol) / (2.0 * kPi);
        c.data[static_cast<std::size_t>(s)] = mass;
        if (s != 0 && s != n - s) c.data[static_cast<std::size_t>(n - s)] = mass;
    }
    c.validate(1e-7);
    return c;
}

// ── unambiguous discrimination ───────────────────────────────────────────────

// Optimal UD of the symmetric set succeeds with probability 1 - P_inc,
// P_inc = 1 - min_r g_r; an inconclusive outcome triggers a uniformly random
// response, so every wrong guess is equally likely.
inline ConfusionMatrix ud_confusion(int n, double mu_probe) {
    if (n < 2) throw std::invalid_argument("ud_confusion: n must be >= 2");
    auto g = gram_spectrum(n, mu_probe);
    double gmin = *std::min_element(g.begin(), g.end());
    double p_inc = std::clamp(1.0 - gmin, 0.0, 1.0);
    ConfusionMatrix c;
    c.n = n;
    c.circulant = true;
    c.data.assign(static_cast<std::size_t>(n), p_inc / n);
    c.data[0] = 1.0 - p_inc + p_inc / n;
    c.validate();
    return c;
}

inline double ud_inconclusive_probability(int n, double mu_probe) {
    auto g = gram_spectrum(n, mu_probe);
    return std::clamp(1.0 - *std::min_element(g.begin(), g.end()), 0.0, 1.0);
}

// ── square-root measurement ──────────────────────────────────────────────────

// SRM confusion row through the spectral form
//   P(shift) = | (1/N) sum_r sqrt(g_r) e^{i 2 pi r shift / N} |^2.
// The Fock-basis construction in srm_fock.hpp reproduces this row and serves
// as its validation oracle.
inline ConfusionMatrix sr_confusion(int n, double mu_probe) {
    if (n < 2) throw std::invalid_argument("sr_confusion: n must be >= 2");
    auto g = gram_spectrum(n, mu_probe);
    std::vector<double> root(g.size());
    for (std::size_t r = 0; r < g.size(); ++r) root[r] = std::sqrt(g[r]);
    ConfusionMatrix c;
    c.n = n;
    c.circulant = true;
    c.data.assign(static_cast<std::size_t>(n), 0.0);
    for (int s = 0; s < n; ++s) {
        KahanSum re;
        KahanSum im;
        for (int r = 0; r < n; ++r) {
            double arg = 2.0 * kPi * r * s / n;
            re.add(root[static_cast<std::size_t>(r)] * std::cos(arg));
            im.add(root[static_cast<std::size_t>(r)] * std::sin(arg));
        }
        double cr = re.value() / n;
        double ci = im.value() / n;
        c.data[static_cast<std::size_t>(s)] = cr * cr + ci * ci;
    }
    c.validate();
    return c;
}

// ── dispatch ─────────────────────────────────────────────────────────────────

inline ConfusionMatrix confusion_for(Attack a, int n, double mu_probe, double dh_tol = 1e-12) {
    switch (a) {
        case Attack::kDH: return dh_confusion(n, mu_probe, dh_tol);
        case Attack::kUD: return ud_confusion(n, mu_probe);
        case Attack::kSR: return sr_confusion(n, mu_probe);
    }
    throw std::logic_error("confusion_for: unknown attack");
}

// Deviation statistics of one attack against the given enrollment table.
inline BinStatistics attack_deviation(Attack a, const ProtocolParams& params,
                                      const CRPTable& table) {
    return p_in_attacked(params, table, confusion_for(a, params.n_states, params.mu_probe));
}

inline BinStatistics attack_deviation(Attack a, const ProtocolParams& params) {
    return attack_deviation(a, params,
                            table_for(params, ResponsePhaseMap::symmetric_default(params.n_states)));
}

// Closed forms for the two-state alphabet, used as test anchors.
inline double dh_perr_n2(double mu_probe) { return normal_tail(std::sqrt(2.0 * mu_probe)); }
inline double ud_perr_n2(double mu_probe) { return 0.5 * std::exp(-2.0 * mu_probe); }
inline double sr_perr_n2(double mu_probe) {
    return 0.5 * (1.0 - std::sqrt(1.0 - std::exp(-4.0 * mu_probe)));
}

}  // namespace cvauth
