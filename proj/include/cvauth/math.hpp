/*
 * Numerical primitives shared by the protocol model: compensated summation,
 * entropy helpers, the Gram spectrum of a symmetric coherent-state set,
 * adaptive quadrature, and bisection root finding.
 *
 * The Gram spectrum of S_N = {|sqrt(mu) e^{i 2 pi k / N}>} is
 *   g_r = sum_j exp(mu (cos phi_j - 1)) cos(mu sin phi_j - 2 pi j r / N),
 * with phi_j = 2 pi j / N. The g_r are the eigenvalues of the N x N Gram
 * matrix, are non-negative, and sum to N.
 */
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cvauth {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kTwoSqrt2 = 2.82842712474619009760;

// ── compensated summation ───────────────────────────────────────────────────

// Kahan-Babuska accumulator; keeps probability sums accurate when mixing
// terms that span many orders of magnitude.
class KahanSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double kahan_total(std::span<const double> xs) {
    KahanSum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

// ── error function and entropy ──────────────────────────────────────────────

// std::erf on this platform is correctly rounded to within 1 ulp, far inside
// the 1e-12 relative tolerance the verifier formulas need.
inline double erf(double x) { return std::erf(x); }
inline double erfc(double x) { return std::erfc(x); }

// Upper tail of the standard normal, Q(z) = P(Z > z).
inline double normal_tail(double z) { return 0.5 * std::erfc(z / kSqrt2); }

// Binary entropy in bits; h2(0) = h2(1) = 0.
inline double binary_entropy(double p) {
    if (p < 0.0 || p > 1.0) {
        throw std::invalid_argument("binary_entropy: p must lie in [0, 1]");
    }
    if (p == 0.0 || p == 1.0) return 0.0;
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// Shannon entropy in bits of a sub-normalized distribution; zero entries are
// skipped, negative entries beyond rounding noise are rejected.
inline double entropy_bits(std::span<const double> probs) {
    KahanSum acc;
    for (double p : probs) {
        if (p < -1e-12) {
            throw std::invalid_argument("entropy_bits: negative probability");
        }
        if (p > 0.0) acc.add(-p * std::log2(p));
    }
    return acc.value();
}

// ── Gram spectrum ────────────────────────────────────────────────────────────

// Eigenvalues g_0 .. g_{N-1} of the Gram matrix of N symmetric coherent
// states of mean photon number mu. Evaluated in the exponent domain so that
// mu of several hundred stays finite. Eigenvalues below 1e-12 of the largest
// are clipped to zero; a genuinely negative value or a non-vanishing
// imaginary residue indicates a broken input and raises.
inline std::vector<double> gram_spectrum(int n, double mu) {
    if (n < 1) throw std::invalid_argument("gram_spectrum: n must be >= 1");
    if (mu < 0.0) throw std::invalid_argument("gram_spectrum: mu must be >= 0");
    std::vector<double> g(static_cast<std::size_t>(n));
    double gmax = 0.0;
    std::vector<double> imag(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
        KahanSum re;
        KahanSum im;
        for (int j = 0; j < n; ++j) {
            double phi = 2.0 * kPi * j / n;
            double w = std::exp(mu * (std::cos(phi) - 1.0));
            double arg = mu * std::sin(phi) - 2.0 * kPi * j * r / n;
            re.add(w * std::cos(arg));
            im.add(w * std::sin(arg));
        }
        g[static_cast<std::size_t>(r)] = re.value();
        imag[static_cast<std::size_t>(r)] = im.value();
        gmax = std::max(gmax, std::abs(g[static_cast<std::size_t>(r)]));
    }
    for (int r = 0; r < n; ++r) {
        auto i = static_cast<std::size_t>(r);
        if (std::abs(imag[i]) > 1e-9 * std::max(gmax, 1.0)) {
            throw std::runtime_error("gram_spectrum: imaginary residue at r=" + std::to_string(r));
        }
        if (g[i] < -1e-9 * std::max(gmax, 1.0)) {
            throw std::runtime_error("gram_spectrum: negative eigenvalue at r=" + std::to_string(r));
        }
        if (std::abs(g[i]) < 1e-12 * gmax) g[i] = 0.0;
    }
    return g;
}

// ── adaptive quadrature ──────────────────────────────────────────────────────

namespace detail {

template <typename F>
double simpson(F&& f, double a, double fa, double b, double fb, double m, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive_step(F&& f, double a, double fa, double b, double fb, double m, double fm,
                     double whole, double tol, int depth) {
    double lm = 0.5 * (a + m);
    double rm = 0.5 * (m + b);
    double flm = f(lm);
    double frm = f(rm);
    double left = simpson(f, a, fa, m, fm, lm, flm);
    double right = simpson(f, m, fm, b, fb, rm, frm);
    double err = left + right - whole;
    if (depth <= 0 || std::abs(err) <= 15.0 * tol) {
        return left + right + err / 15.0;
    }
    return adaptive_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adaptive_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson integration of f over [a, b] to absolute tolerance tol.
template <typename F>
double integrate(F&& f, double a, double b, double tol, int max_depth = 48) {
    if (!(tol > 0.0)) throw std::invalid_argument("integrate: tol must be positive");
    if (a == b) return 0.0;
    double fa = f(a);
    double fb = f(b);
    double m = 0.5 * (a + b);
    double fm = f(m);
    double whole = detail::simpson(f, a, fa, b, fb, m, fm);
    return detail::adaptive_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

// ── bisection ────────────────────────────────────────────────────────────────

// Root of f on [lo, hi] to absolute tolerance tol in the argument; f must
// change sign across the bracket.
template <typename F>
double bisect(F&& f, double lo, double hi, double tol, int max_iter = 200) {
    if (!(lo < hi)) throw std::invalid_argument("bisect: need lo < hi");
    if (!(tol > 0.0)) throw std::invalid_argument("bisect: tol must be positive");
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw std::invalid_argument("bisect: no sign change across bracket");
    }
    for (int it = 0; it < max_iter && hi - lo > tol; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace cvauth
