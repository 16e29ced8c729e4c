/*
 * Square-root measurement built explicitly in a truncated Fock basis. The
 * POVM elements are rho^{-1/2} |a_k><a_k| rho^{-1/2} / N with
 * rho = (1/N) sum_k |a_k><a_k|, so
 *   P(k_tilde | k) = (1/N) |<a_k| rho^{-1/2} |a_{k_tilde}>|^2.
 * This is the independent oracle for the spectral fast path in attacks.hpp;
 * it is exponentially slower in the photon cutoff and intended for small mu.
 */
#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "cvauth/attacks.hpp"
#include "cvauth/math.hpp"

namespace cvauth {

namespace detail {

// Photon-number cutoff with Poisson tail mass below tail_tol.
inline int fock_cutoff(double mu, double tail_tol) {
    double term = std::exp(-mu);
    double cum = term;
    int n = 0;
    while (1.0 - cum > tail_tol && n < 4096) {
        ++n;
        term *= mu / n;
        cum += term;
    }
    return n + 8;
}

}  // namespace detail

// Full SRM confusion matrix from the Fock-basis construction.
inline ConfusionMatrix sr_confusion_fock(int n, double mu_probe, double tail_tol = 1e-12) {
    if (n < 2) throw std::invalid_argument("sr_confusion_fock: n must be >= 2");
    if (mu_probe < 0.0) throw std::invalid_argument("sr_confusion_fock: mu_probe must be >= 0");
    using Mat = Eigen::MatrixXcd;
    using Vec = Eigen::VectorXcd;
    const int dim = detail::fock_cutoff(mu_probe, tail_tol) + 1;
    const std::complex<double> i1(0.0, 1.0);

    // Coherent amplitudes c_m = e^{-mu/2} alpha^m / sqrt(m!).
    Mat states(dim, n);
    for (int k = 0; k < n; ++k) {
        std::complex<double> alpha = std::sqrt(mu_probe) * std::exp(i1 * (2.0 * kPi * k / n));
        std::complex<double> c = std::exp(-0.5 * mu_probe);
        states(0, k) = c;
        for (int m = 1; m < dim; ++m) {
            c *= alpha / std::sqrt(static_cast<double>(m));
            states(m, k) = c;
        }
    }

    Mat rho = (states * states.adjoint()) / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Mat> es(rho);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("sr_confusion_fock: eigendecomposition failed");
    }
    const auto& vals = es.eigenvalues();
    double vmax = vals.maxCoeff();

    // rho^{-1/2} on the support; eigenvalues below 1e-12 of the largest are
    // treated as the null space.
    Mat inv_sqrt = Mat::Zero(dim, dim);
    for (int j = 0; j < dim; ++j) {
        if (vals(j) > 1e-12 * vmax) {
            Vec v = es.eigenvectors().col(j);
            inv_sqrt += (v * v.adjoint()) / std::sqrt(vals(j));
        }
    }

    Mat overlap = states.adjoint() * inv_sqrt * states;
    ConfusionMatrix c;
    c.n = n;
    c.circulant = false;
    c.data.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 0.0);
    for (int k = 0; k < n; ++k) {
        for (int kt = 0; kt < n; ++kt) {
            c.data[static_cast<std::size_t>(k) * static_cast<std::size_t>(n) +
                   static_cast<std::size_t>(kt)] = std::norm(overlap(k, kt)) / n;
        }
    }
    c.validate(1e-8);
    return c;
}

}  // namespace cvauth
