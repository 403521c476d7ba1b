#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "pwlab/errors.hpp"
#include "pwlab/functions.hpp"
#include "pwlab/geometry.hpp"

// The explicit constants of the inequality: kappa, alpha, beta, beta', the
// chain recurrence and the final C and C~.

namespace pwlab {

// kappa(D) = (n+1) omega_n diam(D)^n
inline double kappa(const Domain& d) {
    const int n = d.dim();
    return (n + 1) * unit_ball_volume(n) * std::pow(d.diameter(), n);
}

// alpha(p+, S, D) = 2^{p+} kappa(D) / |S|
inline double alpha_constant(double p_plus, const Ball& s, const Domain& d) {
    return std::pow(2.0, p_plus) * kappa(d) / s.measure();
}

struct BetaPair {
    double beta = 0.0;
    double beta_prime = 0.0;
    double alpha_omega_1 = 0.0;
    double alpha_omega_2 = 0.0;
    double overlap = 0.0;
};

// beta  = 2^{p+-1} kappa(Omega)/|D1 ∩ D2| (alpha_1 + alpha_2)
// beta' = (2^{p+} kappa(Omega)/|D1 ∩ D2| + 1)(alpha_1 + alpha_2) = 2 beta + alpha_1 + alpha_2
// with alpha_i = 2^{p+} kappa(Omega)/|S_i|.
inline BetaPair betas(double p_plus, const Ball& s1, const Ball& s2, const Domain& d1,
                      const Domain& d2, const Domain& omega, long mc_samples = 200000,
                      std::uint64_t seed = 0x5eedULL) {
    BetaPair out;
    out.overlap = overlap_measure(d1, d2, mc_samples, seed).value;
    if (!(out.overlap > 0.0)) throw EmptyOverlap("betas: |D1 ∩ D2| must be positive");
    const double k = kappa(omega);
    out.alpha_omega_1 = std::pow(2.0, p_plus) * k / s1.measure();
    out.alpha_omega_2 = std::pow(2.0, p_plus) * k / s2.measure();
    const double asum = out.alpha_omega_1 + out.alpha_omega_2;
    out.beta = std::pow(2.0, p_plus - 1.0) * k / out.overlap * asum;
    out.beta_prime = (std::pow(2.0, p_plus) * k / out.overlap + 1.0) * asum;
    return out;
}

// beta'_1 = (kappa_p + 1) 2 alpha~, beta'_i = (kappa_p + 1)(beta'_{i-1} + alpha~).
inline std::vector<double> chain_recurrence(double kappa_p, double alpha_tilde, int n_pieces) {
    if (!(kappa_p > 0.0) || !(alpha_tilde > 0.0) || n_pieces < 2)
        throw InvalidGeometry("chain_recurrence: needs kappa_p, alpha~ > 0 and N >= 2");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n_pieces - 1));
    out.push_back((kappa_p + 1.0) * 2.0 * alpha_tilde);
    for (int i = 2; i <= n_pieces - 1; ++i)
        out.push_back((kappa_p + 1.0) * (out.back() + alpha_tilde));
    return out;
}

struct ConstantsReport {
    int n = 0;
    int N = 0;
    double R = 0.0;
    double lambda = 0.0; // undefined (0) for N == 1
    double kappa_omega = 0.0;
    double p_plus = 0.0;
    double omega_measure = 0.0;
    double omega_diameter = 0.0;
    std::vector<double> alpha_per_piece; // 2^{p+} kappa(D_i) / |S_i|
    double alpha_tilde = 0.0;            // 2^{p+} kappa(Omega) / (omega_n R^n)
    double kappa_p = 0.0;                // 2^{p+} kappa(Omega) / lambda (N >= 2)
    std::vector<double> beta_prime_chain;
    double diam_factor = 0.0;         // (max{diam,1})^{n+p+-1} / n
    double sharper_diam_factor = 0.0; // diam^{n+p+-1} / (n+p+-1), reported for information
    double C = 0.0;
    double C_step3 = 0.0; // assembly through the recurrence bound; reported side by side
    double C_tilde = 0.0;
};

inline double classical_reduction_factor(const Domain& omega) {
    const int n = omega.dim();
    return (n + 1) * std::pow(unit_ball_volume(n), 1.0 - 1.0 / n) *
           std::pow(omega.measure(), 1.0 / n);
}

// Full constants assembly for a chain. For N == 1 the chain constant is
// replaced by the single star-shaped piece constant alpha, since the
// prefix-overlap infimum ranges over an empty index set.
inline ConstantsReport constant_C(const Chain& chain, const VariableExponent& p) {
    if (chain.pieces.empty()) throw InvalidGeometry("constant_C: empty chain");
    ConstantsReport rep;
    const Domain& omega = chain.omega;
    rep.n = omega.dim();
    rep.N = chain.N;
    rep.R = chain.R;
    rep.p_plus = p.p_plus(omega);
    rep.kappa_omega = kappa(omega);
    rep.omega_measure = omega.measure();
    rep.omega_diameter = omega.diameter();

    for (const StarPiece& sp : chain.pieces)
        rep.alpha_per_piece.push_back(alpha_constant(rep.p_plus, sp.kernel, sp.body));

    const double kernel_measure = unit_ball_volume(rep.n) * std::pow(rep.R, rep.n);
    rep.alpha_tilde = std::pow(2.0, rep.p_plus) * rep.kappa_omega / kernel_measure;

    rep.diam_factor =
        std::pow(std::max(rep.omega_diameter, 1.0), rep.n + rep.p_plus - 1.0) / rep.n;
    rep.sharper_diam_factor = std::pow(rep.omega_diameter, rep.n + rep.p_plus - 1.0) /
                              (rep.n + rep.p_plus - 1.0);

    if (chain.N == 1) {
        rep.lambda = 0.0;
        rep.C = rep.alpha_tilde / rep.omega_measure * rep.diam_factor;
        rep.C_step3 = rep.C;
    } else {
        if (!(chain.lambda > 0.0))
            throw InvalidGeometry("constant_C: chain with N >= 2 must have lambda > 0");
        rep.lambda = chain.lambda;
        rep.kappa_p = std::pow(2.0, rep.p_plus) * rep.kappa_omega / rep.lambda;
        rep.beta_prime_chain = chain_recurrence(rep.kappa_p, rep.alpha_tilde, rep.N);
        const double lead = rep.lambda / kernel_measure;
        const double grow =
            std::pow(1.0 + std::pow(2.0, rep.p_plus + 1.0) * rep.kappa_omega / rep.lambda,
                     rep.N);
        rep.C = lead * grow * rep.diam_factor / rep.omega_measure;
        rep.C_step3 = rep.alpha_tilde / rep.kappa_p *
                      std::pow(1.0 + 2.0 * rep.kappa_p, rep.N) * rep.diam_factor /
                      rep.omega_measure;
    }
    if (!(rep.C > 0.0)) throw InvalidGeometry("constant_C: constant must be positive");
    rep.C_tilde = rep.C * classical_reduction_factor(omega);
    return rep;
}

// C~ = C (n+1) omega_n^{1-1/n} |Omega|^{1/n}
inline double constant_C_tilde(const ConstantsReport& rep, const Domain& omega) {
    if (!(rep.C > 0.0)) throw InvalidGeometry("constant_C_tilde: C must be positive");
    return rep.C * classical_reduction_factor(omega);
}

} // namespace pwlab
