#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "gdp/image.hpp"

namespace gdp {

struct DiffusionConfig {
    double lambda = 0.05;  // regularization weight >= 0
    double dt = 0.2;       // explicit-stability bound for the Laplacian step is 0.25
    double t_pr = 0.46;
    double b_pr = 0.0239;
    double eps = 2e-4;     // max-norm update threshold
    int max_iter = 500;
    int multiscale_levels = 1;

    void check() const;
};

/// W = t^2 + (b - v)/(b + v)^2 with v the squared gradient magnitude.
double diffusion_coefficient(double v, double t_pr, double b_pr);

struct LemmaRoots {
    double v_lower = 0.0;
    double v_upper = 0.0;
};

/// Sign-change points of the diffusion coefficient. Empty when t^2 b > 1/8
/// (W >= 0 everywhere); at equality both roots coincide.
std::optional<LemmaRoots> lemma_roots(double t_pr, double b_pr);

struct IterRecord {
    int level;
    int iter;
    double energy;
    double max_update;
};

struct DenoiseReport {
    std::vector<IterRecord> iterations;
    bool converged = false;
};

/// GDP denoising: fixed-point iteration of
///   U <- U/(1+dt) + dt/(1+dt) I + dt/(1+dt) lambda W Lap(U),
/// W evaluated per pixel from central-difference |grad U|^2 and clamped to
/// [-1/b, t^2 + 1/b]. Coarse-to-fine when multiscale_levels > 1. Throws
/// DivergenceError after 10 consecutive energy increases.
Image denoise(const Image& img, const DiffusionConfig& cfg, DenoiseReport* report = nullptr);

/// Denoising functional: 1/2 ||U-I||^2 + lambda/2 (t^2 |grad U|^2 +
/// log(b + |grad U|^2)), forward-difference discretization.
double denoise_energy(const Image& u, const Image& img, const DiffusionConfig& cfg);

/// Exact gradient of denoise_energy under the same discretization.
Image denoise_energy_gradient(const Image& u, const Image& img, const DiffusionConfig& cfg);

using ImageOp = std::function<Image(const Image&)>;

struct DcReport {
    int iterations = 0;
    std::vector<double> energies; // filled when an energy callback is given
};

/// Proximal-point iteration for the split E = E1 - E2 with quadratic Bregman
/// function: each step solves U + dt grad_e1(U) = U_i + dt grad_e2(U_i).
/// grad_e1 must be affine; the inner solve runs conjugate gradients.
Image dc_minimize(const ImageOp& grad_e1, const ImageOp& grad_e2, const Image& init, double dt,
                  double eps, int max_iter, const std::function<double(const Image&)>& energy = {},
                  DcReport* report = nullptr);

/// Plain smoothed-TV gradient descent, kept as the comparison baseline.
Image tv_denoise(const Image& img, double lambda, double dt = 0.2, double eps = 2e-4,
                 int max_iter = 500);

/// lambda = c * sigma^2 rule shared by the CLI and the tests.
double auto_lambda(double sigma_hat);

} // namespace gdp
