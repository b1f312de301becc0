#pragma once

#include "gdp/prior.hpp"
#include "gdp/restore.hpp"

namespace gdp {

struct DeconvConfig {
    int kernel_size = 9; // odd, < min(image dims)/2
    double lambda = 2e-3;
    double dt = 0.2;
    double eps = 1e-4;
    int max_outer = 12;
    int inner_iters = 12; // image-update steps per outer iteration
    int levels = 3;
    double fft_eps = 1e-6; // denominator floor, relative to the peak

    void check(int img_w, int img_h) const;
};

/// Wiener-style frequency-domain kernel estimate from the gradient fields of
/// the latent image and the observation. Numerator and denominator are summed
/// over both gradient components; the denominator is floored at
/// fft_eps * max(denominator). The inverse transform is cropped to the
/// centered size x size window. Entries may be negative (project afterwards).
Kernel estimate_kernel(const GradientField& g_latent, const GradientField& g_obs, int size,
                       double fft_eps);

/// Zeroes negative entries and renormalizes to unit mass.
Kernel project_kernel(const Kernel& raw);

struct DeconvReport {
    std::vector<Kernel> per_scale_kernels;
    std::vector<double> energies; // finest-scale image-update energies
    int outer_iterations = 0;
};

/// Alternating blind deconvolution: kernel in the gradient domain, latent
/// image in the spatial domain, coarse-to-fine.
std::pair<Image, Kernel> blind_deconvolve(const Image& img, const PriorBundle& prior,
                                          const DeconvConfig& cfg,
                                          DeconvReport* report = nullptr);

/// Latent-image estimation with a fixed known kernel (no alternation).
Image deconvolve_nonblind(const Image& img, const Kernel& kernel, const PriorBundle& prior,
                          const DeconvConfig& cfg, DeconvReport* report = nullptr);

/// Up-sampling by an integer factor with a known Gaussian blur model; the
/// kernel step is skipped, only the latent image is iterated.
Image zoom(const Image& img, int factor, double sigma, const PriorBundle& prior,
           const DeconvConfig& cfg);

} // namespace gdp
