#pragma once

#include "gdp/prior.hpp"

namespace gdp {

GradientField remap_linear(const GradientField& g, double alpha);

struct RemapReport {
    double curl_rms = 0.0;       // remapped fields are generally non-integrable
    bool degenerate_x = false;   // component was constant and mapped to the target median
    bool degenerate_y = false;
};

/// Exact histogram specification of each gradient component onto the prior's
/// corresponding marginal (monotone rank map, ties broken by pixel index).
GradientField remap_nonlinear(const GradientField& g, const PriorBundle& target,
                              RemapReport* report = nullptr);

/// RMS of the discrete curl over the interior; zero for integrable fields.
double curl_rms(const GradientField& g);

/// Least-squares solution of grad(I) ~ g via the Poisson equation with the
/// Neumann discretization matching gradient/divergence, solved by cosine
/// transform diagonalization. The solution mean is set to mean_anchor; the
/// result is not clamped.
Image poisson_reconstruct(const GradientField& g, double mean_anchor);

enum class RemapKind { Linear, Nonlinear };

struct NaturalizeReport {
    double n_f_before = 0.0;
    double n_f_after = 0.0;
    double hellinger_before = 0.0;
    double hellinger_after = 0.0;
    double curl_rms = 0.0; // nonlinear mode only
};

Image naturalize_image(const Image& img, const PriorBundle& prior, RemapKind mode,
                       NaturalizeReport* report = nullptr);

} // namespace gdp
