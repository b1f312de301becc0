#pragma once

#include <string>
#include <variant>

#include "gdp/histogram.hpp"

namespace gdp {

// Parametric log-density families for gradient distributions. The same
// parameter structs serve the 1D marginal and the 2D joint forms.

struct Model1Params {
    double a1, b1, c1; // a1 > 0, b1 > 0
};

struct Model2Params {
    double a2, b2, c2; // a2 >= 0, b2 > 0
};

struct HyperLapParams {
    double a0, b0, c0; // a0 > 0, b0 in (0, 2]
};

struct LaplaceParams {
    double a0, c0;
};

struct GaussParams {
    double a0, c0;
};

struct CdfModelParams {
    double t; // single scale parameter, t > 0
};

using ModelParams = std::variant<Model1Params, Model2Params, HyperLapParams, LaplaceParams,
                                 GaussParams, CdfModelParams>;

enum class ModelFamily { Model1, Model2, HyperLaplacian, Laplacian, Gaussian, Cdf };

ModelFamily family_of(const ModelParams& m);
const char* family_name(ModelFamily f);
ModelFamily family_from_name(const std::string& name);

/// Throws InputError when a sign constraint is violated.
void validate(const ModelParams& m);

/// Unnormalized log density at a 1D gradient value.
double eval_log_pdf(const ModelParams& m, double g);

/// Unnormalized log density at a gradient pair (2D joint forms).
double eval_log_pdf(const ModelParams& m, double gx, double gy);

/// Antiderivative of exp(-(T g)^2)/g^2 with a unit Heaviside step at the
/// origin; g = 0 evaluates to the symmetric-limit value 1/2.
double eval_cdf_model(double t, double g);

/// eval_cdf_model divided by its g -> +inf limit (1 - T*sqrt(pi)), mapping the
/// curve onto [0,1] when that limit is positive.
double eval_cdf_model_normalized(double t, double g);

struct FitOptions {
    // Coordinate of bin k is k*scale. 1/255 is the "unit" convention ([-1,1]);
    // 1.0 is the paper's integer-bin convention.
    double scale = 1.0 / 255.0;
    int max_iter = 200;
    double tol = 1e-12;
};

inline const char* convention_name(double scale) {
    return scale == 1.0 ? "bins" : "unit";
}

struct FitReport {
    ModelParams params;
    int dims = 1;
    double sse = 0.0;
    double r2 = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string domain_convention;
};

/// Least squares between the model log-pdf and the empirical log-probability
/// over bins with nonzero mass. Damped LM polish over 5 deterministic starts.
FitReport fit(const Marginal1D& m, ModelFamily family, const FitOptions& opts = {});
FitReport fit(const GradHist2D& h, ModelFamily family, const FitOptions& opts = {});

/// Closed-form estimate of the CDF-model scale from a 1D marginal; sums run
/// over nonzero bins excluding the origin. Throws EstimationError when the
/// radicand is not positive (distribution far from the model family).
double fit_T_closed_form(const Marginal1D& m, double scale = 1.0 / 255.0);

/// Residual objective behind fit_T_closed_form, exposed for diagnostics.
double cdf_model_objective(const Marginal1D& m, double t, double scale = 1.0 / 255.0);

/// Model pdf discretized on the bin grid and renormalized. Families singular
/// at the origin get zero mass in the center bin.
Marginal1D discretize_1d(const ModelParams& m, double scale);
GradHist2D discretize_2d(const ModelParams& m, double scale);

/// Shannon entropy (nats) of the discretized, renormalized 2D model pdf.
double model_entropy(const ModelParams& m, double scale);

std::string to_json(const FitReport& r);

} // namespace gdp
