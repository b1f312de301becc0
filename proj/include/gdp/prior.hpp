#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gdp/models.hpp"

namespace gdp {

/// Learned gradient distribution prior: histogram, fitted models and the two
/// constants the restoration solvers consume.
struct PriorBundle {
    GradHist2D hist;
    double t_pr = 0.46;   // CDF-model scale of the prior
    double b_pr = 0.0239; // Model 2 b2 of the prior
    std::vector<FitReport> model_fits;
    double entropy = 0.0;
    double scale = 1.0; // bin coordinate scale; 1.0 = "bins", 1/255 = "unit"
    std::string provenance;

    std::string domain_convention() const { return convention_name(scale); }
};

struct CorpusImageStats {
    std::string path;
    double rms = 0.0;
    double hellinger = 0.0;
    double kl = 0.0;
    double entropy = 0.0;
};

struct LearnReport {
    std::vector<CorpusImageStats> per_image;
    int skipped = 0;
};

struct LearnOptions {
    double scale = 1.0; // fitting convention for the stored prior constants
    WeightMode weight_mode = WeightMode::Images;
    bool fit_models = true; // all five families in 1D and 2D, plus the CDF model
    int threads = 0;        // 0 = hardware concurrency
};

/// Aggregates the corpus histogram, fits the model families and estimates the
/// prior constants. Unreadable images are skipped (and counted in the report).
PriorBundle learn_prior(const std::vector<std::string>& corpus, const LearnOptions& opts = {},
                        LearnReport* report = nullptr);

/// Bundled default prior derived from published constants: a synthetic product
/// histogram whose marginals follow exp(-(t_pr g)^2)/(1+g^2) on integer bins,
/// so that the closed-form scale of its own marginal reproduces t_pr.
PriorBundle paper_default_prior();

/// N_f = T / t_pr, with T fitted from the image marginal under the prior's
/// domain convention.
double naturalness_factor(const Image& img, const PriorBundle& prior);

double naturalness_factor(const GradHist2D& h, const PriorBundle& prior);

struct NaturalnessMap {
    Image map;             // per-pixel KL divergence of the local window vs the prior
    double mean = 0.0;
    double median = 0.0;
    bool low_confidence = false; // fewer than 1000 valid gradients per window
};

/// Sliding-window KL divergence between local gradient histograms and the
/// prior; the window is (2w+1)^2 and must fit inside the image.
NaturalnessMap naturalness_map(const Image& img, const PriorBundle& prior, int w);

std::string to_json(const PriorBundle& p, bool include_histogram = true);
PriorBundle prior_from_json(const std::string& text);

void save_prior(const PriorBundle& p, const std::string& path, bool include_histogram = true);
PriorBundle load_prior(const std::string& path);

} // namespace gdp
