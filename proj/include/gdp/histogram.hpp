#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gdp/image.hpp"

namespace gdp {

constexpr int kBinMax = 255;                    // gradient bins span [-255, 255]
constexpr int kBinCount = 2 * kBinMax + 1;      // 511 per axis

enum class WeightMode { Images, Pixels };

/// Normalized joint histogram of integer gradient pairs (u,v) = round(255*g).
/// Storage is row-major with v (the Gy bin) as the row index.
class GradHist2D {
public:
    GradHist2D() : bins_(static_cast<size_t>(kBinCount) * kBinCount, 0.0) {}

    double& at(int u, int v) { return bins_[index(u, v)]; }
    double at(int u, int v) const { return bins_[index(u, v)]; }

    static size_t index(int u, int v) {
        return static_cast<size_t>(v + kBinMax) * kBinCount + (u + kBinMax);
    }

    std::vector<double>& bins() { return bins_; }
    const std::vector<double>& bins() const { return bins_; }

    double total() const;
    void renormalize(); // throws InputError when there is no mass

    size_t count = 0;  // pixels accumulated
    size_t images = 0; // images aggregated

private:
    std::vector<double> bins_;
};

/// Normalized 1D distribution over integer gradient values [-255, 255].
struct Marginal1D {
    std::vector<double> bins;

    Marginal1D() : bins(kBinCount, 0.0) {}

    double& at(int u) { return bins[u + kBinMax]; }
    double at(int u) const { return bins[u + kBinMax]; }
};

enum class Axis { X, Y };

enum class DistanceMetric { L1, L2, Rms, Cosine, Chi2, Hellinger, Kl, EmdMarginal };

/// Histogram of one image's valid forward-difference gradients.
GradHist2D accumulate(const Image& img);

GradHist2D merge(const GradHist2D& a, const GradHist2D& b, WeightMode mode);

Marginal1D marginal(const GradHist2D& h, Axis axis);

/// Mean of the x and y marginals.
Marginal1D averaged_marginal(const GradHist2D& h);

/// Inclusive 2D prefix sums; the (255,255) corner equals 1.
std::vector<double> cdf2d(const GradHist2D& h);

double distance(const GradHist2D& p, const GradHist2D& q, DistanceMetric metric,
                bool kl_smoothing = true);

double distance(const Marginal1D& p, const Marginal1D& q, DistanceMetric metric,
                bool kl_smoothing = true);

/// Shannon entropy in nats, with 0*log(0) = 0.
double entropy(const GradHist2D& h);

struct SparsityPoint {
    double cutoff;
    double s_p; // fraction of bins with probability above the cutoff
    double c_h; // probability mass carried by those bins
};

std::vector<SparsityPoint> sparsity_curve(const GradHist2D& h, const std::vector<double>& cutoffs);

enum class CorrelationScale { Linear, Log };

/// Pearson correlation of the two gradient coordinates under the histogram
/// weights. Log scale transforms coordinates with sign(g)*log(1+|g|); the
/// paper does not define its log-scale variant, so this choice is flagged in
/// CLI output.
double component_correlation(const GradHist2D& h, CorrelationScale scale);

/// AC(d,r): Pearson correlation between the d-th order horizontal forward
/// difference of the image and its horizontal shift by r, for r = 0..max_shift.
std::vector<double> autocorrelation(const Image& img, int order, int max_shift);

std::string to_json(const GradHist2D& h, WeightMode mode);
GradHist2D hist_from_json(const std::string& text, WeightMode* mode_out = nullptr);

void write_marginal_csv(const Marginal1D& m, const std::string& path);
void write_sparsity_csv(const std::vector<SparsityPoint>& pts, const std::string& path);

const char* metric_name(DistanceMetric m);
DistanceMetric metric_from_name(const std::string& name);

} // namespace gdp
