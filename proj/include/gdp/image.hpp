#pragma once

#include <cstdint>
#include <vector>

#include "gdp/error.hpp"

namespace gdp {

/// Grayscale image, row-major, canonical intensity range [0,1].
/// Values are not clamped in memory; clamping happens when writing files.
class Image {
public:
    Image() = default;
    Image(int width, int height, double fill = 0.0)
        : width_(width), height_(height),
          data_(static_cast<size_t>(width) * height, fill) {
        if (width <= 0 || height <= 0)
            throw DimensionError("image dimensions must be positive");
    }

    int width() const { return width_; }
    int height() const { return height_; }
    size_t size() const { return data_.size(); }

    double& at(int x, int y) { return data_[static_cast<size_t>(y) * width_ + x]; }
    double at(int x, int y) const { return data_[static_cast<size_t>(y) * width_ + x]; }

    double& operator[](size_t i) { return data_[i]; }
    double operator[](size_t i) const { return data_[i]; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    bool same_size(const Image& o) const {
        return width_ == o.width_ && height_ == o.height_;
    }

    double mean() const;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

/// Per-pixel forward-difference gradient pair. gx is not a full difference on
/// the last column and gy is not one on the last row; those entries are stored
/// as 0. valid(x,y) is true only where both components are full differences,
/// which is the set of pixels that enter histograms.
struct GradientField {
    int width = 0;
    int height = 0;
    std::vector<double> gx;
    std::vector<double> gy;

    GradientField() = default;
    GradientField(int w, int h)
        : width(w), height(h),
          gx(static_cast<size_t>(w) * h, 0.0), gy(static_cast<size_t>(w) * h, 0.0) {}

    size_t idx(int x, int y) const { return static_cast<size_t>(y) * width + x; }
    bool valid(int x, int y) const { return x < width - 1 && y < height - 1; }
    size_t valid_count() const {
        return static_cast<size_t>(width - 1) * static_cast<size_t>(height - 1);
    }
};

/// Odd-sized nonnegative convolution kernel, normalized to unit sum.
struct Kernel {
    int width = 0;
    int height = 0;
    std::vector<double> weights;

    Kernel() = default;
    Kernel(int w, int h, double fill = 0.0)
        : width(w), height(h), weights(static_cast<size_t>(w) * h, fill) {
        if (w <= 0 || h <= 0 || w % 2 == 0 || h % 2 == 0)
            throw DimensionError("kernel dimensions must be odd and positive");
    }

    double& at(int x, int y) { return weights[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return weights[static_cast<size_t>(y) * width + x]; }

    double sum() const;
    void normalize(); // throws InputError if the total weight is not positive
};

enum class ConvMode { Interior, ZeroPad };
enum class ResampleMethod { Nearest, Bilinear };

/// Forward differences; requires width, height >= 2.
GradientField gradient(const Image& img);

/// Backward-difference divergence, the exact negative adjoint of gradient():
/// divergence(gradient(I)) is the 5-point Neumann Laplacian of I.
Image divergence(const GradientField& g);

Image convolve(const Image& img, const Kernel& k, ConvMode mode = ConvMode::Interior);

/// Kernel flipped in both axes (adjoint of convolution by k).
Kernel flip(const Kernel& k);

Kernel gaussian_kernel(double sigma, int radius);

/// i.i.d. zero-mean Gaussian noise, deterministic for a fixed seed. Output is
/// not clamped.
Image add_gaussian_noise(const Image& img, double sigma, uint64_t seed);

Image resample(const Image& img, double factor, ResampleMethod method);

/// Resample to explicit target dimensions (both >= 2).
Image resample_to(const Image& img, int new_w, int new_h, ResampleMethod method);

} // namespace gdp
