#include "gdp/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace gdp {

double Image::mean() const {
    if (data_.empty())
        return 0.0;
    return std::accumulate(data_.begin(), data_.end(), 0.0) / static_cast<double>(data_.size());
}

double Kernel::sum() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
}

void Kernel::normalize() {
    double s = sum();
    if (!(s > 0.0))
        throw InputError("kernel has no positive mass to normalize");
    for (double& w : weights)
        w /= s;
}

GradientField gradient(const Image& img) {
    if (img.width() < 2 || img.height() < 2)
        throw DimensionError("gradient requires at least a 2x2 image");
    const int w = img.width(), h = img.height();
    GradientField g(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            size_t i = g.idx(x, y);
            if (x < w - 1)
                g.gx[i] = img.at(x + 1, y) - img.at(x, y);
            if (y < h - 1)
                g.gy[i] = img.at(x, y + 1) - img.at(x, y);
        }
    }
    return g;
}

Image divergence(const GradientField& g) {
    const int w = g.width, h = g.height;
    if (w < 2 || h < 2)
        throw DimensionError("divergence requires at least a 2x2 field");
    Image out(w, h);
    // gx on the last column and gy on the last row are structurally zero and
    // never contribute, regardless of stored values.
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            double dx;
            if (x == 0)
                dx = g.gx[g.idx(0, y)];
            else if (x == w - 1)
                dx = -g.gx[g.idx(w - 2, y)];
            else
                dx = g.gx[g.idx(x, y)] - g.gx[g.idx(x - 1, y)];
            double dy;
            if (y == 0)
                dy = g.gy[g.idx(x, 0)];
            else if (y == h - 1)
                dy = -g.gy[g.idx(x, h - 2)];
            else
                dy = g.gy[g.idx(x, y)] - g.gy[g.idx(x, y - 1)];
            out.at(x, y) = dx + dy;
        }
    }
    return out;
}

Image convolve(const Image& img, const Kernel& k, ConvMode mode) {
    if (k.width > img.width() || k.height > img.height())
        throw DimensionError("kernel larger than image");
    const int w = img.width(), h = img.height();
    const int rx = k.width / 2, ry = k.height / 2;
    Image out = img; // interior mode keeps the margin as-is
    if (mode == ConvMode::ZeroPad) {
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                double acc = 0.0;
                for (int j = -ry; j <= ry; ++j) {
                    int yy = y - j;
                    if (yy < 0 || yy >= h)
                        continue;
                    for (int i = -rx; i <= rx; ++i) {
                        int xx = x - i;
                        if (xx < 0 || xx >= w)
                            continue;
                        acc += k.at(i + rx, j + ry) * img.at(xx, yy);
                    }
                }
                out.at(x, y) = acc;
            }
        }
    } else {
        for (int y = ry; y < h - ry; ++y) {
            for (int x = rx; x < w - rx; ++x) {
                double acc = 0.0;
                for (int j = -ry; j <= ry; ++j)
                    for (int i = -rx; i <= rx; ++i)
                        acc += k.at(i + rx, j + ry) * img.at(x - i, y - j);
                out.at(x, y) = acc;
            }
        }
    }
    return out;
}

Kernel flip(const Kernel& k) {
    Kernel out(k.width, k.height);
    for (int y = 0; y < k.height; ++y)
        for (int x = 0; x < k.width; ++x)
            out.at(x, y) = k.at(k.width - 1 - x, k.height - 1 - y);
    return out;
}

Kernel gaussian_kernel(double sigma, int radius) {
    if (!(sigma > 0.0))
        throw InputError("gaussian_kernel: sigma must be positive");
    if (radius < 1)
        throw InputError("gaussian_kernel: radius must be >= 1");
    Kernel k(2 * radius + 1, 2 * radius + 1);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (int j = -radius; j <= radius; ++j)
        for (int i = -radius; i <= radius; ++i)
            k.at(i + radius, j + radius) = std::exp(-(i * i + j * j) * inv);
    k.normalize();
    return k;
}

Image add_gaussian_noise(const Image& img, double sigma, uint64_t seed) {
    if (sigma < 0.0)
        throw InputError("add_gaussian_noise: sigma must be >= 0");
    Image out = img;
    if (sigma == 0.0)
        return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, sigma);
    for (double& v : out.data())
        v += dist(rng);
    return out;
}

Image resample_to(const Image& img, int new_w, int new_h, ResampleMethod method) {
    if (new_w < 2 || new_h < 2)
        throw DimensionError("resample: output smaller than 2x2");
    if (new_w == img.width() && new_h == img.height())
        return img;
    Image out(new_w, new_h);
    const double sx = static_cast<double>(img.width()) / new_w;
    const double sy = static_cast<double>(img.height()) / new_h;
    if (method == ResampleMethod::Nearest) {
        for (int y = 0; y < new_h; ++y) {
            int yy = std::min(img.height() - 1, static_cast<int>((y + 0.5) * sy));
            for (int x = 0; x < new_w; ++x) {
                int xx = std::min(img.width() - 1, static_cast<int>((x + 0.5) * sx));
                out.at(x, y) = img.at(xx, yy);
            }
        }
    } else {
        for (int y = 0; y < new_h; ++y) {
            double fy = (y + 0.5) * sy - 0.5;
            int y0 = static_cast<int>(std::floor(fy));
            double wy = fy - y0;
            int y1 = std::min(img.height() - 1, std::max(0, y0 + 1));
            y0 = std::min(img.height() - 1, std::max(0, y0));
            for (int x = 0; x < new_w; ++x) {
                double fx = (x + 0.5) * sx - 0.5;
                int x0 = static_cast<int>(std::floor(fx));
                double wx = fx - x0;
                int x1 = std::min(img.width() - 1, std::max(0, x0 + 1));
                x0 = std::min(img.width() - 1, std::max(0, x0));
                out.at(x, y) = (1 - wy) * ((1 - wx) * img.at(x0, y0) + wx * img.at(x1, y0)) +
                               wy * ((1 - wx) * img.at(x0, y1) + wx * img.at(x1, y1));
            }
        }
    }
    return out;
}

Image resample(const Image& img, double factor, ResampleMethod method) {
    if (!(factor > 0.0))
        throw InputError("resample: factor must be positive");
    int nw = static_cast<int>(std::lround(img.width() * factor));
    int nh = static_cast<int>(std::lround(img.height() * factor));
    return resample_to(img, nw, nh, method);
}

} // namespace gdp
