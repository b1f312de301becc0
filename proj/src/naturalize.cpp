#include "gdp/naturalize.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>

#include <fftw3.h>

namespace gdp {

GradientField remap_linear(const GradientField& g, double alpha) {
    if (!(alpha > 0.0))
        throw InputError("remap_linear: alpha must be positive");
    GradientField out = g;
    for (double& v : out.gx)
        v *= alpha;
    for (double& v : out.gy)
        v *= alpha;
    return out;
}

namespace {

// Values the target marginal takes, expanded to quantiles: rank r of n maps to
// the first bin whose CDF covers (r + 0.5)/n.
std::vector<double> specification_values(const Marginal1D& target, size_t n) {
    std::vector<double> cdf(kBinCount);
    double run = 0.0;
    for (int i = 0; i < kBinCount; ++i) {
        run += target.bins[i];
        cdf[i] = run;
    }
    std::vector<double> out(n);
    int bin = 0;
    for (size_t r = 0; r < n; ++r) {
        double q = (static_cast<double>(r) + 0.5) / static_cast<double>(n);
        while (bin < kBinCount - 1 && cdf[bin] < q)
            ++bin;
        out[r] = static_cast<double>(bin - kBinMax) / 255.0;
    }
    return out;
}

double target_median(const Marginal1D& target) {
    double run = 0.0;
    for (int i = 0; i < kBinCount; ++i) {
        run += target.bins[i];
        if (run >= 0.5)
            return static_cast<double>(i - kBinMax) / 255.0;
    }
    return 0.0;
}

// remaps the listed entries of comp in place; returns true when the component
// was degenerate (constant)
bool specify_component(std::vector<double>& comp, const std::vector<size_t>& idx,
                       const Marginal1D& target) {
    if (idx.empty())
        return false;
    auto [mn, mx] = std::minmax_element(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        return comp[a] < comp[b];
    });
    if (comp[*mn] == comp[*mx]) {
        double med = target_median(target);
        for (size_t i : idx)
            comp[i] = med;
        return true;
    }
    std::vector<size_t> order(idx);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (comp[a] != comp[b])
            return comp[a] < comp[b];
        return a < b; // stable tie-break by pixel index
    });
    std::vector<double> values = specification_values(target, order.size());
    for (size_t r = 0; r < order.size(); ++r)
        comp[order[r]] = values[r];
    return false;
}

} // namespace

GradientField remap_nonlinear(const GradientField& g, const PriorBundle& target,
                              RemapReport* report) {
    GradientField out = g;
    Marginal1D mx = marginal(target.hist, Axis::X);
    Marginal1D my = marginal(target.hist, Axis::Y);

    std::vector<size_t> idx, idy;
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x) {
            if (x < g.width - 1)
                idx.push_back(g.idx(x, y));
            if (y < g.height - 1)
                idy.push_back(g.idx(x, y));
        }
    bool dx = specify_component(out.gx, idx, mx);
    bool dy = specify_component(out.gy, idy, my);
    if (report) {
        report->degenerate_x = dx;
        report->degenerate_y = dy;
        report->curl_rms = curl_rms(out);
    }
    return out;
}

double curl_rms(const GradientField& g) {
    // curl = d(gx)/dy - d(gy)/dx on cells where both forward differences exist
    double s = 0.0;
    size_t n = 0;
    for (int y = 0; y + 1 < g.height - 1; ++y)
        for (int x = 0; x + 1 < g.width - 1; ++x) {
            double dgx_dy = g.gx[g.idx(x, y + 1)] - g.gx[g.idx(x, y)];
            double dgy_dx = g.gy[g.idx(x + 1, y)] - g.gy[g.idx(x, y)];
            double c = dgx_dy - dgy_dx;
            s += c * c;
            ++n;
        }
    return n ? std::sqrt(s / static_cast<double>(n)) : 0.0;
}

namespace {

std::mutex fftw_plan_mutex;

void dct2_inplace(std::vector<double>& a, int w, int h, bool inverse) {
    fftw_r2r_kind kind = inverse ? FFTW_REDFT01 : FFTW_REDFT10;
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex);
        plan = fftw_plan_r2r_2d(h, w, a.data(), a.data(), kind, kind, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex);
        fftw_destroy_plan(plan);
    }
}

} // namespace

Image poisson_reconstruct(const GradientField& g, double mean_anchor) {
    const int w = g.width, h = g.height;
    Image rhs = divergence(g);
    for (double v : rhs.data())
        if (!std::isfinite(v))
            throw NumericError("poisson_reconstruct: non-finite gradient field");

    std::vector<double> a = rhs.data();
    dct2_inplace(a, w, h, false);

    // Neumann Laplacian eigenvalues under the DCT-II basis
    for (int j = 0; j < h; ++j) {
        double lj = 2.0 * std::cos(M_PI * j / h) - 2.0;
        for (int i = 0; i < w; ++i) {
            double li = 2.0 * std::cos(M_PI * i / w) - 2.0;
            double lambda = li + lj;
            size_t k = static_cast<size_t>(j) * w + i;
            a[k] = (i == 0 && j == 0) ? 0.0 : a[k] / lambda;
        }
    }

    dct2_inplace(a, w, h, true);
    const double norm = 1.0 / (4.0 * static_cast<double>(w) * h);
    Image out(w, h);
    for (size_t k = 0; k < a.size(); ++k)
        out[k] = a[k] * norm;

    double shift = mean_anchor - out.mean();
    for (double& v : out.data())
        v += shift;
    return out;
}

Image naturalize_image(const Image& img, const PriorBundle& prior, RemapKind mode,
                       NaturalizeReport* report) {
    GradHist2D before = accumulate(img);
    double nf = naturalness_factor(before, prior);

    Image out;
    double curl = 0.0;
    if (mode == RemapKind::Linear) {
        GradientField gn = remap_linear(gradient(img), nf);
        out = poisson_reconstruct(gn, img.mean());
    } else {
        RemapReport rr;
        GradientField gn = remap_nonlinear(gradient(img), prior, &rr);
        curl = rr.curl_rms;
        out = poisson_reconstruct(gn, img.mean());
    }

    if (report) {
        GradHist2D after = accumulate(out);
        report->n_f_before = nf;
        report->n_f_after = naturalness_factor(after, prior);
        report->hellinger_before = distance(before, prior.hist, DistanceMetric::Hellinger);
        report->hellinger_after = distance(after, prior.hist, DistanceMetric::Hellinger);
        report->curl_rms = curl;
    }
    return out;
}

} // namespace gdp
