#include "gdp/deconv.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

#include <fftw3.h>

namespace gdp {

void DeconvConfig::check(int img_w, int img_h) const {
    if (kernel_size < 3 || kernel_size % 2 == 0)
        throw InputError("deconv: kernel_size must be odd and >= 3");
    if (kernel_size >= std::min(img_w, img_h) / 2)
        throw InputError("deconv: kernel_size must be < min(image dims)/2");
    if (lambda < 0.0 || !(dt > 0.0) || !(eps > 0.0) || max_outer < 1 || inner_iters < 1 ||
        levels < 1 || fft_eps < 0.0)
        throw InputError("deconv: bad configuration");
}

namespace {

std::mutex fftw_mutex;

using Cplx = std::complex<double>;

std::vector<Cplx> fft_r2c(const std::vector<double>& data, int w, int h) {
    std::vector<double> in(data);
    std::vector<Cplx> out(static_cast<size_t>(h) * (w / 2 + 1));
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex);
        plan = fftw_plan_dft_r2c_2d(h, w, in.data(),
                                    reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex);
        fftw_destroy_plan(plan);
    }
    return out;
}

std::vector<double> fft_c2r(std::vector<Cplx> freq, int w, int h) {
    std::vector<double> out(static_cast<size_t>(w) * h);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex);
        plan = fftw_plan_dft_c2r_2d(h, w, reinterpret_cast<fftw_complex*>(freq.data()),
                                    out.data(), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_mutex);
        fftw_destroy_plan(plan);
    }
    const double norm = 1.0 / (static_cast<double>(w) * h);
    for (double& v : out)
        v *= norm;
    return out;
}

Kernel delta_kernel(int size) {
    Kernel k(size, size);
    k.at(size / 2, size / 2) = 1.0;
    return k;
}

// shifts the kernel so its center of mass sits on the window center
Kernel recenter_kernel(const Kernel& k) {
    double cx = 0.0, cy = 0.0, tot = 0.0;
    for (int y = 0; y < k.height; ++y)
        for (int x = 0; x < k.width; ++x) {
            double v = k.at(x, y);
            cx += v * x;
            cy += v * y;
            tot += v;
        }
    if (!(tot > 0.0))
        return k;
    int sx = static_cast<int>(std::lround(k.width / 2 - cx / tot));
    int sy = static_cast<int>(std::lround(k.height / 2 - cy / tot));
    if (sx == 0 && sy == 0)
        return k;
    Kernel out(k.width, k.height);
    for (int y = 0; y < k.height; ++y)
        for (int x = 0; x < k.width; ++x) {
            int nx = x + sx, ny = y + sy;
            if (nx >= 0 && nx < k.width && ny >= 0 && ny < k.height)
                out.at(nx, ny) = k.at(x, y);
        }
    double s = out.sum();
    if (!(s > 0.0))
        return k;
    for (double& v : out.weights)
        v /= s;
    return out;
}

// squared gradient magnitude (central differences) and 5-point Laplacian,
// shared with the diffusion step
void central_sqgrad(const Image& u, std::vector<double>& v) {
    const int w = u.width(), h = u.height();
    v.resize(u.size());
    for (int y = 0; y < h; ++y) {
        int yu = std::max(0, y - 1), yd = std::min(h - 1, y + 1);
        for (int x = 0; x < w; ++x) {
            int xl = std::max(0, x - 1), xr = std::min(w - 1, x + 1);
            double gx = 0.5 * (u.at(xr, y) - u.at(xl, y));
            double gy = 0.5 * (u.at(x, yd) - u.at(x, yu));
            v[static_cast<size_t>(y) * w + x] = gx * gx + gy * gy;
        }
    }
}

void laplacian(const Image& u, std::vector<double>& lap) {
    const int w = u.width(), h = u.height();
    lap.resize(u.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double c = u.at(x, y), s = 0.0;
            if (x > 0)
                s += u.at(x - 1, y) - c;
            if (x < w - 1)
                s += u.at(x + 1, y) - c;
            if (y > 0)
                s += u.at(x, y - 1) - c;
            if (y < h - 1)
                s += u.at(x, y + 1) - c;
            lap[static_cast<size_t>(y) * w + x] = s;
        }
}

// residual of the interior data term, zero on the margin
Image interior_residual(const Image& u, const Kernel& k, const Image& img) {
    Image conv = convolve(u, k, ConvMode::Interior);
    Image r(u.width(), u.height(), 0.0);
    const int rx = k.width / 2, ry = k.height / 2;
    for (int y = ry; y < u.height() - ry; ++y)
        for (int x = rx; x < u.width() - rx; ++x)
            r.at(x, y) = conv.at(x, y) - img.at(x, y);
    return r;
}

double deconv_energy(const Image& u, const Image& img, const Kernel& k,
                     const PriorBundle& prior, double lambda) {
    Image r = interior_residual(u, k, img);
    double e = 0.0;
    for (double v : r.data())
        e += 0.5 * v * v;
    GradientField g = gradient(u);
    const double t2 = prior.t_pr * prior.t_pr;
    for (size_t i = 0; i < u.size(); ++i) {
        double v = g.gx[i] * g.gx[i] + g.gy[i] * g.gy[i];
        e += 0.5 * lambda * (t2 * v + std::log(prior.b_pr + v));
    }
    return e;
}

// one Algorithm-2-style diffusion step with the convolution data term
void diffusion_step(Image& u, const Image& img, const Kernel& k, const Kernel& k_flip,
                    const PriorBundle& prior, double lambda, double dt) {
    const double w_lo = -1.0 / prior.b_pr;
    const double w_hi = prior.t_pr * prior.t_pr + 1.0 / prior.b_pr;
    Image r = interior_residual(u, k, img);
    Image data_grad = convolve(r, k_flip, ConvMode::ZeroPad);
    std::vector<double> v, lap;
    central_sqgrad(u, v);
    laplacian(u, lap);
    for (size_t i = 0; i < u.size(); ++i) {
        double w = std::clamp(diffusion_coefficient(v[i], prior.t_pr, prior.b_pr), w_lo, w_hi);
        u[i] += dt * (-data_grad[i] + lambda * w * lap[i]);
    }
}

// energy-descent step for the non-blind path: exact gradient plus backtracking
bool descent_step(Image& u, const Image& img, const Kernel& k, const Kernel& k_flip,
                  const PriorBundle& prior, double lambda, double& step, double* energy_io) {
    Image r = interior_residual(u, k, img);
    Image data_grad = convolve(r, k_flip, ConvMode::ZeroPad);
    GradientField g = gradient(u);
    const double t2 = prior.t_pr * prior.t_pr;
    GradientField scaled(g.width, g.height);
    for (size_t i = 0; i < u.size(); ++i) {
        double v = g.gx[i] * g.gx[i] + g.gy[i] * g.gy[i];
        double c = t2 + 1.0 / (prior.b_pr + v);
        scaled.gx[i] = c * g.gx[i];
        scaled.gy[i] = c * g.gy[i];
    }
    Image div = divergence(scaled);
    Image grad(u.width(), u.height());
    for (size_t i = 0; i < u.size(); ++i)
        grad[i] = data_grad[i] - lambda * div[i];

    double e0 = *energy_io;
    for (int attempt = 0; attempt < 20; ++attempt) {
        Image trial = u;
        for (size_t i = 0; i < u.size(); ++i)
            trial[i] -= step * grad[i];
        double e = deconv_energy(trial, img, k, prior, lambda);
        if (e < e0) {
            u = std::move(trial);
            *energy_io = e;
            step = std::min(step * 1.25, 1.0);
            return true;
        }
        step *= 0.5;
    }
    return false;
}

double grad_change(const Image& a, const Image& b) {
    GradientField ga = gradient(a), gb = gradient(b);
    double s = 0.0;
    for (size_t i = 0; i < ga.gx.size(); ++i) {
        double dx = ga.gx[i] - gb.gx[i], dy = ga.gy[i] - gb.gy[i];
        s += dx * dx + dy * dy;
    }
    return std::sqrt(s / static_cast<double>(ga.gx.size()));
}

Kernel resize_kernel(const Kernel& k, int new_size) {
    if (new_size == k.width)
        return k;
    Image tmp(k.width, k.height);
    for (size_t i = 0; i < k.weights.size(); ++i)
        tmp[i] = k.weights[i];
    Image up = resample_to(tmp, new_size, new_size, ResampleMethod::Bilinear);
    Kernel out(new_size, new_size);
    for (size_t i = 0; i < out.weights.size(); ++i)
        out.weights[i] = up[i];
    return project_kernel(out);
}

} // namespace

Kernel estimate_kernel(const GradientField& g_latent, const GradientField& g_obs, int size,
                       double fft_eps) {
    if (g_latent.width != g_obs.width || g_latent.height != g_obs.height)
        throw DimensionError("estimate_kernel: field size mismatch");
    if (size < 1 || size % 2 == 0)
        throw InputError("estimate_kernel: size must be odd");
    const int w = g_latent.width, h = g_latent.height;

    auto fux = fft_r2c(g_latent.gx, w, h);
    auto fuy = fft_r2c(g_latent.gy, w, h);
    auto fix = fft_r2c(g_obs.gx, w, h);
    auto fiy = fft_r2c(g_obs.gy, w, h);

    const size_t nc = fux.size();
    std::vector<Cplx> ratio(nc);
    double max_den = 0.0;
    for (size_t i = 0; i < nc; ++i)
        max_den = std::max(max_den, std::norm(fux[i]) + std::norm(fuy[i]));
    if (!(max_den > 0.0))
        throw SingularityError("estimate_kernel: latent gradient field is identically zero");
    const double floor = fft_eps * max_den;
    for (size_t i = 0; i < nc; ++i) {
        Cplx num = std::conj(fux[i]) * fix[i] + std::conj(fuy[i]) * fiy[i];
        double den = std::norm(fux[i]) + std::norm(fuy[i]);
        double eff = std::max(den, floor);
        ratio[i] = eff > 0.0 ? num / eff : Cplx(0.0, 0.0);
    }

    std::vector<double> full = fft_c2r(std::move(ratio), w, h);
    Kernel k(size, size);
    const int half = size / 2;
    for (int dy = -half; dy <= half; ++dy)
        for (int dx = -half; dx <= half; ++dx) {
            int yy = ((dy % h) + h) % h;
            int xx = ((dx % w) + w) % w;
            k.at(dx + half, dy + half) = full[static_cast<size_t>(yy) * w + xx];
        }
    return k;
}

Kernel project_kernel(const Kernel& raw) {
    Kernel k = raw;
    double s = 0.0;
    for (double& v : k.weights) {
        if (v < 0.0)
            v = 0.0;
        s += v;
    }
    if (!(s > 0.0))
        throw EstimationError("project_kernel: no positive mass");
    for (double& v : k.weights)
        v /= s;
    return k;
}

std::pair<Image, Kernel> blind_deconvolve(const Image& img, const PriorBundle& prior,
                                          const DeconvConfig& cfg, DeconvReport* report) {
    cfg.check(img.width(), img.height());

    std::vector<Image> pyramid{img};
    std::vector<int> ksizes{cfg.kernel_size};
    for (int l = 1; l < cfg.levels; ++l) {
        const Image& prev = pyramid.back();
        if (prev.width() < 32 || prev.height() < 32)
            break;
        pyramid.push_back(resample(prev, 0.5, ResampleMethod::Bilinear));
        int ks = cfg.kernel_size >> l;
        if (ks % 2 == 0)
            ++ks;
        ksizes.push_back(std::max(3, ks));
    }

    const int coarsest = static_cast<int>(pyramid.size()) - 1;
    Image u = pyramid[coarsest];
    Kernel k = delta_kernel(ksizes[coarsest]);

    for (int l = coarsest; l >= 0; --l) {
        const Image& data = pyramid[l];
        if (l != coarsest) {
            u = resample_to(u, data.width(), data.height(), ResampleMethod::Bilinear);
            k = resize_kernel(k, ksizes[l]);
        }
        GradientField g_obs = gradient(data);
        for (int outer = 0; outer < cfg.max_outer; ++outer) {
            k = recenter_kernel(project_kernel(
                estimate_kernel(gradient(u), g_obs, ksizes[l], cfg.fft_eps)));
            Kernel kf = flip(k);
            Image u_prev = u;
            for (int inner = 0; inner < cfg.inner_iters; ++inner)
                diffusion_step(u, data, k, kf, prior, cfg.lambda, cfg.dt);
            if (report && l == 0) {
                report->outer_iterations = outer + 1;
                report->energies.push_back(deconv_energy(u, data, k, prior, cfg.lambda));
            }
            if (grad_change(u, u_prev) <= cfg.eps)
                break;
        }
        if (report)
            report->per_scale_kernels.push_back(k);
    }
    return {u, k};
}

Image deconvolve_nonblind(const Image& img, const Kernel& kernel, const PriorBundle& prior,
                          const DeconvConfig& cfg, DeconvReport* report) {
    cfg.check(img.width(), img.height());
    Kernel k = kernel;
    Kernel kf = flip(k);
    Image u = img;
    double step = cfg.dt;
    double energy = deconv_energy(u, img, k, prior, cfg.lambda);
    if (report)
        report->energies.push_back(energy);
    for (int outer = 0; outer < cfg.max_outer; ++outer) {
        Image u_prev = u;
        for (int inner = 0; inner < cfg.inner_iters; ++inner) {
            if (!descent_step(u, img, k, kf, prior, cfg.lambda, step, &energy))
                break;
            if (report)
                report->energies.push_back(energy);
        }
        if (report)
            report->outer_iterations = outer + 1;
        if (grad_change(u, u_prev) <= cfg.eps)
            break;
    }
    return u;
}

Image zoom(const Image& img, int factor, double sigma, const PriorBundle& prior,
           const DeconvConfig& cfg) {
    if (factor < 1)
        throw InputError("zoom: factor must be >= 1");
    const int tw = img.width() * factor, th = img.height() * factor;
    if (static_cast<long long>(tw) * th > 64LL * 1024 * 1024)
        throw InputError("zoom: output exceeds the memory budget");

    Image u = factor == 1 ? img : resample_to(img, tw, th, ResampleMethod::Bilinear);
    double sig = std::max(sigma, 1e-3);
    Kernel g = gaussian_kernel(sig, std::max(1, static_cast<int>(std::ceil(3.0 * sig))));
    Kernel gf = flip(g);
    const int off = (factor - 1) / 2;

    auto down = [&](const Image& fine) {
        Image blurred = convolve(fine, g, ConvMode::ZeroPad);
        Image low(img.width(), img.height());
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x)
                low.at(x, y) = blurred.at(x * factor + off, y * factor + off);
        return low;
    };
    auto up_adjoint = [&](const Image& low) {
        Image stuffed(tw, th, 0.0);
        for (int y = 0; y < img.height(); ++y)
            for (int x = 0; x < img.width(); ++x)
                stuffed.at(x * factor + off, y * factor + off) = low.at(x, y);
        return convolve(stuffed, gf, ConvMode::ZeroPad);
    };

    const double w_lo = -1.0 / prior.b_pr;
    const double w_hi = prior.t_pr * prior.t_pr + 1.0 / prior.b_pr;
    std::vector<double> v, lap;
    const int total_iters = cfg.max_outer * cfg.inner_iters;
    for (int it = 0; it < total_iters; ++it) {
        Image low = down(u);
        for (size_t i = 0; i < low.size(); ++i)
            low[i] -= img[i];
        Image data_grad = up_adjoint(low);
        central_sqgrad(u, v);
        laplacian(u, lap);
        double max_upd = 0.0;
        for (size_t i = 0; i < u.size(); ++i) {
            double w = std::clamp(diffusion_coefficient(v[i], prior.t_pr, prior.b_pr), w_lo, w_hi);
            double upd = cfg.dt * (-data_grad[i] + cfg.lambda * w * lap[i]);
            max_upd = std::max(max_upd, std::abs(upd));
            u[i] += upd;
        }
        if (max_upd <= cfg.eps)
            break;
    }
    return u;
}

} // namespace gdp
