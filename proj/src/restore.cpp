#include "gdp/restore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gdp {

void DiffusionConfig::check() const {
    if (lambda < 0.0)
        throw InputError("diffusion: lambda must be >= 0");
    if (!(dt > 0.0) || dt > 0.25)
        throw InputError("diffusion: dt must be in (0, 0.25]");
    if (!(t_pr > 0.0) || !(b_pr > 0.0))
        throw InputError("diffusion: prior constants must be positive");
    if (!(eps > 0.0) || max_iter < 1 || multiscale_levels < 1)
        throw InputError("diffusion: bad eps/max_iter/levels");
}

double diffusion_coefficient(double v, double t_pr, double b_pr) {
    if (v < 0.0)
        throw InputError("diffusion_coefficient: v must be >= 0");
    if (!(b_pr > 0.0))
        throw InputError("diffusion_coefficient: b_pr must be > 0");
    double bv = b_pr + v;
    return t_pr * t_pr + (b_pr - v) / (bv * bv);
}

std::optional<LemmaRoots> lemma_roots(double t_pr, double b_pr) {
    if (!(t_pr > 0.0) || !(b_pr > 0.0))
        throw InputError("lemma_roots: parameters must be positive");
    double t2 = t_pr * t_pr;
    double disc = 1.0 - 8.0 * t2 * b_pr;
    if (disc < 0.0)
        return std::nullopt;
    double s = std::sqrt(disc);
    LemmaRoots r;
    r.v_lower = (1.0 - 2.0 * t2 * b_pr - s) / (2.0 * t2);
    r.v_upper = (1.0 - 2.0 * t2 * b_pr + s) / (2.0 * t2);
    return r;
}

namespace {

// squared gradient magnitude from central differences, replicate boundary
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

// 5-point Laplacian with no-flux boundary (matches divergence(gradient(u)))
void laplacian(const Image& u, std::vector<double>& lap) {
    const int w = u.width(), h = u.height();
    lap.resize(u.size());
    for (int y = 0; y < h; ++y) {
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
}

struct LevelResult {
    Image u;
    bool converged = false;
};

LevelResult denoise_level(const Image& data, const Image& init, const DiffusionConfig& cfg,
                          int level, DenoiseReport* report) {
    const double dt = cfg.dt, lam = cfg.lambda;
    const double w_lo = -1.0 / cfg.b_pr;
    const double w_hi = cfg.t_pr * cfg.t_pr + 1.0 / cfg.b_pr;
    Image u = init;
    std::vector<double> v, lap;
    double e_prev = denoise_energy(u, data, cfg);
    int rising = 0;
    LevelResult res;
    for (int it = 1; it <= cfg.max_iter; ++it) {
        central_sqgrad(u, v);
        laplacian(u, lap);
        double max_upd = 0.0;
        const double k0 = 1.0 / (1.0 + dt), kd = dt / (1.0 + dt);
        for (size_t i = 0; i < u.size(); ++i) {
            double w = std::clamp(diffusion_coefficient(v[i], cfg.t_pr, cfg.b_pr), w_lo, w_hi);
            double nu = k0 * u[i] + kd * data[i] + kd * lam * w * lap[i];
            max_upd = std::max(max_upd, std::abs(nu - u[i]));
            u[i] = nu;
        }
        double e = denoise_energy(u, data, cfg);
        if (report)
            report->iterations.push_back({level, it, e, max_upd});
        if (e > e_prev + 1e-12) {
            if (++rising >= 10)
                throw DivergenceError("denoise: energy increased for 10 consecutive steps "
                                      "(level " + std::to_string(level) + ", iteration " +
                                      std::to_string(it) + ")");
        } else {
            rising = 0;
        }
        e_prev = e;
        if (max_upd <= cfg.eps) {
            res.converged = true;
            break;
        }
    }
    res.u = std::move(u);
    return res;
}

} // namespace

Image denoise(const Image& img, const DiffusionConfig& cfg, DenoiseReport* report) {
    cfg.check();
    // coarse-to-fine pyramid, factor 2
    std::vector<Image> pyramid{img};
    for (int l = 1; l < cfg.multiscale_levels; ++l) {
        const Image& prev = pyramid.back();
        if (prev.width() < 8 || prev.height() < 8)
            break;
        pyramid.push_back(resample(prev, 0.5, ResampleMethod::Bilinear));
    }
    Image u;
    bool converged = true;
    for (int l = static_cast<int>(pyramid.size()) - 1; l >= 0; --l) {
        const Image& data = pyramid[l];
        Image init = (l == static_cast<int>(pyramid.size()) - 1)
                         ? data
                         : resample_to(u, data.width(), data.height(), ResampleMethod::Bilinear);
        LevelResult r = denoise_level(data, init, cfg, l, report);
        converged = converged && r.converged;
        u = std::move(r.u);
    }
    if (report)
        report->converged = converged;
    return u;
}

double denoise_energy(const Image& u, const Image& img, const DiffusionConfig& cfg) {
    if (!u.same_size(img))
        throw DimensionError("denoise_energy: size mismatch");
    GradientField g = gradient(u);
    double e = 0.0;
    const double t2 = cfg.t_pr * cfg.t_pr;
    for (size_t i = 0; i < u.size(); ++i) {
        double d = u[i] - img[i];
        e += 0.5 * d * d;
        double v = g.gx[i] * g.gx[i] + g.gy[i] * g.gy[i];
        e += 0.5 * cfg.lambda * (t2 * v + std::log(cfg.b_pr + v));
    }
    return e;
}

Image denoise_energy_gradient(const Image& u, const Image& img, const DiffusionConfig& cfg) {
    if (!u.same_size(img))
        throw DimensionError("denoise_energy_gradient: size mismatch");
    GradientField g = gradient(u);
    const double t2 = cfg.t_pr * cfg.t_pr;
    // per-pixel diffusivity of the forward-difference energy
    GradientField scaled(g.width, g.height);
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x) {
            size_t i = g.idx(x, y);
            double v = g.gx[i] * g.gx[i] + g.gy[i] * g.gy[i];
            double c = t2 + 1.0 / (cfg.b_pr + v);
            scaled.gx[i] = c * g.gx[i];
            scaled.gy[i] = c * g.gy[i];
        }
    Image div = divergence(scaled);
    Image out(u.width(), u.height());
    for (size_t i = 0; i < u.size(); ++i)
        out[i] = (u[i] - img[i]) - cfg.lambda * div[i];
    return out;
}

namespace {

double dot(const Image& a, const Image& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

double max_abs_diff(const Image& a, const Image& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// conjugate gradients on V + dt*(grad_e1(V) - grad_e1(0)) = b
Image solve_prox(const ImageOp& grad_e1, const Image& g1_zero, const Image& b, const Image& x0,
                 double dt) {
    auto apply = [&](const Image& v) {
        Image av = grad_e1(v);
        Image out(v.width(), v.height());
        for (size_t i = 0; i < v.size(); ++i)
            out[i] = v[i] + dt * (av[i] - g1_zero[i]);
        return out;
    };
    Image x = x0;
    Image r = apply(x);
    for (size_t i = 0; i < r.size(); ++i)
        r[i] = b[i] - r[i];
    Image p = r;
    double rr = dot(r, r);
    double bnorm = std::sqrt(dot(b, b));
    double tol = std::max(1e-14, 1e-12 * bnorm);
    for (int it = 0; it < 1000; ++it) {
        if (std::sqrt(rr) <= tol)
            return x;
        Image ap = apply(p);
        double alpha = rr / dot(p, ap);
        for (size_t i = 0; i < x.size(); ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        double rr_new = dot(r, r);
        double beta = rr_new / rr;
        rr = rr_new;
        for (size_t i = 0; i < p.size(); ++i)
            p[i] = r[i] + beta * p[i];
    }
    throw DivergenceError("dc_minimize: inner solve residual " + std::to_string(std::sqrt(rr)) +
                          " did not reach tolerance");
}

} // namespace

Image dc_minimize(const ImageOp& grad_e1, const ImageOp& grad_e2, const Image& init, double dt,
                  double eps, int max_iter, const std::function<double(const Image&)>& energy,
                  DcReport* report) {
    if (!(dt > 0.0) || !(eps > 0.0) || max_iter < 1)
        throw InputError("dc_minimize: bad dt/eps/max_iter");
    Image zero(init.width(), init.height(), 0.0);
    Image g1_zero = grad_e1(zero);
    Image u = init;
    double e_prev = energy ? energy(u) : 0.0;
    if (report && energy)
        report->energies.push_back(e_prev);
    double step = dt;
    for (int it = 1; it <= max_iter; ++it) {
        Image g2 = grad_e2(u);
        Image next;
        // steps that increase the energy are retried with a halved step
        for (int attempt = 0;; ++attempt) {
            Image b(u.width(), u.height());
            for (size_t i = 0; i < u.size(); ++i)
                b[i] = u[i] + step * g2[i] - step * g1_zero[i];
            next = solve_prox(grad_e1, g1_zero, b, u, step);
            if (!energy)
                break;
            double e = energy(next);
            if (e <= e_prev + 1e-12 || attempt >= 20)
                break;
            step *= 0.5;
        }
        double upd = max_abs_diff(next, u);
        u = std::move(next);
        if (report) {
            report->iterations = it;
            if (energy)
                report->energies.push_back(energy(u));
        }
        if (energy)
            e_prev = energy(u);
        if (upd <= eps)
            break;
    }
    return u;
}

Image tv_denoise(const Image& img, double lambda, double dt, double eps, int max_iter) {
    if (lambda < 0.0)
        throw InputError("tv_denoise: lambda must be >= 0");
    const double tv_eps = 1e-2;
    // explicit descent; the TV diffusivity is bounded by 1/tv_eps
    const double step = dt / (1.0 + lambda / tv_eps);
    Image u = img;
    for (int it = 0; it < max_iter; ++it) {
        GradientField g = gradient(u);
        GradientField scaled(g.width, g.height);
        for (size_t i = 0; i < u.size(); ++i) {
            double v = g.gx[i] * g.gx[i] + g.gy[i] * g.gy[i];
            double w = 1.0 / std::sqrt(v + tv_eps * tv_eps);
            scaled.gx[i] = w * g.gx[i];
            scaled.gy[i] = w * g.gy[i];
        }
        Image div = divergence(scaled);
        double max_upd = 0.0;
        for (size_t i = 0; i < u.size(); ++i) {
            double grad = (u[i] - img[i]) - lambda * div[i];
            double upd = -step * grad;
            max_upd = std::max(max_upd, std::abs(upd));
            u[i] += upd;
        }
        if (max_upd <= eps)
            break;
    }
    return u;
}

double auto_lambda(double sigma_hat) {
    // calibrated once on the synthetic denoising suite
    const double c = 3.0;
    return c * sigma_hat * sigma_hat;
}

} // namespace gdp
