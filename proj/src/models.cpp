#include "gdp/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "lm.hpp"

namespace gdp {

namespace {

constexpr double kSqrtPi = 1.7724538509055160273;

double pow_abs(double x, double b) {
    double a = std::abs(x);
    return a == 0.0 ? 0.0 : std::pow(a, b);
}

// d/db |x|^b, with the x == 0 case defined as 0
double pow_abs_db(double x, double b) {
    double a = std::abs(x);
    return a == 0.0 ? 0.0 : std::pow(a, b) * std::log(a);
}

} // namespace

ModelFamily family_of(const ModelParams& m) {
    return std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Model1Params>)
                return ModelFamily::Model1;
            else if constexpr (std::is_same_v<T, Model2Params>)
                return ModelFamily::Model2;
            else if constexpr (std::is_same_v<T, HyperLapParams>)
                return ModelFamily::HyperLaplacian;
            else if constexpr (std::is_same_v<T, LaplaceParams>)
                return ModelFamily::Laplacian;
            else if constexpr (std::is_same_v<T, GaussParams>)
                return ModelFamily::Gaussian;
            else
                return ModelFamily::Cdf;
        },
        m);
}

const char* family_name(ModelFamily f) {
    switch (f) {
    case ModelFamily::Model1: return "model1";
    case ModelFamily::Model2: return "model2";
    case ModelFamily::HyperLaplacian: return "hyperlap";
    case ModelFamily::Laplacian: return "laplace";
    case ModelFamily::Gaussian: return "gauss";
    case ModelFamily::Cdf: return "cdf";
    }
    return "?";
}

ModelFamily family_from_name(const std::string& name) {
    if (name == "model1") return ModelFamily::Model1;
    if (name == "model2") return ModelFamily::Model2;
    if (name == "hyperlap") return ModelFamily::HyperLaplacian;
    if (name == "laplace") return ModelFamily::Laplacian;
    if (name == "gauss") return ModelFamily::Gaussian;
    if (name == "cdf") return ModelFamily::Cdf;
    throw InputError("unknown model family: " + name);
}

void validate(const ModelParams& m) {
    std::visit(
        [](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Model1Params>) {
                if (!(p.a1 > 0.0) || !(p.b1 > 0.0))
                    throw InputError("Model 1 requires a1 > 0 and b1 > 0");
            } else if constexpr (std::is_same_v<T, Model2Params>) {
                if (p.a2 < 0.0 || !(p.b2 > 0.0))
                    throw InputError("Model 2 requires a2 >= 0 and b2 > 0");
            } else if constexpr (std::is_same_v<T, HyperLapParams>) {
                if (!(p.a0 > 0.0) || !(p.b0 > 0.0) || p.b0 > 2.0)
                    throw InputError("Hyper-Laplacian requires a0 > 0 and b0 in (0, 2]");
            } else if constexpr (std::is_same_v<T, CdfModelParams>) {
                if (!(p.t > 0.0))
                    throw InputError("CDF model requires T > 0");
            }
        },
        m);
}

namespace {

double log_pdf_at(const ModelParams& m, double su, double sv, bool two_d) {
    // su, sv: the two gradient coordinates (sv ignored in 1D)
    return std::visit(
        [&](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            double s2 = su * su + (two_d ? sv * sv : 0.0);
            if constexpr (std::is_same_v<T, Model1Params>) {
                double rho = pow_abs(su, p.b1) + (two_d ? pow_abs(sv, p.b1) : 0.0);
                return 2.0 * p.a1 * (std::exp(-rho / p.a1) - 1.0) + p.c1 * s2;
            } else if constexpr (std::is_same_v<T, Model2Params>) {
                if (p.b2 + s2 <= 0.0)
                    throw SingularityError("Model 2 log density singular at the origin with b2 = 0");
                return -p.a2 * s2 - std::log(p.b2 + s2) + p.c2;
            } else if constexpr (std::is_same_v<T, HyperLapParams>) {
                double rho = pow_abs(su, p.b0) + (two_d ? pow_abs(sv, p.b0) : 0.0);
                return -p.a0 * rho + p.c0;
            } else if constexpr (std::is_same_v<T, LaplaceParams>) {
                double rho = std::abs(su) + (two_d ? std::abs(sv) : 0.0);
                return -p.a0 * rho + p.c0;
            } else if constexpr (std::is_same_v<T, GaussParams>) {
                return -p.a0 * s2 + p.c0;
            } else { // CdfModelParams: pdf of the CDF model, exp(-(Tg)^2)/g^2 per axis
                if (s2 == 0.0 || (two_d && (su == 0.0 || sv == 0.0)))
                    throw SingularityError("CDF-model density singular on the axes");
                double lp = -(p.t * su) * (p.t * su) - 2.0 * std::log(std::abs(su));
                if (two_d)
                    lp += -(p.t * sv) * (p.t * sv) - 2.0 * std::log(std::abs(sv));
                return lp;
            }
        },
        m);
}

} // namespace

double eval_log_pdf(const ModelParams& m, double g) { return log_pdf_at(m, g, 0.0, false); }

double eval_log_pdf(const ModelParams& m, double gx, double gy) {
    return log_pdf_at(m, gx, gy, true);
}

double eval_cdf_model(double t, double g) {
    if (!(t > 0.0))
        throw InputError("eval_cdf_model requires T > 0");
    if (g == 0.0)
        return 0.5; // symmetric limit convention
    double tg = t * g;
    double step = g > 0.0 ? 1.0 : 0.0;
    return -std::exp(-tg * tg) / g - t * kSqrtPi * std::erf(tg) + step;
}

double eval_cdf_model_normalized(double t, double g) {
    double limit = 1.0 - t * kSqrtPi;
    if (limit == 0.0)
        throw NumericError("CDF-model normalization constant is zero");
    return eval_cdf_model(t, g) / limit;
}

// ---------------------------------------------------------------------------
// fitting

namespace {

struct FitData {
    std::vector<double> u, v, y; // coordinates and log probability
    bool two_d = false;
    double tss = 0.0;

    void finish() {
        double mean = 0.0;
        for (double yy : y)
            mean += yy;
        mean /= static_cast<double>(y.size());
        tss = 0.0;
        for (double yy : y)
            tss += (yy - mean) * (yy - mean);
    }
};

FitData collect(const Marginal1D& m, double scale) {
    FitData d;
    for (int k = -kBinMax; k <= kBinMax; ++k) {
        double p = m.at(k);
        if (p > 0.0) {
            d.u.push_back(k * scale);
            d.y.push_back(std::log(p));
        }
    }
    if (d.y.size() < 10)
        throw InputError("fit requires at least 10 nonzero bins");
    d.finish();
    return d;
}

FitData collect(const GradHist2D& h, double scale) {
    FitData d;
    d.two_d = true;
    for (int v = -kBinMax; v <= kBinMax; ++v)
        for (int u = -kBinMax; u <= kBinMax; ++u) {
            double p = h.at(u, v);
            if (p > 0.0) {
                d.u.push_back(u * scale);
                d.v.push_back(v * scale);
                d.y.push_back(std::log(p));
            }
        }
    if (d.y.size() < 10)
        throw InputError("fit requires at least 10 nonzero bins");
    d.finish();
    return d;
}

// Linear LS of y ~ -a*rho + c. Returns (a, c) and the SSE.
struct LinFit {
    double a, c, sse;
};

LinFit linear_in_rho(const FitData& d, const std::vector<double>& rho) {
    const size_t n = d.y.size();
    double srr = 0.0, sr = 0.0, sry = 0.0, sy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        srr += rho[i] * rho[i];
        sr += rho[i];
        sry += rho[i] * d.y[i];
        sy += d.y[i];
    }
    // solve [srr sr; sr n] * [-a; c] = [sry; sy]
    double det = srr * n - sr * sr;
    LinFit f{0.0, sy / static_cast<double>(n), 0.0};
    if (std::abs(det) > 1e-300) {
        double na = (sry * n - sr * sy) / det; // coefficient of rho
        f.a = -na;
        f.c = (srr * sy - sr * sry) / det;
    }
    f.sse = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double r = (-f.a * rho[i] + f.c) - d.y[i];
        f.sse += r * r;
    }
    return f;
}

std::vector<double> rho_power(const FitData& d, double b) {
    std::vector<double> rho(d.y.size());
    for (size_t i = 0; i < d.y.size(); ++i)
        rho[i] = pow_abs(d.u[i], b) + (d.two_d ? pow_abs(d.v[i], b) : 0.0);
    return rho;
}

std::vector<double> squared_radius(const FitData& d) {
    std::vector<double> s2(d.y.size());
    for (size_t i = 0; i < d.y.size(); ++i)
        s2[i] = d.u[i] * d.u[i] + (d.two_d ? d.v[i] * d.v[i] : 0.0);
    return s2;
}

FitReport finish_report(const FitData& d, ModelParams params, int dims, double sse, int iters,
                        bool converged, double scale) {
    FitReport r;
    r.params = params;
    r.dims = dims;
    r.sse = sse;
    r.r2 = d.tss > 0.0 ? 1.0 - sse / d.tss : 1.0;
    r.iterations = iters;
    r.converged = converged;
    r.domain_convention = convention_name(scale);
    return r;
}

FitReport fit_gauss_or_laplace(const FitData& d, bool gauss, const FitOptions& opts) {
    std::vector<double> rho = gauss ? squared_radius(d) : rho_power(d, 1.0);
    LinFit f = linear_in_rho(d, rho);
    ModelParams p;
    if (gauss)
        p = GaussParams{f.a, f.c};
    else
        p = LaplaceParams{f.a, f.c};
    return finish_report(d, p, d.two_d ? 2 : 1, f.sse, 1, true, opts.scale);
}

FitReport fit_hyperlap(const FitData& d, const FitOptions& opts) {
    auto sse_for_b = [&](double b) { return linear_in_rho(d, rho_power(d, b)).sse; };
    // golden search plus fixed starts; the profile objective in b is smooth
    double b_star = detail::golden_min(sse_for_b, 0.05, 2.0, 1e-8);
    double best_b = b_star, best_sse = sse_for_b(b_star);
    for (double b : {0.3, 0.5, 0.8, 1.3, 1.9}) {
        double s = sse_for_b(b);
        if (s < best_sse) {
            best_sse = s;
            best_b = b;
        }
    }
    LinFit f = linear_in_rho(d, rho_power(d, best_b));

    // LM polish over (a, b, c)
    const int n = static_cast<int>(d.y.size());
    auto eval = [&](const std::vector<double>& th, std::vector<double>& r,
                    std::vector<double>* J) {
        double a = th[0], b = th[1], c = th[2];
        for (int i = 0; i < n; ++i) {
            double rho_i = pow_abs(d.u[i], b) + (d.two_d ? pow_abs(d.v[i], b) : 0.0);
            r[i] = (-a * rho_i + c) - d.y[i];
            if (J) {
                double drho = pow_abs_db(d.u[i], b) + (d.two_d ? pow_abs_db(d.v[i], b) : 0.0);
                (*J)[static_cast<size_t>(i) * 3 + 0] = -rho_i;
                (*J)[static_cast<size_t>(i) * 3 + 1] = -a * drho;
                (*J)[static_cast<size_t>(i) * 3 + 2] = 1.0;
            }
        }
    };
    auto project = [](std::vector<double>& th) {
        th[0] = std::max(th[0], 1e-12);
        th[1] = std::clamp(th[1], 0.02, 2.0);
    };
    auto out = detail::lm_solve(n, 3, eval, {std::max(f.a, 1e-6), best_b, f.c}, project,
                                opts.max_iter, opts.tol);
    bool ok = out.theta[0] > 0.0 && out.theta[1] > 0.0 && out.theta[1] <= 2.0;
    return finish_report(d, HyperLapParams{out.theta[0], out.theta[1], out.theta[2]},
                         d.two_d ? 2 : 1, out.sse, out.iterations, out.converged && ok,
                         opts.scale);
}

FitReport fit_model2(const FitData& d, const FitOptions& opts) {
    const int n = static_cast<int>(d.y.size());
    std::vector<double> s2 = squared_radius(d);
    double s2max = *std::max_element(s2.begin(), s2.end());

    // profile over b2: given b2, (a2, c2) solve linearly for
    // y + log(b2 + s2) = -a2*s2 + c2
    auto profile = [&](double logb) {
        double b = std::exp(logb);
        FitData shifted = d;
        for (int i = 0; i < n; ++i)
            shifted.y[i] = d.y[i] + std::log(b + s2[i]);
        return linear_in_rho(shifted, s2);
    };
    auto sse_for_logb = [&](double logb) { return profile(logb).sse; };

    double lo = std::log(1e-8 * std::max(s2max, 1e-30));
    double hi = std::log(10.0 * std::max(s2max, 1e-30));
    std::vector<double> starts = {detail::golden_min(sse_for_logb, lo, hi, 1e-8)};
    for (double f : {0.25, 0.5, 0.75, 0.95})
        starts.push_back(lo + f * (hi - lo));

    auto eval = [&](const std::vector<double>& th, std::vector<double>& r,
                    std::vector<double>* J) {
        double a = th[0], b = th[1], c = th[2];
        for (int i = 0; i < n; ++i) {
            double den = b + s2[i];
            r[i] = (-a * s2[i] - std::log(den) + c) - d.y[i];
            if (J) {
                (*J)[static_cast<size_t>(i) * 3 + 0] = -s2[i];
                (*J)[static_cast<size_t>(i) * 3 + 1] = -1.0 / den;
                (*J)[static_cast<size_t>(i) * 3 + 2] = 1.0;
            }
        }
    };
    auto project = [&](std::vector<double>& th) {
        th[0] = std::max(th[0], 0.0);
        th[1] = std::clamp(th[1], 1e-14, 1e6 * std::max(s2max, 1.0));
    };

    detail::LmOutcome best;
    best.sse = std::numeric_limits<double>::infinity();
    int total_iters = 0;
    for (double logb : starts) {
        LinFit f = profile(logb);
        auto out = detail::lm_solve(n, 3, eval, {std::max(f.a, 0.0), std::exp(logb), f.c},
                                    project, opts.max_iter, opts.tol);
        total_iters += out.iterations;
        if (out.sse < best.sse)
            best = out;
    }
    bool ok = best.theta[0] >= 0.0 && best.theta[1] > 0.0;
    return finish_report(d, Model2Params{best.theta[0], best.theta[1], best.theta[2]},
                         d.two_d ? 2 : 1, best.sse, total_iters, best.converged && ok,
                         opts.scale);
}

FitReport fit_model1(const FitData& d, const FitOptions& opts) {
    const int n = static_cast<int>(d.y.size());
    std::vector<double> s2 = squared_radius(d);

    auto eval = [&](const std::vector<double>& th, std::vector<double>& r,
                    std::vector<double>* J) {
        double a = th[0], b = th[1], c = th[2];
        for (int i = 0; i < n; ++i) {
            double rho = pow_abs(d.u[i], b) + (d.two_d ? pow_abs(d.v[i], b) : 0.0);
            double e = std::exp(-rho / a);
            r[i] = (2.0 * a * (e - 1.0) + c * s2[i]) - d.y[i];
            if (J) {
                double drho = pow_abs_db(d.u[i], b) + (d.two_d ? pow_abs_db(d.v[i], b) : 0.0);
                (*J)[static_cast<size_t>(i) * 3 + 0] = 2.0 * (e - 1.0) + 2.0 * (rho / a) * e;
                (*J)[static_cast<size_t>(i) * 3 + 1] = -2.0 * e * drho;
                (*J)[static_cast<size_t>(i) * 3 + 2] = s2[i];
            }
        }
    };
    auto project = [](std::vector<double>& th) {
        th[0] = std::max(th[0], 1e-10);
        th[1] = std::clamp(th[1], 0.02, 4.0);
    };

    // inner linear solve for c given (a, b)
    auto c_given = [&](double a, double b) {
        double num = 0.0, den = 0.0;
        for (int i = 0; i < n; ++i) {
            double rho = pow_abs(d.u[i], b) + (d.two_d ? pow_abs(d.v[i], b) : 0.0);
            double f0 = 2.0 * a * (std::exp(-rho / a) - 1.0);
            num += (d.y[i] - f0) * s2[i];
            den += s2[i] * s2[i];
        }
        return den > 0.0 ? num / den : 0.0;
    };

    // 5 deterministic starts: a relative to the coordinate range, b around the
    // heavy-tail exponents seen in practice
    double umax = 0.0;
    for (int i = 0; i < n; ++i)
        umax = std::max({umax, std::abs(d.u[i]), d.two_d ? std::abs(d.v[i]) : 0.0});
    struct Start {
        double afac, b;
    };
    const Start starts[5] = {{0.25, 0.55}, {1.0, 0.55}, {0.05, 0.4}, {4.0, 0.8}, {1.0, 1.2}};

    detail::LmOutcome best;
    best.sse = std::numeric_limits<double>::infinity();
    int total_iters = 0;
    for (const Start& s : starts) {
        double rho_max = (d.two_d ? 2.0 : 1.0) * pow_abs(umax, s.b);
        double a0 = std::max(1e-6, s.afac * rho_max);
        auto out = detail::lm_solve(n, 3, eval, {a0, s.b, c_given(a0, s.b)}, project,
                                    opts.max_iter, opts.tol);
        total_iters += out.iterations;
        if (out.sse < best.sse)
            best = out;
    }
    bool ok = best.theta[0] > 0.0 && best.theta[1] > 0.0;
    return finish_report(d, Model1Params{best.theta[0], best.theta[1], best.theta[2]},
                         d.two_d ? 2 : 1, best.sse, total_iters, best.converged && ok,
                         opts.scale);
}

// closed-form T plus residual diagnostics over the off-origin bins
FitReport fit_cdf(const FitData& d, int dims, const FitOptions& opts) {
    double num = 0.0, den = 0.0;
    const int n = static_cast<int>(d.y.size());
    for (int i = 0; i < n; ++i) {
        double x = d.u[i];
        if (x == 0.0)
            continue;
        double x2 = x * x;
        num += -(2.0 * std::log(std::abs(x)) + d.y[i]) * x2;
        den += x2 * x2;
    }
    if (!(den > 0.0))
        throw EstimationError("CDF-model fit: no mass off the origin");
    double t2 = num / den;
    if (!(t2 > 0.0))
        throw EstimationError("CDF-model fit: nonpositive radicand, data far from family");
    double t = std::sqrt(t2);

    double sse = 0.0, mean = 0.0;
    std::vector<double> ys;
    for (int i = 0; i < n; ++i) {
        if (d.u[i] == 0.0)
            continue;
        double res = d.y[i] + t2 * d.u[i] * d.u[i] + 2.0 * std::log(std::abs(d.u[i]));
        sse += res * res;
        ys.push_back(d.y[i]);
        mean += d.y[i];
    }
    mean /= static_cast<double>(ys.size());
    double tss = 0.0;
    for (double yy : ys)
        tss += (yy - mean) * (yy - mean);

    FitReport r;
    r.params = CdfModelParams{t};
    r.dims = dims;
    r.sse = sse;
    r.r2 = tss > 0.0 ? 1.0 - sse / tss : 1.0;
    r.iterations = 1;
    r.converged = true;
    r.domain_convention = convention_name(opts.scale);
    return r;
}

FitReport dispatch_fit(const FitData& d, ModelFamily family, const FitOptions& opts) {
    switch (family) {
    case ModelFamily::Model1: return fit_model1(d, opts);
    case ModelFamily::Model2: return fit_model2(d, opts);
    case ModelFamily::HyperLaplacian: return fit_hyperlap(d, opts);
    case ModelFamily::Laplacian: return fit_gauss_or_laplace(d, false, opts);
    case ModelFamily::Gaussian: return fit_gauss_or_laplace(d, true, opts);
    case ModelFamily::Cdf: return fit_cdf(d, 1, opts);
    }
    throw InputError("unhandled model family");
}

} // namespace

FitReport fit(const Marginal1D& m, ModelFamily family, const FitOptions& opts) {
    return dispatch_fit(collect(m, opts.scale), family, opts);
}

FitReport fit(const GradHist2D& h, ModelFamily family, const FitOptions& opts) {
    if (family == ModelFamily::Cdf) {
        // the product CDF model has one scale; estimate it from the averaged
        // marginal, as in prior learning
        FitReport r = fit_cdf(collect(averaged_marginal(h), opts.scale), 2, opts);
        return r;
    }
    return dispatch_fit(collect(h, opts.scale), family, opts);
}

double cdf_model_objective(const Marginal1D& m, double t, double scale) {
    double sse = 0.0;
    for (int k = -kBinMax; k <= kBinMax; ++k) {
        if (k == 0)
            continue;
        double p = m.at(k);
        if (!(p > 0.0))
            continue;
        double x = k * scale;
        double res = std::log(p) + t * t * x * x + 2.0 * std::log(std::abs(x));
        sse += res * res;
    }
    return sse;
}

double fit_T_closed_form(const Marginal1D& m, double scale) {
    double num = 0.0, den = 0.0;
    bool any = false;
    for (int k = -kBinMax; k <= kBinMax; ++k) {
        if (k == 0)
            continue;
        double p = m.at(k);
        if (!(p > 0.0))
            continue;
        any = true;
        double x = k * scale;
        double x2 = x * x;
        num += -(2.0 * std::log(std::abs(x)) + std::log(p)) * x2;
        den += x2 * x2;
    }
    if (!any)
        throw EstimationError("fit_T_closed_form: no mass off the origin");
    double t2 = num / den;
    if (!(t2 > 0.0))
        throw EstimationError("fit_T_closed_form: nonpositive radicand");
    return std::sqrt(t2);
}

Marginal1D discretize_1d(const ModelParams& m, double scale) {
    validate(m);
    Marginal1D out;
    double peak = -std::numeric_limits<double>::infinity();
    std::vector<double> lp(kBinCount, -std::numeric_limits<double>::infinity());
    for (int k = -kBinMax; k <= kBinMax; ++k) {
        try {
            lp[k + kBinMax] = eval_log_pdf(m, k * scale);
            peak = std::max(peak, lp[k + kBinMax]);
        } catch (const SingularityError&) {
            // families singular at the origin carry no mass in the center bin
        }
    }
    if (!std::isfinite(peak))
        throw NumericError("model density vanishes on the whole grid");
    double total = 0.0;
    for (int i = 0; i < kBinCount; ++i) {
        double v = std::isfinite(lp[i]) ? std::exp(lp[i] - peak) : 0.0;
        out.bins[i] = v;
        total += v;
    }
    for (double& b : out.bins)
        b /= total;
    return out;
}

GradHist2D discretize_2d(const ModelParams& m, double scale) {
    validate(m);
    GradHist2D out;
    double peak = -std::numeric_limits<double>::infinity();
    std::vector<double>& bins = out.bins();
    std::vector<double> lp(bins.size(), -std::numeric_limits<double>::infinity());
    for (int v = -kBinMax; v <= kBinMax; ++v)
        for (int u = -kBinMax; u <= kBinMax; ++u) {
            try {
                double l = eval_log_pdf(m, u * scale, v * scale);
                lp[GradHist2D::index(u, v)] = l;
                peak = std::max(peak, l);
            } catch (const SingularityError&) {
            }
        }
    if (!std::isfinite(peak))
        throw NumericError("model density vanishes on the whole grid");
    double total = 0.0;
    for (size_t i = 0; i < bins.size(); ++i) {
        double val = std::isfinite(lp[i]) ? std::exp(lp[i] - peak) : 0.0;
        bins[i] = val;
        total += val;
    }
    if (!(total > 0.0) || !std::isfinite(total))
        throw NumericError("model mass underflows on the bin grid");
    for (double& b : bins)
        b /= total;
    out.count = 0;
    out.images = 0;
    return out;
}

double model_entropy(const ModelParams& m, double scale) {
    GradHist2D h = discretize_2d(m, scale);
    return entropy(h);
}

std::string to_json(const FitReport& r) {
    nlohmann::json j;
    j["family"] = family_name(family_of(r.params));
    j["dims"] = r.dims;
    j["sse"] = r.sse;
    j["r2"] = r.r2;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["domain_convention"] = r.domain_convention;
    nlohmann::json p;
    std::visit(
        [&p](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Model1Params>) {
                p = {{"a1", m.a1}, {"b1", m.b1}, {"c1", m.c1}};
            } else if constexpr (std::is_same_v<T, Model2Params>) {
                p = {{"a2", m.a2}, {"b2", m.b2}, {"c2", m.c2}};
            } else if constexpr (std::is_same_v<T, HyperLapParams>) {
                p = {{"a0", m.a0}, {"b0", m.b0}, {"c0", m.c0}};
            } else if constexpr (std::is_same_v<T, LaplaceParams>) {
                p = {{"a0", m.a0}, {"c0", m.c0}};
            } else if constexpr (std::is_same_v<T, GaussParams>) {
                p = {{"a0", m.a0}, {"c0", m.c0}};
            } else {
                p = {{"t", m.t}};
            }
        },
        r.params);
    j["params"] = p;
    return j.dump();
}

} // namespace gdp
