#include "gdp/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

namespace gdp {

double GradHist2D::total() const {
    return std::accumulate(bins_.begin(), bins_.end(), 0.0);
}

void GradHist2D::renormalize() {
    double t = total();
    if (!(t > 0.0))
        throw InputError("histogram has no mass");
    for (double& b : bins_)
        b /= t;
}

GradHist2D accumulate(const Image& img) {
    GradientField g = gradient(img);
    GradHist2D h;
    size_t n = 0;
    for (int y = 0; y < g.height; ++y) {
        for (int x = 0; x < g.width; ++x) {
            if (!g.valid(x, y))
                continue;
            size_t i = g.idx(x, y);
            int u = static_cast<int>(std::lround(g.gx[i] * 255.0));
            int v = static_cast<int>(std::lround(g.gy[i] * 255.0));
            u = std::clamp(u, -kBinMax, kBinMax);
            v = std::clamp(v, -kBinMax, kBinMax);
            h.at(u, v) += 1.0;
            ++n;
        }
    }
    for (double& b : h.bins())
        b /= static_cast<double>(n);
    h.count = n;
    h.images = 1;
    return h;
}

GradHist2D merge(const GradHist2D& a, const GradHist2D& b, WeightMode mode) {
    GradHist2D out;
    double wa, wb;
    if (mode == WeightMode::Images) {
        wa = static_cast<double>(a.images);
        wb = static_cast<double>(b.images);
    } else {
        wa = static_cast<double>(a.count);
        wb = static_cast<double>(b.count);
    }
    double tot = wa + wb;
    if (!(tot > 0.0))
        throw InputError("merge: both histograms empty");
    wa /= tot;
    wb /= tot;
    const auto& ba = a.bins();
    const auto& bb = b.bins();
    auto& bo = out.bins();
    for (size_t i = 0; i < bo.size(); ++i)
        bo[i] = wa * ba[i] + wb * bb[i];
    out.count = a.count + b.count;
    out.images = a.images + b.images;
    return out;
}

Marginal1D marginal(const GradHist2D& h, Axis axis) {
    Marginal1D m;
    for (int v = -kBinMax; v <= kBinMax; ++v)
        for (int u = -kBinMax; u <= kBinMax; ++u)
            m.at(axis == Axis::X ? u : v) += h.at(u, v);
    double s = std::accumulate(m.bins.begin(), m.bins.end(), 0.0);
    if (s > 0.0)
        for (double& b : m.bins)
            b /= s;
    return m;
}

Marginal1D averaged_marginal(const GradHist2D& h) {
    Marginal1D mx = marginal(h, Axis::X);
    Marginal1D my = marginal(h, Axis::Y);
    Marginal1D m;
    for (int i = 0; i < kBinCount; ++i)
        m.bins[i] = 0.5 * (mx.bins[i] + my.bins[i]);
    return m;
}

std::vector<double> cdf2d(const GradHist2D& h) {
    std::vector<double> c(h.bins());
    // prefix along u (columns), then along v (rows)
    for (int v = 0; v < kBinCount; ++v) {
        double run = 0.0;
        for (int u = 0; u < kBinCount; ++u) {
            run += c[static_cast<size_t>(v) * kBinCount + u];
            c[static_cast<size_t>(v) * kBinCount + u] = run;
        }
    }
    for (int u = 0; u < kBinCount; ++u)
        for (int v = 1; v < kBinCount; ++v)
            c[static_cast<size_t>(v) * kBinCount + u] += c[static_cast<size_t>(v - 1) * kBinCount + u];
    return c;
}

namespace {

double wasserstein1(const Marginal1D& p, const Marginal1D& q) {
    double cp = 0.0, cq = 0.0, d = 0.0;
    for (int i = 0; i < kBinCount; ++i) {
        cp += p.bins[i];
        cq += q.bins[i];
        d += std::abs(cp - cq);
    }
    return d;
}

template <typename Range>
double distance_impl(const Range& p, const Range& q, DistanceMetric metric, bool kl_smoothing) {
    const size_t n = p.size();
    switch (metric) {
    case DistanceMetric::L1: {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i)
            s += std::abs(p[i] - q[i]);
        return s;
    }
    case DistanceMetric::L2:
    case DistanceMetric::Rms: {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i)
            s += (p[i] - q[i]) * (p[i] - q[i]);
        return metric == DistanceMetric::L2 ? std::sqrt(s) : std::sqrt(s / n);
    }
    case DistanceMetric::Cosine: {
        double pq = 0.0, pp = 0.0, qq = 0.0;
        for (size_t i = 0; i < n; ++i) {
            pq += p[i] * q[i];
            pp += p[i] * p[i];
            qq += q[i] * q[i];
        }
        if (!(pp > 0.0) || !(qq > 0.0))
            throw InputError("cosine distance undefined on empty histogram");
        return 1.0 - pq / std::sqrt(pp * qq);
    }
    case DistanceMetric::Chi2: {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double den = p[i] + q[i];
            if (den > 0.0)
                s += (p[i] - q[i]) * (p[i] - q[i]) / den;
        }
        return 0.5 * s;
    }
    case DistanceMetric::Hellinger: {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double d = std::sqrt(p[i]) - std::sqrt(q[i]);
            s += d * d;
        }
        return std::sqrt(0.5 * s);
    }
    case DistanceMetric::Kl: {
        if (kl_smoothing) {
            const double eps = 1e-12;
            double zt = 1.0 + eps * n;
            double s = 0.0;
            for (size_t i = 0; i < n; ++i) {
                if (p[i] > 0.0)
                    s += p[i] * std::log(p[i] / ((q[i] + eps) / zt));
            }
            return s;
        }
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) {
            if (p[i] > 0.0) {
                if (!(q[i] > 0.0))
                    throw NumericError("KL divergence: q has zero mass where p > 0 "
                                       "(enable smoothing)");
                s += p[i] * std::log(p[i] / q[i]);
            }
        }
        return s;
    }
    default:
        throw InputError("unhandled distance metric");
    }
}

} // namespace

double distance(const GradHist2D& p, const GradHist2D& q, DistanceMetric metric, bool kl_smoothing) {
    if (metric == DistanceMetric::EmdMarginal) {
        double dx = wasserstein1(marginal(p, Axis::X), marginal(q, Axis::X));
        double dy = wasserstein1(marginal(p, Axis::Y), marginal(q, Axis::Y));
        return 0.5 * (dx + dy);
    }
    return distance_impl(p.bins(), q.bins(), metric, kl_smoothing);
}

double distance(const Marginal1D& p, const Marginal1D& q, DistanceMetric metric, bool kl_smoothing) {
    if (metric == DistanceMetric::EmdMarginal)
        return wasserstein1(p, q);
    return distance_impl(p.bins, q.bins, metric, kl_smoothing);
}

double entropy(const GradHist2D& h) {
    double e = 0.0;
    for (double b : h.bins())
        if (b > 0.0)
            e -= b * std::log(b);
    return e;
}

std::vector<SparsityPoint> sparsity_curve(const GradHist2D& h, const std::vector<double>& cutoffs) {
    std::vector<SparsityPoint> out;
    out.reserve(cutoffs.size());
    const double nbins = static_cast<double>(h.bins().size());
    for (double c : cutoffs) {
        if (c < 0.0)
            throw InputError("sparsity cutoff must be >= 0");
        size_t above = 0;
        double mass = 0.0;
        for (double b : h.bins()) {
            if (b > c) {
                ++above;
                mass += b;
            }
        }
        out.push_back({c, static_cast<double>(above) / nbins, mass});
    }
    return out;
}

double component_correlation(const GradHist2D& h, CorrelationScale scale) {
    auto coord = [scale](int g) {
        double x = static_cast<double>(g);
        if (scale == CorrelationScale::Log)
            return (g < 0 ? -1.0 : 1.0) * std::log1p(std::abs(x));
        return x;
    };
    double mu = 0.0, mv = 0.0;
    for (int v = -kBinMax; v <= kBinMax; ++v)
        for (int u = -kBinMax; u <= kBinMax; ++u) {
            double w = h.at(u, v);
            if (w == 0.0)
                continue;
            mu += w * coord(u);
            mv += w * coord(v);
        }
    double suu = 0.0, svv = 0.0, suv = 0.0;
    for (int v = -kBinMax; v <= kBinMax; ++v)
        for (int u = -kBinMax; u <= kBinMax; ++u) {
            double w = h.at(u, v);
            if (w == 0.0)
                continue;
            double du = coord(u) - mu, dv = coord(v) - mv;
            suu += w * du * du;
            svv += w * dv * dv;
            suv += w * du * dv;
        }
    if (!(suu > 0.0) || !(svv > 0.0))
        throw EstimationError("component correlation undefined: zero-variance marginal");
    return suv / std::sqrt(suu * svv);
}

std::vector<double> autocorrelation(const Image& img, int order, int max_shift) {
    if (order < 0 || order > 2)
        throw InputError("autocorrelation order must be 0, 1 or 2");
    // order-d horizontal forward difference, width shrinks by d
    Image d = img;
    for (int k = 0; k < order; ++k) {
        if (d.width() < 2)
            throw DimensionError("image too narrow for requested derivative order");
        Image nd(d.width() - 1, d.height());
        for (int y = 0; y < d.height(); ++y)
            for (int x = 0; x + 1 < d.width(); ++x)
                nd.at(x, y) = d.at(x + 1, y) - d.at(x, y);
        d = nd;
    }
    if (d.width() <= max_shift)
        throw DimensionError("image too narrow for requested shift range");
    std::vector<double> ac;
    ac.reserve(max_shift + 1);
    for (int r = 0; r <= max_shift; ++r) {
        if (r == 0) {
            ac.push_back(1.0);
            continue;
        }
        double ma = 0.0, mb = 0.0;
        size_t n = 0;
        for (int y = 0; y < d.height(); ++y)
            for (int x = 0; x + r < d.width(); ++x) {
                ma += d.at(x, y);
                mb += d.at(x + r, y);
                ++n;
            }
        ma /= n;
        mb /= n;
        double saa = 0.0, sbb = 0.0, sab = 0.0;
        for (int y = 0; y < d.height(); ++y)
            for (int x = 0; x + r < d.width(); ++x) {
                double a = d.at(x, y) - ma, b = d.at(x + r, y) - mb;
                saa += a * a;
                sbb += b * b;
                sab += a * b;
            }
        if (!(saa > 0.0) || !(sbb > 0.0))
            throw EstimationError("autocorrelation undefined: constant derivative field");
        ac.push_back(sab / std::sqrt(saa * sbb));
    }
    return ac;
}

std::string to_json(const GradHist2D& h, WeightMode mode) {
    nlohmann::json j;
    j["version"] = 1;
    j["bin_range"] = {-kBinMax, kBinMax};
    j["weight_mode"] = mode == WeightMode::Images ? "images" : "pixels";
    j["image_count"] = h.images;
    j["pixel_count"] = h.count;
    j["probabilities"] = h.bins();
    return j.dump();
}

GradHist2D hist_from_json(const std::string& text, WeightMode* mode_out) {
    nlohmann::json j = nlohmann::json::parse(text);
    auto range = j.at("bin_range");
    if (range[0].get<int>() != -kBinMax || range[1].get<int>() != kBinMax)
        throw FormatError("histogram bin range mismatch");
    GradHist2D h;
    auto probs = j.at("probabilities").get<std::vector<double>>();
    if (probs.size() != h.bins().size())
        throw FormatError("histogram size mismatch");
    h.bins() = std::move(probs);
    h.images = j.value("image_count", size_t{0});
    h.count = j.value("pixel_count", size_t{0});
    if (mode_out)
        *mode_out = j.at("weight_mode").get<std::string>() == "pixels" ? WeightMode::Pixels
                                                                       : WeightMode::Images;
    return h;
}

void write_marginal_csv(const Marginal1D& m, const std::string& path) {
    std::ofstream f(path);
    if (!f)
        throw IoError("cannot write " + path);
    f << "gradient,probability\n";
    for (int g = -kBinMax; g <= kBinMax; ++g)
        f << g << ',' << m.at(g) << '\n';
}

void write_sparsity_csv(const std::vector<SparsityPoint>& pts, const std::string& path) {
    std::ofstream f(path);
    if (!f)
        throw IoError("cannot write " + path);
    f << "cutoff,s_p,c_h\n";
    for (const auto& p : pts)
        f << p.cutoff << ',' << p.s_p << ',' << p.c_h << '\n';
}

const char* metric_name(DistanceMetric m) {
    switch (m) {
    case DistanceMetric::L1: return "l1";
    case DistanceMetric::L2: return "l2";
    case DistanceMetric::Rms: return "rms";
    case DistanceMetric::Cosine: return "cosine";
    case DistanceMetric::Chi2: return "chi2";
    case DistanceMetric::Hellinger: return "hellinger";
    case DistanceMetric::Kl: return "kl";
    case DistanceMetric::EmdMarginal: return "emd";
    }
    return "?";
}

DistanceMetric metric_from_name(const std::string& name) {
    if (name == "l1") return DistanceMetric::L1;
    if (name == "l2") return DistanceMetric::L2;
    if (name == "rms") return DistanceMetric::Rms;
    if (name == "cosine") return DistanceMetric::Cosine;
    if (name == "chi2") return DistanceMetric::Chi2;
    if (name == "hellinger") return DistanceMetric::Hellinger;
    if (name == "kl") return DistanceMetric::Kl;
    if (name == "emd") return DistanceMetric::EmdMarginal;
    throw InputError("unknown distance metric: " + name);
}

} // namespace gdp
