#pragma once

// Small damped least-squares (Levenberg-Marquardt) solver for the handful of
// low-dimensional fits in this project. Not a public header.

#include <cmath>
#include <functional>
#include <vector>

#include "gdp/error.hpp"

namespace gdp::detail {

// Solves A x = b for small dense symmetric A (n <= 8), in place.
inline bool solve_small(std::vector<double> A, std::vector<double> b, int n,
                        std::vector<double>& x) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A[r * n + col]) > std::abs(A[piv * n + col]))
                piv = r;
        if (std::abs(A[piv * n + col]) < 1e-300)
            return false;
        if (piv != col) {
            for (int c = 0; c < n; ++c)
                std::swap(A[col * n + c], A[piv * n + c]);
            std::swap(b[col], b[piv]);
        }
        for (int r = col + 1; r < n; ++r) {
            double f = A[r * n + col] / A[col * n + col];
            for (int c = col; c < n; ++c)
                A[r * n + c] -= f * A[col * n + c];
            b[r] -= f * b[col];
        }
    }
    x.assign(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c)
            s -= A[r * n + c] * x[c];
        x[r] = s / A[r * n + r];
    }
    return true;
}

struct LmOutcome {
    std::vector<double> theta;
    double sse = 0.0;
    int iterations = 0;
    bool converged = false;
};

// eval fills residuals (size m) and, when J != nullptr, the row-major m x n
// Jacobian. project (optional) clamps parameters to their valid box.
inline LmOutcome lm_solve(
    int m, int n,
    const std::function<void(const std::vector<double>&, std::vector<double>&,
                             std::vector<double>*)>& eval,
    std::vector<double> theta0,
    const std::function<void(std::vector<double>&)>& project = nullptr,
    int max_iter = 200, double tol = 1e-12) {
    if (project)
        project(theta0);
    std::vector<double> r(m), J(static_cast<size_t>(m) * n);
    std::vector<double> rt(m);
    auto sse_of = [&](const std::vector<double>& rr) {
        double s = 0.0;
        for (double v : rr)
            s += v * v;
        return s;
    };

    LmOutcome out;
    out.theta = theta0;
    eval(out.theta, r, &J);
    out.sse = sse_of(r);

    double mu = 1e-3;
    std::vector<double> A(static_cast<size_t>(n) * n), g(n), delta;
    for (int it = 0; it < max_iter; ++it) {
        out.iterations = it + 1;
        // normal equations
        std::fill(A.begin(), A.end(), 0.0);
        std::fill(g.begin(), g.end(), 0.0);
        for (int i = 0; i < m; ++i) {
            for (int a = 0; a < n; ++a) {
                double Jia = J[static_cast<size_t>(i) * n + a];
                g[a] += Jia * r[i];
                for (int b = a; b < n; ++b)
                    A[a * n + b] += Jia * J[static_cast<size_t>(i) * n + b];
            }
        }
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < a; ++b)
                A[a * n + b] = A[b * n + a];

        double gmax = 0.0;
        for (double v : g)
            gmax = std::max(gmax, std::abs(v));
        if (gmax < 1e-14 * std::max(1.0, out.sse)) {
            out.converged = true;
            break;
        }

        bool stepped = false;
        for (int attempt = 0; attempt < 25; ++attempt) {
            std::vector<double> Ad = A;
            for (int a = 0; a < n; ++a)
                Ad[a * n + a] += mu * std::max(A[a * n + a], 1e-12);
            std::vector<double> negg(n);
            for (int a = 0; a < n; ++a)
                negg[a] = -g[a];
            if (!solve_small(Ad, negg, n, delta)) {
                mu *= 10.0;
                continue;
            }
            std::vector<double> cand = out.theta;
            for (int a = 0; a < n; ++a)
                cand[a] += delta[a];
            if (project)
                project(cand);
            eval(cand, rt, nullptr);
            double s = sse_of(rt);
            if (std::isfinite(s) && s < out.sse) {
                double drop = out.sse - s;
                out.theta = cand;
                out.sse = s;
                eval(out.theta, r, &J);
                mu = std::max(mu / 3.0, 1e-12);
                stepped = true;
                if (drop < tol * std::max(1.0, out.sse)) {
                    out.converged = true;
                }
                break;
            }
            mu *= 4.0;
        }
        if (!stepped || out.converged)
            break;
    }
    return out;
}

// Golden-section minimization of a 1D unimodal function on [lo, hi].
inline double golden_min(const std::function<double(double)>& f, double lo, double hi,
                         double tol = 1e-10, int max_iter = 200) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < max_iter && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++i) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

} // namespace gdp::detail
