// SPDX-License-Identifier: Apache-2.0
//
// mdsim: motion-capture driven micro-Doppler simulation and dataset diversification
// Copyright (C) 2026 The mdsim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "mdsim/fourier_fit.hpp"
#include "mdsim/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace mdsim
{

namespace
{

constexpr double kPi = 3.14159265358979323846;

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Parameter vector layout: [a0, a1, b1, ..., an, bn, w].
FourierJointModel unpack(const VectorXd &p, int n)
{
    FourierJointModel m;
    m.a0 = p[0];
    m.pairs.resize(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        m.pairs[static_cast<std::size_t>(j)] = {p[1 + 2 * j], p[2 + 2 * j]};
    m.w = p[1 + 2 * n];
    return m;
}

double sse(std::span<const double> y, const VectorXd &p, int n)
{
    const auto m = unpack(p, n);
    double s = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k)
    {
        const double r = y[k] - m(static_cast<double>(k + 1));
        s += r * r;
    }
    return s;
}

// Linear least squares for the coefficients at fixed w. Returns the full parameter vector.
VectorXd linear_coefficients(std::span<const double> y, int n, double w)
{
    const auto m = static_cast<Eigen::Index>(y.size());
    MatrixXd A(m, 1 + 2 * n);
    VectorXd b(m);
    for (Eigen::Index k = 0; k < m; ++k)
    {
        const double x = static_cast<double>(k + 1);
        A(k, 0) = 1.0;
        for (int j = 1; j <= n; ++j)
        {
            A(k, 2 * j - 1) = std::cos(j * w * x);
            A(k, 2 * j) = std::sin(j * w * x);
        }
        b[k] = y[static_cast<std::size_t>(k)];
    }
    VectorXd c = A.colPivHouseholderQr().solve(b);
    VectorXd p(2 + 2 * n);
    p.head(1 + 2 * n) = c;
    p[1 + 2 * n] = w;
    return p;
}

// Peaks of the mean-removed periodogram on a fine grid over (0, pi).
std::vector<double> frequency_candidates(std::span<const double> y)
{
    const std::size_t m = y.size();
    double mean = 0.0;
    for (double v : y)
        mean += v;
    mean /= static_cast<double>(m);

    const std::size_t grid = 8 * m;
    std::vector<double> power(grid);
    for (std::size_t g = 0; g < grid; ++g)
    {
        const double w = kPi * static_cast<double>(g + 1) / static_cast<double>(grid + 1);
        double re = 0.0, im = 0.0;
        for (std::size_t k = 0; k < m; ++k)
        {
            const double x = static_cast<double>(k + 1);
            re += (y[k] - mean) * std::cos(w * x);
            im -= (y[k] - mean) * std::sin(w * x);
        }
        power[g] = re * re + im * im;
    }

    std::vector<std::pair<double, double>> peaks; // (power, w)
    for (std::size_t g = 0; g < grid; ++g)
    {
        const bool left = g == 0 || power[g] >= power[g - 1];
        const bool right = g + 1 == grid || power[g] >= power[g + 1];
        if (left && right)
            peaks.emplace_back(power[g], kPi * static_cast<double>(g + 1) / static_cast<double>(grid + 1));
    }
    std::sort(peaks.begin(), peaks.end(), [](const auto &a, const auto &b) { return a.first > b.first; });

    std::vector<double> out;
    for (std::size_t i = 0; i < std::min<std::size_t>(3, peaks.size()); ++i)
        for (int d = 1; d <= 3; ++d)
            out.push_back(peaks[i].second / d);
    // One period and one half period over the record, for non-periodic trajectories.
    out.push_back(2.0 * kPi / static_cast<double>(m));
    out.push_back(kPi / static_cast<double>(m));
    return out;
}

double rmse_of(double sse_value, std::size_t m) { return std::sqrt(sse_value / static_cast<double>(m)); }

} // namespace

double FourierJointModel::operator()(double x) const
{
    double v = a0;
    for (std::size_t j = 0; j < pairs.size(); ++j)
    {
        const double arg = static_cast<double>(j + 1) * w * x;
        v += pairs[j].first * std::cos(arg) + pairs[j].second * std::sin(arg);
    }
    return v;
}

std::vector<double> FourierJointModel::evaluate(std::size_t m) const
{
    std::vector<double> out(m);
    for (std::size_t k = 0; k < m; ++k)
        out[k] = (*this)(static_cast<double>(k + 1));
    return out;
}

std::vector<double> FourierJointModel::evaluate(std::span<const double> grid) const
{
    std::vector<double> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
        out[k] = (*this)(grid[k]);
    return out;
}

const char *fit_status_name(FitStatus s)
{
    switch (s)
    {
    case FitStatus::ok: return "ok";
    case FitStatus::unfit: return "unfit";
    case FitStatus::not_converged: return "not_converged";
    }
    return "?";
}

LmResult fit_fourier_order(std::span<const double> y, int n, double w0, int max_iterations)
{
    if (n < 1 || n > kMaxHarmonics)
        throw Error("harmonic count must be in [1, 8]");
    const std::size_t m = y.size();
    const int n_params = 2 + 2 * n;
    if (m < static_cast<std::size_t>(n_params))
        throw Error("trajectory too short for the requested order");

    VectorXd p = linear_coefficients(y, n, w0);
    double cost = sse(y, p, n);
    double lambda = 1e-3;

    LmResult res;
    MatrixXd J(static_cast<Eigen::Index>(m), n_params);
    VectorXd r(static_cast<Eigen::Index>(m));
    for (res.iterations = 0; res.iterations < max_iterations; ++res.iterations)
    {
        if (cost <= 1e-28 * static_cast<double>(m))
        {
            res.converged = true;
            break;
        }
        const auto model = unpack(p, n);
        for (std::size_t k = 0; k < m; ++k)
        {
            const double x = static_cast<double>(k + 1);
            const auto row = static_cast<Eigen::Index>(k);
            r[row] = y[k] - model(x);
            J(row, 0) = 1.0;
            double dw = 0.0;
            for (int j = 1; j <= n; ++j)
            {
                const double c = std::cos(j * model.w * x), s = std::sin(j * model.w * x);
                J(row, 2 * j - 1) = c;
                J(row, 2 * j) = s;
                const auto &[aj, bj] = model.pairs[static_cast<std::size_t>(j - 1)];
                dw += j * x * (-aj * s + bj * c);
            }
            J(row, n_params - 1) = dw;
        }
        const MatrixXd JtJ = J.transpose() * J;
        const VectorXd g = J.transpose() * r;
        if (g.lpNorm<Eigen::Infinity>() <= 1e-14 * std::max(1.0, std::sqrt(cost)))
        {
            res.converged = true;
            break;
        }

        bool improved = false;
        double new_cost = cost;
        VectorXd candidate;
        for (int tries = 0; tries < 30; ++tries)
        {
            MatrixXd A = JtJ;
            for (int i = 0; i < n_params; ++i)
                A(i, i) += lambda * std::max(JtJ(i, i), 1e-12);
            const VectorXd step = A.ldlt().solve(g);
            candidate = p + step;
            new_cost = sse(y, candidate, n);
            if (std::isfinite(new_cost) && new_cost < cost)
            {
                improved = true;
                lambda = std::max(lambda / 10.0, 1e-12);
                break;
            }
            lambda *= 10.0;
        }
        if (!improved)
        {
            // No descent direction left at any damping: a local minimum.
            res.converged = true;
            break;
        }
        const double decrease = cost - new_cost;
        p = candidate;
        cost = new_cost;
        if (decrease <= 1e-12 * cost)
        {
            res.converged = true;
            ++res.iterations;
            break;
        }
    }

    res.model = unpack(p, n);
    if (res.model.w < 0.0)
    {
        // Same curve with a positive fundamental.
        res.model.w = -res.model.w;
        for (auto &pr : res.model.pairs)
            pr.second = -pr.second;
    }
    res.model.fit_rmse = rmse_of(cost, m);
    return res;
}

FourierFit fit_fourier(std::span<const double> y, const FourierFitOptions &options)
{
    const int n_max = options.max_harmonics;
    if (n_max < 1 || n_max > kMaxHarmonics)
        throw Error("max_harmonics must be in [1, 8]");
    if (y.size() < static_cast<std::size_t>(2 * n_max + 2))
        throw Error("trajectory needs at least " + std::to_string(2 * n_max + 2) + " samples");
    for (double v : y)
        if (!std::isfinite(v))
            throw Error("trajectory contains non-finite values");

    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    const double p2p = *hi - *lo;
    double mean = 0.0;
    for (double v : y)
        mean += v;
    mean /= static_cast<double>(y.size());

    FourierFit out;
    if (p2p <= 1e-12 * std::max(1.0, std::abs(mean)))
    {
        out.model.a0 = mean;
        double s = 0.0;
        for (double v : y)
            s += (v - mean) * (v - mean);
        out.model.fit_rmse = rmse_of(s, y.size());
        return out;
    }
    const double gate = options.goodness_fraction * p2p;
    const auto candidates = frequency_candidates(y);

    auto best_at_order = [&](int n, double extra_w, bool &all_converged) {
        std::vector<double> ws = candidates;
        if (extra_w > 0.0)
            ws.insert(ws.begin(), extra_w);
        // Rank starting points by their linear fit, refine the best few.
        std::vector<std::pair<double, double>> ranked;
        for (double w : ws)
            ranked.emplace_back(sse(y, linear_coefficients(y, n, w), n), w);
        std::stable_sort(ranked.begin(), ranked.end(),
                         [](const auto &a, const auto &b) { return a.first < b.first; });
        LmResult best;
        best.model.fit_rmse = std::numeric_limits<double>::infinity();
        all_converged = true;
        for (std::size_t i = 0; i < std::min<std::size_t>(3, ranked.size()); ++i)
        {
            auto r = fit_fourier_order(y, n, ranked[i].second, options.max_iterations);
            out.iterations += r.iterations;
            if (r.model.fit_rmse < best.model.fit_rmse)
            {
                best = r;
                all_converged = r.converged;
            }
        }
        return best;
    };

    bool converged = true;
    LmResult current = best_at_order(n_max, 0.0, converged);
    if (current.model.fit_rmse > gate)
    {
        out.model = current.model;
        out.status = converged ? FitStatus::unfit : FitStatus::not_converged;
        return out;
    }
    const double order_limit = std::min(gate, current.model.fit_rmse + options.order_tolerance * p2p);
    for (int n = n_max - 1; n >= 1; --n)
    {
        bool conv = true;
        LmResult lower = best_at_order(n, current.model.w, conv);
        if (lower.model.fit_rmse > order_limit)
            break;
        current = lower;
        converged = conv;
    }
    out.model = current.model;
    out.status = FitStatus::ok;
    return out;
}

FourierJointModel perturbed(const FourierJointModel &model, int j, double delta_a, double delta_b)
{
    if (j < 1 || j > model.harmonics())
        throw Error("harmonic pair index " + std::to_string(j) + " out of range [1, " +
                    std::to_string(model.harmonics()) + "]");
    FourierJointModel out = model;
    auto &[a, b] = out.pairs[static_cast<std::size_t>(j - 1)];
    a *= 1.0 + delta_a;
    b *= 1.0 + delta_b;
    return out;
}

std::vector<double> perturb_and_reconstruct(const FourierJointModel &model, int j, double delta_a, double delta_b,
                                            double max_fraction, std::span<const double> grid)
{
    if (std::abs(delta_a) > max_fraction || std::abs(delta_b) > max_fraction)
        throw Error("perturbation exceeds the allowed fraction");
    return perturbed(model, j, delta_a, delta_b).evaluate(grid);
}

} // namespace mdsim
