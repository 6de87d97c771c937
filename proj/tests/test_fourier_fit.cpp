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

#include <catch_amalgamated.hpp>

#include "mdsim/error.hpp"
#include "mdsim/fourier_fit.hpp"

#include <cmath>
#include <complex>
#include <random>

using namespace mdsim;

namespace
{

constexpr double kPi = 3.14159265358979323846;

std::vector<double> sample(const FourierJointModel &m, std::size_t n)
{
    std::vector<double> y(n);
    for (std::size_t k = 0; k < n; ++k)
        y[k] = m(static_cast<double>(k + 1));
    return y;
}

FourierJointModel reference_model()
{
    FourierJointModel m;
    m.a0 = 0.3;
    m.pairs = {{0.1, 0.0}, {0.0, 0.05}};
    m.w = 2.0 * kPi / 60.0;
    return m;
}

double dft_magnitude(const std::vector<double> &y, std::size_t bin)
{
    std::complex<double> acc = 0.0;
    const double n = static_cast<double>(y.size());
    for (std::size_t k = 0; k < y.size(); ++k)
        acc += y[k] * std::polar(1.0, -2.0 * kPi * static_cast<double>(bin) * static_cast<double>(k + 1) / n);
    return std::abs(acc);
}

} // namespace

TEST_CASE("Model evaluation")
{
    const auto m = reference_model();
    CHECK(m.harmonics() == 2);
    CHECK(m(0.0) == Catch::Approx(0.4));
    const auto y = m.evaluate(300);
    REQUIRE(y.size() == 300);
    CHECK(y[59] == Catch::Approx(0.4));
    const std::vector<double> grid = {1.0, 15.0, 30.5};
    const auto g = m.evaluate(grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(g[i] == m(grid[i]));
}

TEST_CASE("Two-harmonic recovery")
{
    const auto truth = reference_model();
    const auto fit = fit_fourier(sample(truth, 300));
    REQUIRE(fit.ok());
    REQUIRE(fit.model.harmonics() == 2);
    CHECK(fit.model.a0 == Catch::Approx(0.3).margin(1e-3));
    CHECK(fit.model.pairs[0].first == Catch::Approx(0.1).margin(1e-3));
    CHECK(fit.model.pairs[0].second == Catch::Approx(0.0).margin(1e-3));
    CHECK(fit.model.pairs[1].first == Catch::Approx(0.0).margin(1e-3));
    CHECK(fit.model.pairs[1].second == Catch::Approx(0.05).margin(1e-3));
    CHECK(fit.model.w == Catch::Approx(truth.w).epsilon(1e-6));
    CHECK(fit.model.fit_rmse <= 1e-9);
}

TEST_CASE("Fixed-order fit from a nearby start")
{
    const auto truth = reference_model();
    const auto y = sample(truth, 300);
    const auto r = fit_fourier_order(y, 2, truth.w * 1.03);
    CHECK(r.converged);
    CHECK(r.model.w == Catch::Approx(truth.w).epsilon(1e-8));
    CHECK(r.model.fit_rmse <= 1e-9);
    CHECK_THROWS(fit_fourier_order(y, 9, truth.w));
    CHECK_THROWS(fit_fourier_order(std::vector<double>(4, 1.0), 3, truth.w));
}

TEST_CASE("Randomized recovery with single and double harmonics")
{
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> coef(-0.2, 0.2), period(25.0, 90.0);
    for (int trial = 0; trial < 10; ++trial)
    {
        FourierJointModel truth;
        truth.a0 = coef(rng);
        truth.pairs = {{coef(rng), coef(rng)}, {coef(rng), coef(rng)}};
        truth.w = 2.0 * kPi / period(rng);
        const auto fit = fit_fourier(sample(truth, 240));
        REQUIRE(fit.ok());
        REQUIRE(fit.model.harmonics() <= kMaxHarmonics);
        const auto back = sample(fit.model, 240);
        const auto want = sample(truth, 240);
        for (std::size_t k = 0; k < back.size(); ++k)
            REQUIRE(back[k] == Catch::Approx(want[k]).margin(1e-6));
    }
}

TEST_CASE("Weak fundamental is not traded for a lower order")
{
    FourierJointModel truth;
    truth.a0 = 0.05;
    truth.pairs = {{0.002, 0.012}, {-0.182, -0.167}};
    truth.w = 2.0 * kPi / 81.874;
    const auto y = sample(truth, 240);

    FourierFitOptions loose;
    loose.order_tolerance = 1.0;
    const auto coarse = fit_fourier(y, loose);
    REQUIRE(coarse.ok());
    CHECK(coarse.model.harmonics() == 1);
    CHECK(coarse.model.fit_rmse > 1e-3);

    const auto fit = fit_fourier(y);
    REQUIRE(fit.ok());
    CHECK(fit.model.harmonics() >= 2);
    const auto back = sample(fit.model, 240);
    for (std::size_t k = 0; k < back.size(); ++k)
        REQUIRE(back[k] == Catch::Approx(y[k]).margin(1e-6));
}

TEST_CASE("Constant trajectory")
{
    const auto fit = fit_fourier(std::vector<double>(120, 1.0));
    CHECK(fit.ok());
    CHECK(fit.model.harmonics() == 0);
    CHECK(fit.model.a0 == 1.0);
    CHECK(fit.model.fit_rmse == 0.0);
}

TEST_CASE("White noise is reported unfit")
{
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 0.05);
    std::vector<double> y(300);
    for (auto &v : y)
        v = g(rng);
    double mean = 0.0, var = 0.0;
    for (double v : y)
        mean += v;
    mean /= 300.0;
    for (double v : y)
        var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / 300.0);

    const auto fit = fit_fourier(y);
    CHECK(fit.status == FitStatus::unfit);
    CHECK(fit.model.fit_rmse == Catch::Approx(sd).epsilon(0.1));
    CHECK(std::string(fit_status_name(fit.status)) == "unfit");
}

TEST_CASE("Bad fit inputs")
{
    CHECK_THROWS(fit_fourier(std::vector<double>(10, 0.0)));
    FourierFitOptions opt;
    opt.max_harmonics = 0;
    CHECK_THROWS(fit_fourier(std::vector<double>(100, 0.0), opt));
    std::vector<double> y(100, 0.0);
    y[3] = std::nan("");
    CHECK_THROWS(fit_fourier(y));
}

TEST_CASE("Perturbation")
{
    const auto m = reference_model();
    std::vector<double> grid(300);
    for (std::size_t k = 0; k < grid.size(); ++k)
        grid[k] = static_cast<double>(k + 1);

    SECTION("zero delta is the unperturbed model")
    {
        CHECK(perturb_and_reconstruct(m, 1, 0.0, 0.0, 0.1, grid) == m.evaluate(grid));
    }

    SECTION("deviation bound")
    {
        const auto base = m.evaluate(grid);
        for (int j = 1; j <= 2; ++j)
        {
            const auto y = perturb_and_reconstruct(m, j, 0.10, -0.10, 0.10, grid);
            const auto &[a, b] = m.pairs[static_cast<std::size_t>(j - 1)];
            double worst = 0.0;
            for (std::size_t k = 0; k < y.size(); ++k)
                worst = std::max(worst, std::abs(y[k] - base[k]));
            CHECK(worst <= 0.10 * (std::abs(a) + std::abs(b)) + 1e-15);
        }
    }

    SECTION("other harmonics untouched")
    {
        FourierJointModel rich = m;
        rich.pairs = {{0.1, 0.02}, {-0.03, 0.05}, {0.01, -0.015}};
        const auto base = rich.evaluate(grid);
        const auto pert = perturb_and_reconstruct(rich, 2, 0.08, -0.06, 0.1, grid);
        // 300 samples cover exactly 5 fundamental periods.
        for (std::size_t h : {1u, 3u})
            CHECK(std::abs(dft_magnitude(pert, 5 * h) - dft_magnitude(base, 5 * h)) <= 1e-9);
        CHECK(std::abs(dft_magnitude(pert, 10) - dft_magnitude(base, 10)) > 1e-3);
    }

    SECTION("limits")
    {
        CHECK_THROWS(perturbed(m, 0, 0.0, 0.0));
        CHECK_THROWS(perturbed(m, 3, 0.0, 0.0));
        CHECK_THROWS(perturb_and_reconstruct(m, 1, 0.11, 0.0, 0.10, grid));
        CHECK_THROWS(perturb_and_reconstruct(m, 1, 0.0, -0.2, 0.10, grid));
    }

    SECTION("scaling is multiplicative")
    {
        const auto p = perturbed(m, 2, 0.05, 0.1);
        CHECK(p.pairs[1].second == Catch::Approx(0.05 * 1.1));
        CHECK(p.pairs[0] == m.pairs[0]);
        CHECK(p.a0 == m.a0);
        CHECK(p.w == m.w);
    }
}
