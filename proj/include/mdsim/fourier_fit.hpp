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

#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mdsim
{

inline constexpr int kMaxHarmonics = 8;

// f(x) = a0 + sum_j a_j cos(j w x) + b_j sin(j w x), x = 1..m is the sample index.
struct FourierJointModel
{
    double a0 = 0.0;
    std::vector<std::pair<double, double>> pairs; // (a_j, b_j), j = 1..n
    double w = 0.0;                               // rad per sample
    double fit_rmse = 0.0;                        // m

    int harmonics() const { return static_cast<int>(pairs.size()); }
    double operator()(double x) const;
    // Evaluates on x = 1..m.
    std::vector<double> evaluate(std::size_t m) const;
    std::vector<double> evaluate(std::span<const double> grid) const;
};

enum class FitStatus
{
    ok,            // goodness gate met
    unfit,         // converged, but the gate failed at the largest allowed order
    not_converged, // iteration cap reached
};

const char *fit_status_name(FitStatus s);

struct FourierFitOptions
{
    int max_harmonics = kMaxHarmonics;   // fitting starts here, 1..8
    double goodness_fraction = 0.02;     // rmse <= fraction * peak-to-peak
    double order_tolerance = 1e-3;       // a lower order may raise rmse by at most this * peak-to-peak
    int max_iterations = 200;            // per Levenberg-Marquardt run
};

struct FourierFit
{
    FourierJointModel model;
    FitStatus status = FitStatus::ok;
    int iterations = 0; // total LM iterations across orders

    bool ok() const { return status == FitStatus::ok; }
};

struct LmResult
{
    FourierJointModel model;
    bool converged = false;
    int iterations = 0;
};

// Levenberg-Marquardt over {a0, a_j, b_j, w} at a fixed order, starting from w0 with the
// coefficients set by linear least squares.
LmResult fit_fourier_order(std::span<const double> trajectory, int harmonics, double w0, int max_iterations = 200);

// Adaptive-order fit: starts at max_harmonics and lowers the order while the goodness gate holds and
// the residual stays within order_tolerance of the full-order fit.
// Constant input yields a model with no harmonic pairs.
FourierFit fit_fourier(std::span<const double> trajectory, const FourierFitOptions &options = {});

// Scales pair j (1-based) by (1 + delta_a, 1 + delta_b) and evaluates on `grid`.
// Throws when j is out of range or |delta| exceeds max_fraction.
std::vector<double> perturb_and_reconstruct(const FourierJointModel &model, int j, double delta_a, double delta_b,
                                            double max_fraction, std::span<const double> grid);

FourierJointModel perturbed(const FourierJointModel &model, int j, double delta_a, double delta_b);

} // namespace mdsim
