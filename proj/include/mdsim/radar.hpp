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

#include "mdsim/skeleton.hpp"

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mdsim
{

inline constexpr double kSpeedOfLight = 299792458.0; // m/s
inline constexpr double kPi = 3.14159265358979323846;

struct RadarConfig
{
    double f0 = 15e9;               // transmit frequency, Hz
    double fs = 2400.0;             // slow-time sample rate, Hz
    double gain = 1.0;              // antenna gain G
    double power = 1.0;             // transmit power P, W (same for every scatterer)
    double system_loss = 1.0;       // Ls
    double atmospheric_loss = 1.0;  // La
    Vec3 position = Vec3(0, 0, 1);  // monostatic antenna phase center, m

    double wavelength() const { return kSpeedOfLight / f0; }

    // Throws Error if any of f0, fs, G, P, Ls, La is not strictly positive.
    void validate() const;

    // Config with f0 chosen so that wavelength() == lambda.
    static RadarConfig with_wavelength(double lambda);
};

struct ComplexBaseband
{
    std::vector<std::complex<double>> samples;
    double fs = 0.0;
    RadarConfig config;
    std::string label;

    std::size_t size() const noexcept { return samples.size(); }
};

struct ScattererState
{
    double range = 0.0;     // m
    double aspect = 0.0;    // angle between segment axis and line of sight, rad
    double roll = 0.0;      // rad
    double rcs = 0.0;       // m^2
    double amplitude = 0.0;
};

// Optical-region sphere.
double rcs_sphere(double radius);

// Specular ellipsoid; theta is measured from the c axis, phi is the roll about it.
double rcs_ellipsoid(double a, double b, double c, double theta, double phi);

// Broadside circular cylinder, 2 pi r L^2 / lambda.
double rcs_cylinder(double radius, double length, double wavelength);

double rcs(const Primitive &primitive, double theta, double phi, double wavelength);

// Radar range equation amplitude: G lambda sqrt(P sigma) / ((4 pi)^1.5 R^2 sqrt(Ls) sqrt(La)).
double scatter_amplitude(double range, double sigma, const RadarConfig &cfg);

ScattererState scatterer_state(const Scatterer &s, const Pose &pose, const RadarConfig &cfg);

// Point target sampled at the radar rate; positions and rcs have one entry per output sample.
struct PointTrack
{
    std::vector<Vec3> positions;
    std::vector<double> rcs;
};

// Sum over tracks of a * exp(-j 4 pi R / lambda), carrier removed.
ComplexBaseband synthesize_points(std::span<const PointTrack> tracks, const RadarConfig &cfg);

// Resamples `rec` to cfg.fs and sums all body scatterers.
ComplexBaseband synthesize_return(const MotionRecording &rec, const BodyModel &body, const RadarConfig &cfg);

// Contribution of one scatterer of `body`; synthesize_return is the sample-wise sum of these.
ComplexBaseband synthesize_scatterer(const MotionRecording &rec, const BodyModel &body, std::size_t scatterer,
                                     const RadarConfig &cfg);

// Complex circular white Gaussian noise at the given SNR (mean |s|^2 over noise power).
// std::nullopt or +inf returns the input unchanged.
ComplexBaseband add_noise(const ComplexBaseband &sig, std::optional<double> snr_db, std::uint64_t rng_seed);

double mean_power(std::span<const std::complex<double>> samples);

} // namespace mdsim
