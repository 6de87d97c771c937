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

#include "mdsim/radar.hpp"
#include "mdsim/error.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <random>

namespace mdsim
{

namespace
{

// (4 pi)^1.5
const double kRangeEqConstant = std::pow(4.0 * kPi, 1.5);

void require_positive(double v, const char *what)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw Error(std::string(what) + " must be positive and finite");
}

std::size_t output_length(double duration, double fs)
{
    if (duration * fs + 1e-9 < 1.0)
        throw Error("recording shorter than one radar sample period");
    return static_cast<std::size_t>(std::floor(duration * fs + 1e-9)) + 1;
}

// Orthonormal frame around a segment axis, used to resolve the roll angle.
void segment_frame(const Vec3 &axis, Vec3 &e1, Vec3 &e2)
{
    Vec3 ref = Vec3::UnitZ();
    if (axis.cross(ref).norm() < 1e-9)
        ref = Vec3::UnitX();
    e1 = axis.cross(ref).normalized();
    e2 = axis.cross(e1);
}

inline std::complex<double> point_return(double range, double sigma, const RadarConfig &cfg)
{
    const double phase = -4.0 * kPi * range / cfg.wavelength();
    return scatter_amplitude(range, sigma, cfg) * std::complex<double>(std::cos(phase), std::sin(phase));
}

} // namespace

void RadarConfig::validate() const
{
    require_positive(f0, "f0");
    require_positive(fs, "fs");
    require_positive(gain, "gain");
    require_positive(power, "power");
    require_positive(system_loss, "system_loss");
    require_positive(atmospheric_loss, "atmospheric_loss");
    if (!position.allFinite())
        throw Error("radar position must be finite");
}

RadarConfig RadarConfig::with_wavelength(double lambda)
{
    require_positive(lambda, "wavelength");
    RadarConfig cfg;
    cfg.f0 = kSpeedOfLight / lambda;
    return cfg;
}

// ---------------------------------------------------------------------------------------------

double rcs_sphere(double radius)
{
    require_positive(radius, "sphere radius");
    return kPi * radius * radius;
}

double rcs_ellipsoid(double a, double b, double c, double theta, double phi)
{
    require_positive(a, "ellipsoid semi-axis a");
    require_positive(b, "ellipsoid semi-axis b");
    require_positive(c, "ellipsoid semi-axis c");
    const double st = std::sin(theta), ct = std::cos(theta);
    const double sp = std::sin(phi), cp = std::cos(phi);
    const double d = a * a * st * st * cp * cp + b * b * st * st * sp * sp + c * c * ct * ct;
    return kPi * a * a * b * b * c * c / (d * d);
}

double rcs_cylinder(double radius, double length, double wavelength)
{
    require_positive(radius, "cylinder radius");
    require_positive(length, "cylinder length");
    require_positive(wavelength, "wavelength");
    return 2.0 * kPi * radius * length * length / wavelength;
}

double rcs(const Primitive &primitive, double theta, double phi, double wavelength)
{
    if (const auto *s = std::get_if<Sphere>(&primitive))
        return rcs_sphere(s->radius);
    if (const auto *e = std::get_if<Ellipsoid>(&primitive))
        return rcs_ellipsoid(e->a, e->b, e->c, theta, phi);
    const auto &c = std::get<Cylinder>(primitive);
    return rcs_cylinder(c.radius, c.length, wavelength);
}

double scatter_amplitude(double range, double sigma, const RadarConfig &cfg)
{
    if (!(range > 0.0))
        throw Error("scatterer range must be positive");
    if (!(sigma >= 0.0))
        throw Error("rcs must be nonnegative");
    return cfg.gain * cfg.wavelength() * std::sqrt(cfg.power * sigma) /
           (kRangeEqConstant * range * range * std::sqrt(cfg.system_loss) * std::sqrt(cfg.atmospheric_loss));
}

ScattererState scatterer_state(const Scatterer &s, const Pose &pose, const RadarConfig &cfg)
{
    ScattererState st;
    const Vec3 los = s.position(pose) - cfg.position;
    st.range = los.norm();
    if (!(st.range > 0.0))
        throw Error("scatterer coincides with radar position");
    const Vec3 u = los / st.range;

    const Vec3 axis = s.axis(pose);
    if (axis.squaredNorm() > 0.0)
    {
        st.aspect = std::acos(std::clamp(axis.dot(u), -1.0, 1.0));
        Vec3 e1, e2;
        segment_frame(axis, e1, e2);
        st.roll = std::atan2(u.dot(e2), u.dot(e1));
    }
    st.rcs = rcs(s.primitive, st.aspect, st.roll, cfg.wavelength());
    st.amplitude = scatter_amplitude(st.range, st.rcs, cfg);
    return st;
}

// ---------------------------------------------------------------------------------------------

ComplexBaseband synthesize_points(std::span<const PointTrack> tracks, const RadarConfig &cfg)
{
    cfg.validate();
    if (tracks.empty())
        throw Error("no point tracks to synthesize");
    const std::size_t n = tracks.front().positions.size();
    if (n == 0)
        throw Error("empty point track");

    ComplexBaseband out;
    out.fs = cfg.fs;
    out.config = cfg;
    out.samples.assign(n, {0.0, 0.0});
    for (const auto &track : tracks)
    {
        if (track.positions.size() != n || track.rcs.size() != n)
            throw Error("point tracks must share one length");
        for (std::size_t k = 0; k < n; ++k)
        {
            const double range = (track.positions[k] - cfg.position).norm();
            if (!(range > 0.0))
                throw Error("scatterer coincides with radar position");
            out.samples[k] += point_return(range, track.rcs[k], cfg);
        }
    }
    return out;
}

namespace
{

ComplexBaseband synthesize_body(const MotionRecording &rec, const BodyModel &body, const RadarConfig &cfg,
                                std::size_t first, std::size_t last)
{
    cfg.validate();
    const std::size_t n = output_length(rec.duration(), cfg.fs);

    ComplexBaseband out;
    out.fs = cfg.fs;
    out.config = cfg;
    out.label = rec.info().activity_label;
    out.samples.resize(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        const Pose pose = pose_at(rec, static_cast<double>(k) / cfg.fs);
        std::complex<double> acc(0.0, 0.0);
        for (std::size_t i = first; i < last; ++i)
        {
            const auto st = scatterer_state(body.scatterers[i], pose, cfg);
            const double phase = -4.0 * kPi * st.range / cfg.wavelength();
            acc += st.amplitude * std::complex<double>(std::cos(phase), std::sin(phase));
        }
        out.samples[k] = acc;
    }
    return out;
}

} // namespace

ComplexBaseband synthesize_return(const MotionRecording &rec, const BodyModel &body, const RadarConfig &cfg)
{
    return synthesize_body(rec, body, cfg, 0, body.scatterers.size());
}

ComplexBaseband synthesize_scatterer(const MotionRecording &rec, const BodyModel &body, std::size_t scatterer,
                                     const RadarConfig &cfg)
{
    if (scatterer >= body.scatterers.size())
        throw Error("scatterer index out of range");
    return synthesize_body(rec, body, cfg, scatterer, scatterer + 1);
}

// ---------------------------------------------------------------------------------------------

double mean_power(std::span<const std::complex<double>> samples)
{
    if (samples.empty())
        return 0.0;
    double acc = 0.0;
    for (const auto &s : samples)
        acc += std::norm(s);
    return acc / static_cast<double>(samples.size());
}

ComplexBaseband add_noise(const ComplexBaseband &sig, std::optional<double> snr_db, std::uint64_t rng_seed)
{
    if (sig.samples.empty())
        throw Error("cannot add noise to an empty signal");
    if (!snr_db || std::isinf(*snr_db))
        return sig;
    if (std::isnan(*snr_db))
        throw Error("snr_db is NaN");

    const double p_signal = mean_power(sig.samples);
    if (!(p_signal > 0.0))
        throw Error("SNR undefined for an all-zero signal");
    const double p_noise = p_signal / std::pow(10.0, *snr_db / 10.0);

    std::mt19937_64 rng(rng_seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(p_noise / 2.0));
    ComplexBaseband out = sig;
    for (auto &s : out.samples)
    {
        const double re = normal(rng);
        const double im = normal(rng);
        s += std::complex<double>(re, im);
    }
    return out;
}

} // namespace mdsim
