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

#include "mdsim/radar.hpp"
#include "mdsim/skeleton.hpp"
#include "mdsim/spectrogram.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace mdsim
{

inline constexpr double kGravity = 9.81; // m/s^2

// Walking kinematics in thigh-height units.
struct BoulicParams
{
    double relative_velocity = 1.5; // v_r, thigh heights per second
    double thigh_height = 0.98;     // H_thigh, m

    double velocity() const { return relative_velocity * thigh_height; }                 // v = v_r H_thigh
    double cycle_length() const;                                                          // l_c = 1.346 sqrt(v_r)
    double cycle_duration() const { return cycle_length() / relative_velocity; }         // d_c = l_c / v_r
    void validate() const;
};

// ---------------------------------------------------------------------------------------------
// Activities and the forward-kinematics skeleton behind every generator

enum class Activity : std::uint8_t
{
    walking,
    running,
    limping,
    falling,
    sitting,
    cane,
    walker,
};

inline constexpr std::size_t kNumActivities = 7;
inline constexpr std::array<Activity, kNumActivities> kAllActivities = {
    Activity::walking, Activity::running, Activity::limping, Activity::falling,
    Activity::sitting, Activity::cane,    Activity::walker,
};

std::string_view activity_name(Activity a);
std::optional<Activity> activity_from_name(std::string_view name);
bool is_rhythmic(Activity a);

struct SubjectParams
{
    double height = 1.75;           // head joint above ground when standing, m
    double speed_factor = 1.0;      // multiplies the activity's nominal relative velocity
    double amplitude_factor = 1.0;  // multiplies joint-angle swing amplitudes
    double phase = 0.0;             // gait phase at t = 0, rad
    double start_distance = 3.0;    // hip-center down-range at t = 0 (rhythmic) or throughout, m
    double event_time = 1.0;        // fall / sit onset, s
};

// Hip-joint height of a standing subject of the given height.
double thigh_height_for(double height);

// Subject walks toward the radar (down-range decreasing) with hip-center speed
// params.velocity() and limb swing period params.cycle_duration(). Segment lengths are rigid.
MotionRecording boulic_walk(const BoulicParams &params, double duration, double frame_rate,
                            const SubjectParams &subject = {});

MotionRecording synthesize_activity(Activity activity, const SubjectParams &subject, double duration,
                                    double frame_rate);

// Deterministic set of `count` seed recordings across the seven activities, weighted
// 9/9/9/9/9/6/4 (walking, running, limping, falling, sitting, cane, walker).
std::vector<MotionRecording> oracle_seed_set(std::size_t count, std::uint64_t seed, double duration = 5.0,
                                             double frame_rate = 30.0);

// ---------------------------------------------------------------------------------------------
// Falling rod

enum class RodFormula
{
    as_printed,          // w = sqrt(3 g / L * cos(theta))
    energy_conservation, // w = sqrt(3 g / L * (1 - cos(theta)))
};

const char *rod_formula_name(RodFormula f);

// theta measured from vertical; cos clamped at 0.
double rod_angular_speed(double length, double theta, RodFormula formula);

struct RodSample
{
    double t;         // s from release
    double theta;     // rad from vertical
    double w;         // rad/s
    double tip_speed; // m/s, w L
};

struct RodFallProfile
{
    std::vector<RodSample> samples;
    double dt = 0.0;
    bool stalled = false; // w(theta0) == 0; integration started at theta0 + epsilon

    double impact_time() const { return samples.back().t; }
    double max_tip_speed() const;
    // Linear interpolation of theta, clamped to [theta0, pi/2].
    double theta_at(double t) const;
};

// RK4 on dtheta/dt = w(theta) with fixed step until theta reaches pi/2.
RodFallProfile rod_fall_profile(double length, double theta0, double dt = 1e-4,
                                RodFormula formula = RodFormula::as_printed);

struct RodSignatureOptions
{
    RodFormula formula = RodFormula::as_printed;
    double theta0 = 0.0;
    double base_distance = 10.0;   // rod pivot down-range, m; the rod falls toward the radar
    double lead_in = 0.25;         // s standing before release
    double tail = 0.25;            // s lying after impact
    std::size_t n_scatterers = 20; // points at k L / N, k = 1..N
    bool frozen = false;           // keep theta0 for the whole record
};

ComplexBaseband rod_fall_return(double length, double radius, const RadarConfig &cfg,
                                const RodSignatureOptions &options = {});

Spectrogram rod_fall_signature(double length, double radius, const RadarConfig &cfg, const StftSpec &spec,
                               const RodSignatureOptions &options = {});

// Largest |Doppler| over frames of the per-frame upper envelope: the highest-|f| bin whose power is
// within threshold_db of that frame's peak. Frames more than floor_db below the global peak are skipped.
double envelope_peak_frequency(const Spectrogram &sp, double threshold_db = 6.0, double floor_db = 40.0);

} // namespace mdsim
