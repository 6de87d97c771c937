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

#include "mdsim/fourier_fit.hpp"
#include "mdsim/skeleton.hpp"
#include "mdsim/spectrogram.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mdsim
{

using Interval = std::array<double, 2>; // [lo, hi]

struct DiversificationSpec
{
    std::optional<Interval> height_range = Interval{1.55, 1.9}; // m; unset keeps the seed height
    std::size_t n_height_steps = 8;
    Interval speed_scale_range{0.85, 1.15};
    double perturbation_fraction = 0.10;
    int max_harmonics = kMaxHarmonics;
    double limb_tolerance = 0.05;
    std::map<std::string, Interval> class_doppler_limits; // Hz, on the filter_extremes statistic
    std::uint64_t rng_seed = 0;
    double coupling = 1.0; // kappa in [0, 1]: s_x = 1 + kappa (s_z - 1)
    bool enable_perturbation = true;
    double acceptance_floor = 0.05;
    std::vector<std::string> non_rhythmic_classes{"falling", "sitting"};

    void validate() const;
    bool is_non_rhythmic(const std::string &label) const;
};

enum class RejectionReason
{
    none,
    limb_violation,
    doppler_overlap,
    unfit_trajectory,
};

const char *rejection_name(RejectionReason r);
RejectionReason rejection_from_name(std::string_view name);

struct TransformRecord
{
    std::size_t seed_index = 0;
    double height_scale = 1.0;    // s_z
    double coupled_x_scale = 1.0; // s_x
    double speed_scale = 1.0;     // s_t, including the non-rhythmic time dilation
    std::size_t height_step = 0;
    std::optional<JointId> perturbed_joint;
    int perturbed_axis = 0;       // 0: x relative to hip_center, 2: z
    int pair_index = 0;           // j, 1-based; 0 when nothing was perturbed
    double coeff_a = 0.0;         // a_j, b_j of the fitted model, m
    double coeff_b = 0.0;
    double delta_a = 0.0;         // absolute coefficient change, m
    double delta_b = 0.0;
    double delta_a_fraction = 0.0;
    double delta_b_fraction = 0.0;
    std::size_t attempt = 0;
    bool accepted = false;
    RejectionReason rejection_reason = RejectionReason::none;
};

struct Transformed
{
    MotionRecording recording;
    TransformRecord record;
};

// Scales z about the ground plane by target / subject_height, and the hip-center displacement from
// start along x by 1 + coupling (s_z - 1), applied as a rigid per-frame translation.
Transformed scale_height(const MotionRecording &rec, double target_height, double coupling = 1.0);

// Compresses time by s_t. By default only the frame rate is relabelled, leaving every joint position untouched;
// with regrid the result is resampled back onto the original frame rate.
Transformed scale_speed(const MotionRecording &rec, double s_t, bool regrid = false);

struct KinematicReport
{
    bool accepted = true;
    std::array<double, kNumLimbs> deviation{}; // |mean_variant - mean_original| / mean_original
    std::optional<Limb> worst;
    double tolerance = 0.05;
};

// Mean limb lengths of `variant` against `original`.
KinematicReport check_kinematics(const MotionRecording &original, const MotionRecording &variant,
                                 double tolerance = 0.05);

// 95th percentile (nearest rank) of per-frame |frequency| at the power argmax. All-zero frames count as 0 Hz.
double doppler_statistic(const Spectrogram &sp);

RejectionReason filter_extremes(const Spectrogram &sp, const std::string &class_label,
                                const std::map<std::string, Interval> &limits);

// Per class: [min * (1 - margin), max * (1 + margin)] of the statistic over that class's seeds.
std::map<std::string, Interval> derive_doppler_limits(const std::vector<std::string> &labels,
                                                      const std::vector<double> &statistics, double margin = 0.10);

// Extra check run on each candidate that already passed the kinematic gate.
using VariantGate =
    std::function<RejectionReason(std::size_t sample_index, const MotionRecording &variant, const TransformRecord &record)>;

struct Variant
{
    std::size_t sample_index = 0;
    MotionRecording recording;
    TransformRecord record;
    std::array<std::size_t, 4> rejections{}; // by RejectionReason
};

// Deterministic variant generator over a fixed seed set. Safe to call from several threads.
class Diversifier
{
  public:
    Diversifier(std::vector<MotionRecording> seeds, DiversificationSpec spec);
    ~Diversifier();

    const std::vector<MotionRecording> &seeds() const { return seeds_; }
    const DiversificationSpec &spec() const { return spec_; }

    // Sample i uses seed i mod n_seeds and height step (i / n_seeds) mod n_height_steps; every other draw comes
    // from a stream keyed by (rng_seed, i, attempt).
    Variant generate(std::size_t sample_index, const VariantGate &gate = {}) const;

    // Rebuilds the variant recording described by `record` without any gating.
    MotionRecording apply(const TransformRecord &record) const;

    // Height-and-speed scaled seed that the kinematic gate compares against.
    MotionRecording baseline(const TransformRecord &record) const;

    std::size_t max_attempts() const;

  private:
    const FourierFit &fit(std::size_t seed_index, JointId joint, int axis) const;

    std::vector<MotionRecording> seeds_;
    DiversificationSpec spec_;
    struct Cache;
    std::unique_ptr<Cache> cache_;
};

std::vector<Variant> diversify_batch(const std::vector<MotionRecording> &seeds, const DiversificationSpec &spec,
                                     std::size_t count, const VariantGate &gate = {}, std::size_t workers = 1);

// Runs body(i) for i in [0, count) on `workers` threads. Rethrows the first exception.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)> &body);

} // namespace mdsim
