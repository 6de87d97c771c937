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

#include "mdsim/diversify.hpp"
#include "mdsim/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace mdsim
{

namespace
{

MotionRecording with_poses(const MotionRecording &rec, std::vector<Pose> poses, double frame_rate)
{
    return MotionRecording::from_poses(std::move(poses), frame_rate, rec.info());
}

std::vector<Pose> poses_of(const MotionRecording &rec)
{
    std::vector<Pose> out;
    out.reserve(rec.size());
    for (const auto &f : rec.frames())
        out.push_back(f.joints);
    return out;
}

void check_interval(const Interval &r, const char *what, bool positive)
{
    if (!(r[0] <= r[1]) || !std::isfinite(r[0]) || !std::isfinite(r[1]))
        throw Error(std::string(what) + " must be a finite [lo, hi] range");
    if (positive && !(r[0] > 0.0))
        throw Error(std::string(what) + " must be positive");
}

// Trajectory that a perturbation of (joint, axis) acts on.
std::vector<double> perturbation_trajectory(const MotionRecording &rec, JointId joint, int axis)
{
    std::vector<double> y(rec.size());
    for (std::size_t k = 0; k < rec.size(); ++k)
    {
        const auto &f = rec[k];
        y[k] = axis == 0 ? f[joint].x() - f[JointId::hip_center].x() : f[joint][axis];
    }
    return y;
}

int axis_for(JointId joint) { return joint == JointId::hip_center ? 2 : 0; }

MotionRecording scale_by(const MotionRecording &rec, double s_z, double s_x)
{
    auto poses = poses_of(rec);
    const double hip0 = rec[0][JointId::hip_center].x();
    for (auto &pose : poses)
    {
        const double shift = (s_x - 1.0) * (pose[index(JointId::hip_center)].x() - hip0);
        for (auto &p : pose)
        {
            p.z() *= s_z;
            p.x() += shift;
        }
    }
    return with_poses(rec, std::move(poses), rec.frame_rate());
}

} // namespace

// ---------------------------------------------------------------------------------------------

void DiversificationSpec::validate() const
{
    if (height_range)
        check_interval(*height_range, "height_range", true);
    if (n_height_steps == 0)
        throw Error("n_height_steps must be at least 1");
    check_interval(speed_scale_range, "speed_scale_range", true);
    if (!(perturbation_fraction > 0.0 && perturbation_fraction <= 1.0))
        throw Error("perturbation_fraction must lie in (0, 1]");
    if (max_harmonics < 1 || max_harmonics > kMaxHarmonics)
        throw Error("max_harmonics must lie in [1, 8]");
    if (!(limb_tolerance > 0.0))
        throw Error("limb_tolerance must be positive");
    if (!(coupling >= 0.0 && coupling <= 1.0))
        throw Error("coupling must lie in [0, 1]");
    if (!(acceptance_floor > 0.0 && acceptance_floor <= 1.0))
        throw Error("acceptance_floor must lie in (0, 1]");
    for (const auto &[label, r] : class_doppler_limits)
        check_interval(r, ("doppler limits for " + label).c_str(), false);
}

bool DiversificationSpec::is_non_rhythmic(const std::string &label) const
{
    return std::find(non_rhythmic_classes.begin(), non_rhythmic_classes.end(), label) != non_rhythmic_classes.end();
}

const char *rejection_name(RejectionReason r)
{
    switch (r)
    {
    case RejectionReason::none: return "none";
    case RejectionReason::limb_violation: return "limb_violation";
    case RejectionReason::doppler_overlap: return "doppler_overlap";
    case RejectionReason::unfit_trajectory: return "unfit_trajectory";
    }
    return "?";
}

RejectionReason rejection_from_name(std::string_view name)
{
    for (auto r : {RejectionReason::none, RejectionReason::limb_violation, RejectionReason::doppler_overlap,
                   RejectionReason::unfit_trajectory})
        if (name == rejection_name(r))
            return r;
    throw Error("unknown rejection reason '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------------------------

Transformed scale_height(const MotionRecording &rec, double target_height, double coupling)
{
    if (!(target_height > 0.0))
        throw Error("target height must be positive");
    const double s_z = target_height / subject_height(rec);
    const double s_x = 1.0 + coupling * (s_z - 1.0);
    Transformed out{scale_by(rec, s_z, s_x), {}};
    out.record.height_scale = s_z;
    out.record.coupled_x_scale = s_x;
    return out;
}

Transformed scale_speed(const MotionRecording &rec, double s_t, bool regrid)
{
    if (!(s_t > 0.0) || !std::isfinite(s_t))
        throw Error("speed scale must be positive");
    if (rec.size() < 2)
        throw Error("speed scaling needs at least 2 frames");
    MotionRecording fast = with_poses(rec, poses_of(rec), rec.frame_rate() * s_t);
    if (regrid)
    {
        if (fast.duration() * rec.frame_rate() + 1e-9 < 1.0)
            throw Error("speed-scaled recording is shorter than 2 frames");
        fast = resample(fast, rec.frame_rate());
    }
    Transformed out{std::move(fast), {}};
    out.record.speed_scale = s_t;
    return out;
}

KinematicReport check_kinematics(const MotionRecording &original, const MotionRecording &variant, double tolerance)
{
    if (original.size() != variant.size())
        throw Error("topology mismatch: " + std::to_string(original.size()) + " vs " +
                    std::to_string(variant.size()) + " frames");
    if (std::abs(original.duration() - variant.duration()) > 1e-9 * std::max(1.0, original.duration()))
        throw Error("topology mismatch: durations differ");
    const auto a = limb_lengths(original, tolerance);
    const auto b = limb_lengths(variant, tolerance);
    KinematicReport rep;
    rep.tolerance = tolerance;
    double worst = -1.0;
    for (std::size_t l = 0; l < kNumLimbs; ++l)
    {
        const double ref = a.mean_length[l];
        rep.deviation[l] = ref > 0.0 ? std::abs(b.mean_length[l] - ref) / ref : 0.0;
        if (rep.deviation[l] > tolerance)
            rep.accepted = false;
        if (rep.deviation[l] > worst)
        {
            worst = rep.deviation[l];
            rep.worst = static_cast<Limb>(l);
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------------------------

double doppler_statistic(const Spectrogram &sp)
{
    const std::size_t frames = sp.frames();
    if (frames == 0)
        throw Error("empty spectrogram");
    std::vector<double> peak(frames, 0.0);
    for (std::size_t c = 0; c < frames; ++c)
    {
        Eigen::Index r = 0;
        const double m = sp.power.col(static_cast<Eigen::Index>(c)).maxCoeff(&r);
        peak[c] = m > 0.0 ? std::abs(sp.freq_axis[static_cast<std::size_t>(r)]) : 0.0;
    }
    std::sort(peak.begin(), peak.end());
    const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(frames)));
    return peak[std::max<std::size_t>(rank, 1) - 1];
}

RejectionReason filter_extremes(const Spectrogram &sp, const std::string &class_label,
                                const std::map<std::string, Interval> &limits)
{
    const auto it = limits.find(class_label);
    if (it == limits.end())
        throw Error("no Doppler limits for class '" + class_label + "'");
    const double f = doppler_statistic(sp);
    return f >= it->second[0] && f <= it->second[1] ? RejectionReason::none : RejectionReason::doppler_overlap;
}

std::map<std::string, Interval> derive_doppler_limits(const std::vector<std::string> &labels,
                                                      const std::vector<double> &statistics, double margin)
{
    if (labels.size() != statistics.size())
        throw Error("labels and statistics differ in length");
    std::map<std::string, Interval> out;
    for (std::size_t i = 0; i < labels.size(); ++i)
    {
        auto [it, fresh] = out.try_emplace(labels[i], Interval{statistics[i], statistics[i]});
        if (!fresh)
        {
            it->second[0] = std::min(it->second[0], statistics[i]);
            it->second[1] = std::max(it->second[1], statistics[i]);
        }
    }
    for (auto &[label, r] : out)
        r = {r[0] * (1.0 - margin), r[1] * (1.0 + margin)};
    return out;
}

// ---------------------------------------------------------------------------------------------

struct Diversifier::Cache
{
    std::mutex mutex;
    std::map<std::tuple<std::size_t, int, int>, std::unique_ptr<FourierFit>> fits;
};

Diversifier::Diversifier(std::vector<MotionRecording> seeds, DiversificationSpec spec)
    : seeds_(std::move(seeds)), spec_(std::move(spec)), cache_(std::make_unique<Cache>())
{
    if (seeds_.empty())
        throw Error("no seed recordings");
    spec_.validate();
}

Diversifier::~Diversifier() = default;

std::size_t Diversifier::max_attempts() const
{
    return static_cast<std::size_t>(std::ceil(3.0 / spec_.acceptance_floor));
}

const FourierFit &Diversifier::fit(std::size_t seed_index, JointId joint, int axis) const
{
    const auto key = std::make_tuple(seed_index, static_cast<int>(joint), axis);
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        auto it = cache_->fits.find(key);
        if (it != cache_->fits.end())
            return *it->second;
    }
    // Fitting is deterministic, so a concurrent duplicate computes the same result.
    const auto y = perturbation_trajectory(seeds_[seed_index], joint, axis);
    FourierFitOptions opt;
    opt.max_harmonics = spec_.max_harmonics;
    auto result = std::make_unique<FourierFit>(fit_fourier(y, opt));
    std::lock_guard<std::mutex> lock(cache_->mutex);
    auto [it, fresh] = cache_->fits.try_emplace(key, std::move(result));
    return *it->second;
}

MotionRecording Diversifier::baseline(const TransformRecord &record) const
{
    if (record.seed_index >= seeds_.size())
        throw Error("seed index out of range");
    const auto &seed = seeds_[record.seed_index];
    MotionRecording rec = seed;
    if (record.height_scale != 1.0 || record.coupled_x_scale != 1.0)
        rec = scale_by(seed, record.height_scale, record.coupled_x_scale);
    if (record.speed_scale != 1.0)
        rec = scale_speed(rec, record.speed_scale).recording;
    return rec;
}

MotionRecording Diversifier::apply(const TransformRecord &record) const
{
    MotionRecording rec = baseline(record);
    if (!record.perturbed_joint)
        return rec;
    const JointId joint = *record.perturbed_joint;
    const int axis = record.perturbed_axis;
    const auto &f = fit(record.seed_index, joint, axis);
    if (record.pair_index < 1 || record.pair_index > f.model.harmonics())
        throw Error("pair index " + std::to_string(record.pair_index) + " out of range for " +
                    std::string(joint_name(joint)));

    // perturbed model minus fitted model, evaluated term-wise so a zero delta is an exact identity
    const auto &[a, b] = f.model.pairs[static_cast<std::size_t>(record.pair_index - 1)];
    const double jw = record.pair_index * f.model.w;
    const double scale = axis == 2 ? record.height_scale : 1.0;
    auto poses = poses_of(rec);
    for (std::size_t k = 0; k < poses.size(); ++k)
    {
        const double x = static_cast<double>(k + 1);
        const double d = a * record.delta_a_fraction * std::cos(jw * x) + b * record.delta_b_fraction * std::sin(jw * x);
        poses[k][index(joint)][axis] += scale * d;
    }
    return MotionRecording::from_poses(std::move(poses), rec.frame_rate(), rec.info());
}

Variant Diversifier::generate(std::size_t sample_index, const VariantGate &gate) const
{
    const std::size_t n_seeds = seeds_.size();
    Variant out{sample_index, seeds_[sample_index % n_seeds], {}, {}};
    const std::size_t seed_index = sample_index % n_seeds;
    const auto &seed = seeds_[seed_index];
    const std::string &label = seed.info().activity_label;
    const bool non_rhythmic = spec_.is_non_rhythmic(label);

    TransformRecord base;
    base.seed_index = seed_index;
    base.height_step = (sample_index / n_seeds) % spec_.n_height_steps;
    if (spec_.height_range)
    {
        const auto [lo, hi] = *spec_.height_range;
        const double t = spec_.n_height_steps == 1
                             ? 0.0
                             : static_cast<double>(base.height_step) / static_cast<double>(spec_.n_height_steps - 1);
        base.height_scale = (lo + (hi - lo) * t) / subject_height(seed);
        base.coupled_x_scale = 1.0 + (non_rhythmic ? 0.0 : spec_.coupling) * (base.height_scale - 1.0);
    }

    const std::size_t cap = max_attempts();
    for (std::size_t attempt = 0; attempt < cap; ++attempt)
    {
        const std::uint64_t s = spec_.rng_seed;
        std::seed_seq seq{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(s >> 32),
                          static_cast<std::uint32_t>(sample_index), static_cast<std::uint32_t>(sample_index >> 32),
                          static_cast<std::uint32_t>(attempt)};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> u01(0.0, 1.0);

        TransformRecord rec = base;
        rec.attempt = attempt;
        const auto [s_lo, s_hi] = spec_.speed_scale_range;
        rec.speed_scale = s_lo + (s_hi - s_lo) * u01(rng);
        if (non_rhythmic)
            rec.speed_scale /= std::sqrt(rec.height_scale);

        if (spec_.enable_perturbation)
        {
            const JointId joint = kPerturbableJoints[static_cast<std::size_t>(u01(rng) * kPerturbableJoints.size()) %
                                                     kPerturbableJoints.size()];
            rec.perturbed_joint = joint;
            rec.perturbed_axis = axis_for(joint);
            const auto &f = fit(seed_index, joint, rec.perturbed_axis);
            const double frac = spec_.perturbation_fraction;
            const double u_pair = u01(rng);
            rec.delta_a_fraction = frac * (2.0 * u01(rng) - 1.0);
            rec.delta_b_fraction = frac * (2.0 * u01(rng) - 1.0);
            if (!f.ok() || f.model.harmonics() == 0)
            {
                rec.rejection_reason = RejectionReason::unfit_trajectory;
                ++out.rejections[static_cast<std::size_t>(rec.rejection_reason)];
                continue;
            }
            const int n = f.model.harmonics();
            rec.pair_index = 1 + std::min(n - 1, static_cast<int>(u_pair * n));
            const auto &[a, b] = f.model.pairs[static_cast<std::size_t>(rec.pair_index - 1)];
            rec.coeff_a = a;
            rec.coeff_b = b;
            rec.delta_a = a * rec.delta_a_fraction;
            rec.delta_b = b * rec.delta_b_fraction;
        }

        MotionRecording variant = apply(rec);
        const auto kin = check_kinematics(baseline(rec), variant, spec_.limb_tolerance);
        rec.rejection_reason = kin.accepted ? RejectionReason::none : RejectionReason::limb_violation;
        if (rec.rejection_reason == RejectionReason::none && gate)
            rec.rejection_reason = gate(sample_index, variant, rec);
        if (rec.rejection_reason != RejectionReason::none)
        {
            ++out.rejections[static_cast<std::size_t>(rec.rejection_reason)];
            continue;
        }
        rec.accepted = true;
        out.recording = std::move(variant);
        out.record = rec;
        return out;
    }

    std::ostringstream msg;
    msg << "acceptance rate below floor " << spec_.acceptance_floor << ": sample " << sample_index << " (seed '"
        << seed.info().subject_id << "', class '" << label << "') rejected " << cap << " draws [";
    for (std::size_t r = 1; r < out.rejections.size(); ++r)
        msg << (r > 1 ? ", " : "") << rejection_name(static_cast<RejectionReason>(r)) << "=" << out.rejections[r];
    msg << "]";
    throw Error(msg.str());
}

// ---------------------------------------------------------------------------------------------

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)> &body)
{
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers == 1)
    {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count && !failed; i = next++)
            {
                try
                {
                    body(i);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error)
                        error = std::current_exception();
                    failed = true;
                }
            }
        });
    for (auto &t : pool)
        t.join();
    if (error)
        std::rethrow_exception(error);
}

std::vector<Variant> diversify_batch(const std::vector<MotionRecording> &seeds, const DiversificationSpec &spec,
                                     std::size_t count, const VariantGate &gate, std::size_t workers)
{
    if (count == 0)
        throw Error("count must be at least 1");
    const Diversifier div(seeds, spec);
    std::vector<std::optional<Variant>> slots(count);
    parallel_for(count, workers, [&](std::size_t i) { slots[i] = div.generate(i, gate); });
    std::vector<Variant> out;
    out.reserve(count);
    for (auto &s : slots)
        out.push_back(std::move(*s));
    return out;
}

} // namespace mdsim
