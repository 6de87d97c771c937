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

#include "mdsim/oracles.hpp"
#include "mdsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace mdsim
{

namespace
{

// Segment lengths of a 1.75 m subject; everything scales with height / 1.75.
struct BodyDims
{
    double ankle_height = 0.08;
    double shank = 0.45;
    double thigh = 0.45;
    double hip_drop = 0.05;
    double hip_half_width = 0.09;
    double spine = 0.22;
    double chest = 0.28;
    double neck = 0.22;
    double shoulder_half_width = 0.18;
    double shoulder_drop = 0.03;
    double upper_arm = 0.30;
    double forearm = 0.26;
    double hand = 0.09;
    double foot_forward = 0.14;
    double foot_down = 0.08;

    static BodyDims for_height(double h)
    {
        BodyDims d;
        const double s = h / 1.75;
        for (double *v : {&d.ankle_height, &d.shank, &d.thigh, &d.hip_drop, &d.hip_half_width, &d.spine, &d.chest,
                          &d.neck, &d.shoulder_half_width, &d.shoulder_drop, &d.upper_arm, &d.forearm, &d.hand,
                          &d.foot_forward, &d.foot_down})
            *v *= s;
        return d;
    }

    double standing_hip_center() const { return ankle_height + shank + thigh + hip_drop; }
};

// Sagittal-plane joint angles. Limb angles are absolute from the downward vertical, positive forward;
// knee and elbow flexion are relative to the proximal segment. Index 0 = left, 1 = right.
struct PoseAngles
{
    double trunk_lean = 0.0;
    double pelvis_yaw = 0.0; // rotation about the vertical, positive turns the left side backward
    double thorax_yaw = 0.0;
    std::array<double, 2> hip{0.0, 0.0};
    std::array<double, 2> knee{0.0, 0.0};
    std::array<double, 2> shoulder{0.0, 0.0};
    std::array<double, 2> elbow{0.0, 0.0};
};

// Body-frame coordinates: (forward, lateral-left, up).
struct BodyPoint
{
    double f, l, u;
};

using BodyPose = std::array<BodyPoint, kNumJoints>;

BodyPoint add(BodyPoint p, double f, double u) { return {p.f + f, p.l, p.u + u}; }

// Direction at angle a from the downward vertical, forward positive.
void down_dir(double a, double &f, double &u)
{
    f = std::sin(a);
    u = -std::cos(a);
}

BodyPose body_pose(const BodyDims &d, BodyPoint root, const PoseAngles &q)
{
    BodyPose p{};
    auto set = [&](JointId j, BodyPoint v) { p[index(j)] = v; };

    const double uf = std::sin(q.trunk_lean), uu = std::cos(q.trunk_lean);
    set(JointId::hip_center, root);
    const BodyPoint spine = add(root, d.spine * uf, d.spine * uu);
    const BodyPoint sc = add(spine, d.chest * uf, d.chest * uu);
    set(JointId::spine, spine);
    set(JointId::shoulder_center, sc);
    set(JointId::head, add(sc, d.neck * uf, d.neck * uu));

    static constexpr JointId shoulders[2] = {JointId::shoulder_left, JointId::shoulder_right};
    static constexpr JointId elbows[2] = {JointId::elbow_left, JointId::elbow_right};
    static constexpr JointId wrists[2] = {JointId::wrist_left, JointId::wrist_right};
    static constexpr JointId hands[2] = {JointId::hand_left, JointId::hand_right};
    static constexpr JointId hips[2] = {JointId::hip_left, JointId::hip_right};
    static constexpr JointId knees[2] = {JointId::knee_left, JointId::knee_right};
    static constexpr JointId ankles[2] = {JointId::ankle_left, JointId::ankle_right};
    static constexpr JointId feet[2] = {JointId::foot_left, JointId::foot_right};

    for (int side = 0; side < 2; ++side)
    {
        const double lat = side == 0 ? 1.0 : -1.0;
        double f, u;

        BodyPoint sh = add(sc, -d.shoulder_drop * uf, -d.shoulder_drop * uu);
        sh.f -= lat * d.shoulder_half_width * std::sin(q.thorax_yaw);
        sh.l += lat * d.shoulder_half_width * std::cos(q.thorax_yaw);
        down_dir(q.shoulder[side], f, u);
        const BodyPoint el = add(sh, d.upper_arm * f, d.upper_arm * u);
        down_dir(q.shoulder[side] + q.elbow[side], f, u);
        const BodyPoint wr = add(el, d.forearm * f, d.forearm * u);
        const BodyPoint ha = add(wr, d.hand * f, d.hand * u);
        set(shoulders[side], sh);
        set(elbows[side], el);
        set(wrists[side], wr);
        set(hands[side], ha);

        BodyPoint hip = add(root, 0.0, -d.hip_drop);
        hip.f -= lat * d.hip_half_width * std::sin(q.pelvis_yaw);
        hip.l += lat * d.hip_half_width * std::cos(q.pelvis_yaw);
        down_dir(q.hip[side], f, u);
        const BodyPoint kn = add(hip, d.thigh * f, d.thigh * u);
        const double shank_angle = q.hip[side] - q.knee[side];
        down_dir(shank_angle, f, u);
        const BodyPoint an = add(kn, d.shank * f, d.shank * u);
        // Foot vector (forward, -down) rotated with the shank.
        const double c = std::cos(shank_angle), s = std::sin(shank_angle);
        const BodyPoint ft = add(an, d.foot_forward * c + d.foot_down * s, d.foot_forward * s - d.foot_down * c);
        set(hips[side], hip);
        set(knees[side], kn);
        set(ankles[side], an);
        set(feet[side], ft);
    }
    return p;
}

// Rigid forward pitch of the whole body about a pivot in the sagittal plane.
BodyPose pitch_about(const BodyPose &in, double pivot_f, double pivot_u, double angle)
{
    BodyPose out = in;
    const double c = std::cos(angle), s = std::sin(angle);
    for (auto &p : out)
    {
        const double f = p.f - pivot_f, u = p.u - pivot_u;
        // Rotating the up axis toward forward.
        p.f = pivot_f + f * c + u * s;
        p.u = pivot_u - f * s + u * c;
    }
    return out;
}

// Subjects face the radar: forward is -x, left is -y.
Pose to_world(const BodyPose &bp, double down_range)
{
    Pose p;
    for (std::size_t j = 0; j < kNumJoints; ++j)
        p[j] = Vec3(down_range - bp[j].f, -bp[j].l, bp[j].u);
    return p;
}

double smoothstep(double x)
{
    x = std::clamp(x, 0.0, 1.0);
    return x * x * (3.0 - 2.0 * x);
}

struct GaitProgram
{
    double relative_velocity;
    double hip_offset, hip_amp;
    std::array<double, 2> hip_scale{1.0, 1.0};
    double knee_base, knee_amp;
    std::array<double, 2> knee_scale{1.0, 1.0};
    double shoulder_base, shoulder_amp;
    std::array<double, 2> shoulder_scale{1.0, 1.0};
    double elbow_base, elbow_amp;
    double lean;
    double bounce;
    double sway;
    double phase_warp = 0.0; // asymmetric timing (limp)
    bool arms_together = false;
};

GaitProgram gait_program(Activity a)
{
    switch (a)
    {
    case Activity::walking:
        return {1.5, 0.06, 0.35, {1, 1}, 0.05, 1.0, {1, 1}, 0.0, 0.30, {1, 1}, 0.25, 0.15, 0.03, 0.02, 0.02};
    case Activity::running:
        return {3.2, 0.15, 0.60, {1, 1}, 0.30, 1.70, {1, 1}, 0.0, 0.60, {1, 1}, 1.50, 0.10, 0.15, 0.05, 0.02};
    case Activity::limping:
        return {0.7, 0.05, 0.30, {1.0, 0.45}, 0.05, 0.9, {1.0, 0.15}, 0.0, 0.25, {1, 1}, 0.25, 0.10, 0.08, 0.03,
                0.04, 0.5};
    case Activity::cane:
        return {0.6, 0.05, 0.25, {1, 1}, 0.05, 0.8, {1, 1}, 0.25, 0.20, {0.4, 1.0}, 0.45, 0.10, 0.10, 0.015, 0.02};
    case Activity::walker:
    {
        GaitProgram g{0.45, 0.10, 0.20, {1, 1}, 0.10, 0.7, {1, 1}, 0.70, 0.15, {1, 1}, 0.60, 0.10, 0.25, 0.01, 0.01};
        g.arms_together = true;
        return g;
    }
    default: break;
    }
    throw Error("activity has no gait program");
}

MotionRecording gait(const GaitProgram &g, const SubjectParams &s, double duration, double frame_rate,
                     std::string label)
{
    const BodyDims d = BodyDims::for_height(s.height);
    BoulicParams bp{g.relative_velocity * s.speed_factor, thigh_height_for(s.height)};
    bp.validate();
    const double v = bp.velocity();
    const double cycle = bp.cycle_duration();
    const double amp = s.amplitude_factor;

    const auto n = static_cast<std::size_t>(std::floor(duration * frame_rate + 1e-9)) + 1;
    std::vector<Pose> poses(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        const double t = static_cast<double>(k) / frame_rate;
        double p = 2.0 * kPi * t / cycle + s.phase;
        p += g.phase_warp * 0.5 * std::sin(p);
        PoseAngles q;
        q.trunk_lean = g.lean + 0.03 * amp * std::sin(2.0 * p);
        q.pelvis_yaw = 0.10 * amp * std::sin(p);
        q.thorax_yaw = -0.07 * amp * std::sin(p);
        for (int side = 0; side < 2; ++side)
        {
            // Left leg leads by half a cycle; each arm swings against its own leg.
            const double ps = side == 0 ? p + kPi : p;
            q.hip[side] = g.hip_offset + amp * g.hip_amp * g.hip_scale[side] * std::sin(ps);
            const double kf = 0.5 + 0.5 * std::sin(ps + 0.5);
            q.knee[side] = g.knee_base + amp * g.knee_amp * g.knee_scale[side] * kf * kf;
            const double pa = g.arms_together ? p : ps;
            const double swing = g.arms_together ? std::sin(pa) : -std::sin(pa);
            q.shoulder[side] = g.shoulder_base + amp * g.shoulder_amp * g.shoulder_scale[side] * swing;
            q.elbow[side] = g.elbow_base + amp * g.elbow_amp * (0.5 + 0.5 * swing);
        }
        const BodyPoint root{0.0, g.sway * std::sin(p), d.standing_hip_center() - g.bounce + g.bounce * std::cos(2.0 * p)};
        auto body = body_pose(d, root, q);
        // Forward progression is exact: hip-center advances v t.
        poses[k] = to_world(body, s.start_distance - v * t);
    }
    RecordingInfo info{std::move(label), "", "synthetic"};
    return MotionRecording::from_poses(std::move(poses), frame_rate, std::move(info));
}

MotionRecording falling(const SubjectParams &s, double duration, double frame_rate)
{
    const BodyDims d = BodyDims::for_height(s.height);
    const auto profile = rod_fall_profile(s.height, 0.05, 1e-4, RodFormula::energy_conservation);
    const double t_fall = profile.impact_time();
    // Lying body rests on its front; stop short of horizontal.
    const double final_angle = 0.5 * kPi - 0.12;

    const auto n = static_cast<std::size_t>(std::floor(duration * frame_rate + 1e-9)) + 1;
    std::vector<Pose> poses(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        const double t = static_cast<double>(k) / frame_rate;
        const double tau = t - s.event_time;
        double angle = 0.0;
        double progress = 0.0;
        if (tau > 0.0)
        {
            angle = std::min(profile.theta_at(tau), final_angle);
            progress = std::min(tau / t_fall, 1.0);
        }
        else
            angle = 0.02 * std::sin(2.0 * kPi * 0.4 * t + s.phase) * s.amplitude_factor;
        PoseAngles q;
        q.trunk_lean = 0.15 * smoothstep(progress);
        for (int side = 0; side < 2; ++side)
        {
            q.shoulder[side] = 0.1 + 1.4 * smoothstep(progress * 1.3) * s.amplitude_factor;
            q.elbow[side] = 0.2 + 0.2 * smoothstep(progress);
            q.knee[side] = 0.35 * smoothstep(progress * 1.5);
            q.hip[side] = 0.5 * q.knee[side];
        }
        const BodyPoint root{0.0, 0.0, d.standing_hip_center()};
        auto body = body_pose(d, root, q);
        body = pitch_about(body, d.foot_forward * 0.5, 0.0, angle);
        poses[k] = to_world(body, s.start_distance);
    }
    RecordingInfo info{"falling", "", "synthetic"};
    return MotionRecording::from_poses(std::move(poses), frame_rate, std::move(info));
}

MotionRecording sitting(const SubjectParams &s, double duration, double frame_rate)
{
    const BodyDims d = BodyDims::for_height(s.height);
    const double sit_time = 1.6 / s.speed_factor;
    const double hip_final = 1.45, knee_final = 1.5;

    const auto n = static_cast<std::size_t>(std::floor(duration * frame_rate + 1e-9)) + 1;
    std::vector<Pose> poses(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        const double t = static_cast<double>(k) / frame_rate;
        const double x = smoothstep((t - s.event_time) / sit_time);
        PoseAngles q;
        // Lean forward while descending, settle back once seated.
        q.trunk_lean = 0.55 * s.amplitude_factor * std::sin(kPi * x) + 0.12 * x;
        for (int side = 0; side < 2; ++side)
        {
            q.hip[side] = hip_final * x;
            q.knee[side] = knee_final * x;
            q.shoulder[side] = 0.35 * std::sin(kPi * x) * s.amplitude_factor;
            q.elbow[side] = 0.2 + 0.3 * x;
        }
        // Ankles stay planted: place the hip from the leg chain.
        const double shank_angle = q.hip[0] - q.knee[0];
        const double knee_f = -d.shank * std::sin(shank_angle);
        const double knee_u = d.ankle_height + d.shank * std::cos(shank_angle);
        const double hip_f = knee_f - d.thigh * std::sin(q.hip[0]);
        const double hip_u = knee_u + d.thigh * std::cos(q.hip[0]);
        const BodyPoint root{hip_f, 0.0, hip_u + d.hip_drop};
        poses[k] = to_world(body_pose(d, root, q), s.start_distance);
    }
    RecordingInfo info{"sitting", "", "synthetic"};
    return MotionRecording::from_poses(std::move(poses), frame_rate, std::move(info));
}

} // namespace

// ---------------------------------------------------------------------------------------------

double BoulicParams::cycle_length() const { return 1.346 * std::sqrt(relative_velocity); }

void BoulicParams::validate() const
{
    if (!(relative_velocity > 0.0) || !(thigh_height > 0.0))
        throw Error("Boulic parameters must be positive");
}

double thigh_height_for(double height)
{
    const auto d = BodyDims::for_height(height);
    return d.standing_hip_center() - d.hip_drop;
}

std::string_view activity_name(Activity a)
{
    static constexpr std::array<std::string_view, kNumActivities> names = {
        "walking", "running", "limping", "falling", "sitting", "cane", "walker",
    };
    return names[static_cast<std::size_t>(a)];
}

std::optional<Activity> activity_from_name(std::string_view name)
{
    for (auto a : kAllActivities)
        if (activity_name(a) == name)
            return a;
    return std::nullopt;
}

bool is_rhythmic(Activity a) { return a != Activity::falling && a != Activity::sitting; }

MotionRecording boulic_walk(const BoulicParams &params, double duration, double frame_rate,
                            const SubjectParams &subject)
{
    params.validate();
    if (!(duration > 0.0) || !(frame_rate > 0.0))
        throw Error("duration and frame_rate must be positive");
    GaitProgram g = gait_program(Activity::walking);
    SubjectParams s = subject;
    // Honor the requested thigh height and relative velocity exactly.
    s.height = subject.height * params.thigh_height / thigh_height_for(subject.height);
    g.relative_velocity = params.relative_velocity;
    s.speed_factor = 1.0;
    return gait(g, s, duration, frame_rate, "walking");
}

MotionRecording synthesize_activity(Activity activity, const SubjectParams &subject, double duration,
                                    double frame_rate)
{
    if (!(duration > 0.0) || !(frame_rate > 0.0))
        throw Error("duration and frame_rate must be positive");
    if (!(subject.height > 0.0))
        throw Error("subject height must be positive");
    switch (activity)
    {
    case Activity::falling: return falling(subject, duration, frame_rate);
    case Activity::sitting: return sitting(subject, duration, frame_rate);
    default: return gait(gait_program(activity), subject, duration, frame_rate, std::string(activity_name(activity)));
    }
}

std::vector<MotionRecording> oracle_seed_set(std::size_t count, std::uint64_t seed, double duration,
                                             double frame_rate)
{
    if (count == 0)
        throw Error("seed set must be nonempty");
    static constexpr std::array<double, kNumActivities> weights = {9, 9, 9, 9, 9, 6, 4};

    // Largest-remainder allocation, at least one per class when count allows.
    std::array<std::size_t, kNumActivities> per_class{};
    std::array<double, kNumActivities> remainder{};
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < kNumActivities; ++c)
    {
        const double exact = static_cast<double>(count) * weights[c] / 55.0;
        per_class[c] = static_cast<std::size_t>(std::floor(exact));
        if (count >= kNumActivities && per_class[c] == 0)
            per_class[c] = 1;
        remainder[c] = exact - std::floor(exact);
        assigned += per_class[c];
    }
    while (assigned < count)
    {
        const auto c = static_cast<std::size_t>(std::max_element(remainder.begin(), remainder.end()) - remainder.begin());
        ++per_class[c];
        remainder[c] = -1.0;
        ++assigned;
    }
    while (assigned > count)
    {
        const auto c = static_cast<std::size_t>(std::max_element(per_class.begin(), per_class.end()) - per_class.begin());
        --per_class[c];
        --assigned;
    }

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * u01(rng); };

    std::vector<MotionRecording> out;
    out.reserve(count);
    for (std::size_t c = 0; c < kNumActivities; ++c)
        for (std::size_t i = 0; i < per_class[c]; ++i)
        {
            SubjectParams s;
            s.height = uniform(1.60, 1.88);
            s.speed_factor = uniform(0.88, 1.12);
            s.amplitude_factor = uniform(0.85, 1.15);
            s.phase = uniform(0.0, 2.0 * kPi);
            s.event_time = uniform(0.8, 1.4);
            const Activity a = kAllActivities[c];
            if (is_rhythmic(a))
            {
                const double v = gait_program(a).relative_velocity * s.speed_factor * thigh_height_for(s.height);
                s.start_distance = 1.5 + v * duration + uniform(0.0, 1.0);
            }
            else
                s.start_distance = uniform(2.5, 4.0);
            auto rec = synthesize_activity(a, s, duration, frame_rate);
            RecordingInfo info = rec.info();
            char id[32];
            std::snprintf(id, sizeof(id), "%s_%02zu", std::string(activity_name(a)).c_str(), i + 1);
            info.subject_id = id;
            info.provenance = "oracle_seed_set(seed=" + std::to_string(seed) + ")";
            out.emplace_back(rec.frames(), rec.frame_rate(), std::move(info));
        }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Rod

const char *rod_formula_name(RodFormula f)
{
    return f == RodFormula::as_printed ? "as-printed" : "energy-conservation";
}

double rod_angular_speed(double length, double theta, RodFormula formula)
{
    if (!(length > 0.0))
        throw Error("rod length must be positive");
    const double c = std::cos(theta);
    const double term = formula == RodFormula::as_printed ? c : 1.0 - c;
    return std::sqrt(3.0 * kGravity / length * std::max(term, 0.0));
}

double RodFallProfile::max_tip_speed() const
{
    double m = 0.0;
    for (const auto &s : samples)
        m = std::max(m, s.tip_speed);
    return m;
}

double RodFallProfile::theta_at(double t) const
{
    if (t <= 0.0)
        return samples.front().theta;
    if (t >= samples.back().t)
        return samples.back().theta;
    const double u = t / dt;
    const auto i = std::min(static_cast<std::size_t>(u), samples.size() - 2);
    const double w = std::clamp(u - static_cast<double>(i), 0.0, 1.0);
    return (1.0 - w) * samples[i].theta + w * samples[i + 1].theta;
}

RodFallProfile rod_fall_profile(double length, double theta0, double dt, RodFormula formula)
{
    if (!(length > 0.0))
        throw Error("rod length must be positive");
    if (!(theta0 >= 0.0 && theta0 < 0.5 * kPi))
        throw Error("theta0 must lie in [0, pi/2)");
    if (!(dt > 0.0))
        throw Error("dt must be positive");

    const double impact = 0.5 * kPi;
    RodFallProfile prof;
    prof.dt = dt;
    double theta = theta0;
    if (rod_angular_speed(length, theta, formula) == 0.0)
    {
        prof.stalled = true;
        theta = theta0 + 1e-3;
    }
    auto f = [&](double th) { return rod_angular_speed(length, std::min(th, impact), formula); };

    double t = 0.0;
    const std::size_t max_steps = static_cast<std::size_t>(60.0 / dt);
    for (std::size_t step = 0; step <= max_steps; ++step)
    {
        const double w = f(theta);
        prof.samples.push_back({t, theta, w, w * length});
        if (theta >= impact)
            break;
        const double k1 = f(theta);
        const double k2 = f(theta + 0.5 * dt * k1);
        const double k3 = f(theta + 0.5 * dt * k2);
        const double k4 = f(theta + dt * k3);
        const double next = theta + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!(next > theta))
            throw Error("rod fall integration stalled");
        theta = std::min(next, impact);
        t += dt;
    }
    if (prof.samples.back().theta < impact)
        throw Error("rod did not reach the ground within 60 s");
    return prof;
}

ComplexBaseband rod_fall_return(double length, double radius, const RadarConfig &cfg,
                                const RodSignatureOptions &options)
{
    cfg.validate();
    if (options.n_scatterers < 10)
        throw Error("rod needs at least 10 scatterers");
    const double sigma_total = rcs_cylinder(radius, length, cfg.wavelength());
    const double sigma = sigma_total / static_cast<double>(options.n_scatterers);

    const RodFallProfile prof = rod_fall_profile(length, options.theta0, 1e-4, options.formula);
    const double fall = options.frozen ? 0.0 : prof.impact_time();
    const double total = options.lead_in + fall + options.tail;
    const auto n = static_cast<std::size_t>(std::floor(total * cfg.fs)) + 1;

    std::vector<PointTrack> tracks(options.n_scatterers);
    for (auto &tr : tracks)
    {
        tr.positions.resize(n);
        tr.rcs.assign(n, sigma);
    }
    for (std::size_t k = 0; k < n; ++k)
    {
        const double t = static_cast<double>(k) / cfg.fs;
        double theta = options.theta0;
        if (!options.frozen && t > options.lead_in)
            theta = prof.theta_at(t - options.lead_in);
        const Vec3 dir(-std::sin(theta), 0.0, std::cos(theta));
        for (std::size_t i = 0; i < options.n_scatterers; ++i)
        {
            const double along = length * static_cast<double>(i + 1) / static_cast<double>(options.n_scatterers);
            tracks[i].positions[k] = Vec3(options.base_distance, 0.0, 0.0) + along * dir;
        }
    }
    auto sig = synthesize_points(tracks, cfg);
    sig.label = "rod";
    return sig;
}

Spectrogram rod_fall_signature(double length, double radius, const RadarConfig &cfg, const StftSpec &spec,
                               const RodSignatureOptions &options)
{
    return spectrogram(rod_fall_return(length, radius, cfg, options), spec);
}

double envelope_peak_frequency(const Spectrogram &sp, double threshold_db, double floor_db)
{
    const double global = sp.power.maxCoeff();
    if (!(global > 0.0))
        return 0.0;
    const double floor_level = global * std::pow(10.0, -floor_db / 10.0);
    const double rel = std::pow(10.0, -threshold_db / 10.0);
    double best = 0.0;
    for (Eigen::Index c = 0; c < sp.power.cols(); ++c)
    {
        const double frame_max = sp.power.col(c).maxCoeff();
        if (frame_max < floor_level)
            continue;
        for (Eigen::Index r = 0; r < sp.power.rows(); ++r)
            if (sp.power(r, c) >= rel * frame_max)
                best = std::max(best, std::abs(sp.freq_axis[static_cast<std::size_t>(r)]));
    }
    return best;
}

} // namespace mdsim
