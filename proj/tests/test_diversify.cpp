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

#include "fixtures.hpp"
#include "mdsim/diversify.hpp"
#include "mdsim/error.hpp"
#include "mdsim/oracles.hpp"
#include "mdsim/radar.hpp"

#include <cmath>
#include <complex>

using namespace mdsim;
using Catch::Matchers::ContainsSubstring;

namespace
{

double max_abs_difference(const MotionRecording &a, const MotionRecording &b)
{
    REQUIRE(a.size() == b.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t j = 0; j < kNumJoints; ++j)
            worst = std::max(worst, (a[k].joints[j] - b[k].joints[j]).cwiseAbs().maxCoeff());
    return worst;
}

// Frequency of the largest periodogram peak of a real trajectory, searched on a fine grid.
double dominant_frequency(const std::vector<double> &y, double rate)
{
    double mean = 0.0;
    for (double v : y)
        mean += v;
    mean /= static_cast<double>(y.size());
    double best_f = 0.0, best_p = -1.0;
    for (double f = 0.05; f < rate / 2; f += 0.005)
    {
        std::complex<double> acc = 0.0;
        for (std::size_t k = 0; k < y.size(); ++k)
            acc += (y[k] - mean) * std::polar(1.0, -2.0 * kPi * f * static_cast<double>(k) / rate);
        if (std::norm(acc) > best_p)
        {
            best_p = std::norm(acc);
            best_f = f;
        }
    }
    return best_f;
}

// Mean spacing between upward zero crossings of the mean-removed trajectory, in seconds.
double cycle_duration(const std::vector<double> &y, double rate)
{
    double mean = 0.0;
    for (double v : y)
        mean += v;
    mean /= static_cast<double>(y.size());
    std::vector<double> ups;
    for (std::size_t k = 1; k < y.size(); ++k)
    {
        const double a = y[k - 1] - mean, b = y[k] - mean;
        if (a < 0.0 && b >= 0.0)
            ups.push_back((static_cast<double>(k - 1) + a / (a - b)) / rate);
    }
    REQUIRE(ups.size() >= 3);
    return (ups.back() - ups.front()) / static_cast<double>(ups.size() - 1);
}

DiversificationSpec identity_spec()
{
    DiversificationSpec s;
    s.height_range.reset();
    s.speed_scale_range = {1.0, 1.0};
    s.enable_perturbation = false;
    return s;
}

Spectrogram signature_of(const MotionRecording &rec)
{
    return spectrogram(synthesize_return(rec, build_body_model(rec), RadarConfig{}), StftSpec::simulated());
}

} // namespace

TEST_CASE("Height scaling")
{
    const auto rec = fixtures::gliding(1.0, 2.0, 30.0, 1.70);

    SECTION("target equal to the current height")
    {
        const auto t = scale_height(rec, subject_height(rec));
        CHECK(max_abs_difference(t.recording, rec) <= 1e-12);
        CHECK(t.record.height_scale == Catch::Approx(1.0).epsilon(1e-15));
    }

    SECTION("s_z = 1.2 with full coupling")
    {
        const auto t = scale_height(rec, 1.2 * 1.70, 1.0);
        CHECK(t.record.height_scale == Catch::Approx(1.2).epsilon(1e-12));
        CHECK(t.record.coupled_x_scale == Catch::Approx(1.2).epsilon(1e-12));
        const auto before = rec.trajectory(JointId::hip_center, 0);
        const auto after = t.recording.trajectory(JointId::hip_center, 0);
        const double v0 = (before.front() - before.back()) / rec.duration();
        const double v1 = (after.front() - after.back()) / t.recording.duration();
        CHECK(v1 == Catch::Approx(1.2 * v0).epsilon(1e-12));

        const auto l0 = limb_lengths(rec), l1 = limb_lengths(t.recording);
        CHECK(l1.mean(Limb::shank_left) == Catch::Approx(1.2 * l0.mean(Limb::shank_left)).epsilon(1e-12));
        CHECK(l1.mean(Limb::thigh_right) == Catch::Approx(1.2 * l0.mean(Limb::thigh_right)).epsilon(1e-12));
        CHECK(subject_height(t.recording) == Catch::Approx(1.2 * 1.70).epsilon(1e-12));
    }

    SECTION("zero coupling keeps the forward motion")
    {
        const auto t = scale_height(rec, 1.9, 0.0);
        CHECK(t.record.coupled_x_scale == 1.0);
        const auto a = rec.trajectory(JointId::hip_center, 0);
        const auto b = t.recording.trajectory(JointId::hip_center, 0);
        for (std::size_t k = 0; k < a.size(); ++k)
            REQUIRE(b[k] == a[k]);
        // y is never touched.
        CHECK(t.recording[10][JointId::hand_left].y() == rec[10][JointId::hand_left].y());
    }

    SECTION("errors")
    {
        CHECK_THROWS(scale_height(rec, 0.0));
        std::vector<Pose> flat(3);
        CHECK_THROWS_WITH(scale_height(MotionRecording::from_poses(flat, 30.0), 1.7),
                          ContainsSubstring("unmeasurable"));
    }
}

TEST_CASE("Speed scaling")
{
    SECTION("unit scale")
    {
        const auto rec = boulic_walk({}, 2.0, 30.0);
        const auto t = scale_speed(rec, 1.0);
        CHECK(max_abs_difference(t.recording, rec) == 0.0);
        CHECK(t.recording.frame_rate() == rec.frame_rate());
    }

    SECTION("1 Hz arm swing becomes 1.5 Hz")
    {
        std::vector<Pose> poses(181);
        for (std::size_t k = 0; k < poses.size(); ++k)
        {
            poses[k] = fixtures::standing_pose();
            poses[k][index(JointId::wrist_left)].x() += 0.15 * std::sin(2.0 * kPi * static_cast<double>(k) / 30.0);
        }
        const auto rec = MotionRecording::from_poses(poses, 30.0);
        CHECK(dominant_frequency(rec.trajectory(JointId::wrist_left, 0), 30.0) == Catch::Approx(1.0).margin(0.01));
        for (bool regrid : {false, true})
        {
            const auto fast = scale_speed(rec, 1.5, regrid).recording;
            CHECK(dominant_frequency(fast.trajectory(JointId::wrist_left, 0), fast.frame_rate()) ==
                  Catch::Approx(1.5).margin(0.01));
        }
    }

    SECTION("doubling halves the gait cycle")
    {
        const BoulicParams bp;
        const auto rec = boulic_walk(bp, 6.0, 60.0);
        const auto knee = rec.trajectory(JointId::knee_left, 0);
        const auto hip = rec.trajectory(JointId::hip_center, 0);
        std::vector<double> rel(knee.size());
        for (std::size_t k = 0; k < rel.size(); ++k)
            rel[k] = knee[k] - hip[k];
        const double d0 = cycle_duration(rel, 60.0);
        CHECK(d0 == Catch::Approx(bp.cycle_duration()).epsilon(0.02));

        const auto fast = scale_speed(rec, 2.0).recording;
        std::vector<double> rel2(fast.size());
        for (std::size_t k = 0; k < rel2.size(); ++k)
            rel2[k] = fast[k][JointId::knee_left].x() - fast[k][JointId::hip_center].x();
        CHECK(cycle_duration(rel2, fast.frame_rate()) == Catch::Approx(d0 / 2.0).epsilon(1e-9));
    }

    SECTION("limb lengths and forward speed")
    {
        const auto rec = boulic_walk({}, 3.0, 30.0);
        const auto fast = scale_speed(rec, 1.3).recording;
        const auto a = limb_lengths(rec), b = limb_lengths(fast);
        for (std::size_t l = 0; l < kNumLimbs; ++l)
            CHECK(std::abs(a.mean_length[l] - b.mean_length[l]) <= 1e-9);
        const auto h0 = rec.trajectory(JointId::hip_center, 0);
        const auto h1 = fast.trajectory(JointId::hip_center, 0);
        CHECK((h1.front() - h1.back()) / fast.duration() ==
              Catch::Approx(1.3 * (h0.front() - h0.back()) / rec.duration()).epsilon(1e-12));
    }

    SECTION("errors")
    {
        const auto rec = fixtures::gliding(1.0, 0.1, 30.0);
        CHECK_THROWS(scale_speed(rec, 0.0));
        CHECK_THROWS(scale_speed(rec, 100.0, true));
    }
}

TEST_CASE("Kinematic gate")
{
    const auto rec = boulic_walk({}, 2.0, 30.0);

    SECTION("identical")
    {
        const auto rep = check_kinematics(rec, rec);
        CHECK(rep.accepted);
        for (double d : rep.deviation)
            CHECK(d == 0.0);
    }

    SECTION("wrist offset by a fifth of the forearm")
    {
        const double forearm = limb_lengths(rec).mean(Limb::forearm_right);
        std::vector<Pose> poses;
        for (const auto &f : rec.frames())
        {
            Pose p = f.joints;
            const Vec3 dir = (p[index(JointId::wrist_right)] - p[index(JointId::elbow_right)]).normalized();
            p[index(JointId::wrist_right)] += 0.2 * forearm * dir;
            poses.push_back(p);
        }
        const auto variant = MotionRecording::from_poses(poses, rec.frame_rate());
        const auto rep = check_kinematics(rec, variant);
        CHECK_FALSE(rep.accepted);
        REQUIRE(rep.worst.has_value());
        CHECK(*rep.worst == Limb::forearm_right);
        CHECK(rep.deviation[static_cast<std::size_t>(Limb::forearm_right)] == Catch::Approx(0.2).epsilon(1e-9));
        CHECK(rep.deviation[static_cast<std::size_t>(Limb::forearm_left)] == 0.0);
    }

    SECTION("height-scaled variant against its scaled baseline")
    {
        const auto tall = scale_height(rec, 1.9).recording;
        CHECK(check_kinematics(tall, tall).accepted);
        CHECK_FALSE(check_kinematics(rec, tall).accepted);
    }

    SECTION("topology mismatch")
    {
        const auto shorter = boulic_walk({}, 1.0, 30.0);
        CHECK_THROWS_WITH(check_kinematics(rec, shorter), ContainsSubstring("topology mismatch"));
    }
}

TEST_CASE("Doppler band filter")
{
    BoulicParams bp;
    bp.relative_velocity = 1.5;
    bp.thigh_height = 0.9;
    const auto walk = boulic_walk(bp, 5.0, 30.0);
    const std::map<std::string, Interval> limits{{"walking", {50.0, 400.0}}};

    const auto sp = signature_of(walk);
    const double stat = doppler_statistic(sp);
    CHECK(stat > 50.0);
    CHECK(stat < 400.0);
    CHECK(filter_extremes(sp, "walking", limits) == RejectionReason::none);

    const auto fast = scale_speed(walk, 4.5).recording;
    const auto sp_fast = signature_of(fast);
    CHECK(doppler_statistic(sp_fast) > 400.0);
    CHECK(filter_extremes(sp_fast, "walking", limits) == RejectionReason::doppler_overlap);

    Spectrogram zero = sp;
    zero.power.setZero();
    CHECK(doppler_statistic(zero) == 0.0);
    CHECK(filter_extremes(zero, "walking", limits) == RejectionReason::doppler_overlap);
    CHECK(filter_extremes(zero, "idle", {{"idle", {0.0, 10.0}}}) == RejectionReason::none);

    CHECK_THROWS_WITH(filter_extremes(sp, "running", limits), ContainsSubstring("no Doppler limits"));
}

TEST_CASE("Doppler statistic is the 95th percentile")
{
    Spectrogram sp;
    sp.spec = StftSpec{WindowType::hanning, 8, 4, 16};
    sp.fs = 16.0;
    sp.freq_axis.resize(16);
    for (std::size_t r = 0; r < 16; ++r)
        sp.freq_axis[r] = bin_frequency(r, 16, 16.0);
    sp.power = Eigen::MatrixXd::Zero(16, 20);
    // Frame c peaks at |f| = c mod 8 (alternating sign); the nearest-rank 95th percentile of 20 values is the 19th.
    std::vector<double> want;
    for (Eigen::Index c = 0; c < 20; ++c)
    {
        const int f = static_cast<int>(c % 8) * (c % 2 ? -1 : 1);
        sp.power(8 + f, c) = 1.0;
        want.push_back(std::abs(f));
    }
    std::sort(want.begin(), want.end());
    CHECK(doppler_statistic(sp) == want[18]);
}

TEST_CASE("Deriving class limits")
{
    const auto lim = derive_doppler_limits({"a", "b", "a"}, {100.0, 40.0, 150.0}, 0.1);
    REQUIRE(lim.size() == 2);
    CHECK(lim.at("a")[0] == Catch::Approx(90.0));
    CHECK(lim.at("a")[1] == Catch::Approx(165.0));
    CHECK(lim.at("b")[0] == Catch::Approx(36.0));
    CHECK_THROWS(derive_doppler_limits({"a"}, {1.0, 2.0}));
}

TEST_CASE("Specification validation")
{
    DiversificationSpec s;
    CHECK_NOTHROW(s.validate());
    s.perturbation_fraction = 0.0;
    CHECK_THROWS(s.validate());
    s = {};
    s.max_harmonics = 9;
    CHECK_THROWS(s.validate());
    s = {};
    s.height_range = Interval{1.9, 1.5};
    CHECK_THROWS(s.validate());
    s = {};
    s.coupling = 1.5;
    CHECK_THROWS(s.validate());
    CHECK(DiversificationSpec{}.is_non_rhythmic("falling"));
    CHECK_FALSE(DiversificationSpec{}.is_non_rhythmic("walking"));
    for (auto r : {RejectionReason::none, RejectionReason::limb_violation, RejectionReason::doppler_overlap,
                   RejectionReason::unfit_trajectory})
        CHECK(rejection_from_name(rejection_name(r)) == r);
}

TEST_CASE("Diversifier")
{
    const auto seeds = oracle_seed_set(14, 3, 6.0);

    SECTION("identity")
    {
        const auto out = diversify_batch({seeds[0]}, identity_spec(), 1);
        REQUIRE(out.size() == 1);
        CHECK(out[0].record.accepted);
        CHECK(out[0].record.rejection_reason == RejectionReason::none);
        CHECK(max_abs_difference(out[0].recording, seeds[0]) == 0.0);
        CHECK(out[0].recording.frame_rate() == seeds[0].frame_rate());
    }

    SECTION("identical streams for the same rng seed")
    {
        DiversificationSpec spec;
        spec.rng_seed = 99;
        const auto a = diversify_batch(seeds, spec, 30);
        const auto b = diversify_batch(seeds, spec, 30, {}, 3);
        for (std::size_t i = 0; i < a.size(); ++i)
        {
            const auto &ra = a[i].record, &rb = b[i].record;
            REQUIRE(ra.speed_scale == rb.speed_scale);
            REQUIRE(ra.perturbed_joint == rb.perturbed_joint);
            REQUIRE(ra.pair_index == rb.pair_index);
            REQUIRE(ra.delta_a == rb.delta_a);
            REQUIRE(ra.delta_b == rb.delta_b);
            REQUIRE(ra.attempt == rb.attempt);
            REQUIRE(max_abs_difference(a[i].recording, b[i].recording) == 0.0);
        }
        spec.rng_seed = 100;
        const auto c = diversify_batch(seeds, spec, 30);
        bool differs = false;
        for (std::size_t i = 0; i < c.size(); ++i)
            differs = differs || c[i].record.speed_scale != a[i].record.speed_scale;
        CHECK(differs);
    }

    SECTION("accepted variants respect the gates")
    {
        DiversificationSpec spec;
        spec.rng_seed = 5;
        const Diversifier div(seeds, spec);
        for (std::size_t i = 0; i < 42; ++i)
        {
            const auto v = div.generate(i);
            const auto &r = v.record;
            REQUIRE(r.accepted);
            CHECK(r.seed_index == i % seeds.size());
            CHECK(r.height_step == (i / seeds.size()) % spec.n_height_steps);
            CHECK(subject_height(div.baseline(r)) ==
                  Catch::Approx(1.55 + 0.35 * static_cast<double>(r.height_step) / 7.0).epsilon(1e-12));
            CHECK(std::abs(r.delta_a) <= spec.perturbation_fraction * std::abs(r.coeff_a) + 1e-15);
            CHECK(std::abs(r.delta_b) <= spec.perturbation_fraction * std::abs(r.coeff_b) + 1e-15);
            CHECK(r.pair_index >= 1);
            CHECK(check_kinematics(div.baseline(r), v.recording, spec.limb_tolerance).accepted);
            CHECK(max_abs_difference(div.apply(r), v.recording) == 0.0);

            const bool nr = spec.is_non_rhythmic(seeds[r.seed_index].info().activity_label);
            if (nr)
                CHECK(r.coupled_x_scale == 1.0);
            else
                CHECK(r.coupled_x_scale == Catch::Approx(r.height_scale).epsilon(1e-15));
            const double s_t = nr ? r.speed_scale * std::sqrt(r.height_scale) : r.speed_scale;
            CHECK(s_t >= spec.speed_scale_range[0] - 1e-12);
            CHECK(s_t <= spec.speed_scale_range[1] + 1e-12);
        }
    }

    SECTION("perturbation with zero deltas is the baseline")
    {
        DiversificationSpec spec;
        const Diversifier div(seeds, spec);
        auto r = div.generate(2).record;
        r.delta_a_fraction = 0.0;
        r.delta_b_fraction = 0.0;
        CHECK(max_abs_difference(div.apply(r), div.baseline(r)) == 0.0);
        r.pair_index = 99;
        CHECK_THROWS(div.apply(r));
    }

    SECTION("a gate that always rejects hits the floor")
    {
        DiversificationSpec spec;
        spec.acceptance_floor = 0.5;
        const Diversifier div(seeds, spec);
        CHECK(div.max_attempts() == 6);
        const VariantGate never = [](std::size_t, const MotionRecording &, const TransformRecord &) {
            return RejectionReason::doppler_overlap;
        };
        CHECK_THROWS_WITH(div.generate(0, never),
                          ContainsSubstring("acceptance rate below floor") && ContainsSubstring("doppler_overlap="));
    }

    SECTION("gate sees the variant it judges")
    {
        DiversificationSpec spec;
        const Diversifier div(seeds, spec);
        std::size_t calls = 0;
        const VariantGate reject_first = [&](std::size_t, const MotionRecording &, const TransformRecord &r) {
            ++calls;
            return r.attempt == 0 ? RejectionReason::doppler_overlap : RejectionReason::none;
        };
        const auto v = div.generate(1, reject_first);
        CHECK(v.record.attempt >= 1);
        CHECK(v.rejections[static_cast<std::size_t>(RejectionReason::doppler_overlap)] >= 1);
        CHECK(calls >= 2);
    }

    SECTION("errors")
    {
        CHECK_THROWS(Diversifier({}, DiversificationSpec{}));
        CHECK_THROWS(diversify_batch(seeds, DiversificationSpec{}, 0));
    }
}

TEST_CASE("parallel_for")
{
    std::vector<int> hits(100, 0);
    parallel_for(100, 4, [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits)
        CHECK(h == 1);
    CHECK_THROWS_WITH(parallel_for(10, 3,
                                   [](std::size_t i) {
                                       if (i == 7)
                                           throw Error("boom");
                                   }),
                      ContainsSubstring("boom"));
}
