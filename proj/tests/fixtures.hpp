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

#include <cmath>
#include <vector>

namespace fixtures
{

using mdsim::JointId;
using mdsim::Pose;
using mdsim::Vec3;

// Upright subject facing -x with vertical legs and arms hanging straight down.
// Head at z = h, feet on the ground.
inline Pose standing_pose(double h = 1.75, double x = 3.0)
{
    const double s = h / 1.75;
    Pose p;
    auto set = [&](JointId j, double px, double py, double pz) { p[mdsim::index(j)] = Vec3(x + px * s, py * s, pz * s); };
    set(JointId::head, 0, 0, 1.75);
    set(JointId::shoulder_center, 0, 0, 1.45);
    set(JointId::shoulder_left, 0, 0.20, 1.45);
    set(JointId::shoulder_right, 0, -0.20, 1.45);
    set(JointId::elbow_left, 0, 0.20, 1.15);
    set(JointId::elbow_right, 0, -0.20, 1.15);
    set(JointId::wrist_left, 0, 0.20, 0.90);
    set(JointId::wrist_right, 0, -0.20, 0.90);
    set(JointId::hand_left, 0, 0.20, 0.80);
    set(JointId::hand_right, 0, -0.20, 0.80);
    set(JointId::spine, 0, 0, 1.20);
    set(JointId::hip_center, 0, 0, 0.95);
    set(JointId::hip_left, 0, 0.10, 0.95);
    set(JointId::hip_right, 0, -0.10, 0.95);
    set(JointId::knee_left, 0, 0.10, 0.50);
    set(JointId::knee_right, 0, -0.10, 0.50);
    set(JointId::ankle_left, 0, 0.10, 0.08);
    set(JointId::ankle_right, 0, -0.10, 0.08);
    set(JointId::foot_left, -0.15, 0.10, 0.0);
    set(JointId::foot_right, -0.15, -0.10, 0.0);
    return p;
}

// Rigid standing subject translated along -x at speed v.
inline mdsim::MotionRecording gliding(double v, double duration, double rate, double h = 1.75,
                                      mdsim::RecordingInfo info = {})
{
    const auto n = static_cast<std::size_t>(std::llround(duration * rate)) + 1;
    std::vector<Pose> poses(n);
    for (std::size_t k = 0; k < n; ++k)
    {
        poses[k] = standing_pose(h);
        for (auto &j : poses[k])
            j.x() -= v * static_cast<double>(k) / rate;
    }
    return mdsim::MotionRecording::from_poses(std::move(poses), rate, std::move(info));
}

} // namespace fixtures
