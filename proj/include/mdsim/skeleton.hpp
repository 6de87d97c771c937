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

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace mdsim
{

using Vec3 = Eigen::Vector3d;

// Canonical order. The MOCAP CSV columns follow this order.
enum class JointId : std::uint8_t
{
    head,
    shoulder_center,
    shoulder_left,
    shoulder_right,
    elbow_left,
    elbow_right,
    wrist_left,
    wrist_right,
    hand_left,
    hand_right,
    spine,
    hip_center,
    hip_left,
    hip_right,
    knee_left,
    knee_right,
    ankle_left,
    ankle_right,
    foot_left,
    foot_right,
};

inline constexpr std::size_t kNumJoints = 20;

constexpr std::size_t index(JointId j) { return static_cast<std::size_t>(j); }

std::string_view joint_name(JointId j);
std::optional<JointId> joint_from_name(std::string_view name);

// Joints eligible as perturbation targets: everything but the hand and foot endpoints.
inline constexpr std::array<JointId, 16> kPerturbableJoints = {
    JointId::head,       JointId::shoulder_center, JointId::shoulder_left, JointId::shoulder_right,
    JointId::elbow_left, JointId::elbow_right,     JointId::wrist_left,    JointId::wrist_right,
    JointId::spine,      JointId::hip_center,      JointId::hip_left,      JointId::hip_right,
    JointId::knee_left,  JointId::knee_right,      JointId::ankle_left,    JointId::ankle_right,
};

using Pose = std::array<Vec3, kNumJoints>;

struct Frame
{
    double time = 0.0; // seconds
    Pose joints{};     // x = down-range, y = cross-range, z = up, meters

    const Vec3 &operator[](JointId j) const { return joints[index(j)]; }
    Vec3 &operator[](JointId j) { return joints[index(j)]; }
};

struct RecordingInfo
{
    std::string activity_label;
    std::string subject_id;
    std::string provenance;
};

// Validated, immutable sequence of uniformly sampled skeleton poses.
// Frame times are shifted to start at 0.
class MotionRecording
{
  public:
    MotionRecording(std::vector<Frame> frames, double frame_rate, RecordingInfo info = {});

    // Frames at times k / frame_rate.
    static MotionRecording from_poses(std::vector<Pose> poses, double frame_rate, RecordingInfo info = {});

    const std::vector<Frame> &frames() const noexcept { return frames_; }
    const Frame &operator[](std::size_t k) const { return frames_[k]; }
    std::size_t size() const noexcept { return frames_.size(); }
    double frame_rate() const noexcept { return frame_rate_; }
    double duration() const noexcept { return frames_.back().time; }
    const RecordingInfo &info() const noexcept { return info_; }

    // One coordinate of one joint over all frames.
    std::vector<double> trajectory(JointId j, int axis) const;

  private:
    std::vector<Frame> frames_;
    double frame_rate_;
    RecordingInfo info_;
};

enum class MocapFormat
{
    csv,
};

// Parses a recording. `frame_rate` overrides the rate inferred from the time column
// and must agree with it.
MotionRecording load_mocap(std::istream &source, MocapFormat format, RecordingInfo info = {},
                           std::optional<double> frame_rate = std::nullopt);

// Reads `path` and its sidecar `<stem>.json` ({activity_label, subject_id, frame_rate}) when present.
MotionRecording load_mocap_file(const std::filesystem::path &path);

// Shortest round-trip number formatting, so write -> load is bit-exact.
void write_mocap(std::ostream &out, const MotionRecording &rec);
void write_mocap_file(const std::filesystem::path &path, const MotionRecording &rec);

std::filesystem::path sidecar_path(const std::filesystem::path &csv_path);

// Per-joint, per-axis linear interpolation onto k / target_rate spanning the original duration.
MotionRecording resample(const MotionRecording &rec, double target_rate);

// Position of every joint at an arbitrary time, linearly interpolated and clamped to the recording span.
Pose pose_at(const MotionRecording &rec, double t);

// ---------------------------------------------------------------------------------------------
// Limb lengths

enum class Limb : std::uint8_t
{
    upper_arm_left,
    upper_arm_right,
    forearm_left,
    forearm_right,
    thigh_left,
    thigh_right,
    shank_left,
    shank_right,
};

inline constexpr std::size_t kNumLimbs = 8;

struct LimbSegment
{
    JointId proximal;
    JointId distal;
};

LimbSegment limb_segment(Limb limb);
std::string_view limb_name(Limb limb);

struct LimbLengthReport
{
    std::array<double, kNumLimbs> mean_length{};   // m
    std::array<double, kNumLimbs> max_deviation{}; // max |len - mean| / mean over frames
    double tolerance = 0.05;
    bool pass = true;

    double mean(Limb l) const { return mean_length[static_cast<std::size_t>(l)]; }
    double deviation(Limb l) const { return max_deviation[static_cast<std::size_t>(l)]; }
};

LimbLengthReport limb_lengths(const MotionRecording &rec, double tolerance = 0.05);

// Largest head z minus the lower foot's z over frames, so falls and sit-downs report standing height.
// Throws when not positive.
double subject_height(const MotionRecording &rec);

// ---------------------------------------------------------------------------------------------
// Body model

struct Sphere
{
    double radius;
};

// Semi-axes a, b span the cross-section; c lies along the segment.
struct Ellipsoid
{
    double a, b, c;
};

struct Cylinder
{
    double radius;
    double length;
};

using Primitive = std::variant<Sphere, Ellipsoid, Cylinder>;

enum class BodyPart : std::uint8_t
{
    head,
    neck,
    upper_torso,
    lower_torso,
    shoulder,
    upper_arm,
    forearm,
    hand,
    pelvis,
    thigh,
    shank,
    foot,
};

inline constexpr std::size_t kNumBodyParts = 12;

// Cross-section radii per body part for a subject of `reference_height`; scaled linearly with height.
struct BodyGeometryConfig
{
    double reference_height = 1.75;
    std::array<double, kNumBodyParts> radius = {
        0.10, // head (sphere)
        0.06, // neck
        0.15, // upper torso
        0.14, // lower torso
        0.05, // shoulder
        0.05, // upper arm
        0.04, // forearm
        0.03, // hand
        0.07, // pelvis
        0.08, // thigh
        0.07, // shank
        0.05, // foot
    };

    double &operator[](BodyPart p) { return radius[static_cast<std::size_t>(p)]; }
    double operator[](BodyPart p) const { return radius[static_cast<std::size_t>(p)]; }
};

struct Scatterer
{
    BodyPart part;
    JointId anchor;
    std::optional<JointId> anchor_end; // set for segments; position is the midpoint
    Primitive primitive;

    Vec3 position(const Pose &pose) const;
    // Unit vector from anchor to anchor_end, or zero for point scatterers.
    Vec3 axis(const Pose &pose) const;
};

inline constexpr std::size_t kNumScatterers = 20;

struct BodyModel
{
    std::array<Scatterer, kNumScatterers> scatterers;
};

BodyModel build_body_model(const MotionRecording &rec, const BodyGeometryConfig &geometry = {});

} // namespace mdsim
