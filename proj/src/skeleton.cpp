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

#include "mdsim/skeleton.hpp"
#include "mdsim/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace mdsim
{

namespace
{

constexpr std::array<std::string_view, kNumJoints> kJointNames = {
    "head",       "shoulder_center", "shoulder_left", "shoulder_right", "elbow_left",
    "elbow_right", "wrist_left",     "wrist_right",   "hand_left",      "hand_right",
    "spine",      "hip_center",      "hip_left",      "hip_right",      "knee_left",
    "knee_right", "ankle_left",      "ankle_right",   "foot_left",      "foot_right",
};

constexpr char kAxisNames[3] = {'x', 'y', 'z'};

// Times may deviate from k / rate by at most this much.
constexpr double kTimeTolerance = 1e-9;

std::string format_double(double v)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

bool parse_double(std::string_view s, double &out)
{
    while (!s.empty() && s.front() == ' ')
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r'))
        s.remove_suffix(1);
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true)
    {
        auto pos = line.find(sep, start);
        if (pos == std::string_view::npos)
        {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string expected_header()
{
    std::string h = "t";
    for (auto name : kJointNames)
        for (char a : kAxisNames)
        {
            h += ',';
            h += name;
            h += '_';
            h += a;
        }
    return h;
}

} // namespace

std::string_view joint_name(JointId j) { return kJointNames[index(j)]; }

std::optional<JointId> joint_from_name(std::string_view name)
{
    for (std::size_t i = 0; i < kNumJoints; ++i)
        if (kJointNames[i] == name)
            return static_cast<JointId>(i);
    return std::nullopt;
}

// ---------------------------------------------------------------------------------------------

MotionRecording::MotionRecording(std::vector<Frame> frames, double frame_rate, RecordingInfo info)
    : frames_(std::move(frames)), frame_rate_(frame_rate), info_(std::move(info))
{
    if (!(frame_rate_ > 0.0) || !std::isfinite(frame_rate_))
        throw Error("frame_rate must be positive and finite");
    if (frames_.empty())
        throw Error("recording has no frames");

    const double t0 = frames_.front().time;
    for (std::size_t k = 0; k < frames_.size(); ++k)
    {
        auto &f = frames_[k];
        if (!std::isfinite(f.time))
            throw Error("non-finite time at frame " + std::to_string(k));
        f.time -= t0;
        if (k > 0 && !(f.time > frames_[k - 1].time))
            throw Error("non-monotone time at frame " + std::to_string(k));
        if (std::abs(f.time - static_cast<double>(k) / frame_rate_) > kTimeTolerance)
            throw Error("non-uniform frame spacing at frame " + std::to_string(k));
        for (std::size_t j = 0; j < kNumJoints; ++j)
            if (!f.joints[j].allFinite())
                throw Error("non-finite coordinate at frame " + std::to_string(k) + ", joint " +
                            std::string(kJointNames[j]));
    }
}

MotionRecording MotionRecording::from_poses(std::vector<Pose> poses, double frame_rate, RecordingInfo info)
{
    std::vector<Frame> frames(poses.size());
    for (std::size_t k = 0; k < poses.size(); ++k)
    {
        frames[k].time = static_cast<double>(k) / frame_rate;
        frames[k].joints = poses[k];
    }
    return MotionRecording(std::move(frames), frame_rate, std::move(info));
}

std::vector<double> MotionRecording::trajectory(JointId j, int axis) const
{
    std::vector<double> out(frames_.size());
    for (std::size_t k = 0; k < frames_.size(); ++k)
        out[k] = frames_[k][j][axis];
    return out;
}

// ---------------------------------------------------------------------------------------------
// CSV

MotionRecording load_mocap(std::istream &source, MocapFormat format, RecordingInfo info,
                           std::optional<double> frame_rate)
{
    if (format != MocapFormat::csv)
        throw Error("unsupported MOCAP format");

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(source, line))
        throw ParseError("empty MOCAP stream", 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r')
        line.pop_back();

    // Header: every canonical column must be present in canonical order.
    const auto header = split(line, ',');
    const std::size_t n_cols = 1 + 3 * kNumJoints;
    if (header.empty() || header[0] != "t")
        throw ParseError("header must start with 't'", line_no);
    for (std::size_t j = 0; j < kNumJoints; ++j)
        for (int a = 0; a < 3; ++a)
        {
            const std::size_t col = 1 + 3 * j + a;
            std::string want = std::string(kJointNames[j]) + "_" + kAxisNames[a];
            if (col >= header.size() || header[col] != want)
                throw ParseError("missing joint column " + want, line_no);
        }
    if (header.size() != n_cols)
        throw ParseError("unexpected header column count " + std::to_string(header.size()), line_no);

    std::vector<Frame> frames;
    while (std::getline(source, line))
    {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto fields = split(line, ',');
        if (fields.size() != n_cols)
            throw ParseError("malformed frame " + std::to_string(frames.size()) + ": expected " +
                                 std::to_string(n_cols) + " values, got " + std::to_string(fields.size()),
                             line_no);
        Frame f;
        if (!parse_double(fields[0], f.time))
            throw ParseError("malformed time value", line_no);
        if (!std::isfinite(f.time))
            throw ParseError("non-finite time in frame " + std::to_string(frames.size()), line_no);
        if (!frames.empty() && !(f.time > frames.back().time))
            throw ParseError("non-monotone time in frame " + std::to_string(frames.size()), line_no);
        for (std::size_t j = 0; j < kNumJoints; ++j)
            for (int a = 0; a < 3; ++a)
            {
                double v;
                if (!parse_double(fields[1 + 3 * j + a], v))
                    throw ParseError("malformed value in frame " + std::to_string(frames.size()), line_no);
                if (!std::isfinite(v))
                    throw ParseError("NaN coordinate for joint " + std::string(kJointNames[j]) + " in frame " +
                                         std::to_string(frames.size()),
                                     line_no);
                f.joints[j][a] = v;
            }
        frames.push_back(f);
    }

    if (frames.empty())
        throw ParseError("MOCAP stream has no frames", line_no);

    double rate;
    if (frames.size() >= 2)
    {
        const double inferred = static_cast<double>(frames.size() - 1) / (frames.back().time - frames.front().time);
        if (frame_rate)
        {
            if (std::abs(*frame_rate - inferred) > 1e-6 * *frame_rate)
                throw ParseError("declared frame_rate " + format_double(*frame_rate) +
                                     " disagrees with time column (" + format_double(inferred) + ")",
                                 0);
            rate = *frame_rate;
        }
        else
            rate = inferred;
    }
    else
    {
        if (!frame_rate)
            throw ParseError("single-frame recording needs a declared frame_rate", 0);
        rate = *frame_rate;
    }
    return MotionRecording(std::move(frames), rate, std::move(info));
}

std::filesystem::path sidecar_path(const std::filesystem::path &csv_path)
{
    auto p = csv_path;
    p.replace_extension(".json");
    return p;
}

MotionRecording load_mocap_file(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open " + path.string());

    RecordingInfo info;
    info.subject_id = path.stem().string();
    info.provenance = path.filename().string();
    std::optional<double> rate;

    const auto meta_path = sidecar_path(path);
    if (std::filesystem::exists(meta_path))
    {
        std::ifstream meta_in(meta_path);
        nlohmann::json meta;
        try
        {
            meta = nlohmann::json::parse(meta_in);
        }
        catch (const nlohmann::json::exception &e)
        {
            throw ParseError("bad sidecar " + meta_path.string() + ": " + e.what(), 0);
        }
        info.activity_label = meta.value("activity_label", "");
        info.subject_id = meta.value("subject_id", info.subject_id);
        info.provenance = meta.value("provenance", info.provenance);
        if (meta.contains("frame_rate"))
            rate = meta.at("frame_rate").get<double>();
    }
    try
    {
        return load_mocap(in, MocapFormat::csv, std::move(info), rate);
    }
    catch (const ParseError &e)
    {
        throw ParseError(path.string() + ": " + e.what(), 0);
    }
}

void write_mocap(std::ostream &out, const MotionRecording &rec)
{
    out << expected_header() << '\n';
    std::string row;
    for (const auto &f : rec.frames())
    {
        row = format_double(f.time);
        for (const auto &p : f.joints)
            for (int a = 0; a < 3; ++a)
            {
                row += ',';
                row += format_double(p[a]);
            }
        out << row << '\n';
    }
}

void write_mocap_file(const std::filesystem::path &path, const MotionRecording &rec)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    write_mocap(out, rec);

    nlohmann::json meta = {
        {"activity_label", rec.info().activity_label},
        {"subject_id", rec.info().subject_id},
        {"frame_rate", rec.frame_rate()},
    };
    if (!rec.info().provenance.empty())
        meta["provenance"] = rec.info().provenance;
    std::ofstream meta_out(sidecar_path(path), std::ios::binary);
    meta_out << meta.dump(2) << '\n';
    if (!out || !meta_out)
        throw Error("write failed for " + path.string());
}

// ---------------------------------------------------------------------------------------------
// Resampling

Pose pose_at(const MotionRecording &rec, double t)
{
    const auto &frames = rec.frames();
    const std::size_t n = frames.size();
    double u = t * rec.frame_rate();
    const double r = std::round(u);
    if (std::abs(u - r) < 1e-9)
        u = r;
    if (u <= 0.0)
        return frames.front().joints;
    const auto i = static_cast<std::size_t>(std::floor(u));
    if (i >= n - 1)
        return frames.back().joints;
    const double w = u - static_cast<double>(i);
    if (w == 0.0)
        return frames[i].joints;
    Pose p;
    for (std::size_t j = 0; j < kNumJoints; ++j)
        p[j] = (1.0 - w) * frames[i].joints[j] + w * frames[i + 1].joints[j];
    return p;
}

MotionRecording resample(const MotionRecording &rec, double target_rate)
{
    if (!(target_rate > 0.0) || !std::isfinite(target_rate))
        throw Error("target_rate must be positive");
    if (rec.size() < 2)
        throw Error("resample needs at least 2 frames");
    const auto n_out = static_cast<std::size_t>(std::floor(rec.duration() * target_rate + 1e-9)) + 1;
    if (n_out < 2)
        throw Error("target_rate " + format_double(target_rate) + " yields fewer than 2 frames");

    std::vector<Pose> poses(n_out);
    for (std::size_t k = 0; k < n_out; ++k)
        poses[k] = pose_at(rec, static_cast<double>(k) / target_rate);
    return MotionRecording::from_poses(std::move(poses), target_rate, rec.info());
}

// ---------------------------------------------------------------------------------------------
// Limbs

LimbSegment limb_segment(Limb limb)
{
    switch (limb)
    {
    case Limb::upper_arm_left: return {JointId::shoulder_left, JointId::elbow_left};
    case Limb::upper_arm_right: return {JointId::shoulder_right, JointId::elbow_right};
    case Limb::forearm_left: return {JointId::elbow_left, JointId::wrist_left};
    case Limb::forearm_right: return {JointId::elbow_right, JointId::wrist_right};
    case Limb::thigh_left: return {JointId::hip_left, JointId::knee_left};
    case Limb::thigh_right: return {JointId::hip_right, JointId::knee_right};
    case Limb::shank_left: return {JointId::knee_left, JointId::ankle_left};
    case Limb::shank_right: return {JointId::knee_right, JointId::ankle_right};
    }
    throw Error("unknown limb");
}

std::string_view limb_name(Limb limb)
{
    static constexpr std::array<std::string_view, kNumLimbs> names = {
        "upper_arm_left", "upper_arm_right", "forearm_left", "forearm_right",
        "thigh_left",     "thigh_right",     "shank_left",   "shank_right",
    };
    return names[static_cast<std::size_t>(limb)];
}

LimbLengthReport limb_lengths(const MotionRecording &rec, double tolerance)
{
    LimbLengthReport report;
    report.tolerance = tolerance;
    const auto n = static_cast<double>(rec.size());
    std::vector<double> len(rec.size());
    for (std::size_t l = 0; l < kNumLimbs; ++l)
    {
        const auto seg = limb_segment(static_cast<Limb>(l));
        double sum = 0.0;
        for (std::size_t k = 0; k < rec.size(); ++k)
        {
            len[k] = (rec[k][seg.distal] - rec[k][seg.proximal]).norm();
            sum += len[k];
        }
        const double mean = sum / n;
        double dev = 0.0;
        if (mean > 0.0)
            for (double v : len)
                dev = std::max(dev, std::abs(v - mean) / mean);
        report.mean_length[l] = mean;
        report.max_deviation[l] = dev;
        if (!(dev <= tolerance))
            report.pass = false;
    }
    return report;
}

double subject_height(const MotionRecording &rec)
{
    double h = -std::numeric_limits<double>::infinity();
    for (const auto &f : rec.frames())
        h = std::max(h, f[JointId::head].z() - std::min(f[JointId::foot_left].z(), f[JointId::foot_right].z()));
    if (!(h > 1e-9))
        throw Error("unmeasurable height: head is not above the feet");
    return h;
}

// ---------------------------------------------------------------------------------------------
// Body model

Vec3 Scatterer::position(const Pose &pose) const
{
    if (anchor_end)
        return 0.5 * (pose[index(anchor)] + pose[index(*anchor_end)]);
    return pose[index(anchor)];
}

Vec3 Scatterer::axis(const Pose &pose) const
{
    if (!anchor_end)
        return Vec3::Zero();
    Vec3 d = pose[index(*anchor_end)] - pose[index(anchor)];
    const double n = d.norm();
    return n > 0.0 ? Vec3(d / n) : Vec3::Zero();
}

BodyModel build_body_model(const MotionRecording &rec, const BodyGeometryConfig &geometry)
{
    for (double r : geometry.radius)
        if (!(r > 0.0) || !std::isfinite(r))
            throw Error("degenerate primitive: geometry radius must be positive");
    if (!(geometry.reference_height > 0.0))
        throw Error("degenerate primitive: reference height must be positive");

    const double scale = subject_height(rec) / geometry.reference_height;

    auto mean_distance = [&](JointId a, JointId b) {
        double sum = 0.0;
        for (const auto &f : rec.frames())
            sum += (f[b] - f[a]).norm();
        return sum / static_cast<double>(rec.size());
    };

    auto segment = [&](BodyPart part, JointId a, JointId b) {
        const double len = mean_distance(a, b);
        if (!(len > 0.0))
            throw Error("degenerate limb: " + std::string(joint_name(a)) + "-" + std::string(joint_name(b)) +
                        " has zero mean length");
        const double r = geometry[part] * scale;
        return Scatterer{part, a, b, Ellipsoid{r, r, 0.5 * len}};
    };

    using J = JointId;
    using P = BodyPart;
    BodyModel body{{
        Scatterer{P::head, J::head, std::nullopt, Sphere{geometry[P::head] * scale}},
        segment(P::neck, J::head, J::shoulder_center),
        segment(P::upper_torso, J::shoulder_center, J::spine),
        segment(P::lower_torso, J::spine, J::hip_center),
        segment(P::shoulder, J::shoulder_center, J::shoulder_left),
        segment(P::shoulder, J::shoulder_center, J::shoulder_right),
        segment(P::upper_arm, J::shoulder_left, J::elbow_left),
        segment(P::upper_arm, J::shoulder_right, J::elbow_right),
        segment(P::forearm, J::elbow_left, J::wrist_left),
        segment(P::forearm, J::elbow_right, J::wrist_right),
        segment(P::hand, J::wrist_left, J::hand_left),
        segment(P::hand, J::wrist_right, J::hand_right),
        segment(P::pelvis, J::hip_center, J::hip_left),
        segment(P::pelvis, J::hip_center, J::hip_right),
        segment(P::thigh, J::hip_left, J::knee_left),
        segment(P::thigh, J::hip_right, J::knee_right),
        segment(P::shank, J::knee_left, J::ankle_left),
        segment(P::shank, J::knee_right, J::ankle_right),
        segment(P::foot, J::ankle_left, J::foot_left),
        segment(P::foot, J::ankle_right, J::foot_right),
    }};
    return body;
}

} // namespace mdsim
