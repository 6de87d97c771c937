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

#include "mdsim/diversify.hpp"
#include "mdsim/radar.hpp"
#include "mdsim/similarity.hpp"
#include "mdsim/spectrogram.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mdsim
{

struct PipelineConfig
{
    RadarConfig radar;
    StftSpec stft = StftSpec::simulated();
    ImageSpec image;
    DiversificationSpec diversify; // rng_seed is taken from `seed`
    std::optional<double> snr_db;
    std::filesystem::path output_dir = "dataset";
    std::size_t workers = 1;
    std::uint64_t seed = 0;
    std::size_t count = 100;
    bool write_iq = false;
    double doppler_margin = 0.10;

    void validate() const;
};

std::string config_to_json(const PipelineConfig &cfg);
// Keys absent from the text keep the values already in `base`.
PipelineConfig config_from_json(std::string_view text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path &path, PipelineConfig base = {});

struct ManifestEntry
{
    std::string sample_id;
    std::string class_label;
    std::string seed_recording_id;
    TransformRecord transform;
    std::optional<double> snr_db;
    std::uint64_t noise_seed = 0;
    std::string image_path; // relative to the dataset directory
    std::optional<std::string> iq_path;
    std::string checksum; // sha256 of the image file
    std::optional<std::string> iq_checksum;
};

struct DatasetManifest
{
    std::vector<ManifestEntry> entries;
};

std::string manifest_line(const ManifestEntry &e);
ManifestEntry parse_manifest_line(std::string_view line, std::size_t line_number = 0);
void write_manifest(const std::filesystem::path &path, const DatasetManifest &manifest);
DatasetManifest read_manifest(const std::filesystem::path &path);

// Noise stream of sample i.
std::uint64_t noise_seed_for(std::uint64_t seed, std::size_t sample_index);

// Body model, synthesis at cfg.radar and the configured STFT.
ComplexBaseband render_baseband(const MotionRecording &rec, const PipelineConfig &cfg);
SignatureImage render_image(const ComplexBaseband &clean, const PipelineConfig &cfg, std::optional<double> snr_db,
                            std::uint64_t noise_seed);
SignatureImage render_image(const MotionRecording &rec, const PipelineConfig &cfg);

// *.csv files with optional sidecars, sorted by file name. Subject ids default to the file stem.
std::vector<MotionRecording> load_seed_dir(const std::filesystem::path &dir);

struct PipelineResult
{
    DatasetManifest manifest;
    std::map<std::string, Interval> doppler_limits;
    std::array<std::size_t, 4> rejections{}; // by RejectionReason
    std::map<std::string, std::size_t> class_counts;
    BlockSummary inter_class;
    double min_intra_ssi = 0.0;
    double max_intra_ssi = 0.0;
};

// Writes images/, originals/, seeds/, report/, config.json and manifest.jsonl under cfg.output_dir.
PipelineResult run_pipeline(const PipelineConfig &cfg, const std::filesystem::path &seeds_dir);
PipelineResult run_pipeline(const PipelineConfig &cfg, const std::vector<MotionRecording> &seeds);

struct VerifyReport
{
    bool ok = true;
    std::size_t checked = 0;
    std::vector<std::string> problems;
    std::vector<std::string> rederived;
};

enum class Rederive
{
    none,
    one,
    all,
};

// Recomputes checksums and re-derives samples end-to-end from their transform records.
// `sample_id` selects the re-derived sample; otherwise one is chosen at random.
VerifyReport verify_manifest(const std::filesystem::path &dataset_dir, Rederive mode = Rederive::one,
                             const std::optional<std::string> &sample_id = std::nullopt);

} // namespace mdsim
