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

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace mdsim
{

enum class WindowType
{
    hanning,
    hamming,
};

const char *window_name(WindowType w);
WindowType window_from_name(std::string_view name);

// Symmetric windows: hanning excludes the zero endpoints, hamming spans them.
std::vector<double> make_window(WindowType type, std::size_t length);

struct StftSpec
{
    WindowType window = WindowType::hanning;
    std::size_t window_length = 256;
    std::size_t overlap = 128;
    std::size_t nfft = 1024;

    std::size_t hop() const { return window_length - overlap; }

    // Throws unless 0 <= overlap < window_length <= nfft.
    void validate() const;

    // Hanning 256, overlap 128, 1024 bins, for 2.4 kHz simulated returns.
    static StftSpec simulated();
    // Hamming 2048, overlap 128, 4096 bins.
    static StftSpec measured();
};

inline constexpr double kSimulatedSampleRate = 2400.0;

// Frame count for a signal of n samples; 0 when n < window_length.
std::size_t stft_frame_count(std::size_t n, const StftSpec &spec);

// nfft x frames transform of the windowed frames; rows are shifted so that row nfft/2 is 0 Hz.
Eigen::MatrixXcd stft(const ComplexBaseband &sig, const StftSpec &spec);

struct Spectrogram
{
    Eigen::MatrixXd power;          // bins x frames, |stft|^2
    std::vector<double> freq_axis;  // Hz, ascending, 0 Hz at row nfft/2
    std::vector<double> time_axis;  // s, frame centers
    StftSpec spec;
    double fs = 0.0;

    std::size_t bins() const { return static_cast<std::size_t>(power.rows()); }
    std::size_t frames() const { return static_cast<std::size_t>(power.cols()); }
    double bin_width() const { return fs / static_cast<double>(spec.nfft); }
    double hop_duration() const { return static_cast<double>(spec.hop()) / fs; }
};

Spectrogram spectrogram(const ComplexBaseband &sig, const StftSpec &spec);

// Frequency of row r for an nfft-point shifted transform.
double bin_frequency(std::size_t row, std::size_t nfft, double fs);

struct SignatureImage
{
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<std::uint8_t> pixels; // row-major, row 0 = highest Doppler
    double dynamic_range_db = 0.0;
    double crop_duration = 0.0;

    std::uint8_t at(std::size_t row, std::size_t col) const { return pixels[row * width + col]; }
};

struct ImageSpec
{
    double crop_duration = 4.0; // s
    std::size_t height = 90;
    std::size_t width = 120;
    double dynamic_range_db = 50.0;
};

// Center crop in time, max-referenced dB clipped to dynamic_range_db, mapped to [0, 255],
// bilinear resample to out_height x out_width.
SignatureImage to_image(const Spectrogram &sp, double crop_duration, std::size_t out_height, std::size_t out_width,
                        double dynamic_range_db);

inline SignatureImage to_image(const Spectrogram &sp, const ImageSpec &img)
{
    return to_image(sp, img.crop_duration, img.height, img.width, img.dynamic_range_db);
}

// Number of spectrogram columns kept by a crop of `crop_duration`.
std::size_t crop_columns(const Spectrogram &sp, double crop_duration);

// Bilinear resample of a row-major float image using pixel-center alignment.
std::vector<double> resize_bilinear(const std::vector<double> &src, std::size_t src_h, std::size_t src_w,
                                    std::size_t dst_h, std::size_t dst_w);

} // namespace mdsim
