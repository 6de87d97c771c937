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
#include "mdsim/spectrogram.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mdsim
{

// 8-bit grayscale PNG.
std::vector<std::uint8_t> encode_png(const SignatureImage &img);
void write_png(const std::filesystem::path &path, const SignatureImage &img);
SignatureImage read_png(const std::filesystem::path &path);

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_file(const std::filesystem::path &path);

std::vector<std::uint8_t> read_bytes(const std::filesystem::path &path);
void write_bytes(const std::filesystem::path &path, std::span<const std::uint8_t> bytes);

// Interleaved little-endian float64 I/Q plus `<stem>.json` with fs, f0, label and manifest_id.
void write_iq(const std::filesystem::path &path, const ComplexBaseband &sig, const std::string &manifest_id = {});
ComplexBaseband read_iq(const std::filesystem::path &path);

// Row-major little-endian float32 power plus `<stem>.json` with fs, the STFT parameters and both axes.
void write_spectrogram(const std::filesystem::path &path, const Spectrogram &sp);

} // namespace mdsim
