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

#include "mdsim/io.hpp"
#include "mdsim/error.hpp"

#include "json.hpp"

#include <openssl/evp.h>
#include <png.h>

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

namespace mdsim
{

namespace
{

static_assert(std::endian::native == std::endian::little, "binary exports assume a little-endian host");

void png_sink(png_structp png, png_bytep data, png_size_t length)
{
    auto *out = static_cast<std::vector<std::uint8_t> *>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + length);
}

void png_flush(png_structp) {}

[[noreturn]] void png_fail(png_structp, png_const_charp msg) { throw Error(std::string("libpng: ") + msg); }

void png_warn(png_structp, png_const_charp) {}

std::filesystem::path json_sidecar(const std::filesystem::path &path)
{
    auto p = path;
    p.replace_extension(".json");
    return p;
}

void write_json(const std::filesystem::path &path, const nlohmann::json &j)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out)
        throw Error("failed writing " + path.string());
}

} // namespace

std::vector<std::uint8_t> encode_png(const SignatureImage &img)
{
    if (img.height == 0 || img.width == 0 || img.pixels.size() != img.height * img.width)
        throw Error("bad image dimensions for PNG");
    std::vector<std::uint8_t> out;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
    if (!png)
        throw Error("libpng: cannot create write struct");
    png_infop info = png_create_info_struct(png);
    struct Guard
    {
        png_structp &p;
        png_infop &i;
        ~Guard() { png_destroy_write_struct(&p, &i); }
    } guard{png, info};
    if (!info)
        throw Error("libpng: cannot create info struct");

    png_set_write_fn(png, &out, png_sink, png_flush);
    png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (std::size_t r = 0; r < img.height; ++r)
        png_write_row(png, const_cast<png_bytep>(img.pixels.data() + r * img.width));
    png_write_end(png, nullptr);
    return out;
}

void write_png(const std::filesystem::path &path, const SignatureImage &img)
{
    const auto bytes = encode_png(img);
    write_bytes(path, bytes);
}

SignatureImage read_png(const std::filesystem::path &path)
{
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    const auto bytes = read_bytes(path);
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
        throw Error("cannot decode PNG " + path.string() + ": " + image.message);
    image.format = PNG_FORMAT_GRAY;
    SignatureImage img;
    img.height = image.height;
    img.width = image.width;
    img.pixels.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, img.pixels.data(), 0, nullptr))
    {
        png_image_free(&image);
        throw Error("cannot decode PNG " + path.string() + ": " + image.message);
    }
    return img;
}

// ---------------------------------------------------------------------------------------------

std::string sha256_hex(std::span<const std::uint8_t> bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr))
        throw Error("SHA-256 failed");
    std::ostringstream hex;
    for (unsigned int i = 0; i < len; ++i)
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return hex.str();
}

std::string sha256_file(const std::filesystem::path &path) { return sha256_hex(read_bytes(path)); }

std::vector<std::uint8_t> read_bytes(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const std::filesystem::path &path, std::span<const std::uint8_t> bytes)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw Error("failed writing " + path.string());
}

// ---------------------------------------------------------------------------------------------

void write_iq(const std::filesystem::path &path, const ComplexBaseband &sig, const std::string &manifest_id)
{
    std::vector<std::uint8_t> bytes(sig.samples.size() * 2 * sizeof(double));
    std::memcpy(bytes.data(), sig.samples.data(), bytes.size());
    write_bytes(path, bytes);
    nlohmann::json j;
    j["fs"] = sig.fs;
    j["f0"] = sig.config.f0;
    j["label"] = sig.label;
    j["manifest_id"] = manifest_id;
    j["samples"] = sig.samples.size();
    j["format"] = "complex128-le-interleaved";
    write_json(json_sidecar(path), j);
}

ComplexBaseband read_iq(const std::filesystem::path &path)
{
    const auto bytes = read_bytes(path);
    if (bytes.size() % (2 * sizeof(double)) != 0)
        throw Error("I/Q file size is not a multiple of 16 bytes: " + path.string());
    ComplexBaseband sig;
    sig.samples.resize(bytes.size() / (2 * sizeof(double)));
    std::memcpy(sig.samples.data(), bytes.data(), bytes.size());

    std::ifstream side(json_sidecar(path));
    if (!side)
        throw Error("missing I/Q sidecar for " + path.string());
    const auto j = nlohmann::json::parse(side);
    sig.fs = j.at("fs").get<double>();
    sig.config.f0 = j.at("f0").get<double>();
    sig.config.fs = sig.fs;
    sig.label = j.value("label", "");
    return sig;
}

void write_spectrogram(const std::filesystem::path &path, const Spectrogram &sp)
{
    std::vector<float> data(sp.bins() * sp.frames());
    for (std::size_t r = 0; r < sp.bins(); ++r)
        for (std::size_t c = 0; c < sp.frames(); ++c)
            data[r * sp.frames() + c] =
                static_cast<float>(sp.power(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)));
    std::vector<std::uint8_t> bytes(data.size() * sizeof(float));
    std::memcpy(bytes.data(), data.data(), bytes.size());
    write_bytes(path, bytes);

    nlohmann::json j;
    j["fs"] = sp.fs;
    j["rows"] = sp.bins();
    j["cols"] = sp.frames();
    j["format"] = "float32-le-row-major";
    j["stft"] = {{"window", window_name(sp.spec.window)},
                 {"window_length", sp.spec.window_length},
                 {"overlap", sp.spec.overlap},
                 {"nfft", sp.spec.nfft}};
    j["freq_axis"] = sp.freq_axis;
    j["time_axis"] = sp.time_axis;
    write_json(json_sidecar(path), j);
}

} // namespace mdsim
