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

#include "mdsim/spectrogram.hpp"
#include "mdsim/error.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>

namespace mdsim
{

namespace
{

// FFTW planning is not thread-safe; executing an existing plan on new arrays is.
// FFTW_ESTIMATE keeps the chosen algorithm, and therefore the output bits, reproducible.
class FftPlanCache
{
  public:
    ~FftPlanCache()
    {
        for (auto &[n, plan] : plans_)
            fftw_destroy_plan(plan);
    }

    fftw_plan forward(std::size_t n)
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = plans_.find(n);
        if (it != plans_.end())
            return it->second;
        auto *in = fftw_alloc_complex(n);
        auto *out = fftw_alloc_complex(n);
        fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_FORWARD, FFTW_ESTIMATE);
        fftw_free(in);
        fftw_free(out);
        if (!plan)
            throw Error("FFTW could not plan a transform of size " + std::to_string(n));
        plans_.emplace(n, plan);
        return plan;
    }

  private:
    std::mutex mutex_;
    std::map<std::size_t, fftw_plan> plans_;
};

FftPlanCache &plan_cache()
{
    static FftPlanCache cache;
    return cache;
}

struct FftwDeleter
{
    void operator()(fftw_complex *p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwDeleter>;

FftwBuffer fftw_buffer(std::size_t n) { return FftwBuffer(fftw_alloc_complex(n)); }

} // namespace

const char *window_name(WindowType w) { return w == WindowType::hanning ? "hanning" : "hamming"; }

WindowType window_from_name(std::string_view name)
{
    if (name == "hanning")
        return WindowType::hanning;
    if (name == "hamming")
        return WindowType::hamming;
    throw Error("unknown window '" + std::string(name) + "'");
}

std::vector<double> make_window(WindowType type, std::size_t length)
{
    if (length == 0)
        throw Error("window length must be positive");
    std::vector<double> w(length);
    const double n_len = static_cast<double>(length);
    if (type == WindowType::hanning)
    {
        for (std::size_t n = 0; n < length; ++n)
            w[n] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(n + 1) / (n_len + 1.0)));
    }
    else
    {
        if (length == 1)
            return {1.0};
        for (std::size_t n = 0; n < length; ++n)
            w[n] = 0.54 - 0.46 * std::cos(2.0 * kPi * static_cast<double>(n) / (n_len - 1.0));
    }
    return w;
}

void StftSpec::validate() const
{
    if (window_length == 0)
        throw Error("window_length must be positive");
    if (!(overlap < window_length))
        throw Error("overlap must be smaller than window_length");
    if (!(window_length <= nfft))
        throw Error("nfft must be at least window_length");
}

StftSpec StftSpec::simulated() { return {WindowType::hanning, 256, 128, 1024}; }

StftSpec StftSpec::measured() { return {WindowType::hamming, 2048, 128, 4096}; }

std::size_t stft_frame_count(std::size_t n, const StftSpec &spec)
{
    if (n < spec.window_length)
        return 0;
    return (n - spec.window_length) / spec.hop() + 1;
}

double bin_frequency(std::size_t row, std::size_t nfft, double fs)
{
    return (static_cast<double>(row) - static_cast<double>(nfft / 2)) * fs / static_cast<double>(nfft);
}

Eigen::MatrixXcd stft(const ComplexBaseband &sig, const StftSpec &spec)
{
    spec.validate();
    const std::size_t n = sig.samples.size();
    if (n < spec.window_length)
        throw Error("signal shorter than one window (" + std::to_string(n) + " < " +
                    std::to_string(spec.window_length) + " samples)");

    const std::size_t frames = stft_frame_count(n, spec);
    const std::size_t nfft = spec.nfft;
    const std::size_t half = nfft / 2;
    const auto window = make_window(spec.window, spec.window_length);
    fftw_plan plan = plan_cache().forward(nfft);

    auto in = fftw_buffer(nfft);
    auto out = fftw_buffer(nfft);
    auto *in_c = reinterpret_cast<std::complex<double> *>(in.get());
    auto *out_c = reinterpret_cast<std::complex<double> *>(out.get());

    Eigen::MatrixXcd result(static_cast<Eigen::Index>(nfft), static_cast<Eigen::Index>(frames));
    for (std::size_t f = 0; f < frames; ++f)
    {
        const std::size_t start = f * spec.hop();
        std::fill(in_c, in_c + nfft, std::complex<double>(0.0, 0.0));
        for (std::size_t m = 0; m < spec.window_length; ++m)
            in_c[m] = sig.samples[start + m] * window[m];
        fftw_execute_dft(plan, in.get(), out.get());
        for (std::size_t k = 0; k < nfft; ++k)
            result(static_cast<Eigen::Index>((k + half) % nfft), static_cast<Eigen::Index>(f)) = out_c[k];
    }
    return result;
}

Spectrogram spectrogram(const ComplexBaseband &sig, const StftSpec &spec)
{
    Spectrogram sp;
    sp.power = stft(sig, spec).cwiseAbs2();
    sp.spec = spec;
    sp.fs = sig.fs;
    sp.freq_axis.resize(spec.nfft);
    for (std::size_t r = 0; r < spec.nfft; ++r)
        sp.freq_axis[r] = bin_frequency(r, spec.nfft, sig.fs);
    sp.time_axis.resize(sp.frames());
    for (std::size_t f = 0; f < sp.frames(); ++f)
        sp.time_axis[f] =
            (static_cast<double>(f * spec.hop()) + 0.5 * static_cast<double>(spec.window_length)) / sig.fs;
    return sp;
}

// ---------------------------------------------------------------------------------------------

std::size_t crop_columns(const Spectrogram &sp, double crop_duration)
{
    if (!(crop_duration > 0.0))
        throw Error("crop_duration must be positive");
    const auto cols = static_cast<std::size_t>(std::llround(crop_duration / sp.hop_duration()));
    if (cols == 0)
        throw Error("crop shorter than one spectrogram hop");
    if (cols > sp.frames())
        throw Error("crop longer than signal: needs " + std::to_string(cols) + " frames, have " +
                    std::to_string(sp.frames()));
    return cols;
}

std::vector<double> resize_bilinear(const std::vector<double> &src, std::size_t src_h, std::size_t src_w,
                                    std::size_t dst_h, std::size_t dst_w)
{
    if (src.size() != src_h * src_w || src_h == 0 || src_w == 0 || dst_h == 0 || dst_w == 0)
        throw Error("resize_bilinear: bad dimensions");

    auto coord = [](std::size_t dst, std::size_t src_n, std::size_t dst_n, std::size_t &i0, double &w) {
        double x = (static_cast<double>(dst) + 0.5) * static_cast<double>(src_n) / static_cast<double>(dst_n) - 0.5;
        x = std::clamp(x, 0.0, static_cast<double>(src_n - 1));
        i0 = static_cast<std::size_t>(std::floor(x));
        if (i0 >= src_n - 1)
        {
            i0 = src_n - 1;
            w = 0.0;
        }
        else
            w = x - static_cast<double>(i0);
    };

    std::vector<double> dst(dst_h * dst_w);
    for (std::size_t r = 0; r < dst_h; ++r)
    {
        std::size_t r0;
        double wr;
        coord(r, src_h, dst_h, r0, wr);
        const std::size_t r1 = std::min(r0 + 1, src_h - 1);
        for (std::size_t c = 0; c < dst_w; ++c)
        {
            std::size_t c0;
            double wc;
            coord(c, src_w, dst_w, c0, wc);
            const std::size_t c1 = std::min(c0 + 1, src_w - 1);
            const double top = (1.0 - wc) * src[r0 * src_w + c0] + wc * src[r0 * src_w + c1];
            const double bot = (1.0 - wc) * src[r1 * src_w + c0] + wc * src[r1 * src_w + c1];
            dst[r * dst_w + c] = (1.0 - wr) * top + wr * bot;
        }
    }
    return dst;
}

SignatureImage to_image(const Spectrogram &sp, double crop_duration, std::size_t out_height, std::size_t out_width,
                        double dynamic_range_db)
{
    if (out_height == 0 || out_width == 0)
        throw Error("image dimensions must be positive");
    if (!(dynamic_range_db >= 0.0))
        throw Error("dynamic_range_db must be nonnegative");
    const std::size_t cols = crop_columns(sp, crop_duration);
    const std::size_t first = (sp.frames() - cols) / 2;
    const std::size_t rows = sp.bins();

    // dB, max-referenced. Zero power maps to -inf and is clipped below.
    std::vector<double> db(rows * cols);
    double max_db = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
        {
            const double p = sp.power(static_cast<Eigen::Index>(rows - 1 - r), static_cast<Eigen::Index>(first + c));
            const double v = p > 0.0 ? 10.0 * std::log10(p) : -std::numeric_limits<double>::infinity();
            db[r * cols + c] = v;
            max_db = std::max(max_db, v);
        }

    std::vector<double> level(rows * cols, 0.0);
    if (std::isfinite(max_db))
    {
        const double floor_db = max_db - dynamic_range_db;
        for (std::size_t i = 0; i < db.size(); ++i)
        {
            if (dynamic_range_db == 0.0)
                level[i] = 255.0;
            else
                level[i] = 255.0 * (std::clamp(db[i], floor_db, max_db) - floor_db) / dynamic_range_db;
        }
    }

    const auto resized = resize_bilinear(level, rows, cols, out_height, out_width);
    SignatureImage img;
    img.height = out_height;
    img.width = out_width;
    img.dynamic_range_db = dynamic_range_db;
    img.crop_duration = crop_duration;
    img.pixels.resize(resized.size());
    for (std::size_t i = 0; i < resized.size(); ++i)
        img.pixels[i] = static_cast<std::uint8_t>(std::clamp(std::lround(resized[i]), 0L, 255L));
    return img;
}

} // namespace mdsim
