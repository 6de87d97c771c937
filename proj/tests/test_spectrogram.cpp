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

#include "mdsim/spectrogram.hpp"

#include <cmath>
#include <numeric>
#include <random>

using namespace mdsim;
using Catch::Matchers::ContainsSubstring;

namespace
{

ComplexBaseband tone(double f, std::size_t n, double fs = 2400.0, double amp = 1.0)
{
    ComplexBaseband s;
    s.fs = fs;
    s.samples.resize(n);
    for (std::size_t k = 0; k < n; ++k)
        s.samples[k] = std::polar(amp, 2.0 * kPi * f * static_cast<double>(k) / fs);
    return s;
}

// Direct O(N^2) transform of one frame, shifted so that index nfft/2 is 0 Hz.
std::vector<std::complex<double>> naive_frame(const ComplexBaseband &sig, const std::vector<double> &w,
                                              std::size_t start, std::size_t nfft)
{
    std::vector<std::complex<double>> out(nfft);
    for (std::size_t r = 0; r < nfft; ++r)
    {
        const double k = static_cast<double>(r) - static_cast<double>(nfft / 2);
        std::complex<double> acc = 0.0;
        for (std::size_t m = 0; m < w.size(); ++m)
            acc += sig.samples[start + m] * w[m] *
                   std::polar(1.0, -2.0 * kPi * k * static_cast<double>(m) / static_cast<double>(nfft));
        out[r] = acc;
    }
    return out;
}

Eigen::Index argmax_row(const Spectrogram &sp, Eigen::Index col)
{
    Eigen::Index r;
    sp.power.col(col).maxCoeff(&r);
    return r;
}

} // namespace

TEST_CASE("STFT presets")
{
    const auto sim = StftSpec::simulated();
    CHECK(sim.window == WindowType::hanning);
    CHECK(sim.window_length == 256);
    CHECK(sim.overlap == 128);
    CHECK(sim.nfft == 1024);
    CHECK(sim.hop() == 128);
    CHECK(kSimulatedSampleRate == 2400.0);

    const auto meas = StftSpec::measured();
    CHECK(meas.window == WindowType::hamming);
    CHECK(meas.window_length == 2048);
    CHECK(meas.overlap == 128);
    CHECK(meas.nfft == 4096);

    const ImageSpec img;
    CHECK(img.height == 90);
    CHECK(img.width == 120);

    CHECK_THROWS((StftSpec{WindowType::hanning, 256, 256, 1024}).validate());
    CHECK_THROWS((StftSpec{WindowType::hanning, 256, 0, 128}).validate());
}

TEST_CASE("Windows")
{
    SECTION("hanning drops the zero endpoints")
    {
        const auto w = make_window(WindowType::hanning, 5);
        const std::vector<double> want = {0.25, 0.75, 1.0, 0.75, 0.25};
        for (std::size_t i = 0; i < 5; ++i)
            CHECK(w[i] == Catch::Approx(want[i]).margin(1e-15));
    }

    SECTION("hamming spans its endpoints")
    {
        const auto w = make_window(WindowType::hamming, 5);
        const std::vector<double> want = {0.08, 0.54, 1.0, 0.54, 0.08};
        for (std::size_t i = 0; i < 5; ++i)
            CHECK(w[i] == Catch::Approx(want[i]).margin(1e-15));
    }

    SECTION("symmetry")
    {
        for (auto t : {WindowType::hanning, WindowType::hamming})
            for (std::size_t n : {16u, 17u, 256u, 2048u})
            {
                const auto w = make_window(t, n);
                for (std::size_t i = 0; i < n; ++i)
                    REQUIRE(w[i] == Catch::Approx(w[n - 1 - i]).margin(1e-14));
            }
    }

    CHECK(window_from_name("hamming") == WindowType::hamming);
    CHECK(std::string(window_name(WindowType::hanning)) == "hanning");
    CHECK_THROWS(window_from_name("kaiser"));
}

TEST_CASE("STFT agrees with a direct DFT")
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    ComplexBaseband sig;
    sig.fs = 2400.0;
    sig.samples.resize(700);
    for (auto &s : sig.samples)
        s = {g(rng), g(rng)};

    for (auto spec : {StftSpec{WindowType::hanning, 64, 16, 128}, StftSpec{WindowType::hamming, 100, 37, 256}})
    {
        const auto X = stft(sig, spec);
        REQUIRE(static_cast<std::size_t>(X.cols()) == stft_frame_count(sig.size(), spec));
        const auto w = make_window(spec.window, spec.window_length);
        for (Eigen::Index c : {Eigen::Index(0), X.cols() / 2, X.cols() - 1})
        {
            const auto ref = naive_frame(sig, w, static_cast<std::size_t>(c) * spec.hop(), spec.nfft);
            double worst = 0.0;
            for (std::size_t r = 0; r < spec.nfft; ++r)
                worst = std::max(worst, std::abs(X(static_cast<Eigen::Index>(r), c) - ref[r]));
            CHECK(worst <= 1e-9);
        }
    }
}

TEST_CASE("Tone placement")
{
    const auto spec = StftSpec::simulated();

    SECTION("+300 Hz sits 128 bins above center")
    {
        const auto sp = spectrogram(tone(300.0, 4800), spec);
        for (Eigen::Index c = 0; c < sp.power.cols(); ++c)
            REQUIRE(argmax_row(sp, c) == 512 + 128);
        CHECK(sp.freq_axis[512 + 128] == Catch::Approx(300.0));
    }

    SECTION("DC")
    {
        const auto sp = spectrogram(tone(0.0, 2400), spec);
        CHECK(argmax_row(sp, 3) == 512);
        CHECK(sp.freq_axis[512] == 0.0);
    }

    SECTION("zero signal")
    {
        ComplexBaseband z;
        z.fs = 2400.0;
        z.samples.assign(1000, {0.0, 0.0});
        CHECK(spectrogram(z, spec).power.isZero(0.0));
    }

    SECTION("too short")
    {
        CHECK_THROWS_WITH(stft(tone(10.0, 200), spec), ContainsSubstring("shorter than one window"));
    }
}

TEST_CASE("Spectrogram power")
{
    const auto spec = StftSpec::simulated();
    const auto w = make_window(spec.window, spec.window_length);
    const double wsum = std::accumulate(w.begin(), w.end(), 0.0);

    SECTION("on-bin tone peak equals the squared window sum")
    {
        const double f = 100.0 * 2400.0 / 1024.0;
        const auto sp = spectrogram(tone(f, 3000), spec);
        CHECK(sp.power(512 + 100, 2) == Catch::Approx(wsum * wsum).epsilon(1e-6));
    }

    SECTION("symmetric pair")
    {
        auto a = tone(240.0, 3000);
        const auto b = tone(-240.0, 3000);
        for (std::size_t k = 0; k < a.size(); ++k)
            a.samples[k] += b.samples[k];
        const auto sp = spectrogram(a, spec);
        for (Eigen::Index r = 1; r < 512; ++r)
            REQUIRE(sp.power(512 + r, 4) == Catch::Approx(sp.power(512 - r, 4)).epsilon(1e-9).margin(1e-9));
    }

    SECTION("Parseval")
    {
        std::mt19937_64 rng(11);
        std::normal_distribution<double> g;
        ComplexBaseband sig;
        sig.fs = 2400.0;
        sig.samples.resize(1000);
        for (auto &s : sig.samples)
            s = {g(rng), g(rng)};
        const auto sp = spectrogram(sig, spec);
        for (Eigen::Index c = 0; c < sp.power.cols(); ++c)
        {
            double energy = 0.0;
            for (std::size_t m = 0; m < w.size(); ++m)
                energy += std::norm(sig.samples[static_cast<std::size_t>(c) * spec.hop() + m] * w[m]);
            REQUIRE(sp.power.col(c).sum() == Catch::Approx(1024.0 * energy).epsilon(1e-10));
        }
    }

    SECTION("axes")
    {
        const auto sp = spectrogram(tone(50.0, 2400), spec);
        CHECK(sp.frames() == (2400 - 256) / 128 + 1);
        CHECK(sp.bin_width() == Catch::Approx(2400.0 / 1024.0));
        CHECK(sp.time_axis[0] == Catch::Approx(128.0 / 2400.0));
        CHECK(sp.time_axis[1] - sp.time_axis[0] == Catch::Approx(sp.hop_duration()));
        CHECK(sp.freq_axis.front() == Catch::Approx(-1200.0));
    }
}

TEST_CASE("Signature images")
{
    Spectrogram sp;
    sp.spec = StftSpec::simulated();
    sp.fs = 2400.0;
    sp.power = Eigen::MatrixXd::Constant(1024, 80, 3.0);

    SECTION("constant field")
    {
        const auto img = to_image(sp, 4.0, 90, 120, 50.0);
        CHECK(img.height == 90);
        CHECK(img.width == 120);
        for (auto p : img.pixels)
            REQUIRE(p == 255);
    }

    SECTION("zero dynamic range")
    {
        sp.power(10, 10) = 100.0;
        const auto img = to_image(sp, 4.0, 90, 120, 0.0);
        for (auto p : img.pixels)
            REQUIRE(p == 255);
    }

    SECTION("crop longer than the signal")
    {
        CHECK_THROWS_WITH(to_image(sp, 10.0, 90, 120, 50.0), ContainsSubstring("crop longer"));
        CHECK(crop_columns(sp, 4.0) == 75);
    }

    SECTION("ridge centroid survives the downsample")
    {
        std::vector<double> src(656 * 875, 0.0);
        const double ridge = 400.0;
        for (std::size_t c = 0; c < 875; ++c)
            for (std::size_t r = 395; r <= 405; ++r)
                src[r * 875 + c] = std::exp(-0.5 * std::pow((static_cast<double>(r) - ridge) / 2.0, 2));
        const auto dst = resize_bilinear(src, 656, 875, 90, 120);
        for (std::size_t c = 0; c < 120; c += 17)
        {
            double m0 = 0.0, m1 = 0.0;
            for (std::size_t r = 0; r < 90; ++r)
            {
                m0 += dst[r * 120 + c];
                m1 += dst[r * 120 + c] * static_cast<double>(r);
            }
            const double expected = (ridge + 0.5) * 90.0 / 656.0 - 0.5;
            CHECK(std::abs(m1 / m0 - expected) <= 1.0);
        }
    }

    SECTION("orientation: positive Doppler on top")
    {
        const auto s = spectrogram(tone(600.0, 10800), StftSpec::simulated());
        const auto img = to_image(s, ImageSpec{});
        std::size_t best = 0;
        for (std::size_t r = 0; r < img.height; ++r)
            if (img.at(r, 60) > img.at(best, 60))
                best = r;
        CHECK(best < img.height / 2);
    }

    SECTION("resize identity")
    {
        std::vector<double> src(12);
        std::iota(src.begin(), src.end(), 0.0);
        CHECK(resize_bilinear(src, 3, 4, 3, 4) == src);
    }
}
