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

#include "mdsim/similarity.hpp"
#include "mdsim/diversify.hpp"
#include "mdsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

namespace mdsim
{

namespace
{

struct Moments
{
    double mx, my, sxx, syy, sxy; // population statistics
};

Moments moments(const Eigen::MatrixXd &x, const Eigen::MatrixXd &y)
{
    if (x.rows() != y.rows() || x.cols() != y.cols())
        throw Error("image dimensions differ: " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) + " vs " +
                    std::to_string(y.rows()) + "x" + std::to_string(y.cols()));
    if (x.size() == 0)
        throw Error("empty image");
    const auto n = static_cast<double>(x.size());
    const double *px = x.data();
    const double *py = y.data();
    const auto size = static_cast<std::size_t>(x.size());

    Moments m{0, 0, 0, 0, 0};
    for (std::size_t i = 0; i < size; ++i)
    {
        m.mx += px[i];
        m.my += py[i];
    }
    m.mx /= n;
    m.my /= n;
    for (std::size_t i = 0; i < size; ++i)
    {
        const double dx = px[i] - m.mx, dy = py[i] - m.my;
        m.sxx += dx * dx;
        m.syy += dy * dy;
        m.sxy += dx * dy;
    }
    m.sxx /= n;
    m.syy /= n;
    m.sxy /= n;
    return m;
}

} // namespace

double ssi(const Eigen::MatrixXd &x, const Eigen::MatrixXd &y, const SsiConstants &c)
{
    if (!(c.c1 > 0.0) || !(c.c2 > 0.0))
        throw Error("SSI constants must be positive");
    const Moments m = moments(x, y);
    const double num = (2.0 * (m.mx * m.my) + c.c1) * (2.0 * m.sxy + c.c2);
    const double den = (m.mx * m.mx + m.my * m.my + c.c1) * (m.sxx + m.syy + c.c2);
    return num / den;
}

double corr2(const Eigen::MatrixXd &x, const Eigen::MatrixXd &y)
{
    const Moments m = moments(x, y);
    if (!(m.sxx > 0.0) || !(m.syy > 0.0))
        throw Error("corr2 undefined for a zero-variance image");
    return m.sxy / std::sqrt(m.sxx * m.syy);
}

Eigen::MatrixXd to_matrix(const SignatureImage &img)
{
    Eigen::MatrixXd m(static_cast<Eigen::Index>(img.height), static_cast<Eigen::Index>(img.width));
    for (std::size_t r = 0; r < img.height; ++r)
        for (std::size_t c = 0; c < img.width; ++c)
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = img.at(r, c);
    return m;
}

SimilarityMap inter_class_map(const std::vector<LabeledImage> &samples, SimilarityMetric metric,
                              const std::vector<std::string> &class_order, std::size_t workers)
{
    if (samples.size() < 2)
        throw Error("similarity map needs at least 2 samples");

    std::vector<std::string> classes = class_order;
    for (const auto &s : samples)
        if (std::find(classes.begin(), classes.end(), s.label) == classes.end())
            classes.push_back(s.label);
    std::vector<std::size_t> order;
    for (const auto &cls : classes)
        for (std::size_t i = 0; i < samples.size(); ++i)
            if (samples[i].label == cls)
                order.push_back(i);

    const std::size_t n = order.size();
    SimilarityMap map;
    map.metric = metric;
    map.scores = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i : order)
    {
        map.ids.push_back(samples[i].id);
        map.labels.push_back(samples[i].label);
    }
    parallel_for(n, workers, [&](std::size_t r) {
        for (std::size_t c = r + 1; c < n; ++c)
        {
            const auto &a = samples[order[r]].pixels;
            const auto &b = samples[order[c]].pixels;
            const double v = metric == SimilarityMetric::ssi ? ssi(a, b) : corr2(a, b);
            map.scores(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
            map.scores(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(r)) = v;
        }
    });
    return map;
}

std::vector<IntraClassPoint> intra_class_curves(const std::vector<IntraClassInput> &classes, const SsiConstants &c)
{
    std::vector<IntraClassPoint> out;
    for (const auto &cls : classes)
    {
        if (cls.variants.empty())
            throw Error("class '" + cls.label + "' has no variants");
        if (!cls.height_steps.empty() && cls.height_steps.size() != cls.variants.size())
            throw Error("height_steps must match the variants of class '" + cls.label + "'");
        std::vector<IntraClassPoint> pts;
        for (std::size_t k = 0; k < cls.variants.size(); ++k)
            pts.push_back({cls.label, cls.variants[k].id, cls.height_steps.empty() ? 0 : cls.height_steps[k],
                           ssi(cls.original, cls.variants[k].pixels, c)});
        std::stable_sort(pts.begin(), pts.end(),
                         [](const auto &a, const auto &b) { return a.height_step < b.height_step; });
        out.insert(out.end(), pts.begin(), pts.end());
    }
    return out;
}

BlockSummary block_summary(const SimilarityMap &map)
{
    double within = 0.0, across = 0.0;
    std::size_t nw = 0, na = 0;
    const auto n = static_cast<std::size_t>(map.scores.rows());
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
        {
            if (r == c)
                continue;
            const double v = map.scores(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            if (map.labels[r] == map.labels[c])
            {
                within += v;
                ++nw;
            }
            else
            {
                across += v;
                ++na;
            }
        }
    return {nw ? within / static_cast<double>(nw) : 0.0, na ? across / static_cast<double>(na) : 0.0};
}

void write_map_csv(const std::filesystem::path &path, const SimilarityMap &map)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path.string());
    out.precision(17);
    out << "id,label";
    for (const auto &id : map.ids)
        out << ',' << id;
    out << '\n';
    for (std::size_t r = 0; r < map.ids.size(); ++r)
    {
        out << map.ids[r] << ',' << map.labels[r];
        for (std::size_t c = 0; c < map.ids.size(); ++c)
            out << ',' << map.scores(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        out << '\n';
    }
    if (!out)
        throw Error("failed writing " + path.string());
}

void write_intra_csv(const std::filesystem::path &path, const std::vector<IntraClassPoint> &points)
{
    std::ofstream out(path);
    if (!out)
        throw Error("cannot write " + path.string());
    out.precision(17);
    out << "class,sample_id,height_step,ssi\n";
    for (const auto &p : points)
        out << p.label << ',' << p.id << ',' << p.height_step << ',' << p.ssi << '\n';
    if (!out)
        throw Error("failed writing " + path.string());
}

SignatureImage render_heatmap(const SimilarityMap &map, double lo, double hi, std::size_t cell)
{
    if (!(hi > lo) || cell == 0)
        throw Error("bad heatmap range");
    const auto n = static_cast<std::size_t>(map.scores.rows());
    SignatureImage img;
    img.height = img.width = n * cell;
    img.pixels.resize(img.height * img.width);
    for (std::size_t r = 0; r < img.height; ++r)
        for (std::size_t c = 0; c < img.width; ++c)
        {
            const double v = map.scores(static_cast<Eigen::Index>(r / cell), static_cast<Eigen::Index>(c / cell));
            const double t = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
            img.pixels[r * img.width + c] = static_cast<std::uint8_t>(std::lround(255.0 * t));
        }
    return img;
}

} // namespace mdsim
