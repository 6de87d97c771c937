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

#include "mdsim/spectrogram.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

namespace mdsim
{

struct SsiConstants
{
    double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    double c2 = (0.03 * 255.0) * (0.03 * 255.0);
};

// Whole-image structural similarity from global means, variances and covariance:
// (2 mx my + C1)(2 sxy + C2) / ((mx^2 + my^2 + C1)(sx^2 + sy^2 + C2)).
double ssi(const Eigen::MatrixXd &x, const Eigen::MatrixXd &y, const SsiConstants &c = {});

// Pearson correlation of the flattened images. Throws on zero variance.
double corr2(const Eigen::MatrixXd &x, const Eigen::MatrixXd &y);

Eigen::MatrixXd to_matrix(const SignatureImage &img);

enum class SimilarityMetric
{
    ssi,
    corr2,
};

struct LabeledImage
{
    std::string id;
    std::string label;
    Eigen::MatrixXd pixels;
};

struct SimilarityMap
{
    Eigen::MatrixXd scores;
    std::vector<std::string> ids;    // row/column order
    std::vector<std::string> labels; // class of each row
    SimilarityMetric metric = SimilarityMetric::corr2;
};

// Pairwise scores with rows grouped into class blocks. Classes appear in `class_order`
// first, then in order of first appearance; samples keep their input order within a block.
SimilarityMap inter_class_map(const std::vector<LabeledImage> &samples, SimilarityMetric metric = SimilarityMetric::corr2,
                              const std::vector<std::string> &class_order = {}, std::size_t workers = 1);

struct IntraClassPoint
{
    std::string label;
    std::string id;
    std::size_t height_step = 0;
    double ssi = 0.0;
};

struct IntraClassInput
{
    std::string label;
    Eigen::MatrixXd original;
    std::vector<LabeledImage> variants;     // in iteration order
    std::vector<std::size_t> height_steps;  // one per variant, or empty
};

// SSI of each variant against its class original; output grouped by class, then height step, then input order.
std::vector<IntraClassPoint> intra_class_curves(const std::vector<IntraClassInput> &classes, const SsiConstants &c = {});

// Mean score over same-class and different-class off-diagonal entries.
struct BlockSummary
{
    double within = 0.0;
    double across = 0.0;
};

BlockSummary block_summary(const SimilarityMap &map);

void write_map_csv(const std::filesystem::path &path, const SimilarityMap &map);
void write_intra_csv(const std::filesystem::path &path, const std::vector<IntraClassPoint> &points);

// Scores in [lo, hi] mapped to gray levels, one pixel per entry scaled up by `cell`.
SignatureImage render_heatmap(const SimilarityMap &map, double lo = -1.0, double hi = 1.0, std::size_t cell = 4);

} // namespace mdsim
