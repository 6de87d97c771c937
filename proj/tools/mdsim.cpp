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

// mdsim command line: ingest, simulate, diversify, validate, oracle, verify.

#include "mdsim/diversify.hpp"
#include "mdsim/error.hpp"
#include "mdsim/io.hpp"
#include "mdsim/oracles.hpp"
#include "mdsim/pipeline.hpp"
#include "mdsim/similarity.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>

namespace fs = std::filesystem;
using namespace mdsim;

namespace
{

struct PipelineFlags
{
    std::string config;
    std::uint64_t seed = 0;
    std::size_t count = 100;
    std::size_t workers = 1;
    std::string output_dir = "dataset";
    double snr_db = 0.0;
    bool iq = false;
    std::string stft = "simulated";
};

void add_pipeline_flags(CLI::App *cmd, PipelineFlags &f)
{
    cmd->add_option("--config", f.config, "JSON config; its keys override flags")->check(CLI::ExistingFile);
    cmd->add_option("--count", f.count, "samples to generate");
    cmd->add_option("--workers", f.workers, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--out", f.output_dir, "output directory");
    cmd->add_option("--snr", f.snr_db, "SNR in dB (omit for noise-free)");
    cmd->add_flag("--iq", f.iq, "also write complex I/Q");
    cmd->add_option("--stft", f.stft, "STFT preset")->check(CLI::IsMember({"simulated", "measured"}));
}

PipelineConfig build_config(const PipelineFlags &f, const CLI::App *cmd)
{
    PipelineConfig cfg;
    cfg.seed = f.seed;
    cfg.count = f.count;
    cfg.workers = f.workers;
    cfg.output_dir = f.output_dir;
    if (cmd->count("--snr"))
        cfg.snr_db = f.snr_db;
    cfg.write_iq = f.iq;
    cfg.stft = f.stft == "measured" ? StftSpec::measured() : StftSpec::simulated();
    if (!f.config.empty())
        cfg = load_config(f.config, cfg);
    cfg.diversify.rng_seed = cfg.seed;
    cfg.validate();
    return cfg;
}

void print_limb_report(const LimbLengthReport &r)
{
    for (std::size_t l = 0; l < kNumLimbs; ++l)
        std::printf("    %-16s mean %.4f m  max dev %.2e\n", std::string(limb_name(static_cast<Limb>(l))).c_str(),
                    r.mean_length[l], r.max_deviation[l]);
}

int cmd_ingest(const std::vector<std::string> &inputs, double tolerance)
{
    std::vector<fs::path> files;
    for (const auto &in : inputs)
    {
        if (fs::is_directory(in))
        {
            for (const auto &e : fs::directory_iterator(in))
                if (e.path().extension() == ".csv")
                    files.push_back(e.path());
        }
        else
            files.emplace_back(in);
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
    {
        std::cerr << "no MOCAP files given\n";
        return 1;
    }
    int bad = 0;
    for (const auto &f : files)
    {
        try
        {
            const auto rec = load_mocap_file(f);
            const auto rep = limb_lengths(rec, tolerance);
            std::printf("%s: %s, %zu frames at %.3f Hz, %.3f s, height %.3f m, limbs %s\n", f.string().c_str(),
                        rec.info().activity_label.empty() ? "(unlabelled)" : rec.info().activity_label.c_str(),
                        rec.size(), rec.frame_rate(), rec.duration(), subject_height(rec),
                        rep.pass ? "ok" : "VARYING");
            if (!rep.pass)
            {
                print_limb_report(rep);
                ++bad;
            }
        }
        catch (const Error &e)
        {
            std::printf("%s: INVALID: %s\n", f.string().c_str(), e.what());
            ++bad;
        }
    }
    return bad ? 1 : 0;
}

int cmd_simulate(const std::string &input, const std::string &out, const PipelineFlags &f, const CLI::App *cmd,
                 std::uint64_t noise_seed, bool write_spec)
{
    const PipelineConfig cfg = build_config(f, cmd);
    const auto rec = load_mocap_file(input);
    const auto clean = render_baseband(rec, cfg);
    const auto noisy = add_noise(clean, cfg.snr_db, noise_seed);
    const auto sp = spectrogram(noisy, cfg.stft);
    const fs::path prefix(out);
    if (prefix.has_parent_path())
        fs::create_directories(prefix.parent_path());
    write_png(prefix.string() + ".png", to_image(sp, cfg.image));
    if (cfg.write_iq)
        write_iq(prefix.string() + ".iq", noisy);
    if (write_spec)
        write_spectrogram(prefix.string() + ".spec.f32", sp);
    std::printf("%s: %zu samples at %.0f Hz, %zu x %zu spectrogram, Doppler statistic %.1f Hz -> %s.png\n",
                input.c_str(), noisy.size(), noisy.fs, sp.bins(), sp.frames(), doppler_statistic(sp), out.c_str());
    return 0;
}

int cmd_diversify(const std::string &seeds_dir, const PipelineFlags &f, const CLI::App *cmd)
{
    const PipelineConfig cfg = build_config(f, cmd);
    const auto t0 = std::chrono::steady_clock::now();
    const auto res = run_pipeline(cfg, seeds_dir);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%zu samples in %.1f s -> %s\n", res.manifest.entries.size(), secs,
                (cfg.output_dir / "manifest.jsonl").string().c_str());
    for (const auto &[label, n] : res.class_counts)
    {
        const auto &lim = res.doppler_limits.at(label);
        std::printf("  %-10s %6zu  Doppler band [%.1f, %.1f] Hz\n", label.c_str(), n, lim[0], lim[1]);
    }
    std::printf("  rejected: limb %zu, doppler %zu, unfit %zu\n", res.rejections[1], res.rejections[2],
                res.rejections[3]);
    std::printf("  intra-class SSI [%.3f, %.3f]\n", res.min_intra_ssi, res.max_intra_ssi);
    return 0;
}

int cmd_validate(const std::string &dir, const std::string &metric_name, std::size_t per_class, std::size_t workers)
{
    const fs::path root(dir);
    const auto manifest = read_manifest(root / "manifest.jsonl");
    const auto metric = metric_name == "ssi" ? SimilarityMetric::ssi : SimilarityMetric::corr2;

    std::map<std::string, std::size_t> taken;
    std::vector<LabeledImage> images;
    std::map<std::string, IntraClassInput> intra;
    std::map<std::string, Eigen::MatrixXd> originals;
    for (const auto &e : manifest.entries)
    {
        const auto px = to_matrix(read_png(root / e.image_path));
        if (per_class == 0 || taken[e.class_label]++ < per_class)
            images.push_back({e.sample_id, e.class_label, px});
        auto it = originals.find(e.seed_recording_id);
        if (it == originals.end())
            it = originals.emplace(e.seed_recording_id,
                                   to_matrix(read_png(root / "originals" / (e.seed_recording_id + ".png"))))
                     .first;
        auto &in = intra[e.seed_recording_id];
        in.label = e.class_label;
        in.original = it->second;
        in.variants.push_back({e.sample_id, e.class_label, px});
        in.height_steps.push_back(e.transform.height_step);
    }

    std::vector<std::string> order;
    for (auto a : kAllActivities)
        order.emplace_back(activity_name(a));
    fs::create_directories(root / "report");
    const auto map = inter_class_map(images, metric, order, workers);
    write_map_csv(root / "report" / "validate_inter.csv", map);
    write_png(root / "report" / "validate_inter.png", render_heatmap(map));
    const auto summary = block_summary(map);

    std::vector<IntraClassInput> inputs;
    for (auto &[id, in] : intra)
        inputs.push_back(std::move(in));
    const auto points = intra_class_curves(inputs);
    write_intra_csv(root / "report" / "validate_intra.csv", points);

    std::map<std::string, std::pair<double, double>> range;
    for (const auto &p : points)
    {
        auto [it, fresh] = range.try_emplace(p.label, p.ssi, p.ssi);
        it->second.first = std::min(it->second.first, p.ssi);
        it->second.second = std::max(it->second.second, p.ssi);
    }
    std::printf("%zu images, %s map: within-class %.3f, across-class %.3f\n", images.size(), metric_name.c_str(),
                summary.within, summary.across);
    for (const auto &[label, r] : range)
        std::printf("  %-10s intra SSI [%.3f, %.3f]\n", label.c_str(), r.first, r.second);
    return 0;
}

int cmd_verify(const std::string &dir, const std::string &sample, bool all)
{
    const auto rep = verify_manifest(dir, all ? Rederive::all : Rederive::one,
                                     sample.empty() ? std::nullopt : std::optional<std::string>(sample));
    for (const auto &p : rep.problems)
        std::printf("FAIL %s\n", p.c_str());
    std::printf("%s: %zu entries checked, re-derived %zu, %s\n", dir.c_str(), rep.checked, rep.rederived.size(),
                rep.ok ? "ok" : "MISMATCH");
    return rep.ok ? 0 : 2;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Motion-capture driven micro-Doppler simulation and dataset diversification"};
    app.require_subcommand(1);

    // ingest
    auto *ingest = app.add_subcommand("ingest", "validate MOCAP seed recordings");
    std::vector<std::string> ingest_inputs;
    double ingest_tol = 0.05;
    ingest->add_option("inputs", ingest_inputs, "CSV files or directories")->required();
    ingest->add_option("--tolerance", ingest_tol, "limb-length tolerance");

    // simulate
    auto *simulate = app.add_subcommand("simulate", "one recording to image (and I/Q)");
    PipelineFlags sim_flags;
    std::string sim_input, sim_out = "signature";
    std::uint64_t sim_noise_seed = 0;
    bool sim_spec = false;
    simulate->add_option("input", sim_input, "MOCAP CSV")->required()->check(CLI::ExistingFile);
    add_pipeline_flags(simulate, sim_flags);
    simulate->add_option("-o,--output", sim_out, "output path prefix");
    simulate->add_option("--noise-seed", sim_noise_seed, "noise RNG seed");
    simulate->add_flag("--spectrogram", sim_spec, "also write the float32 spectrogram");

    // diversify
    auto *diversify = app.add_subcommand("diversify", "generate a diversified dataset");
    PipelineFlags div_flags;
    std::string div_seeds;
    diversify->add_option("seeds", div_seeds, "directory of seed MOCAP CSVs")->required()->check(CLI::ExistingDirectory);
    diversify->add_option("--seed", div_flags.seed, "master RNG seed")->required();
    add_pipeline_flags(diversify, div_flags);

    // validate
    auto *validate = app.add_subcommand("validate", "similarity maps from a dataset manifest");
    std::string val_dir, val_metric = "corr2";
    std::size_t val_per_class = 20, val_workers = 1;
    validate->add_option("dataset", val_dir, "dataset directory")->required()->check(CLI::ExistingDirectory);
    validate->add_option("--metric", val_metric, "map metric")->check(CLI::IsMember({"corr2", "ssi"}));
    validate->add_option("--per-class", val_per_class, "images per class in the inter-class map (0 = all)");
    validate->add_option("--workers", val_workers, "worker threads")->check(CLI::PositiveNumber);

    // oracle
    auto *oracle = app.add_subcommand("oracle", "kinematic oracle recordings and golden values");
    oracle->require_subcommand(1);
    auto *boulic = oracle->add_subcommand("boulic", "Boulic walking recording");
    BoulicParams bp;
    double boulic_duration = 5.0, boulic_rate = 30.0;
    std::string boulic_out = "boulic.csv";
    boulic->add_option("--vr", bp.relative_velocity, "relative velocity, thigh heights per second");
    boulic->add_option("--thigh", bp.thigh_height, "thigh height, m");
    boulic->add_option("--duration", boulic_duration, "s");
    boulic->add_option("--rate", boulic_rate, "frame rate, Hz");
    boulic->add_option("-o,--output", boulic_out, "CSV path");

    auto *rod = oracle->add_subcommand("rod", "falling-rod signature");
    double rod_length = 2.0, rod_radius = 0.1, rod_lambda = 0.02;
    std::string rod_formula = "as-printed", rod_out;
    rod->add_option("--length", rod_length, "m");
    rod->add_option("--radius", rod_radius, "m");
    rod->add_option("--wavelength", rod_lambda, "m");
    rod->add_option("--formula", rod_formula)->check(CLI::IsMember({"as-printed", "energy-conservation"}));
    rod->add_option("-o,--output", rod_out, "image path prefix");

    auto *seeds = oracle->add_subcommand("seeds", "synthetic seed set across the seven activities");
    std::size_t seeds_count = 55;
    std::uint64_t seeds_seed = 0;
    double seeds_duration = 6.0, seeds_rate = 30.0;
    std::string seeds_out = "seeds";
    seeds->add_option("--count", seeds_count);
    seeds->add_option("--seed", seeds_seed);
    seeds->add_option("--duration", seeds_duration, "s");
    seeds->add_option("--rate", seeds_rate, "Hz");
    seeds->add_option("-o,--output", seeds_out, "directory");

    auto *golden = oracle->add_subcommand("golden", "print closed-form reference values");

    // verify
    auto *verify = app.add_subcommand("verify", "audit a dataset manifest");
    std::string ver_dir, ver_sample;
    bool ver_all = false;
    verify->add_option("dataset", ver_dir, "dataset directory")->required()->check(CLI::ExistingDirectory);
    verify->add_option("--sample", ver_sample, "sample id to re-derive");
    verify->add_flag("--all", ver_all, "re-derive every sample");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (*ingest)
            return cmd_ingest(ingest_inputs, ingest_tol);
        if (*simulate)
            return cmd_simulate(sim_input, sim_out, sim_flags, simulate, sim_noise_seed, sim_spec);
        if (*diversify)
            return cmd_diversify(div_seeds, div_flags, diversify);
        if (*validate)
            return cmd_validate(val_dir, val_metric, val_per_class, val_workers);
        if (*verify)
            return cmd_verify(ver_dir, ver_sample, ver_all);
        if (*boulic)
        {
            const auto rec = boulic_walk(bp, boulic_duration, boulic_rate);
            write_mocap_file(boulic_out, rec);
            std::printf("v = %.4f m/s, l_c = %.4f m, d_c = %.4f s -> %s\n", bp.velocity(), bp.cycle_length(),
                        bp.cycle_duration(), boulic_out.c_str());
            return 0;
        }
        if (*rod)
        {
            RodSignatureOptions opt;
            opt.formula = rod_formula == "as-printed" ? RodFormula::as_printed : RodFormula::energy_conservation;
            const auto cfg = RadarConfig::with_wavelength(rod_lambda);
            const auto sp = rod_fall_signature(rod_length, rod_radius, cfg, StftSpec::simulated(), opt);
            const auto prof = rod_fall_profile(rod_length, opt.theta0, 1e-4, opt.formula);
            std::printf("L = %.3f m: sigma = %.4f m^2, impact %.4f s, max tip speed %.4f m/s (%.1f Hz), envelope "
                        "peak %.1f Hz\n",
                        rod_length, rcs_cylinder(rod_radius, rod_length, rod_lambda), prof.impact_time(),
                        prof.max_tip_speed(), 2.0 * prof.max_tip_speed() / rod_lambda, envelope_peak_frequency(sp));
            if (!rod_out.empty())
                write_png(rod_out + ".png", to_image(sp, sp.hop_duration() * static_cast<double>(sp.frames()), 90,
                                                     120, 50.0));
            return 0;
        }
        if (*seeds)
        {
            fs::create_directories(seeds_out);
            const auto set = oracle_seed_set(seeds_count, seeds_seed, seeds_duration, seeds_rate);
            for (const auto &r : set)
                write_mocap_file(fs::path(seeds_out) / (r.info().subject_id + ".csv"), r);
            std::printf("%zu seed recordings -> %s\n", set.size(), seeds_out.c_str());
            return 0;
        }
        if (*golden)
        {
            const BoulicParams b{1.5, 0.98};
            std::printf("boulic v_r=1.5: l_c = %.6f m, d_c = %.6f s\n", b.cycle_length(), b.cycle_duration());
            for (double L : {2.0, 0.75})
                std::printf("rod L=%.2f: sigma(r=0.1, lambda=0.02) = %.6f m^2, w(0) = %.6f rad/s, tip = %.6f m/s\n", L,
                            rcs_cylinder(0.1, L, 0.02), rod_angular_speed(L, 0.0, RodFormula::as_printed),
                            L * rod_angular_speed(L, 0.0, RodFormula::as_printed));
            std::printf("tip-speed ratio L=2 / L=0.75 = %.6f\n", std::sqrt(2.0 / 0.75));
            return 0;
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "mdsim: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
