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

#include "mdsim/pipeline.hpp"
#include "mdsim/error.hpp"
#include "mdsim/io.hpp"
#include "mdsim/oracles.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace mdsim
{

using nlohmann::json;

namespace
{

void check_keys(const json &j, std::initializer_list<const char *> allowed, const char *where)
{
    for (const auto &[key, value] : j.items())
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char *a) { return key == a; }))
            throw ParseError(std::string("unknown key '") + key + "' in " + where);
}

template <typename T> void read_if(const json &j, const char *key, T &out)
{
    if (j.contains(key))
        out = j.at(key).get<T>();
}

Interval interval_from(const json &j, const char *what)
{
    if (!j.is_array() || j.size() != 2)
        throw ParseError(std::string(what) + " must be a two-element array");
    return {j[0].get<double>(), j[1].get<double>()};
}

json stft_to_json(const StftSpec &s)
{
    return {{"window", window_name(s.window)},
            {"window_length", s.window_length},
            {"overlap", s.overlap},
            {"nfft", s.nfft}};
}

json transform_to_json(const TransformRecord &t)
{
    json j;
    j["seed_index"] = t.seed_index;
    j["height_scale"] = t.height_scale;
    j["coupled_x_scale"] = t.coupled_x_scale;
    j["speed_scale"] = t.speed_scale;
    j["height_step"] = t.height_step;
    j["perturbed_joint"] = t.perturbed_joint ? json(std::string(joint_name(*t.perturbed_joint))) : json(nullptr);
    j["perturbed_axis"] = t.perturbed_axis;
    j["pair_index"] = t.pair_index;
    j["coeff_a"] = t.coeff_a;
    j["coeff_b"] = t.coeff_b;
    j["delta_a"] = t.delta_a;
    j["delta_b"] = t.delta_b;
    j["delta_a_fraction"] = t.delta_a_fraction;
    j["delta_b_fraction"] = t.delta_b_fraction;
    j["attempt"] = t.attempt;
    j["accepted"] = t.accepted;
    j["rejection_reason"] = rejection_name(t.rejection_reason);
    return j;
}

TransformRecord transform_from_json(const json &j)
{
    TransformRecord t;
    t.seed_index = j.at("seed_index").get<std::size_t>();
    t.height_scale = j.at("height_scale").get<double>();
    t.coupled_x_scale = j.at("coupled_x_scale").get<double>();
    t.speed_scale = j.at("speed_scale").get<double>();
    t.height_step = j.at("height_step").get<std::size_t>();
    if (!j.at("perturbed_joint").is_null())
    {
        const auto name = j.at("perturbed_joint").get<std::string>();
        t.perturbed_joint = joint_from_name(name);
        if (!t.perturbed_joint)
            throw ParseError("unknown joint '" + name + "'");
    }
    t.perturbed_axis = j.at("perturbed_axis").get<int>();
    t.pair_index = j.at("pair_index").get<int>();
    t.coeff_a = j.at("coeff_a").get<double>();
    t.coeff_b = j.at("coeff_b").get<double>();
    t.delta_a = j.at("delta_a").get<double>();
    t.delta_b = j.at("delta_b").get<double>();
    t.delta_a_fraction = j.at("delta_a_fraction").get<double>();
    t.delta_b_fraction = j.at("delta_b_fraction").get<double>();
    t.attempt = j.value("attempt", std::size_t{0});
    t.accepted = j.at("accepted").get<bool>();
    t.rejection_reason = rejection_from_name(j.at("rejection_reason").get<std::string>());
    return t;
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string sample_name(std::size_t i)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "sample_%06zu", i);
    return buf;
}

std::vector<std::string> activity_order()
{
    std::vector<std::string> out;
    for (auto a : kAllActivities)
        out.emplace_back(activity_name(a));
    return out;
}

struct SeedSet
{
    std::vector<MotionRecording> recordings;
    std::vector<std::string> ids;
};

// Copies the seeds into the dataset, named by id, so the dataset verifies on its own.
SeedSet stage_seeds(const std::vector<MotionRecording> &seeds, const std::filesystem::path &dir)
{
    std::filesystem::create_directories(dir);
    SeedSet out;
    std::set<std::string> used;
    for (std::size_t i = 0; i < seeds.size(); ++i)
    {
        std::string id = seeds[i].info().subject_id;
        if (id.empty())
            id = "seed_" + std::to_string(i);
        if (!used.insert(id).second)
            throw Error("duplicate seed id '" + id + "'");
        write_mocap_file(dir / (id + ".csv"), seeds[i]);
    }
    // Reload from disk so generation and verification see the same bits in the same order.
    out.recordings = load_seed_dir(dir);
    for (const auto &r : out.recordings)
        out.ids.push_back(r.info().subject_id);
    return out;
}

} // namespace

// ---------------------------------------------------------------------------------------------

void PipelineConfig::validate() const
{
    radar.validate();
    stft.validate();
    if (image.height == 0 || image.width == 0 || !(image.crop_duration > 0.0) || !(image.dynamic_range_db >= 0.0))
        throw Error("invalid image settings");
    diversify.validate();
    if (workers < 1)
        throw Error("workers must be at least 1");
    if (count < 1)
        throw Error("count must be at least 1");
    if (snr_db && std::isnan(*snr_db))
        throw Error("snr_db is NaN");
    if (!(doppler_margin >= 0.0))
        throw Error("doppler_margin must be nonnegative");
}

std::string config_to_json(const PipelineConfig &cfg)
{
    json j;
    j["count"] = cfg.count;
    j["seed"] = cfg.seed;
    j["workers"] = cfg.workers;
    j["output_dir"] = cfg.output_dir.string();
    j["snr_db"] = cfg.snr_db ? json(*cfg.snr_db) : json(nullptr);
    j["write_iq"] = cfg.write_iq;
    j["doppler_margin"] = cfg.doppler_margin;
    const auto &r = cfg.radar;
    j["radar"] = {{"f0", r.f0},
                  {"fs", r.fs},
                  {"gain", r.gain},
                  {"power", r.power},
                  {"system_loss", r.system_loss},
                  {"atmospheric_loss", r.atmospheric_loss},
                  {"position", {r.position.x(), r.position.y(), r.position.z()}}};
    j["stft"] = stft_to_json(cfg.stft);
    j["image"] = {{"crop_duration", cfg.image.crop_duration},
                  {"height", cfg.image.height},
                  {"width", cfg.image.width},
                  {"dynamic_range_db", cfg.image.dynamic_range_db}};
    const auto &d = cfg.diversify;
    json dj;
    dj["height_range"] = d.height_range ? json(*d.height_range) : json(nullptr);
    dj["n_height_steps"] = d.n_height_steps;
    dj["speed_scale_range"] = d.speed_scale_range;
    dj["perturbation_fraction"] = d.perturbation_fraction;
    dj["max_harmonics"] = d.max_harmonics;
    dj["limb_tolerance"] = d.limb_tolerance;
    dj["class_doppler_limits"] = json::object();
    for (const auto &[label, lim] : d.class_doppler_limits)
        dj["class_doppler_limits"][label] = lim;
    dj["coupling"] = d.coupling;
    dj["enable_perturbation"] = d.enable_perturbation;
    dj["acceptance_floor"] = d.acceptance_floor;
    dj["non_rhythmic_classes"] = d.non_rhythmic_classes;
    j["diversify"] = dj;
    return j.dump(2);
}

PipelineConfig config_from_json(std::string_view text, PipelineConfig cfg)
{
    json j;
    try
    {
        j = json::parse(text);
    }
    catch (const json::parse_error &e)
    {
        throw ParseError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object())
        throw ParseError("config must be a JSON object");
    try
    {
        check_keys(j,
                   {"count", "seed", "workers", "output_dir", "snr_db", "write_iq", "doppler_margin", "radar", "stft",
                    "image", "diversify"},
                   "config");
        read_if(j, "count", cfg.count);
        read_if(j, "seed", cfg.seed);
        read_if(j, "workers", cfg.workers);
        if (j.contains("output_dir"))
            cfg.output_dir = j["output_dir"].get<std::string>();
        if (j.contains("snr_db"))
            cfg.snr_db = j["snr_db"].is_null() ? std::nullopt : std::optional<double>(j["snr_db"].get<double>());
        read_if(j, "write_iq", cfg.write_iq);
        read_if(j, "doppler_margin", cfg.doppler_margin);

        if (j.contains("radar"))
        {
            const auto &r = j["radar"];
            check_keys(r, {"f0", "fs", "gain", "power", "system_loss", "atmospheric_loss", "position"}, "radar");
            read_if(r, "f0", cfg.radar.f0);
            read_if(r, "fs", cfg.radar.fs);
            read_if(r, "gain", cfg.radar.gain);
            read_if(r, "power", cfg.radar.power);
            read_if(r, "system_loss", cfg.radar.system_loss);
            read_if(r, "atmospheric_loss", cfg.radar.atmospheric_loss);
            if (r.contains("position"))
            {
                const auto &p = r["position"];
                if (!p.is_array() || p.size() != 3)
                    throw ParseError("radar.position must be [x, y, z]");
                cfg.radar.position = Vec3(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
            }
        }
        if (j.contains("stft"))
        {
            const auto &s = j["stft"];
            if (s.is_string())
            {
                const auto name = s.get<std::string>();
                if (name == "simulated")
                    cfg.stft = StftSpec::simulated();
                else if (name == "measured")
                    cfg.stft = StftSpec::measured();
                else
                    throw ParseError("unknown stft preset '" + name + "'");
            }
            else
            {
                check_keys(s, {"window", "window_length", "overlap", "nfft"}, "stft");
                if (s.contains("window"))
                    cfg.stft.window = window_from_name(s["window"].get<std::string>());
                read_if(s, "window_length", cfg.stft.window_length);
                read_if(s, "overlap", cfg.stft.overlap);
                read_if(s, "nfft", cfg.stft.nfft);
            }
        }
        if (j.contains("image"))
        {
            const auto &im = j["image"];
            check_keys(im, {"crop_duration", "height", "width", "dynamic_range_db"}, "image");
            read_if(im, "crop_duration", cfg.image.crop_duration);
            read_if(im, "height", cfg.image.height);
            read_if(im, "width", cfg.image.width);
            read_if(im, "dynamic_range_db", cfg.image.dynamic_range_db);
        }
        if (j.contains("diversify"))
        {
            const auto &d = j["diversify"];
            auto &ds = cfg.diversify;
            check_keys(d,
                       {"height_range", "n_height_steps", "speed_scale_range", "perturbation_fraction", "max_harmonics",
                        "limb_tolerance", "class_doppler_limits", "coupling", "enable_perturbation", "acceptance_floor",
                        "non_rhythmic_classes"},
                       "diversify");
            if (d.contains("height_range"))
                ds.height_range = d["height_range"].is_null()
                                      ? std::nullopt
                                      : std::optional<Interval>(interval_from(d["height_range"], "height_range"));
            read_if(d, "n_height_steps", ds.n_height_steps);
            if (d.contains("speed_scale_range"))
                ds.speed_scale_range = interval_from(d["speed_scale_range"], "speed_scale_range");
            read_if(d, "perturbation_fraction", ds.perturbation_fraction);
            read_if(d, "max_harmonics", ds.max_harmonics);
            read_if(d, "limb_tolerance", ds.limb_tolerance);
            if (d.contains("class_doppler_limits"))
            {
                ds.class_doppler_limits.clear();
                for (const auto &[label, lim] : d["class_doppler_limits"].items())
                    ds.class_doppler_limits[label] = interval_from(lim, "class_doppler_limits entry");
            }
            read_if(d, "coupling", ds.coupling);
            read_if(d, "enable_perturbation", ds.enable_perturbation);
            read_if(d, "acceptance_floor", ds.acceptance_floor);
            read_if(d, "non_rhythmic_classes", ds.non_rhythmic_classes);
        }
    }
    catch (const json::exception &e)
    {
        throw ParseError(std::string("bad config value: ") + e.what());
    }
    cfg.diversify.rng_seed = cfg.seed;
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path &path, PipelineConfig base)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return config_from_json(ss.str(), std::move(base));
}

// ---------------------------------------------------------------------------------------------

std::string manifest_line(const ManifestEntry &e)
{
    json j;
    j["sample_id"] = e.sample_id;
    j["class_label"] = e.class_label;
    j["seed_recording_id"] = e.seed_recording_id;
    j["transform"] = transform_to_json(e.transform);
    j["snr_db"] = e.snr_db ? json(*e.snr_db) : json(nullptr);
    j["noise_seed"] = e.noise_seed;
    j["image_path"] = e.image_path;
    j["iq_path"] = e.iq_path ? json(*e.iq_path) : json(nullptr);
    j["checksum"] = e.checksum;
    j["iq_checksum"] = e.iq_checksum ? json(*e.iq_checksum) : json(nullptr);
    return j.dump();
}

ManifestEntry parse_manifest_line(std::string_view line, std::size_t line_number)
{
    try
    {
        const json j = json::parse(line);
        ManifestEntry e;
        e.sample_id = j.at("sample_id").get<std::string>();
        e.class_label = j.at("class_label").get<std::string>();
        e.seed_recording_id = j.at("seed_recording_id").get<std::string>();
        e.transform = transform_from_json(j.at("transform"));
        if (!j.at("snr_db").is_null())
            e.snr_db = j["snr_db"].get<double>();
        e.noise_seed = j.at("noise_seed").get<std::uint64_t>();
        e.image_path = j.at("image_path").get<std::string>();
        if (j.contains("iq_path") && !j["iq_path"].is_null())
            e.iq_path = j["iq_path"].get<std::string>();
        e.checksum = j.at("checksum").get<std::string>();
        if (j.contains("iq_checksum") && !j["iq_checksum"].is_null())
            e.iq_checksum = j["iq_checksum"].get<std::string>();
        return e;
    }
    catch (const json::exception &ex)
    {
        throw ParseError(std::string("bad manifest entry: ") + ex.what(), line_number);
    }
}

void write_manifest(const std::filesystem::path &path, const DatasetManifest &manifest)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    for (const auto &e : manifest.entries)
        out << manifest_line(e) << '\n';
    if (!out)
        throw Error("failed writing " + path.string());
}

DatasetManifest read_manifest(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw Error("cannot open manifest " + path.string());
    DatasetManifest m;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line))
    {
        ++n;
        if (line.empty())
            continue;
        m.entries.push_back(parse_manifest_line(line, n));
    }
    return m;
}

// ---------------------------------------------------------------------------------------------

std::uint64_t noise_seed_for(std::uint64_t seed, std::size_t sample_index)
{
    return splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(sample_index) + 1));
}

ComplexBaseband render_baseband(const MotionRecording &rec, const PipelineConfig &cfg)
{
    return synthesize_return(rec, build_body_model(rec), cfg.radar);
}

SignatureImage render_image(const ComplexBaseband &clean, const PipelineConfig &cfg, std::optional<double> snr_db,
                            std::uint64_t noise_seed)
{
    const auto sig = add_noise(clean, snr_db, noise_seed);
    return to_image(spectrogram(sig, cfg.stft), cfg.image);
}

SignatureImage render_image(const MotionRecording &rec, const PipelineConfig &cfg)
{
    return render_image(render_baseband(rec, cfg), cfg, std::nullopt, 0);
}

std::vector<MotionRecording> load_seed_dir(const std::filesystem::path &dir)
{
    if (!std::filesystem::is_directory(dir))
        throw Error("seed directory does not exist: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto &entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    if (files.empty())
        throw Error("no MOCAP CSV files in " + dir.string());
    std::sort(files.begin(), files.end());

    std::vector<MotionRecording> out;
    for (const auto &f : files)
    {
        auto rec = load_mocap_file(f);
        RecordingInfo info = rec.info();
        if (info.subject_id.empty())
            info.subject_id = f.stem().string();
        if (info.activity_label.empty())
            throw Error("seed " + f.string() + " has no activity label (sidecar missing?)");
        out.emplace_back(rec.frames(), rec.frame_rate(), std::move(info));
    }
    return out;
}

// ---------------------------------------------------------------------------------------------

PipelineResult run_pipeline(const PipelineConfig &cfg_in, const std::filesystem::path &seeds_dir)
{
    return run_pipeline(cfg_in, load_seed_dir(seeds_dir));
}

PipelineResult run_pipeline(const PipelineConfig &cfg_in, const std::vector<MotionRecording> &seed_recordings)
{
    PipelineConfig cfg = cfg_in;
    cfg.diversify.rng_seed = cfg.seed;
    cfg.validate();
    if (seed_recordings.empty())
        throw Error("no seed recordings");

    namespace fs = std::filesystem;
    const fs::path root = cfg.output_dir;
    std::error_code ec;
    fs::create_directories(root / "images", ec);
    if (ec)
        throw Error("cannot create output directory " + root.string() + ": " + ec.message());
    fs::create_directories(root / "originals");
    fs::create_directories(root / "report");
    if (cfg.write_iq)
        fs::create_directories(root / "iq");

    const SeedSet seeds = stage_seeds(seed_recordings, root / "seeds");
    const std::size_t n_seeds = seeds.recordings.size();

    // Seed spectrograms: Doppler limits and the originals of the intra-class curves.
    std::vector<double> stats(n_seeds);
    std::vector<std::string> labels(n_seeds);
    std::vector<Eigen::MatrixXd> originals(n_seeds);
    parallel_for(n_seeds, cfg.workers, [&](std::size_t i) {
        const auto clean = render_baseband(seeds.recordings[i], cfg);
        const auto sp = spectrogram(clean, cfg.stft);
        stats[i] = doppler_statistic(sp);
        labels[i] = seeds.recordings[i].info().activity_label;
        const auto img = cfg.snr_db ? render_image(clean, cfg, cfg.snr_db, noise_seed_for(~cfg.seed, i))
                                    : to_image(sp, cfg.image);
        write_png(root / "originals" / (seeds.ids[i] + ".png"), img);
        originals[i] = to_matrix(img);
    });
    if (cfg.diversify.class_doppler_limits.empty())
        cfg.diversify.class_doppler_limits = derive_doppler_limits(labels, stats, cfg.doppler_margin);
    for (const auto &l : labels)
        if (!cfg.diversify.class_doppler_limits.count(l))
            throw Error("no Doppler limits for class '" + l + "'");

    {
        std::ofstream out(root / "config.json");
        out << config_to_json(cfg) << '\n';
        if (!out)
            throw Error("cannot write " + (root / "config.json").string());
    }

    const Diversifier div(seeds.recordings, cfg.diversify);
    std::vector<ManifestEntry> entries(cfg.count);
    std::vector<double> intra(cfg.count);
    std::vector<std::array<std::size_t, 4>> rejections(cfg.count);

    parallel_for(cfg.count, cfg.workers, [&](std::size_t i) {
        ComplexBaseband kept;
        const auto gate = [&](std::size_t, const MotionRecording &variant, const TransformRecord &) {
            auto clean = render_baseband(variant, cfg);
            const auto verdict =
                filter_extremes(spectrogram(clean, cfg.stft), variant.info().activity_label,
                                cfg.diversify.class_doppler_limits);
            if (verdict == RejectionReason::none)
                kept = std::move(clean);
            return verdict;
        };
        const Variant v = div.generate(i, gate);
        rejections[i] = v.rejections;

        ManifestEntry e;
        e.sample_id = sample_name(i);
        e.class_label = v.recording.info().activity_label;
        e.seed_recording_id = seeds.ids[v.record.seed_index];
        e.transform = v.record;
        e.snr_db = cfg.snr_db;
        e.noise_seed = noise_seed_for(cfg.seed, i);
        e.image_path = "images/" + e.sample_id + ".png";

        const auto img = render_image(kept, cfg, e.snr_db, e.noise_seed);
        const auto png = encode_png(img);
        write_bytes(root / e.image_path, png);
        e.checksum = sha256_hex(png);
        if (cfg.write_iq)
        {
            e.iq_path = "iq/" + e.sample_id + ".iq";
            write_iq(root / *e.iq_path, add_noise(kept, e.snr_db, e.noise_seed), e.sample_id);
            e.iq_checksum = sha256_file(root / *e.iq_path);
        }
        intra[i] = ssi(originals[v.record.seed_index], to_matrix(img));
        entries[i] = std::move(e);
    });

    PipelineResult result;
    result.manifest.entries = std::move(entries);
    result.doppler_limits = cfg.diversify.class_doppler_limits;
    for (const auto &r : rejections)
        for (std::size_t k = 0; k < r.size(); ++k)
            result.rejections[k] += r[k];
    for (const auto &e : result.manifest.entries)
        ++result.class_counts[e.class_label];
    write_manifest(root / "manifest.jsonl", result.manifest);

    // Validation report
    std::vector<LabeledImage> seed_images;
    for (std::size_t i = 0; i < n_seeds; ++i)
        seed_images.push_back({seeds.ids[i], labels[i], originals[i]});
    std::vector<IntraClassPoint> points;
    for (std::size_t i = 0; i < cfg.count; ++i)
    {
        const auto &e = result.manifest.entries[i];
        points.push_back({e.class_label, e.sample_id, e.transform.height_step, intra[i]});
    }
    std::stable_sort(points.begin(), points.end(), [order = activity_order()](const auto &a, const auto &b) {
        const auto ia = std::find(order.begin(), order.end(), a.label) - order.begin();
        const auto ib = std::find(order.begin(), order.end(), b.label) - order.begin();
        return std::tie(ia, a.height_step) < std::tie(ib, b.height_step);
    });
    write_intra_csv(root / "report" / "intra_class.csv", points);
    const auto [lo, hi] = std::minmax_element(intra.begin(), intra.end());
    result.min_intra_ssi = *lo;
    result.max_intra_ssi = *hi;

    json summary;
    summary["count"] = cfg.count;
    summary["class_counts"] = result.class_counts;
    json rej;
    for (std::size_t k = 1; k < result.rejections.size(); ++k)
        rej[rejection_name(static_cast<RejectionReason>(k))] = result.rejections[k];
    summary["rejections"] = rej;
    summary["doppler_limits"] = result.doppler_limits;
    summary["intra_ssi"] = {{"min", result.min_intra_ssi}, {"max", result.max_intra_ssi}};
    if (n_seeds >= 2)
    {
        bool varied = true;
        for (const auto &s : seed_images)
            varied = varied && (s.pixels.array() != s.pixels(0, 0)).any();
        if (varied)
        {
            const auto map = inter_class_map(seed_images, SimilarityMetric::corr2, activity_order(), cfg.workers);
            write_map_csv(root / "report" / "inter_class.csv", map);
            write_png(root / "report" / "inter_class.png", render_heatmap(map));
            result.inter_class = block_summary(map);
            summary["inter_class_corr2"] = {{"within", result.inter_class.within},
                                            {"across", result.inter_class.across}};
        }
    }
    std::ofstream(root / "report" / "summary.json") << summary.dump(2) << '\n';
    return result;
}

// ---------------------------------------------------------------------------------------------

VerifyReport verify_manifest(const std::filesystem::path &dir, Rederive mode, const std::optional<std::string> &sample_id)
{
    namespace fs = std::filesystem;
    VerifyReport rep;
    const auto manifest = read_manifest(dir / "manifest.jsonl");
    if (manifest.entries.empty())
    {
        rep.ok = false;
        rep.problems.push_back("manifest is empty");
        return rep;
    }

    std::set<std::string> ids;
    for (const auto &e : manifest.entries)
    {
        ++rep.checked;
        if (!ids.insert(e.sample_id).second)
            rep.problems.push_back(e.sample_id + ": duplicate sample_id");
        if (!e.transform.accepted)
            rep.problems.push_back(e.sample_id + ": transform not accepted");
        const fs::path img = dir / e.image_path;
        if (!fs::exists(img))
        {
            rep.problems.push_back(e.sample_id + ": missing image " + e.image_path);
            continue;
        }
        if (sha256_file(img) != e.checksum)
            rep.problems.push_back(e.sample_id + ": checksum mismatch for " + e.image_path);
        if (e.iq_path)
        {
            if (!fs::exists(dir / *e.iq_path))
                rep.problems.push_back(e.sample_id + ": missing I/Q file " + *e.iq_path);
            else if (!e.iq_checksum || sha256_file(dir / *e.iq_path) != *e.iq_checksum)
                rep.problems.push_back(e.sample_id + ": checksum mismatch for " + *e.iq_path);
        }
    }

    std::vector<const ManifestEntry *> targets;
    if (sample_id)
    {
        const auto it = std::find_if(manifest.entries.begin(), manifest.entries.end(),
                                     [&](const ManifestEntry &e) { return e.sample_id == *sample_id; });
        if (it == manifest.entries.end())
            throw Error("sample '" + *sample_id + "' is not in the manifest");
        targets.push_back(&*it);
    }
    else if (mode == Rederive::all)
        for (const auto &e : manifest.entries)
            targets.push_back(&e);
    else if (mode == Rederive::one)
    {
        std::random_device rd;
        targets.push_back(&manifest.entries[std::uniform_int_distribution<std::size_t>(0, manifest.entries.size() - 1)(rd)]);
    }

    if (!targets.empty())
    {
        const PipelineConfig cfg = load_config(dir / "config.json");
        const Diversifier div(load_seed_dir(dir / "seeds"), cfg.diversify);
        for (const auto *e : targets)
        {
            rep.rederived.push_back(e->sample_id);
            try
            {
                if (e->transform.seed_index >= div.seeds().size() ||
                    div.seeds()[e->transform.seed_index].info().subject_id != e->seed_recording_id)
                {
                    rep.problems.push_back(e->sample_id + ": re-derivation mismatch (seed recording)");
                    continue;
                }
                const auto rec = div.apply(e->transform);
                const auto img = render_image(render_baseband(rec, cfg), cfg, e->snr_db, e->noise_seed);
                const auto expected = fs::exists(dir / e->image_path) ? read_png(dir / e->image_path) : SignatureImage{};
                if (img.pixels != expected.pixels || img.height != expected.height)
                    rep.problems.push_back(e->sample_id + ": re-derivation mismatch (image differs)");
            }
            catch (const Error &ex)
            {
                rep.problems.push_back(e->sample_id + ": re-derivation failed: " + ex.what());
            }
        }
    }
    rep.ok = rep.problems.empty();
    return rep;
}

} // namespace mdsim
