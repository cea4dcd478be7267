#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "sylvan/annotate.hpp"
#include "sylvan/eval.hpp"
#include "sylvan/image_io.hpp"
#include "sylvan/pipeline.hpp"
#include "sylvan/rng.hpp"

namespace fs = std::filesystem;
using namespace sylvan;

namespace {

bool parse_resolution(const std::string& text, int& w, int& h) {
    return std::sscanf(text.c_str(), "%dx%d", &w, &h) == 2 && w > 0 && h > 0;
}

int cmd_generate(const std::string& config_path, std::uint64_t* seed, int* scenes,
                 const std::string& out, const std::string& resolution, int* frames, int workers) {
    GenerateConfig cfg;
    if (!config_path.empty()) cfg = load_generate_config(config_path);
    if (seed) cfg.master_seed = *seed;
    if (scenes) cfg.n_scenes = *scenes;
    if (!out.empty()) cfg.out_dir = out;
    if (!resolution.empty() && !parse_resolution(resolution, cfg.width, cfg.height)) {
        std::cerr << "error: --resolution must look like 800x800\n";
        return 2;
    }
    if (frames) cfg.frames_min = cfg.frames_max = *frames;
    if (workers > 0) cfg.workers = workers;

    try {
        GenerateSummary s = run_generate(cfg);
        double fpm = s.seconds > 0.0 ? 60.0 * static_cast<double>(s.frames) / s.seconds : 0.0;
        std::printf("generated %llu frames (%llu annotations) in %.1f s — %.1f frames/min\n",
                    static_cast<unsigned long long>(s.frames),
                    static_cast<unsigned long long>(s.annotations), s.seconds, fpm);
        std::printf("splits: train=%llu val=%llu test=%llu -> %s\n",
                    static_cast<unsigned long long>(s.split_frames[0]),
                    static_cast<unsigned long long>(s.split_frames[1]),
                    static_cast<unsigned long long>(s.split_frames[2]), cfg.out_dir.c_str());
    } catch (const std::exception& e) {
        std::cerr << "generate failed: " << e.what()
                  << "\nnote: partially written frames under '" << cfg.out_dir
                  << "' should be removed before retrying\n";
        return 1;
    }
    return 0;
}

int cmd_eval(const std::string& gt_path, const std::string& pred_path, const std::string& task,
             const std::string& report_out) {
    CocoDocument gt;
    std::vector<DetectionResult> preds;
    try {
        gt = load_coco(gt_path);
        preds = load_predictions(pred_path, &gt);
    } catch (const std::exception& e) {
        std::cerr << "eval failed: " << e.what() << "\n";
        return 1;
    }

    EvalReport report;
    if (task == "bbox" || task == "all") report.ap[0] = evaluate_ap(preds, gt, EvalTask::BBOX);
    if (task == "segm" || task == "all") report.ap[1] = evaluate_ap(preds, gt, EvalTask::MASK);
    if (task == "keypoints" || task == "all") {
        report.ap[2] = evaluate_ap(preds, gt, EvalTask::KEYPOINTS);
        report.keypoint_stats = keypoint_error_stats(preds, gt);
    }

    std::cout << report_to_text(report);
    if (!report_out.empty()) {
        std::ofstream out(report_out, std::ios::binary);
        out << report_to_json(report);
        if (!report.keypoint_stats.empty) {
            fs::path csv = fs::path(report_out).replace_extension(".density.csv");
            std::ofstream csv_out(csv, std::ios::binary);
            csv_out << density_to_csv(report.keypoint_stats);
            std::cout << "density histograms: " << csv.string() << "\n";
        }
        std::cout << "report: " << report_out << "\n";
    }
    return 0;
}

int cmd_stats(const std::string& gt_path) {
    CocoDocument gt;
    try {
        gt = load_coco(gt_path);
    } catch (const std::exception& e) {
        std::cerr << "stats failed: " << e.what() << "\n";
        return 1;
    }
    std::printf("images:      %zu\n", gt.images.size());
    std::printf("annotations: %zu\n", gt.annotations.size());

    std::array<std::uint64_t, kKeypointCount> labeled{}, visible{};
    std::map<int, std::uint64_t> distance_hist;  // 1 m bins
    for (const Annotation& ann : gt.annotations) {
        for (int k = 0; k < kKeypointCount; ++k) {
            if (ann.keypoints[k].v > 0) ++labeled[k];
            if (ann.keypoints[k].v == 2) ++visible[k];
        }
        ++distance_hist[static_cast<int>(ann.distance_m)];
    }
    if (!gt.annotations.empty()) {
        double n = static_cast<double>(gt.annotations.size());
        std::printf("keypoint visibility (labeled rate / visible rate):\n");
        for (int k = 0; k < kKeypointCount; ++k)
            std::printf("  %-16s %.3f / %.3f\n", kKeypointNames[k], labeled[k] / n, visible[k] / n);
        std::printf("distance histogram (m):\n");
        for (const auto& [bin, count] : distance_hist)
            std::printf("  [%2d, %2d): %llu\n", bin, bin + 1, static_cast<unsigned long long>(count));
    }
    return 0;
}

void draw_line(ImageRgb8& img, int x0, int y0, int x1, int y1, const std::uint8_t rgb[3]) {
    int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
    int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    for (;;) {
        if (x0 >= 0 && y0 >= 0 && x0 < img.width && y0 < img.height) {
            std::size_t i = (static_cast<std::size_t>(y0) * img.width + x0) * 3;
            img.rgb[i] = rgb[0];
            img.rgb[i + 1] = rgb[1];
            img.rgb[i + 2] = rgb[2];
        }
        if (x0 == x1 && y0 == y1) break;
        int e2 = 2 * err;
        if (e2 >= dy) { err += dy; x0 += sx; }
        if (e2 <= dx) { err += dx; y0 += sy; }
    }
}

int cmd_inspect(const std::string& gt_path, std::uint64_t image_id, const std::string& out_path) {
    CocoDocument gt;
    try {
        gt = load_coco(gt_path);
    } catch (const std::exception& e) {
        std::cerr << "inspect failed: " << e.what() << "\n";
        return 1;
    }
    const CocoImage* image = nullptr;
    for (const CocoImage& img : gt.images)
        if (img.id == image_id) image = &img;
    if (!image) {
        std::cerr << "inspect failed: unknown image id " << image_id << "\n";
        return 1;
    }

    ImageRgb8 img;
    try {
        img = read_png_rgb8((fs::path(gt_path).parent_path() / image->file_name).string());
    } catch (const std::exception& e) {
        std::cerr << "inspect failed: " << e.what() << "\n";
        return 1;
    }

    int drawn = 0;
    for (const Annotation& ann : gt.annotations) {
        if (ann.image_id != image_id) continue;
        // Per-instance color from the instance id hash.
        std::uint64_t s = ann.instance_id + 1;
        std::uint64_t hsh = splitmix64(s);
        std::uint8_t color[3] = {static_cast<std::uint8_t>(96 + (hsh & 0x7f)),
                                 static_cast<std::uint8_t>(96 + ((hsh >> 8) & 0x7f)),
                                 static_cast<std::uint8_t>(96 + ((hsh >> 16) & 0x7f))};

        int x0 = static_cast<int>(ann.bbox[0]), y0 = static_cast<int>(ann.bbox[1]);
        int x1 = x0 + static_cast<int>(ann.bbox[2]) - 1, y1 = y0 + static_cast<int>(ann.bbox[3]) - 1;
        draw_line(img, x0, y0, x1, y0, color);
        draw_line(img, x1, y0, x1, y1, color);
        draw_line(img, x1, y1, x0, y1, color);
        draw_line(img, x0, y1, x0, y0, color);

        // Mask contour: 1-pixels with a 0 (or off-image) 4-neighbor.
        auto mask = rle_decode(ann.rle);
        int w = ann.rle.width, h = ann.rle.height;
        auto at = [&](int x, int y) {
            return x >= 0 && y >= 0 && x < w && y < h && mask[static_cast<std::size_t>(y) * w + x];
        };
        for (int y = 0; y < h && y < img.height; ++y) {
            for (int x = 0; x < w && x < img.width; ++x) {
                if (!at(x, y)) continue;
                if (at(x - 1, y) && at(x + 1, y) && at(x, y - 1) && at(x, y + 1)) continue;
                std::size_t i = (static_cast<std::size_t>(y) * img.width + x) * 3;
                img.rgb[i] = color[0];
                img.rgb[i + 1] = color[1];
                img.rgb[i + 2] = color[2];
            }
        }

        const int skeleton[3][2] = {{1, 4}, {4, 5}, {2, 3}};  // 1-based keypoint indices
        for (const auto& e : skeleton) {
            const Keypoint& a = ann.keypoints[e[0] - 1];
            const Keypoint& b = ann.keypoints[e[1] - 1];
            if (a.v > 0 && b.v > 0)
                draw_line(img, static_cast<int>(std::lround(a.x)), static_cast<int>(std::lround(a.y)),
                          static_cast<int>(std::lround(b.x)), static_cast<int>(std::lround(b.y)), color);
        }
        const std::uint8_t kp_color[3] = {255, 40, 40};
        for (const Keypoint& kp : ann.keypoints) {
            if (kp.v == 0) continue;
            int cx = static_cast<int>(std::lround(kp.x)), cy = static_cast<int>(std::lround(kp.y));
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    draw_line(img, cx + dx, cy + dy, cx + dx, cy + dy, kp_color);
        }
        ++drawn;
    }

    write_png_rgb8(out_path, img.rgb, img.width, img.height);
    std::printf("wrote %s with %d annotation overlays\n", out_path.c_str(), drawn);
    return 0;
}

}  // namespace

namespace {

// Heights normalized to the full 16-bit range, row-major, north-up.
int cmd_dump_heightmap(std::uint64_t seed, const std::string& out_path) {
    TerrainGrid grid = generate_heightmap(seed, HeightmapParams{});
    double lo = *std::min_element(grid.heights.begin(), grid.heights.end());
    double hi = *std::max_element(grid.heights.begin(), grid.heights.end());
    double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;
    std::vector<std::uint16_t> gray(grid.heights.size());
    for (std::size_t i = 0; i < gray.size(); ++i)
        gray[i] = static_cast<std::uint16_t>(std::lround((grid.heights[i] - lo) * scale));
    write_png_gray16(out_path, gray, grid.width_cells, grid.height_cells);
    std::printf("wrote %s (%dx%d, heights %.2f..%.2f m)\n", out_path.c_str(), grid.width_cells,
                grid.height_cells, lo, hi);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"sylvangen — procedural forest dataset generator and COCO-style evaluator"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "generate a synthetic dataset");
    std::string config_path, out_dir, resolution;
    std::uint64_t seed = 0;
    int scenes = 0, frames = 0, workers = 0;
    gen->add_option("--config", config_path, "JSON config file");
    auto* seed_opt = gen->add_option("--seed", seed, "master seed");
    auto* scenes_opt = gen->add_option("--scenes", scenes, "number of scenes");
    gen->add_option("--out", out_dir, "output directory");
    gen->add_option("--resolution", resolution, "frame resolution, e.g. 800x800");
    auto* frames_opt = gen->add_option("--frames", frames, "fixed frames per scene");
    gen->add_option("--workers", workers, "worker threads (0 = hardware)");

    // eval
    auto* ev = app.add_subcommand("eval", "evaluate predictions against ground truth");
    std::string gt_path, pred_path, task = "bbox", report_out = "report.json";
    ev->add_option("--gt", gt_path, "ground-truth COCO JSON")->required();
    ev->add_option("--pred", pred_path, "COCO results JSON")->required();
    ev->add_option("--task", task, "bbox|segm|keypoints|all")
        ->check(CLI::IsMember({"bbox", "segm", "keypoints", "all"}));
    ev->add_option("--out", report_out, "machine-readable report path");

    // stats
    auto* st = app.add_subcommand("stats", "dataset statistics");
    std::string stats_gt;
    st->add_option("--gt", stats_gt, "ground-truth COCO JSON")->required();

    // inspect
    auto* in = app.add_subcommand("inspect", "draw annotations onto a frame, or dump a heightmap");
    std::string inspect_gt, inspect_out;
    std::uint64_t inspect_image = 0, terrain_seed = 0;
    in->add_option("--gt", inspect_gt, "ground-truth COCO JSON");
    in->add_option("--image-id", inspect_image, "image id to inspect");
    auto* terrain_opt =
        in->add_option("--terrain-seed", terrain_seed, "dump the default heightmap for this seed");
    in->add_option("--out", inspect_out, "output PNG path")->required();

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed())
        return cmd_generate(config_path, seed_opt->count() ? &seed : nullptr,
                            scenes_opt->count() ? &scenes : nullptr, out_dir, resolution,
                            frames_opt->count() ? &frames : nullptr, workers);
    if (ev->parsed()) return cmd_eval(gt_path, pred_path, task, report_out);
    if (st->parsed()) return cmd_stats(stats_gt);
    if (in->parsed()) {
        if (terrain_opt->count()) return cmd_dump_heightmap(terrain_seed, inspect_out);
        if (inspect_gt.empty()) {
            std::cerr << "inspect: need --gt and --image-id, or --terrain-seed\n";
            return 2;
        }
        return cmd_inspect(inspect_gt, inspect_image, inspect_out);
    }
    return 2;
}
