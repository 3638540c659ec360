// Command-line surface over the detection-geometry toolkit: extraction,
// assignment, NMS, evaluation, gradient checking, and kernel benchmarks.
// Exit codes: 0 success, 1 input problems, 2 failed internal checks.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "epd/batch.hpp"
#include "epd/errors.hpp"
#include "epd/evaluate.hpp"
#include "epd/extraction.hpp"
#include "epd/io.hpp"
#include "epd/loss.hpp"
#include "epd/postprocess.hpp"
#include "epd/reference.hpp"
#include "epd/rng.hpp"
#include "epd/scenario.hpp"

namespace {

using nlohmann::ordered_json;

// Writes to the file when given, otherwise to stdout.
class OutputTarget {
  public:
    explicit OutputTarget(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw epd::InputError("cannot open output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

  private:
    std::ofstream file_;
};

int run_extract(const std::string& annotations, const std::string& out_path) {
    const epd::Dataset ds = epd::load_annotations(annotations);
    std::vector<epd::io::ExtremesRecord> recs;
    recs.reserve(ds.instances.size());
    for (const epd::LoadedInstance& inst : ds.instances) {
        epd::io::ExtremesRecord r;
        r.image_id = inst.image_id;
        r.instance_id = inst.gt.instance_id;
        r.category_id = inst.gt.category;
        r.extremes = inst.gt.extremes;
        r.bbox = inst.gt.box;
        recs.push_back(r);
    }
    OutputTarget out(out_path);
    epd::io::write_extremes_jsonl(out.stream(), recs);
    if (ds.skipped_rle > 0 || ds.skipped_crowd > 0) {
        std::cerr << "skipped " << ds.skipped_rle << " RLE and " << ds.skipped_crowd
                  << " crowd annotations\n";
    }
    return 0;
}

int run_assign(const std::string& annotations, const std::vector<double>& strides,
               const std::string& out_path) {
    const epd::Dataset ds = epd::load_annotations(annotations);
    OutputTarget out(out_path);
    for (const epd::AnnotatedImage& img : ds.images) {
        std::vector<epd::GroundTruthInstance> gts;
        for (const epd::LoadedInstance& inst : ds.instances) {
            if (inst.image_id == img.id) gts.push_back(inst.gt);
        }
        const std::vector<epd::AssignmentTarget> targets =
            epd::assign(gts, img.width, img.height, strides);
        epd::io::write_targets_jsonl(out.stream(), img.id, targets);
    }
    return 0;
}

int run_nms(const std::string& dets_path, const std::string& mode_name, double iou_thr,
            double score_thr, const std::string& out_path) {
    const epd::RankMode mode = epd::rank_mode_from_string(mode_name);
    const std::vector<epd::Detection> dets = epd::io::read_detections_jsonl(dets_path);
    const std::vector<epd::Detection> kept = epd::nms(dets, mode, iou_thr, score_thr);
    OutputTarget out(out_path);
    epd::io::write_detections_jsonl(out.stream(), kept);
    std::cerr << "kept " << kept.size() << " of " << dets.size() << " detections\n";
    return 0;
}

int run_eval(const std::string& gt_path, const std::string& dets_path,
             const std::string& mode_name, const std::vector<double>& thresholds,
             bool apply_nms, double iou_thr, double score_thr,
             const std::string& gt_box_source) {
    if (gt_box_source != "extremes" && gt_box_source != "annotation") {
        throw epd::InputError("--gt-box must be 'extremes' or 'annotation'");
    }
    const epd::RankMode mode = epd::rank_mode_from_string(mode_name);
    const std::vector<epd::LoadedInstance> gts = epd::io::to_instances(
        epd::io::read_extremes_jsonl(gt_path), gt_box_source == "annotation");
    std::vector<epd::Detection> dets = epd::io::read_detections_jsonl(dets_path);
    if (apply_nms) {
        dets = epd::nms(dets, mode, iou_thr, score_thr);
    }
    const epd::EvalReport report =
        epd::evaluate(gts, dets, mode, thresholds, gt_box_source == "annotation");
    std::cout << epd::io::report_json(report) << '\n';
    return 0;
}

int run_compare(const std::string& config_path, std::uint64_t seed) {
    const epd::ScenarioConfig config = epd::io::read_scenario_config(config_path);
    const epd::Scenario scenario = epd::generate_scenario(config, seed);
    const epd::CompareReport report = epd::compare_rankings(scenario, config);
    std::cout << epd::io::compare_json(report) << '\n';
    return 0;
}

// ---- gradient check ------------------------------------------------------

epd::ExtremePoints random_quad(epd::rng::Stream& s, const epd::AxisAlignedBox& box) {
    epd::ExtremePoints e;
    e.left = {box.x_min, box.y_min + s.uniform(0.2, 0.8) * box.height()};
    e.top = {box.x_min + s.uniform(0.2, 0.8) * box.width(), box.y_min};
    e.right = {box.x_max, box.y_min + s.uniform(0.2, 0.8) * box.height()};
    e.bottom = {box.x_min + s.uniform(0.2, 0.8) * box.width(), box.y_max};
    return e;
}

// A (gt, pred) pair that is comfortably differentiable: clear of the branch
// boundary, of min/max coordinate ties, and of collapsed edges.
epd::batch::QuadPair gradcheck_pair(std::uint64_t seed, std::uint64_t trial) {
    for (std::uint64_t attempt = 0;; ++attempt) {
        epd::rng::Stream s = epd::rng::Stream::of(seed, 3, trial, attempt);
        const double cx = s.uniform(100.0, 500.0);
        const double cy = s.uniform(100.0, 500.0);
        const double w = s.uniform(40.0, 160.0);
        const double h = s.uniform(40.0, 160.0);
        const epd::AxisAlignedBox gt_box{cx - 0.5 * w, cy - 0.5 * h, cx + 0.5 * w,
                                         cy + 0.5 * h};

        const bool disjoint = trial % 5 == 4;
        const double shift = disjoint ? 1.6 : 0.3;
        const double dx = s.uniform(-shift, shift) * w + (disjoint ? 1.2 * w : 0.0);
        const double dy = s.uniform(-0.3, 0.3) * h;
        const double pw = w * s.uniform(0.8, 1.2);
        const double ph = h * s.uniform(0.8, 1.2);
        const epd::AxisAlignedBox pred_box{cx + dx - 0.5 * pw, cy + dy - 0.5 * ph,
                                           cx + dx + 0.5 * pw, cy + dy + 0.5 * ph};

        epd::batch::QuadPair pair{random_quad(s, gt_box), random_quad(s, pred_box)};

        const double wi = std::min(gt_box.x_max, pred_box.x_max) -
                          std::max(gt_box.x_min, pred_box.x_min);
        const double hi = std::min(gt_box.y_max, pred_box.y_max) -
                          std::max(gt_box.y_min, pred_box.y_min);
        if (std::abs(wi) < 1e-2 || std::abs(hi) < 1e-2) continue;
        if (disjoint && wi > 0.0 && hi > 0.0) continue;
        if (!disjoint && !(wi > 0.0 && hi > 0.0)) continue;
        // Finite-difference steps must not flip any min/max selection.
        if (std::abs(gt_box.x_min - pred_box.x_min) < 1e-3 ||
            std::abs(gt_box.x_max - pred_box.x_max) < 1e-3 ||
            std::abs(gt_box.y_min - pred_box.y_min) < 1e-3 ||
            std::abs(gt_box.y_max - pred_box.y_max) < 1e-3) {
            continue;
        }
        return pair;
    }
}

int run_grad_check(int trials, std::uint64_t seed, double tolerance) {
    const double h = 1e-5;
    double max_rel = 0.0;
    for (int t = 0; t < trials; ++t) {
        const epd::batch::QuadPair pair = gradcheck_pair(seed, t);
        const epd::LossGradient analytic = epd::eiou_loss_grad(pair.gt, pair.pred);

        std::array<double, 8> numeric{};
        std::array<double, 8> coords = pair.pred.to_array();
        for (std::size_t i = 0; i < 8; ++i) {
            const double save = coords[i];
            coords[i] = save + h;
            const double up =
                epd::eiou_loss(pair.gt, epd::ExtremePoints::from_array(coords)).value;
            coords[i] = save - h;
            const double dn =
                epd::eiou_loss(pair.gt, epd::ExtremePoints::from_array(coords)).value;
            coords[i] = save;
            numeric[i] = (up - dn) / (2.0 * h);
        }

        double scale = 1.0;
        double diff = 0.0;
        for (std::size_t i = 0; i < 8; ++i) {
            scale = std::max({scale, std::abs(analytic.d[i]), std::abs(numeric[i])});
            diff = std::max(diff, std::abs(analytic.d[i] - numeric[i]));
        }
        max_rel = std::max(max_rel, diff / scale);
    }

    ordered_json out;
    out["trials"] = trials;
    out["step"] = h;
    out["max_rel_error"] = max_rel;
    out["tolerance"] = tolerance;
    out["pass"] = max_rel < tolerance;
    std::cout << out.dump(2) << '\n';
    return max_rel < tolerance ? 0 : 2;
}

// ---- benchmark -----------------------------------------------------------

double elapsed_ms(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

int run_bench(int n, std::uint64_t seed) {
    std::vector<epd::batch::QuadPair> pairs(n);
    for (int i = 0; i < n; ++i) {
        pairs[i] = gradcheck_pair(seed, static_cast<std::uint64_t>(i));
    }

    ordered_json out;
    bool all_match = true;
    std::cerr << "kernel           parallel_ms   serial_ms  (threads=" << epd::batch::max_threads()
              << ")\n";

    auto report = [&](const char* name, double par_ms, double ser_ms, bool match,
                      double checksum) {
        std::cerr << name << std::string(17 - std::string(name).size(), ' ')
                  << par_ms << "  " << ser_ms << (match ? "" : "  MISMATCH") << '\n';
        ordered_json k;
        k["checksum"] = checksum;
        k["parallel_matches_serial"] = match;
        out[name] = k;
        all_match = all_match && match;
    };

    {
        auto t0 = std::chrono::steady_clock::now();
        const auto par = epd::batch::eiou_batch(pairs);
        const double par_ms = elapsed_ms(t0);
        t0 = std::chrono::steady_clock::now();
        const auto ser = epd::reference::eiou_batch(pairs);
        const double ser_ms = elapsed_ms(t0);
        bool match = par.size() == ser.size();
        double checksum = 0.0;
        for (std::size_t i = 0; i < par.size() && match; ++i) {
            match = par[i].rect_iou == ser[i].rect_iou && par[i].cos_sim == ser[i].cos_sim &&
                    par[i].eiou == ser[i].eiou;
            checksum += par[i].eiou;
        }
        report("eiou", par_ms, ser_ms, match, checksum);
    }
    {
        auto t0 = std::chrono::steady_clock::now();
        const auto par = epd::batch::loss_batch(pairs);
        const double par_ms = elapsed_ms(t0);
        t0 = std::chrono::steady_clock::now();
        const auto ser = epd::reference::loss_batch(pairs);
        const double ser_ms = elapsed_ms(t0);
        bool match = par.size() == ser.size();
        double checksum = 0.0;
        for (std::size_t i = 0; i < par.size() && match; ++i) {
            match = par[i].value == ser[i].value &&
                    par[i].overlap_branch == ser[i].overlap_branch;
            checksum += par[i].value;
        }
        report("loss", par_ms, ser_ms, match, checksum);
    }
    {
        auto t0 = std::chrono::steady_clock::now();
        const auto par = epd::batch::grad_batch(pairs);
        const double par_ms = elapsed_ms(t0);
        t0 = std::chrono::steady_clock::now();
        const auto ser = epd::reference::grad_batch(pairs);
        const double ser_ms = elapsed_ms(t0);
        bool match = par.size() == ser.size();
        double checksum = 0.0;
        for (std::size_t i = 0; i < par.size() && match; ++i) {
            for (std::size_t k = 0; k < 8; ++k) {
                match = match && par[i].d[k] == ser[i].d[k];
                checksum += par[i].d[k];
            }
        }
        report("grad", par_ms, ser_ms, match, checksum);
    }
    {
        // Assignment over a synthetic image worth of instances.
        epd::ScenarioConfig cfg;
        cfg.images = 1;
        cfg.instances_per_image = 24;
        const epd::Scenario sc = epd::generate_scenario(cfg, seed);
        std::vector<epd::GroundTruthInstance> gts;
        for (const epd::LoadedInstance& inst : sc.gts) gts.push_back(inst.gt);
        const std::vector<double> strides{8, 16, 32, 64, 128};

        auto t0 = std::chrono::steady_clock::now();
        const auto par = epd::assign(gts, cfg.image_width, cfg.image_height, strides);
        const double par_ms = elapsed_ms(t0);
        t0 = std::chrono::steady_clock::now();
        const auto ser = epd::reference::assign(gts, cfg.image_width, cfg.image_height, strides);
        const double ser_ms = elapsed_ms(t0);

        bool match = par.size() == ser.size();
        double checksum = 0.0;
        for (std::size_t i = 0; i < par.size() && match; ++i) {
            match = par[i].positive == ser[i].positive &&
                    par[i].instance_id == ser[i].instance_id &&
                    par[i].location.x == ser[i].location.x &&
                    par[i].location.y == ser[i].location.y;
            if (par[i].displacement && ser[i].displacement) {
                for (std::size_t k = 0; k < 8; ++k) {
                    match = match && par[i].displacement->d[k] == ser[i].displacement->d[k];
                }
            } else {
                match = match && !par[i].displacement && !ser[i].displacement;
            }
            checksum += par[i].positive ? 1.0 : 0.0;
        }
        report("assign", par_ms, ser_ms, match, checksum);
    }
    {
        // NMS over a crowded scenario.
        epd::ScenarioConfig cfg;
        cfg.images = 8;
        cfg.instances_per_image = 12;
        cfg.detections_per_gt = 8;
        cfg.sigma_translate = 6.0;
        cfg.sigma_jitter = 2.0;
        const epd::Scenario sc = epd::generate_scenario(cfg, seed);

        auto t0 = std::chrono::steady_clock::now();
        const auto par = epd::nms(sc.detections, epd::RankMode::kEiou, 0.6);
        const double par_ms = elapsed_ms(t0);
        t0 = std::chrono::steady_clock::now();
        const auto ser = epd::reference::nms(sc.detections, epd::RankMode::kEiou, 0.6);
        const double ser_ms = elapsed_ms(t0);

        bool match = par.size() == ser.size();
        double checksum = 0.0;
        for (std::size_t i = 0; i < par.size() && match; ++i) {
            match = par[i].image_id == ser[i].image_id &&
                    par[i].cls_confidence == ser[i].cls_confidence &&
                    par[i].eiou_score == ser[i].eiou_score;
            checksum += par[i].cls_confidence;
        }
        report("nms", par_ms, ser_ms, match, checksum);
    }

    std::cout << out.dump(2) << '\n';
    return all_match ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Extreme-point detection geometry toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    int threads = 0;
    app.add_option("--threads", threads, "Worker thread count (0 = library default)");

    std::string annotations, out_path;
    auto* extract = app.add_subcommand("extract", "Extreme points from polygon annotations");
    extract->add_option("annotations", annotations, "COCO-style annotation JSON")->required();
    extract->add_option("--out", out_path, "Output JSONL path (default stdout)");

    std::vector<double> strides{8, 16, 32, 64, 128};
    auto* assign_cmd = app.add_subcommand("assign", "Grid of training targets per image");
    assign_cmd->add_option("annotations", annotations, "COCO-style annotation JSON")->required();
    assign_cmd->add_option("--strides", strides, "Feature strides")->delimiter(',');
    assign_cmd->add_option("--out", out_path, "Output JSONL path (default stdout)");

    std::string gt_path, dets_path, mode_name = "plain", gt_box_source = "extremes";
    std::vector<double> thresholds{0.5, 0.75};
    double iou_thr = 0.6, score_thr = 0.05;
    bool apply_nms = false;
    auto* eval_cmd = app.add_subcommand("eval-eiou", "Match detections to gt and report AP / mean EIoU");
    eval_cmd->add_option("gt", gt_path, "Ground-truth extremes JSONL")->required();
    eval_cmd->add_option("detections", dets_path, "Detections JSONL")->required();
    eval_cmd->add_option("--mode", mode_name, "Ranking: plain|centerness|eiou");
    eval_cmd->add_option("--thresholds", thresholds, "Matching IoU thresholds")->delimiter(',');
    eval_cmd->add_flag("--apply-nms", apply_nms, "Run NMS before evaluating");
    eval_cmd->add_option("--iou-thr", iou_thr, "NMS IoU threshold");
    eval_cmd->add_option("--score-thr", score_thr, "NMS score pre-filter");
    eval_cmd->add_option("--gt-box", gt_box_source, "Gt box source: extremes|annotation");

    auto* nms_cmd = app.add_subcommand("nms", "Greedy NMS over a detection dump");
    nms_cmd->add_option("detections", dets_path, "Detections JSONL")->required();
    nms_cmd->add_option("--mode", mode_name, "Ranking: plain|centerness|eiou");
    nms_cmd->add_option("--iou-thr", iou_thr, "Suppression IoU threshold");
    nms_cmd->add_option("--score-thr", score_thr, "Score pre-filter");
    nms_cmd->add_option("--out", out_path, "Output JSONL path (default stdout)");

    int trials = 200;
    std::uint64_t seed = 1;
    double tolerance = 1e-5;
    auto* grad_cmd = app.add_subcommand("grad-check", "Analytic vs finite-difference gradients");
    grad_cmd->add_option("--trials", trials, "Number of random configurations");
    grad_cmd->add_option("--seed", seed, "RNG seed");
    grad_cmd->add_option("--tolerance", tolerance, "Max allowed relative error");

    int bench_n = 100000;
    auto* bench_cmd = app.add_subcommand("bench", "Parallel kernels vs serial reference");
    bench_cmd->add_option("--n", bench_n, "Batch size");
    bench_cmd->add_option("--seed", seed, "RNG seed");

    std::string config_path;
    auto* compare_cmd = app.add_subcommand("compare", "NMS ranking modes on a synthetic scenario");
    compare_cmd->add_option("config", config_path, "Scenario config JSON")->required();
    compare_cmd->add_option("--seed", seed, "RNG seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    epd::batch::set_threads(threads);

    try {
        if (extract->parsed()) return run_extract(annotations, out_path);
        if (assign_cmd->parsed()) return run_assign(annotations, strides, out_path);
        if (eval_cmd->parsed()) {
            return run_eval(gt_path, dets_path, mode_name, thresholds, apply_nms, iou_thr,
                            score_thr, gt_box_source);
        }
        if (nms_cmd->parsed()) {
            return run_nms(dets_path, mode_name, iou_thr, score_thr, out_path);
        }
        if (grad_cmd->parsed()) return run_grad_check(trials, seed, tolerance);
        if (bench_cmd->parsed()) return run_bench(bench_n, seed);
        if (compare_cmd->parsed()) return run_compare(config_path, seed);
    } catch (const epd::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
