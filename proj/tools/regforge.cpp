// regforge: LiDAR-to-camera registration through reflectance-map edge matching.
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "regforge/data_io.hpp"
#include "regforge/image_io.hpp"
#include "regforge/io_util.hpp"
#include "regforge/pipeline.hpp"
#include "regforge/train.hpp"

namespace fs = std::filesystem;
using namespace regforge;

namespace {

constexpr const char* kExitCodeHelp =
    "Exit codes: 0 ok, 3 I/O, 4 format, 5 empty input, 6 degenerate geometry,\n"
    "7 insufficient correspondences, 8 registration failed, 9 numeric,\n"
    "10 contract violation, 11 training diverged.";

struct ConfigFlags {
  std::string config_path;
  int map_width = 0, image_height = 0, image_width = 0, n_edges = 0;
  double wavelet_threshold = 0, sobel_camera = 0, sobel_reflectance = 0;
  double epsilon = 0, epsilon_e = 0, confidence_floor = 0, max_depth = 0;
  std::string kind, combine, euler;
  std::uint64_t seed = 0;

  CLI::Option *o_width = nullptr, *o_ih = nullptr, *o_iw = nullptr, *o_n = nullptr;
  CLI::Option *o_wav = nullptr, *o_sc = nullptr, *o_sr = nullptr;
  CLI::Option *o_eps = nullptr, *o_epse = nullptr, *o_floor = nullptr, *o_md = nullptr;
  CLI::Option *o_kind = nullptr, *o_comb = nullptr, *o_euler = nullptr, *o_seed = nullptr;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file (flags override it)");
    o_width = cmd->add_option("--map-width", map_width, "reflectance map width");
    o_ih = cmd->add_option("--image-height", image_height, "camera working height");
    o_iw = cmd->add_option("--image-width", image_width, "camera working width");
    o_n = cmd->add_option("--n-edges", n_edges, "edge pixels per modality");
    o_wav = cmd->add_option("--wavelet-threshold", wavelet_threshold,
                            "Haar coefficient threshold");
    o_sc = cmd->add_option("--sobel-camera", sobel_camera, "camera Sobel threshold");
    o_sr = cmd->add_option("--sobel-reflectance", sobel_reflectance,
                           "reflectance-map Sobel threshold");
    o_eps = cmd->add_option("--epsilon", epsilon, "ground-truth match radius (px)");
    o_epse = cmd->add_option("--epsilon-e", epsilon_e, "RANSAC inlier radius (px)");
    o_floor = cmd->add_option("--confidence-floor", confidence_floor,
                              "minimum match confidence");
    o_md = cmd->add_option("--max-depth", max_depth, "depth-map rasterization range (m)");
    o_kind = cmd->add_option("--kind", kind, "map kind: reflectance|depth")
                 ->check(CLI::IsMember({"reflectance", "depth"}));
    o_comb = cmd->add_option("--combine", combine, "softmax combine: product|mean")
                 ->check(CLI::IsMember({"product", "mean"}));
    o_euler = cmd->add_option("--euler", euler, "RRE Euler convention: xyz|zyx")
                  ->check(CLI::IsMember({"xyz", "zyx"}));
    o_seed = cmd->add_option("--seed", seed, "RNG seed");
  }

  // precedence: flag > config file > built-in defaults > REGFORGE_SEED for seed
  PipelineConfig resolve() const {
    PipelineConfig c;
    if (const char* env = std::getenv("REGFORGE_SEED"))
      c.seed = std::strtoull(env, nullptr, 10);
    if (!config_path.empty())
      c = pipeline_config_from_json(read_text_file(config_path));
    if (o_width->count()) c.map_width = map_width;
    if (o_ih->count()) c.image_height = image_height;
    if (o_iw->count()) c.image_width = image_width;
    if (o_n->count()) c.n_edges = n_edges;
    if (o_wav->count()) c.wavelet_threshold = wavelet_threshold;
    if (o_sc->count()) c.sobel_threshold_camera = sobel_camera;
    if (o_sr->count()) c.sobel_threshold_reflectance = sobel_reflectance;
    if (o_eps->count()) c.epsilon = epsilon;
    if (o_epse->count()) c.epsilon_e = epsilon_e;
    if (o_floor->count()) c.confidence_floor = confidence_floor;
    if (o_md->count()) c.max_depth = max_depth;
    if (o_kind->count()) c.map_kind = kind == "depth" ? MapKind::depth : MapKind::reflectance;
    if (o_comb->count()) c.combine = combine == "mean" ? CombineMode::mean : CombineMode::product;
    if (o_euler->count()) c.euler = euler == "zyx" ? EulerConvention::zyx : EulerConvention::xyz;
    if (o_seed->count()) c.seed = seed;
    return c;
  }
};

RigidTransform transform_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::format, std::string("transform json: ") + e.what());
  }
  const auto& m = j.contains("transform") ? j.at("transform") : j;
  if (!m.is_array() || m.size() != 12)
    throw Error(ErrorCode::format, "transform must be 12 row-major floats");
  RigidTransform t;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) t.rotation(r, c) = m[r * 4 + c].get<double>();
    t.translation(r) = m[r * 4 + 3].get<double>();
  }
  return t;
}

MatchParams load_params_or_default(const std::string& prefix) {
  return prefix.empty() ? MatchParams::identity(kDescriptorDim)
                        : load_match_params(prefix);
}

void write_timings(const StageTimes& t, const std::string& path) {
  nlohmann::json j;
  j["project_s"] = t.project;
  j["edges_s"] = t.edges;
  j["describe_s"] = t.describe;
  j["match_s"] = t.match;
  j["pose_s"] = t.pose;
  j["total_s"] = t.total();
  atomic_write(path, j.dump(2) + "\n");
}

SceneKind parse_scene_kind(const std::string& s) {
  return s == "stripe" ? SceneKind::stripe_wall : SceneKind::wall_grid;
}

std::vector<RegistrationResult> evaluate_synthetic_pool(
    std::uint64_t seed_base, int count, SceneKind kind, const SceneScale& scale,
    const MatchParams& params, const ReductionMap& reduction,
    const PipelineConfig& config, int jobs) {
  std::vector<RegistrationResult> results(count);
  if (jobs <= 1) {
    for (int i = 0; i < count; ++i)
      results[i] = run_synthetic_scene(seed_base + i,
                                       make_scene(kind, seed_base + i, scale),
                                       params, reduction, config);
    return results;
  }
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1))
      results[i] = run_synthetic_scene(seed_base + i,
                                       make_scene(kind, seed_base + i, scale),
                                       params, reduction, config);
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;  // slot order fixed by seed, independent of scheduling
}

int run(int argc, char** argv) {
  CLI::App app{"regforge: LiDAR-to-camera registration via reflectance-map "
               "edge matching"};
  app.footer(kExitCodeHelp);
  app.require_subcommand(1);

  // ---- project ------------------------------------------------------------
  auto* cmd_project = app.add_subcommand("project", "scan -> map artifacts");
  std::string pr_scan, pr_out = "map";
  int pr_rings = 64;
  cmd_project->add_option("scan", pr_scan, "KITTI velodyne .bin")->required();
  cmd_project->add_option("-o,--output", pr_out, "artifact prefix");
  cmd_project->add_option("--rings", pr_rings, "laser ring count");
  ConfigFlags pr_cfg;
  pr_cfg.attach(cmd_project);

  // ---- edges --------------------------------------------------------------
  auto* cmd_edges = app.add_subcommand("edges", "scan or image -> edge pixels");
  std::string ed_scan, ed_image, ed_out = "edges";
  int ed_rings = 64;
  cmd_edges->add_option("--scan", ed_scan, "KITTI velodyne .bin (reflectance path)");
  cmd_edges->add_option("--image", ed_image, "camera PNG (red-channel path)");
  cmd_edges->add_option("-o,--output", ed_out, "artifact prefix");
  cmd_edges->add_option("--rings", ed_rings, "laser ring count");
  ConfigFlags ed_cfg;
  ed_cfg.attach(cmd_edges);

  // ---- match --------------------------------------------------------------
  auto* cmd_match = app.add_subcommand("match", "descriptor sets -> correspondences");
  std::string ma_r, ma_c, ma_params, ma_out = "matches.csv";
  ConfigFlags ma_cfg;
  cmd_match->add_option("--desc-r", ma_r, "reflectance descriptor prefix")->required();
  cmd_match->add_option("--desc-c", ma_c, "camera descriptor prefix")->required();
  cmd_match->add_option("--params", ma_params, "trained match parameter prefix");
  cmd_match->add_option("-o,--output", ma_out, "correspondence CSV path");
  ma_cfg.attach(cmd_match);

  // ---- register -----------------------------------------------------------
  auto* cmd_register = app.add_subcommand("register", "full pipeline on one scene");
  std::string rg_scan, rg_image, rg_calib, rg_params, rg_gt, rg_out = ".";
  int rg_rings = 64;
  cmd_register->add_option("--scan", rg_scan, "KITTI velodyne .bin")->required();
  cmd_register->add_option("--image", rg_image, "camera PNG")->required();
  cmd_register->add_option("--calib", rg_calib, "KITTI calib.txt")->required();
  cmd_register->add_option("--params", rg_params, "trained match parameter prefix");
  cmd_register->add_option("--gt", rg_gt, "ground-truth transform JSON (12 floats)");
  cmd_register->add_option("-o,--output", rg_out, "output directory");
  cmd_register->add_option("--rings", rg_rings, "laser ring count");
  ConfigFlags rg_cfg;
  rg_cfg.attach(cmd_register);

  // ---- evaluate -----------------------------------------------------------
  auto* cmd_evaluate = app.add_subcommand("evaluate", "batch evaluation with metrics");
  std::string ev_dataset, ev_sequences = "9,10", ev_params, ev_scene = "wall";
  std::string ev_out = "summary";
  int ev_synthetic = 0, ev_jobs = 1, ev_max_frames = 0, ev_rings = 64;
  std::uint64_t ev_seed_base = 1000;
  cmd_evaluate->add_option("--dataset", ev_dataset, "KITTI odometry root");
  cmd_evaluate->add_option("--sequences", ev_sequences, "comma list, e.g. 9,10");
  cmd_evaluate->add_option("--max-frames", ev_max_frames, "cap frames per sequence");
  cmd_evaluate->add_option("--synthetic", ev_synthetic, "number of synthetic scenes");
  cmd_evaluate->add_option("--seed-base", ev_seed_base, "first synthetic scene seed");
  cmd_evaluate->add_option("--scene", ev_scene, "synthetic scene family: wall|stripe")
      ->check(CLI::IsMember({"wall", "stripe"}));
  cmd_evaluate->add_option("--params", ev_params, "trained match parameter prefix");
  cmd_evaluate->add_option("--jobs", ev_jobs, "worker threads");
  cmd_evaluate->add_option("--rings", ev_rings, "laser ring count");
  cmd_evaluate->add_option("-o,--output", ev_out, "summary prefix");
  ConfigFlags ev_cfg;
  ev_cfg.attach(cmd_evaluate);

  // ---- train-toy ----------------------------------------------------------
  auto* cmd_train = app.add_subcommand("train-toy",
                                       "Adam on the matching layer, synthetic scenes");
  std::string tr_out = "params", tr_scene = "wall";
  TrainOptions tr_opts;
  cmd_train->add_option("--epochs", tr_opts.epochs, "training epochs");
  cmd_train->add_option("--lr", tr_opts.learning_rate, "Adam learning rate");
  cmd_train->add_option("--batch", tr_opts.batch_size, "minibatch size");
  cmd_train->add_option("--scenes", tr_opts.num_scenes, "curriculum size");
  cmd_train->add_option("--train-seed", tr_opts.seed, "first curriculum seed");
  cmd_train->add_option("--scene", tr_scene, "scene family: wall|stripe")
      ->check(CLI::IsMember({"wall", "stripe"}));
  cmd_train->add_flag("--train-reduction", tr_opts.train_reduction,
                      "also train the descriptor reduction");
  cmd_train->add_option("-o,--output", tr_out, "parameter prefix");
  ConfigFlags tr_cfg;
  tr_cfg.attach(cmd_train);

  // ---- ablate -------------------------------------------------------------
  auto* cmd_ablate = app.add_subcommand("ablate",
                                        "epsilon_e x map-kind grid on synthetic scenes");
  std::string ab_params, ab_out = "ablation";
  int ab_count = 20, ab_jobs = 1;
  std::uint64_t ab_seed_base = 1000;
  cmd_ablate->add_option("--scenes", ab_count, "scenes per grid cell");
  cmd_ablate->add_option("--seed-base", ab_seed_base, "first scene seed");
  cmd_ablate->add_option("--params", ab_params, "trained match parameter prefix");
  cmd_ablate->add_option("--jobs", ab_jobs, "worker threads");
  cmd_ablate->add_option("-o,--output", ab_out, "output prefix");
  ConfigFlags ab_cfg;
  ab_cfg.attach(cmd_ablate);

  // ---- synth --------------------------------------------------------------
  auto* cmd_synth = app.add_subcommand("synth", "write one synthetic scene bundle");
  std::string sy_out = "scene", sy_scene = "wall";
  std::uint64_t sy_seed = 1;
  cmd_synth->add_option("--seed", sy_seed, "scene seed");
  cmd_synth->add_option("--scene", sy_scene, "scene family: wall|stripe")
      ->check(CLI::IsMember({"wall", "stripe"}));
  cmd_synth->add_option("-o,--output", sy_out, "bundle prefix");

  CLI11_PARSE(app, argc, argv);

  if (cmd_project->parsed()) {
    const PipelineConfig cfg = pr_cfg.resolve();
    LidarScan scan = load_kitti_scan(pr_scan, pr_rings);
    const ProjectionMap map = project(scan, cfg.map_width, cfg.map_kind);
    save_map_artifacts(map, pr_out, cfg.max_depth);
    std::cout << "wrote " << pr_out << ".pgm/.idx/.json ("
              << map.rows() << "x" << map.cols() << ")\n";
    return 0;
  }

  if (cmd_edges->parsed()) {
    const PipelineConfig cfg = ed_cfg.resolve();
    if (ed_scan.empty() == ed_image.empty())
      throw Error(ErrorCode::contract, "edges needs exactly one of --scan/--image");
    GrayImage gray;
    double threshold = 0.0;
    if (!ed_scan.empty()) {
      const LidarScan scan = load_kitti_scan(ed_scan, ed_rings);
      const ProjectionMap map = project(scan, cfg.map_width, cfg.map_kind);
      gray = wavelet_filter(gray_from_map(map, cfg.max_depth), cfg.wavelet_threshold,
                            cfg.wavelet_mode);
      threshold = cfg.sobel_threshold_reflectance;
    } else {
      CameraFrame frame;
      frame.image = load_png(ed_image);
      // Resample only when a working size was pinned explicitly; otherwise
      // operate at the image's native resolution.
      const bool pinned = ed_cfg.o_ih->count() || ed_cfg.o_iw->count() ||
                          !ed_cfg.config_path.empty();
      gray = red_channel(frame, pinned
                                    ? std::optional<TargetSize>(TargetSize{
                                          cfg.image_height, cfg.image_width})
                                    : std::nullopt);
      threshold = cfg.sobel_threshold_camera;
    }
    const EdgeSet edges = sobel_edges(gray, threshold, cfg.n_edges);
    atomic_write(ed_out + ".csv", edge_set_to_csv(edges));
    save_edge_png(edges, gray.rows(), gray.cols(), ed_out + ".png");
    std::cout << "wrote " << ed_out << ".csv/.png (" << edges.real_count
              << " real, " << edges.size() << " total)\n";
    return 0;
  }

  if (cmd_match->parsed()) {
    const PipelineConfig cfg = ma_cfg.resolve();
    const DescriptorSet desc_r = load_descriptor_set(ma_r);
    const DescriptorSet desc_c = load_descriptor_set(ma_c);
    const MatchParamsT<float> params =
        load_params_or_default(ma_params).cast<float>();
    const Eigen::MatrixXf s = score_matrix<float>(desc_r.vectors, desc_c.vectors, params);
    const Eigen::VectorXf sr =
        matchability<float>(desc_r.vectors, params.score_w_r, params.score_b_r);
    const Eigen::VectorXf sc =
        matchability<float>(desc_c.vectors, params.score_w_c, params.score_b_c);
    CorrespondenceSet matches;
    if (cfg.combine == CombineMode::product) {
      matches = extract_matches_fast(s, sr, sc, cfg.confidence_floor);
    } else {
      matches = extract_matches<float>(partial_assignment<float>(s, sr, sc, cfg.combine),
                                       cfg.confidence_floor);
    }
    std::string csv = "i,j,confidence\n";
    for (const Match& m : matches)
      csv += std::to_string(m.i) + "," + std::to_string(m.j) + "," +
             std::to_string(m.confidence) + "\n";
    atomic_write(ma_out, csv);
    std::cout << "wrote " << ma_out << " (" << matches.size() << " matches)\n";
    return 0;
  }

  if (cmd_register->parsed()) {
    PipelineConfig cfg = rg_cfg.resolve();
    const KittiCalibration calib = load_kitti_calibration(rg_calib);
    SceneInput input;
    input.scan_for_map = load_kitti_scan(rg_scan, rg_rings);
    input.scan_for_lift = input.scan_for_map;
    input.frame.image = load_png(rg_image);
    input.frame.intrinsics = calib.intrinsics;
    input.pose_prior = calib.velo_to_cam;
    cfg.image_height = input.frame.image.height;
    cfg.image_width = input.frame.image.width;
    const MatchParams params = load_params_or_default(rg_params);
    const ReductionMap reduction = make_default_reduction();

    const PipelineArtifacts art = run_pipeline(input, params, reduction, cfg);
    fs::create_directories(rg_out);
    atomic_write((fs::path(rg_out) / "pose.json").string(), pose_to_json(art.pose));
    atomic_write((fs::path(rg_out) / "correspondences.csv").string(),
                 correspondences_to_csv(art.matches, art.edges_r, art.edges_c));
    write_timings(art.times, (fs::path(rg_out) / "timings.json").string());
    std::cout << "pose written: " << art.pose.inliers.size() << " inliers, rmse "
              << art.pose.reprojection_rmse << " px, total "
              << art.times.total() << " s\n";
    if (!rg_gt.empty()) {
      const RigidTransform gt = transform_from_json(read_text_file(rg_gt));
      const RegistrationResult res = make_result(gt, art.pose.transform, art.times,
                                                 cfg.euler);
      std::cout << "RRE " << res.rre_deg << " deg, RTE " << res.rte_m << " m, "
                << (res.success ? "success" : res.bad ? "bad" : "marginal") << "\n";
    }
    return 0;
  }

  if (cmd_evaluate->parsed()) {
    const PipelineConfig cfg = ev_cfg.resolve();
    const MatchParams params = load_params_or_default(ev_params);
    const ReductionMap reduction = make_default_reduction();
    std::vector<RegistrationResult> results;

    if (ev_synthetic > 0) {
      results = evaluate_synthetic_pool(ev_seed_base, ev_synthetic,
                                        parse_scene_kind(ev_scene), SceneScale{},
                                        params, reduction, cfg, ev_jobs);
    } else if (!ev_dataset.empty()) {
      std::vector<int> seqs;
      for (std::size_t pos = 0; pos < ev_sequences.size();) {
        const std::size_t comma = ev_sequences.find(',', pos);
        seqs.push_back(std::stoi(ev_sequences.substr(pos, comma - pos)));
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      for (int seq : seqs) {
        char name[8];
        std::snprintf(name, sizeof(name), "%02d", seq);
        const fs::path root = fs::path(ev_dataset) / "sequences" / name;
        const KittiCalibration calib = load_kitti_calibration((root / "calib.txt").string());
        std::vector<fs::path> bins;
        if (!fs::is_directory(root / "velodyne"))
          throw Error(ErrorCode::io, "missing " + (root / "velodyne").string());
        for (const auto& e : fs::directory_iterator(root / "velodyne"))
          if (e.path().extension() == ".bin") bins.push_back(e.path());
        std::sort(bins.begin(), bins.end());
        if (bins.empty())
          throw Error(ErrorCode::empty_input, "sequence " + std::string(name) +
                                                  " has no scans");
        if (ev_max_frames > 0 && static_cast<int>(bins.size()) > ev_max_frames)
          bins.resize(ev_max_frames);
        for (std::size_t f = 0; f < bins.size(); ++f) {
          const std::uint64_t scene_seed = ev_seed_base + results.size();
          const Perturbation p = sample_perturbation(scene_seed ^ 0xabcdef12ULL);
          SceneInput input;
          const LidarScan scan = load_kitti_scan(bins[f].string(), ev_rings);
          input.scan_for_map =
              apply_perturbation(scan, p, PerturbationStage::rotation_only);
          input.scan_for_lift = apply_perturbation(input.scan_for_map, p,
                                                   PerturbationStage::translation_only);
          fs::path img = root / "image_2" / (bins[f].stem().string() + ".png");
          input.frame.image = load_png(img.string());
          input.frame.intrinsics = calib.intrinsics;
          input.pose_prior = calib.velo_to_cam;
          PipelineConfig scene_cfg = cfg;
          scene_cfg.image_height = input.frame.image.height;
          scene_cfg.image_width = input.frame.image.width;
          scene_cfg.seed = cfg.seed ^ scene_seed;
          const RigidTransform gt = synthetic_ground_truth(calib.velo_to_cam, p);
          try {
            const PipelineArtifacts art = run_pipeline(input, params, reduction, scene_cfg);
            results.push_back(make_result(gt, art.pose.transform, art.times, cfg.euler));
          } catch (const Error&) {
            RegistrationResult res = make_result(gt, RigidTransform{}, StageTimes{},
                                                 cfg.euler);
            res.failed = res.bad = true;
            res.success = false;
            results.push_back(res);
          }
        }
      }
    } else {
      throw Error(ErrorCode::contract, "evaluate needs --dataset or --synthetic N");
    }

    const Summary summary = aggregate(results);
    atomic_write(ev_out + ".json", summary_to_json(summary));
    atomic_write(ev_out + ".csv", results_to_csv(results));
    std::cout << summary_to_table(summary);
    return 0;
  }

  if (cmd_train->parsed()) {
    const PipelineConfig cfg = tr_cfg.resolve();
    tr_opts.scene_kind = parse_scene_kind(tr_scene);
    const TrainReport report = toy_train(tr_opts, cfg);
    save_match_params(report.params, tr_out, tr_opts.seed, "toy-trained");
    nlohmann::json j;
    j["epoch_loss"] = report.epoch_loss;
    atomic_write(tr_out + "_loss.json", j.dump(2) + "\n");
    std::cout << "trained " << tr_opts.epochs << " epochs on " << tr_opts.num_scenes
              << " scenes; loss " << report.epoch_loss.front() << " -> "
              << report.epoch_loss.back() << "\n";
    return 0;
  }

  if (cmd_ablate->parsed()) {
    const PipelineConfig base = ab_cfg.resolve();
    const MatchParams params = load_params_or_default(ab_params);
    const ReductionMap reduction = make_default_reduction();
    nlohmann::json grid = nlohmann::json::array();
    std::string table = "kind,epsilon_e,acc_percent,bad_percent,wall_s\n";
    for (const MapKind kind : {MapKind::reflectance, MapKind::depth}) {
      for (const double eps_e : {2.0, 4.0, 6.0, 8.0}) {
        PipelineConfig cfg = base;
        cfg.map_kind = kind;
        cfg.epsilon_e = eps_e;
        const auto t0 = std::chrono::steady_clock::now();
        const std::vector<RegistrationResult> results = evaluate_synthetic_pool(
            ab_seed_base, ab_count, SceneKind::wall_grid, SceneScale{}, params,
            reduction, cfg, ab_jobs);
        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const Summary s = aggregate(results);
        nlohmann::json row;
        row["kind"] = kind == MapKind::reflectance ? "reflectance" : "depth";
        row["epsilon_e"] = eps_e;
        row["acc_percent"] = s.acc_percent;
        row["bad_percent"] = s.bad_percent;
        row["wall_s"] = wall;
        grid.push_back(row);
        table += row["kind"].get<std::string>() + "," + std::to_string(eps_e) + "," +
                 std::to_string(s.acc_percent) + "," + std::to_string(s.bad_percent) +
                 "," + std::to_string(wall) + "\n";
      }
    }
    atomic_write(ab_out + ".json", grid.dump(2) + "\n");
    atomic_write(ab_out + ".csv", table);
    std::cout << table;
    return 0;
  }

  if (cmd_synth->parsed()) {
    const SceneConfig scene_cfg = parse_scene_kind(sy_scene) == SceneKind::wall_grid
                                      ? make_wall_scene_config(sy_seed)
                                      : make_stripe_wall_config(sy_seed);
    const SyntheticScene scene = generate_synthetic_scene(sy_seed, scene_cfg);
    save_kitti_scan(scene.scan, sy_out + ".bin");
    save_png(scene.frame.image, sy_out + ".png");
    // KITTI-style calib.txt so `register` can consume the bundle directly
    std::string calib = "P2:";
    const Mat3& k = scene.frame.intrinsics;
    const double p2[12] = {k(0, 0), k(0, 1), k(0, 2), 0, k(1, 0), k(1, 1),
                           k(1, 2), 0,       k(2, 0), k(2, 1), k(2, 2), 0};
    for (double v : p2) calib += " " + std::to_string(v);
    calib += "\nTr:";
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 4; ++c)
        calib += " " + std::to_string(c < 3 ? scene.lidar_to_camera.rotation(r, c)
                                            : scene.lidar_to_camera.translation(r));
    calib += "\n";
    atomic_write(sy_out + "_calib.txt", calib);
    std::cout << "wrote " << sy_out << ".bin/.png/_calib.txt ("
              << scene.scan.points.size() << " points)\n";
    return 0;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
