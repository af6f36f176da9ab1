#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "regforge/pipeline.hpp"
#include "regforge/train.hpp"

namespace py = pybind11;
using namespace regforge;

namespace {

Eigen::MatrixXd scan_to_matrix(const LidarScan& scan) {
  Eigen::MatrixXd m(scan.points.size(), 5);
  for (std::size_t i = 0; i < scan.points.size(); ++i) {
    const LidarPoint& p = scan.points[i];
    m.row(static_cast<Eigen::Index>(i)) << p.x, p.y, p.z, p.reflectance, p.ring;
  }
  return m;
}

LidarScan matrix_to_scan(const Eigen::MatrixXd& m, int num_rings) {
  if (m.cols() != 5) throw Error(ErrorCode::contract, "scan matrix must be N x 5");
  LidarScan scan;
  scan.num_rings = num_rings;
  scan.points.resize(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    scan.points[i] = {m(i, 0), m(i, 1), m(i, 2), m(i, 3),
                      static_cast<int>(m(i, 4))};
  return scan;
}

}  // namespace

PYBIND11_MODULE(_regforge, m) {
  m.doc() = "LiDAR-to-camera registration via reflectance-map edge matching";

  py::register_exception<Error>(m, "RegforgeError");

  m.def(
      "load_scan",
      [](const std::string& path, int num_rings) {
        return scan_to_matrix(load_kitti_scan(path, num_rings));
      },
      py::arg("path"), py::arg("num_rings") = 64,
      "Load a KITTI velodyne .bin; rows are (x, y, z, reflectance, ring).");

  m.def(
      "project_scan",
      [](const Eigen::MatrixXd& points, int num_rings, int width,
         const std::string& kind) {
        const ProjectionMap map =
            project(matrix_to_scan(points, num_rings), width,
                    kind == "depth" ? MapKind::depth : MapKind::reflectance);
        return py::make_tuple(map.values, map.index);
      },
      py::arg("points"), py::arg("num_rings") = 64, py::arg("width") = 1024,
      py::arg("kind") = "reflectance",
      "Spherical projection; returns (values, pixel->point index, -1 = empty).");

  m.def(
      "wavelet_filter",
      [](const Eigen::MatrixXd& gray, double threshold, const std::string& mode) {
        GrayImage img{gray, GrayOrigin::reflectance_map};
        return wavelet_filter(img, threshold,
                              mode == "suppress-small" ? WaveletMode::suppress_small
                                                       : WaveletMode::suppress_large)
            .values;
      },
      py::arg("gray"), py::arg("threshold") = 50.0,
      py::arg("mode") = "suppress-large");

  m.def(
      "sobel_edges",
      [](const Eigen::MatrixXd& gray, double threshold, int n_edges) {
        GrayImage img{gray, GrayOrigin::camera_red};
        const EdgeSet e = sobel_edges(img, threshold, n_edges);
        return py::make_tuple(Eigen::MatrixXi(e.pixels.cast<int>()), e.scores,
                              e.real_count);
      },
      py::arg("gray"), py::arg("threshold"), py::arg("n_edges"),
      "Thresholded vertical-Sobel edges with NMS; returns (pixels, scores, "
      "real_count).");

  m.def(
      "match_descriptors",
      [](const Eigen::MatrixXf& desc_r, const Eigen::MatrixXf& desc_c,
         double confidence_floor) {
        const MatchParamsT<float> params = MatchParamsT<float>::identity(
            static_cast<int>(desc_r.cols()));
        const Eigen::MatrixXf s = score_matrix<float>(desc_r, desc_c, params);
        const Eigen::VectorXf sr =
            matchability<float>(desc_r, params.score_w_r, params.score_b_r);
        const Eigen::VectorXf sc =
            matchability<float>(desc_c, params.score_w_c, params.score_b_c);
        const CorrespondenceSet matches =
            extract_matches_fast(s, sr, sc, confidence_floor);
        Eigen::MatrixXd out(matches.size(), 3);
        for (std::size_t k = 0; k < matches.size(); ++k)
          out.row(static_cast<Eigen::Index>(k)) << matches[k].i, matches[k].j,
              matches[k].confidence;
        return out;
      },
      py::arg("desc_r"), py::arg("desc_c"), py::arg("confidence_floor") = 0.0,
      "Dual-softmax mutual-max matching with identity parameters; rows are "
      "(i, j, confidence).");

  m.def(
      "run_synthetic_scene",
      [](std::uint64_t seed, const std::string& scene) {
        const SceneKind kind =
            scene == "stripe" ? SceneKind::stripe_wall : SceneKind::wall_grid;
        const PipelineConfig cfg;
        const RegistrationResult r = run_synthetic_scene(
            seed, make_scene(kind, seed, SceneScale{}),
            MatchParams::identity(kDescriptorDim), make_default_reduction(), cfg);
        py::dict d;
        d["rre_deg"] = r.rre_deg;
        d["rte_m"] = r.rte_m;
        d["success"] = r.success;
        d["bad"] = r.bad;
        d["failed"] = r.failed;
        d["total_s"] = r.times.total();
        return d;
      },
      py::arg("seed"), py::arg("scene") = "wall",
      "End-to-end registration of one synthetic scene under the standard "
      "perturbation protocol.");

  m.attr("DESCRIPTOR_DIM") = kDescriptorDim;
  m.attr("LOCAL_CHANNELS") = kLocalChannels;
  m.attr("GLOBAL_CHANNELS") = kGlobalChannels;
}
