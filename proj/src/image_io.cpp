#include "regforge/image_io.hpp"

#include <cstdio>

#include <opencv2/imgcodecs.hpp>

namespace regforge {
namespace {

void imwrite_atomic(const cv::Mat& mat, const std::string& path) {
  const std::string tmp = path + ".tmp.png";
  if (!cv::imwrite(tmp, mat)) throw Error(ErrorCode::io, "png encode failed: " + path);
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw Error(ErrorCode::io, "rename failed: " + path);
}

}  // namespace

Image8 load_png(const std::string& path) {
  const cv::Mat bgr = cv::imread(path, cv::IMREAD_COLOR);
  if (bgr.empty()) throw Error(ErrorCode::io, "cannot read image: " + path);
  Image8 img;
  img.height = bgr.rows;
  img.width = bgr.cols;
  img.rgb.resize(static_cast<std::size_t>(bgr.rows) * bgr.cols * 3);
  for (int r = 0; r < bgr.rows; ++r)
    for (int c = 0; c < bgr.cols; ++c) {
      const cv::Vec3b& px = bgr.at<cv::Vec3b>(r, c);
      img.at(r, c, 0) = px[2];
      img.at(r, c, 1) = px[1];
      img.at(r, c, 2) = px[0];
    }
  return img;
}

void save_png(const Image8& image, const std::string& path) {
  cv::Mat bgr(image.height, image.width, CV_8UC3);
  for (int r = 0; r < image.height; ++r)
    for (int c = 0; c < image.width; ++c)
      bgr.at<cv::Vec3b>(r, c) = {image.at(r, c, 2), image.at(r, c, 1), image.at(r, c, 0)};
  imwrite_atomic(bgr, path);
}

void save_gray_png(const GrayImage& img, const std::string& path) {
  cv::Mat gray(img.rows(), img.cols(), CV_8UC1);
  for (int r = 0; r < img.rows(); ++r)
    for (int c = 0; c < img.cols(); ++c)
      gray.at<std::uint8_t>(r, c) =
          static_cast<std::uint8_t>(std::clamp(img.values(r, c) + 0.5, 0.0, 255.0));
  imwrite_atomic(gray, path);
}

void save_edge_png(const EdgeSet& edges, int height, int width, const std::string& path) {
  cv::Mat img = cv::Mat::zeros(height, width, CV_8UC1);
  for (int i = 0; i < edges.size(); ++i) {
    const int r = edges.pixels(i, 0), c = edges.pixels(i, 1);
    if (r >= 0 && r < height && c >= 0 && c < width) img.at<std::uint8_t>(r, c) = 255;
  }
  imwrite_atomic(img, path);
}

}  // namespace regforge
