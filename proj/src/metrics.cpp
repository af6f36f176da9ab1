#include "regforge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace regforge {

EulerAngles euler_decompose(const Mat3& r, EulerConvention conv) {
  EulerAngles e;
  if (conv == EulerConvention::xyz) {
    // R = Rx(a) Ry(b) Rz(c): R(0,2) = sin b
    const double sb = std::clamp(r(0, 2), -1.0, 1.0);
    e.y = std::asin(sb);
    if (std::abs(std::cos(e.y)) < 1e-9) {
      e.gimbal_lock = true;
      e.z = 0.0;
      e.x = std::atan2(r(2, 1), r(1, 1));
    } else {
      e.x = std::atan2(-r(1, 2), r(2, 2));
      e.z = std::atan2(-r(0, 1), r(0, 0));
    }
  } else {
    // R = Rz(a) Ry(b) Rx(c): R(2,0) = -sin b
    const double sb = std::clamp(-r(2, 0), -1.0, 1.0);
    e.y = std::asin(sb);
    if (std::abs(std::cos(e.y)) < 1e-9) {
      e.gimbal_lock = true;
      e.z = 0.0;
      e.x = std::atan2(r(0, 1), r(1, 1));
    } else {
      e.z = std::atan2(r(1, 0), r(0, 0));
      e.x = std::atan2(r(2, 1), r(2, 2));
    }
  }
  return e;
}

double rre(const Mat3& r_gt, const Mat3& r_est, EulerConvention conv) {
  const EulerAngles e = euler_decompose(r_gt.transpose() * r_est, conv);
  return (std::abs(e.x) + std::abs(e.y) + std::abs(e.z)) * 180.0 / M_PI;
}

double rte(const Vec3& t_gt, const Vec3& t_est) { return (t_gt - t_est).norm(); }

RegistrationResult make_result(const RigidTransform& gt, const RigidTransform& est,
                               const StageTimes& times, EulerConvention conv) {
  RegistrationResult res;
  res.rre_deg = rre(gt.rotation, est.rotation, conv);
  res.rte_m = rte(gt.translation, est.translation);
  res.success = res.rre_deg < 5.0 && res.rte_m < 2.0;
  res.bad = res.rre_deg > 10.0 || res.rte_m > 5.0;
  res.times = times;
  return res;
}

Summary aggregate(const std::vector<RegistrationResult>& results) {
  if (results.empty()) throw Error(ErrorCode::empty_input, "no results to aggregate");
  Summary s;
  s.count = static_cast<int>(results.size());
  const double n = static_cast<double>(s.count);
  int acc = 0, bad = 0;
  for (const RegistrationResult& r : results) {
    s.rte_mean += r.rte_m;
    s.rre_mean += r.rre_deg;
    acc += r.success ? 1 : 0;
    bad += (r.bad || r.failed) ? 1 : 0;
    s.mean_times.project += r.times.project;
    s.mean_times.edges += r.times.edges;
    s.mean_times.describe += r.times.describe;
    s.mean_times.match += r.times.match;
    s.mean_times.pose += r.times.pose;
  }
  s.rte_mean /= n;
  s.rre_mean /= n;
  for (const RegistrationResult& r : results) {
    s.rte_std += (r.rte_m - s.rte_mean) * (r.rte_m - s.rte_mean);
    s.rre_std += (r.rre_deg - s.rre_mean) * (r.rre_deg - s.rre_mean);
  }
  s.rte_std = std::sqrt(s.rte_std / n);
  s.rre_std = std::sqrt(s.rre_std / n);
  s.acc_percent = 100.0 * acc / n;
  s.bad_percent = 100.0 * bad / n;
  s.mean_times.project /= n;
  s.mean_times.edges /= n;
  s.mean_times.describe /= n;
  s.mean_times.match /= n;
  s.mean_times.pose /= n;
  return s;
}

std::string summary_to_json(const Summary& s) {
  nlohmann::json j;
  j["count"] = s.count;
  j["rte_mean_m"] = s.rte_mean;
  j["rte_std_m"] = s.rte_std;
  j["rre_mean_deg"] = s.rre_mean;
  j["rre_std_deg"] = s.rre_std;
  j["acc_percent"] = s.acc_percent;
  j["bad_percent"] = s.bad_percent;
  j["mean_time_s"] = {{"project", s.mean_times.project}, {"edges", s.mean_times.edges},
                      {"describe", s.mean_times.describe}, {"match", s.mean_times.match},
                      {"pose", s.mean_times.pose}, {"total", s.mean_times.total()}};
  return j.dump(2) + "\n";
}

std::string summary_to_table(const Summary& s) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "scenes      %d\n", s.count);
  out << buf;
  std::snprintf(buf, sizeof(buf), "RTE (m)     %.3f +/- %.3f\n", s.rte_mean, s.rte_std);
  out << buf;
  std::snprintf(buf, sizeof(buf), "RRE (deg)   %.3f +/- %.3f\n", s.rre_mean, s.rre_std);
  out << buf;
  std::snprintf(buf, sizeof(buf), "Acc         %.2f%%\n", s.acc_percent);
  out << buf;
  std::snprintf(buf, sizeof(buf), "Bad rate    %.2f%%\n", s.bad_percent);
  out << buf;
  std::snprintf(buf, sizeof(buf), "time/scene  %.4f s\n", s.mean_times.total());
  out << buf;
  return out.str();
}

std::string results_to_csv(const std::vector<RegistrationResult>& results) {
  std::ostringstream out;
  out << "scene,rre,rte,success,bad,time_project,time_edges,time_describe,time_match,"
         "time_pose,time_total\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const RegistrationResult& r = results[i];
    out << i << "," << r.rre_deg << "," << r.rte_m << "," << (r.success ? 1 : 0) << ","
        << ((r.bad || r.failed) ? 1 : 0) << "," << r.times.project << "," << r.times.edges
        << "," << r.times.describe << "," << r.times.match << "," << r.times.pose << ","
        << r.times.total() << "\n";
  }
  return out.str();
}

}  // namespace regforge
