#pragma once

#include <string>
#include <vector>

#include "regforge/types.hpp"

namespace regforge {

enum class EulerConvention { xyz, zyx };  // intrinsic

struct EulerAngles {
  double x = 0.0, y = 0.0, z = 0.0;  // radians
  bool gimbal_lock = false;
};

EulerAngles euler_decompose(const Mat3& r, EulerConvention conv = EulerConvention::xyz);

// Sum of absolute Euler angles of R_gt^-1 * R_est, degrees.
double rre(const Mat3& r_gt, const Mat3& r_est,
           EulerConvention conv = EulerConvention::xyz);

double rte(const Vec3& t_gt, const Vec3& t_est);

struct StageTimes {
  double project = 0.0;
  double edges = 0.0;
  double describe = 0.0;
  double match = 0.0;
  double pose = 0.0;

  double total() const { return project + edges + describe + match + pose; }
};

struct RegistrationResult {
  double rre_deg = 0.0;
  double rte_m = 0.0;
  bool success = false;  // RRE < 5 deg and RTE < 2 m
  bool bad = false;      // RRE > 10 deg or RTE > 5 m
  bool failed = false;   // pipeline error; counts as bad, never success
  StageTimes times;
};

RegistrationResult make_result(const RigidTransform& gt, const RigidTransform& est,
                               const StageTimes& times,
                               EulerConvention conv = EulerConvention::xyz);

struct Summary {
  double rte_mean = 0.0, rte_std = 0.0;   // population std
  double rre_mean = 0.0, rre_std = 0.0;
  double acc_percent = 0.0;
  double bad_percent = 0.0;
  StageTimes mean_times;
  int count = 0;
};

Summary aggregate(const std::vector<RegistrationResult>& results);

std::string summary_to_json(const Summary& s);
std::string summary_to_table(const Summary& s);
std::string results_to_csv(const std::vector<RegistrationResult>& results);

}  // namespace regforge
