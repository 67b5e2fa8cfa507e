#pragma once

#include <complex>

#include <Eigen/Dense>

namespace spinres {

using Real = double;
using Complex = std::complex<double>;

template <typename Scalar>
using Vec3T = Eigen::Matrix<Scalar, 3, 1>;
using Vec3 = Vec3T<Real>;

using VecX = Eigen::VectorXd;
using CVecX = Eigen::VectorXcd;
using MatX = Eigen::MatrixXd;
using CMatX = Eigen::MatrixXcd;
using Vec2c = Eigen::Vector2cd;
using Mat2c = Eigen::Matrix2cd;

// Qubit branch tag. `ground` is the lower level (effective spin aligned with
// the field, S_z = +1/2); `excited` is anti-aligned.
enum class QubitBranch { ground, excited };

inline constexpr int branch_sign(QubitBranch b) {
  return b == QubitBranch::ground ? +1 : -1;
}

inline const char* branch_name(QubitBranch b) {
  return b == QubitBranch::ground ? "ground" : "excited";
}

}  // namespace spinres
