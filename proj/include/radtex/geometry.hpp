#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace radtex {

using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

constexpr double kPi = 3.14159265358979323846;

}  // namespace radtex
