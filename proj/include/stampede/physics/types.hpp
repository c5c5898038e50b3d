// Copyright 2026 The Stampede Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <vector>

#include "stampede/linalg/vec.hpp"

namespace stampede::physics {

using linalg::Mat3;
using linalg::Quat;
using linalg::Vec3;

// Maximal-coordinate state of one rigid body. Velocities are world frame.
struct RigidBodyState {
  Vec3 position;
  Quat orientation;
  Vec3 linear_velocity;
  Vec3 angular_velocity;

  bool finite() const {
    return position.finite() && orientation.finite() && linear_velocity.finite() &&
           angular_velocity.finite();
  }
};

struct BodyInertial {
  double mass = 1.0;
  Vec3 inertia_diag{1, 1, 1};  // principal body frame
  bool is_static = false;
};

enum class ShapeType { Sphere, Capsule, Box };

// Collision shape attached to a body. Capsule axis is the local z axis.
struct Shape {
  ShapeType type = ShapeType::Sphere;
  double radius = 0.1;
  double half_length = 0;  // capsule cylinder half length
  Vec3 half_extents;       // box
  Vec3 local_pos;
  Quat local_rot;
};

// Hinge joint. Frames are body-local; axes point the same way in world
// space at the reference configuration, where the angle is zero.
struct JointDesc {
  int parent = -1;
  int child = -1;
  Vec3 anchor_parent;
  Vec3 anchor_child;
  Vec3 axis_parent{0, 0, 1};
  Vec3 axis_child{0, 0, 1};
  Quat rest_relative;  // parent->child orientation at angle zero
  double limit_lo = -3.1;
  double limit_hi = 3.1;
  double max_torque = 1.0;
};

// body_b == kStaticBody means ground plane or a terrain box.
inline constexpr int kStaticBody = -1;

struct ContactPoint {
  int body_a = 0;
  int body_b = kStaticBody;
  Vec3 point;
  Vec3 normal;  // unit, from b to a
  double separation = 0;  // negative = penetration
  double friction = 1.0;
};

// Axis-aligned-in-z box obstacle, rotated by yaw, resting in world space.
struct StaticBox {
  Vec3 center;
  Vec3 half_extents;
  double yaw = 0;
};

struct StepConfig {
  double dt = 1.0 / 120.0;
  int newton_iters = 4;
  double krylov_tol = 1e-6;
  int krylov_max_iters = 16;
  double contact_margin = 0.02;  // speculative detection margin (m)
  double baumgarte = 0.2;        // per-step position error correction fraction
  // Regularization (inverse compliance) per constraint type, dimensionless;
  // each row's weight is hardness x effective mass.
  double joint_hardness = 3000;
  double contact_hardness = 300;
  double limit_hardness = 6000;
  double friction_smoothing = 1e-3;  // eps_f (m/s): tangential speed scale of the
                                     // saturated Coulomb law
  double limit_activation = 0.05;    // rad before a limit at which its row activates
};

struct SolvedContact {
  ContactPoint geom;
  double normal_impulse = 0;
  Vec3 tangential_impulse;
};

struct StepReport {
  std::vector<SolvedContact> contacts;
  int newton_iterations = 0;
  int krylov_iterations = 0;
  std::vector<int> failed_agents;  // islands that diverged; their bodies were restored
};

}  // namespace stampede::physics
