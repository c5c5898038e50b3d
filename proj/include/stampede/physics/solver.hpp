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

#include <span>
#include <vector>

#include "stampede/linalg/block_sparse.hpp"
#include "stampede/physics/collide.hpp"
#include "stampede/physics/scene.hpp"
#include "stampede/util/threading.hpp"

namespace stampede::physics {

// Per-joint torques clamped to [-max_torque, max_torque].
std::vector<double> clamp_torques(std::span<const double> torques,
                                  const std::vector<JointDesc>& joints);

// Hinge angle (rad, wrapped to [-pi, pi]) and its rate.
double joint_angle(const RigidBodyState& parent, const RigidBodyState& child, const JointDesc& j);
double joint_velocity(const RigidBodyState& parent, const RigidBodyState& child, const JointDesc& j);

struct AssembledSystem {
  linalg::BlockSparseSym matrix;  // 6x6 blocks over dynamic bodies
  std::vector<double> rhs;
  std::vector<int> body_to_slot;  // -1 for static bodies
};

// First Newton linearization of the implicit velocity step over the whole
// scene, exposed for testability. step() builds the same system per island.
AssembledSystem assemble_system(const Scene& scene, const std::vector<ContactPoint>& contacts,
                                std::span<const double> torques, const StepConfig& cfg);

// Advances the scene by one implicit step: speculative contacts, non-smooth
// Newton over joint, limit, contact and friction constraints with a Krylov
// inner solve per iteration, then position integration. Islands (joint- or
// contact-connected components) are solved independently, in parallel when a
// pool is given. Diverged islands are rolled back and reported so the caller
// can reset the affected agents.
StepReport step(Scene& scene, std::span<const double> torques, const StepConfig& cfg,
                util::ThreadPool* pool = nullptr);

}  // namespace stampede::physics
