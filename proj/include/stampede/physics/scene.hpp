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

#include <iosfwd>
#include <vector>

#include "stampede/physics/types.hpp"

namespace stampede::physics {

// [begin, end) body index range owned by one agent.
struct AgentRange {
  int begin = 0;
  int end = 0;
};

// All bodies, joints and static geometry of every agent in one simulation.
struct Scene {
  std::vector<RigidBodyState> states;
  std::vector<BodyInertial> inertials;
  std::vector<Shape> shapes;
  std::vector<JointDesc> joints;

  bool has_ground_plane = true;
  std::vector<StaticBox> static_boxes;
  Vec3 gravity{0, 0, -9.8};

  std::vector<AgentRange> agents;
  bool inter_agent_collisions = false;

  // Accumulated external loads for the next step; cleared by step().
  std::vector<Vec3> external_force;
  std::vector<Vec3> external_torque;

  int body_count() const { return static_cast<int>(states.size()); }
  int agent_of(int body) const;

  // Checks the structural invariants: agent ranges disjoint and covering,
  // gravity magnitude 9.8, joint indices valid, unit axes, positive masses.
  void validate() const;

  void ensure_load_buffers();
  void clear_external_loads();

  // Versioned little-endian snapshot of the dynamic state (body poses and
  // velocities) for checkpoint/replay. Structure is not serialized; loading
  // into a structurally different scene is rejected.
  void save_snapshot(std::ostream& os) const;
  void load_snapshot(std::istream& is);
};

}  // namespace stampede::physics
