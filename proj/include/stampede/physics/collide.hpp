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

#include "stampede/physics/scene.hpp"

namespace stampede::physics {

// Speculative contact detection: returns every contact whose separation is
// below margin. Bodies of the same agent never collide with each other
// (foot-ground pairs are body-vs-static and unaffected); pairs across
// agents are generated only when scene.inter_agent_collisions is set.
// Output order is deterministic: per-body static contacts in body order,
// then inter-agent pairs sorted by body index.
std::vector<ContactPoint> detect_contacts(const Scene& scene, double margin);

// Terrain height at a world (x, y): top of the highest static box covering
// the point, else ground plane height 0.
double terrain_height(const Scene& scene, double x, double y);

}  // namespace stampede::physics
