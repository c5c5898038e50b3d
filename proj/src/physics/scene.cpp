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

#include "stampede/physics/scene.hpp"

#include <cmath>
#include <stdexcept>

#include "stampede/util/binio.hpp"

namespace stampede::physics {

namespace {
constexpr std::uint32_t kSnapshotMagic = 0x504e5353;  // "SSNP"
constexpr std::uint32_t kSnapshotVersion = 1;
}  // namespace

int Scene::agent_of(int body) const {
  for (std::size_t i = 0; i < agents.size(); ++i) {
    if (body >= agents[i].begin && body < agents[i].end) return static_cast<int>(i);
  }
  return -1;
}

void Scene::validate() const {
  const int n = body_count();
  if (static_cast<int>(inertials.size()) != n || static_cast<int>(shapes.size()) != n)
    throw std::invalid_argument("scene: states/inertials/shapes size mismatch");
  if (std::abs(gravity.norm() - 9.8) > 1e-9)
    throw std::invalid_argument("scene: gravity magnitude must be 9.8");

  std::vector<char> covered(n, 0);
  for (const auto& r : agents) {
    if (r.begin < 0 || r.end > n || r.begin >= r.end)
      throw std::invalid_argument("scene: bad agent range");
    for (int b = r.begin; b < r.end; ++b) {
      if (covered[b]) throw std::invalid_argument("scene: overlapping agent ranges");
      covered[b] = 1;
    }
  }
  for (int b = 0; b < n; ++b) {
    if (!inertials[b].is_static && !covered[b])
      throw std::invalid_argument("scene: dynamic body not covered by an agent range");
    if (!inertials[b].is_static &&
        (inertials[b].mass <= 0 || inertials[b].inertia_diag.x <= 0 ||
         inertials[b].inertia_diag.y <= 0 || inertials[b].inertia_diag.z <= 0))
      throw std::invalid_argument("scene: dynamic body with nonpositive mass or inertia");
  }
  for (const auto& j : joints) {
    if (j.parent < 0 || j.parent >= n || j.child < 0 || j.child >= n || j.parent == j.child)
      throw std::invalid_argument("scene: joint body index out of range");
    if (j.limit_lo >= j.limit_hi) throw std::invalid_argument("scene: joint limits out of order");
    if (std::abs(j.axis_parent.norm() - 1.0) > 1e-9 || std::abs(j.axis_child.norm() - 1.0) > 1e-9)
      throw std::invalid_argument("scene: joint axis must be unit length");
    if (j.max_torque <= 0) throw std::invalid_argument("scene: joint max_torque must be positive");
  }
}

void Scene::ensure_load_buffers() {
  external_force.resize(states.size());
  external_torque.resize(states.size());
}

void Scene::clear_external_loads() {
  for (auto& f : external_force) f = Vec3{};
  for (auto& t : external_torque) t = Vec3{};
}

void Scene::save_snapshot(std::ostream& os) const {
  util::BinWriter w(os);
  w.u32(kSnapshotMagic);
  w.u32(kSnapshotVersion);
  w.u64(states.size());
  for (const auto& s : states) {
    w.f64(s.position.x); w.f64(s.position.y); w.f64(s.position.z);
    w.f64(s.orientation.w); w.f64(s.orientation.x); w.f64(s.orientation.y); w.f64(s.orientation.z);
    w.f64(s.linear_velocity.x); w.f64(s.linear_velocity.y); w.f64(s.linear_velocity.z);
    w.f64(s.angular_velocity.x); w.f64(s.angular_velocity.y); w.f64(s.angular_velocity.z);
  }
}

void Scene::load_snapshot(std::istream& is) {
  util::BinReader r(is);
  if (r.u32() != kSnapshotMagic) throw std::runtime_error("scene snapshot: bad magic");
  if (r.u32() != kSnapshotVersion) throw std::runtime_error("scene snapshot: unsupported version");
  if (r.u64() != states.size()) throw std::runtime_error("scene snapshot: body count mismatch");
  for (auto& s : states) {
    s.position = {r.f64(), r.f64(), r.f64()};
    s.orientation = {r.f64(), r.f64(), r.f64(), r.f64()};
    s.linear_velocity = {r.f64(), r.f64(), r.f64()};
    s.angular_velocity = {r.f64(), r.f64(), r.f64()};
  }
}

}  // namespace stampede::physics
