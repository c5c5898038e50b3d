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

#include <doctest.h>

#include <random>
#include <sstream>

#include "stampede/physics/collide.hpp"
#include "stampede/physics/solver.hpp"

using namespace stampede::physics;

namespace {

int add_body(Scene& scene, const Vec3& pos, const Quat& rot, double mass, const Vec3& inertia,
             Shape shape, bool is_static = false) {
  scene.states.push_back({pos, rot, {}, {}});
  scene.inertials.push_back({mass, inertia, is_static});
  scene.shapes.push_back(shape);
  return scene.body_count() - 1;
}

Shape sphere(double r) {
  Shape s;
  s.type = ShapeType::Sphere;
  s.radius = r;
  return s;
}

Shape capsule(double r, double hl) {
  Shape s;
  s.type = ShapeType::Capsule;
  s.radius = r;
  s.half_length = hl;
  return s;
}

Shape box(const Vec3& half) {
  Shape s;
  s.type = ShapeType::Box;
  s.half_extents = half;
  return s;
}

// Single dynamic sphere scene (one agent).
Scene sphere_scene(double height, double radius = 0.5) {
  Scene scene;
  add_body(scene, {0, 0, height}, {}, 1.0, {0.1, 0.1, 0.1}, sphere(radius));
  scene.agents.push_back({0, 1});
  return scene;
}

// Hinge pendulum: static base, slender rod of mass 1 pivoting about world y
// at (0, 0, 1). Rod extends along +x, center of mass 0.25 m from the pivot.
struct PendulumSetup {
  Scene scene;
  int rod;
  double com_offset = 0.25;
  double inertia_perp = 1.0 * 0.5 * 0.5 / 12.0;  // rod length 0.5
};

PendulumSetup make_pendulum() {
  PendulumSetup p;
  p.scene.has_ground_plane = false;
  const int base = add_body(p.scene, {0, 0, 1}, {}, 1.0, {1, 1, 1}, sphere(0.01), true);
  const Quat rod_rot = Quat::from_axis_angle({0, 1, 0}, M_PI / 2);  // body z -> world x
  const int rod = add_body(p.scene, {p.com_offset, 0, 1}, rod_rot, 1.0,
                           {p.inertia_perp, p.inertia_perp, 1e-4}, capsule(0.02, 0.25));
  JointDesc j;
  j.parent = base;
  j.child = rod;
  j.anchor_parent = {0, 0, 0};
  j.anchor_child = {0, 0, -0.25};
  j.axis_parent = {0, 1, 0};
  j.axis_child = {0, 1, 0};
  j.rest_relative = rod_rot;
  j.limit_lo = -3.0;
  j.limit_hi = 3.0;
  j.max_torque = 100;
  p.scene.joints.push_back(j);
  p.scene.agents.push_back({1, 2});
  p.rod = rod;
  return p;
}

StepConfig tight_config(int newton = 2, int kry = 200) {
  StepConfig cfg;
  cfg.newton_iters = newton;
  cfg.krylov_max_iters = kry;
  cfg.krylov_tol = 1e-12;
  return cfg;
}

// Brute-force contact pair oracle: every body pair within margin by direct
// closest-distance computation, ignoring agent structure.
int overlapping_pairs_oracle(const Scene& scene, double margin) {
  int count = 0;
  for (int a = 0; a < scene.body_count(); ++a) {
    for (int b = a + 1; b < scene.body_count(); ++b) {
      const auto& sa = scene.shapes[a];
      const auto& sb = scene.shapes[b];
      if (sa.type != ShapeType::Sphere || sb.type != ShapeType::Sphere) continue;
      const double d = (scene.states[a].position - scene.states[b].position).norm();
      if (d - sa.radius - sb.radius < margin) ++count;
    }
  }
  return count;
}

}  // namespace

TEST_CASE("detect_contacts: sphere near ground") {
  Scene scene = sphere_scene(0.4);
  auto contacts = detect_contacts(scene, 0.0);
  REQUIRE(contacts.size() == 1);
  CHECK(contacts[0].separation == doctest::Approx(-0.1).epsilon(1e-12));
  CHECK(contacts[0].normal.z == doctest::Approx(1.0));
  CHECK(contacts[0].body_b == kStaticBody);
  CHECK(contacts[0].friction == doctest::Approx(1.0));

  Scene high = sphere_scene(10.0);
  CHECK(detect_contacts(high, 0.01).empty());
}

TEST_CASE("detect_contacts: inter-agent pairs obey the flag and match brute force") {
  Scene scene;
  add_body(scene, {0, 0, 5}, {}, 1, {0.1, 0.1, 0.1}, sphere(0.5));
  add_body(scene, {0.6, 0, 5}, {}, 1, {0.1, 0.1, 0.1}, sphere(0.5));
  scene.agents.push_back({0, 1});
  scene.agents.push_back({1, 2});
  scene.inter_agent_collisions = false;
  CHECK(detect_contacts(scene, 0.0).empty());

  scene.inter_agent_collisions = true;
  auto contacts = detect_contacts(scene, 0.0);
  CHECK(static_cast<int>(contacts.size()) == overlapping_pairs_oracle(scene, 0.0));
  REQUIRE(contacts.size() == 1);
  CHECK(contacts[0].separation == doctest::Approx(-0.4));

  // same-agent bodies never collide
  Scene self;
  add_body(self, {0, 0, 5}, {}, 1, {0.1, 0.1, 0.1}, sphere(0.5));
  add_body(self, {0.6, 0, 5}, {}, 1, {0.1, 0.1, 0.1}, sphere(0.5));
  self.agents.push_back({0, 2});
  self.inter_agent_collisions = true;
  CHECK(detect_contacts(self, 0.0).empty());
}

TEST_CASE("detect_contacts: randomized sphere clouds match brute force") {
  std::mt19937_64 eng(99);
  for (int trial = 0; trial < 5; ++trial) {
    Scene scene;
    const int n = 12;
    for (int i = 0; i < n; ++i) {
      const Vec3 pos{std::uniform_real_distribution<double>(-1, 1)(eng),
                     std::uniform_real_distribution<double>(-1, 1)(eng),
                     std::uniform_real_distribution<double>(4, 6)(eng)};
      add_body(scene, pos, {}, 1, {0.1, 0.1, 0.1}, sphere(0.3));
      scene.agents.push_back({i, i + 1});
    }
    scene.inter_agent_collisions = true;
    const double margin = 0.05;
    auto contacts = detect_contacts(scene, margin);
    CHECK(static_cast<int>(contacts.size()) == overlapping_pairs_oracle(scene, margin));
  }
}

TEST_CASE("clamp_torques clamps to joint bounds") {
  std::vector<JointDesc> joints(3);
  for (auto& j : joints) j.max_torque = 10;
  std::vector<double> torques = {15, -15, 3};
  auto out = clamp_torques(torques, joints);
  CHECK(out[0] == 10);
  CHECK(out[1] == -10);
  CHECK(out[2] == 3);

  std::vector<double> wrong = {1, 2};
  CHECK_THROWS_AS(clamp_torques(wrong, joints), std::invalid_argument);
}

TEST_CASE("step: free fall velocity delta is exactly g dt") {
  Scene scene = sphere_scene(100.0);
  StepConfig cfg;
  step(scene, {}, cfg);
  CHECK(scene.states[0].linear_velocity.z == doctest::Approx(-9.8 / 120.0).epsilon(1e-12));
  CHECK(scene.states[0].position.z ==
        doctest::Approx(100.0 - 9.8 / 120.0 / 120.0).epsilon(1e-12));
}

TEST_CASE("step: box resting on ground stays put") {
  Scene scene;
  add_body(scene, {0, 0, 0.5}, {}, 1.0, {1.0 / 6, 1.0 / 6, 1.0 / 6}, box({0.5, 0.5, 0.5}));
  scene.agents.push_back({0, 1});
  StepConfig cfg;
  for (int i = 0; i < 10; ++i) step(scene, {}, cfg);
  const double penetration = 0.5 - scene.states[0].position.z;
  CHECK(std::abs(penetration) <= 1e-3);
  CHECK(std::abs(scene.states[0].linear_velocity.z) <= 1e-3);

  // static equilibrium: total normal impulse carries the weight
  auto report = step(scene, {}, cfg);
  double total_normal = 0;
  for (const auto& c : report.contacts) total_normal += c.normal_impulse;
  CHECK(total_normal == doctest::Approx(9.8 / 120.0).epsilon(0.05));
}

TEST_CASE("step: pendulum matches scalar implicit-Euler oracle") {
  PendulumSetup p = make_pendulum();
  const StepConfig cfg = tight_config();

  // scalar oracle about the pivot: velocity-implicit, position-explicit
  const double inertia_pivot = p.inertia_perp + 1.0 * p.com_offset * p.com_offset;
  double theta = 0, omega = 0;
  const double torque0 = 1.0 * 9.8 * p.com_offset * std::cos(theta);
  omega += cfg.dt * torque0 / inertia_pivot;
  theta += cfg.dt * omega;

  const std::vector<double> zero_torque = {0.0};
  step(p.scene, zero_torque, cfg);
  const double engine_angle = joint_angle(p.scene.states[0], p.scene.states[p.rod],
                                          p.scene.joints[0]);
  CHECK(std::abs(engine_angle - theta) <= 1e-4);

  // a few more steps stay close to the oracle
  for (int i = 0; i < 10; ++i) {
    const double torque = 1.0 * 9.8 * p.com_offset * std::cos(theta);
    omega += cfg.dt * torque / inertia_pivot;
    theta += cfg.dt * omega;
    step(p.scene, zero_torque, cfg);
  }
  const double later = joint_angle(p.scene.states[0], p.scene.states[p.rod], p.scene.joints[0]);
  CHECK(std::abs(later - theta) <= 5e-3);
}

TEST_CASE("step: motor torque accelerates the hinge") {
  PendulumSetup p = make_pendulum();
  p.scene.gravity = {0, 0, -9.8};
  const StepConfig cfg = tight_config();
  const std::vector<double> five = {5.0};
  step(p.scene, five, cfg);
  const double rate = joint_velocity(p.scene.states[0], p.scene.states[p.rod], p.scene.joints[0]);
  // gravity alone gives 0.245 rad/s; torque adds ~ 5 * dt / I_pivot
  CHECK(rate > 0.245);
}

TEST_CASE("assemble_system: disconnected agents give block-diagonal systems") {
  Scene scene;
  add_body(scene, {0, 0, 5}, {}, 1, {0.1, 0.1, 0.1}, sphere(0.2));
  add_body(scene, {3, 0, 5}, {}, 1, {0.1, 0.1, 0.1}, sphere(0.2));
  scene.agents.push_back({0, 1});
  scene.agents.push_back({1, 2});
  auto sys = assemble_system(scene, {}, {}, StepConfig{});
  CHECK(sys.matrix.find_block(0, 0) != nullptr);
  CHECK(sys.matrix.find_block(1, 1) != nullptr);
  CHECK(sys.matrix.find_block(0, 1) == nullptr);
  CHECK(sys.matrix.find_block(1, 0) == nullptr);
}

TEST_CASE("assemble_system: one hinge pair couples exactly one block pair") {
  PendulumSetup p = make_pendulum();
  // add an unrelated free body
  add_body(p.scene, {5, 5, 5}, {}, 1, {0.1, 0.1, 0.1}, sphere(0.2));
  p.scene.agents.push_back({2, 3});
  const std::vector<double> zt = {0.0};
  auto sys = assemble_system(p.scene, {}, zt, tight_config());
  // base is static: slots are rod=0, free=1
  CHECK(sys.body_to_slot[0] == -1);
  const int rod_slot = sys.body_to_slot[p.rod];
  const int free_slot = sys.body_to_slot[2];
  CHECK(sys.matrix.find_block(rod_slot, rod_slot) != nullptr);
  CHECK(sys.matrix.find_block(free_slot, free_slot) != nullptr);
  CHECK(sys.matrix.find_block(rod_slot, free_slot) == nullptr);

  // two-dynamic-body hinge has exactly one off-diagonal pair
  Scene chain;
  chain.has_ground_plane = false;
  const int b0 = add_body(chain, {0, 0, 2}, {}, 1, {0.1, 0.1, 0.1}, capsule(0.05, 0.2));
  const int b1 = add_body(chain, {0, 0, 1.5}, {}, 1, {0.1, 0.1, 0.1}, capsule(0.05, 0.2));
  JointDesc j;
  j.parent = b0;
  j.child = b1;
  j.anchor_parent = {0, 0, -0.25};
  j.anchor_child = {0, 0, 0.25};
  j.axis_parent = j.axis_child = {0, 1, 0};
  chain.joints.push_back(j);
  chain.agents.push_back({0, 2});
  const std::vector<double> zt2 = {0.0};
  auto sys2 = assemble_system(chain, {}, zt2, StepConfig{});
  CHECK(sys2.matrix.find_block(0, 1) != nullptr);
  CHECK(sys2.matrix.find_block(1, 0) != nullptr);
}

TEST_CASE("assemble_system: matrix is symmetric on random scenes") {
  std::mt19937_64 eng(31);
  std::uniform_real_distribution<double> unit(-1, 1);
  for (int trial = 0; trial < 5; ++trial) {
    Scene scene;
    scene.has_ground_plane = true;
    const int k = 4;
    for (int i = 0; i < k; ++i) {
      const Vec3 pos{unit(eng) * 2, unit(eng) * 2, 0.3 + 0.5 * i};
      Quat q = Quat::from_axis_angle(Vec3{unit(eng), unit(eng), unit(eng)}.normalized(),
                                     unit(eng));
      const int b = add_body(scene, pos, q.normalized(), 0.5 + std::abs(unit(eng)),
                             {0.1, 0.12, 0.08}, capsule(0.1, 0.2));
      scene.states[b].linear_velocity = {unit(eng), unit(eng), unit(eng)};
      scene.states[b].angular_velocity = {unit(eng), unit(eng), unit(eng)};
    }
    for (int i = 0; i + 1 < k; ++i) {
      JointDesc j;
      j.parent = i;
      j.child = i + 1;
      j.anchor_parent = {0, 0, -0.3};
      j.anchor_child = {0, 0, 0.3};
      j.axis_parent = j.axis_child = {0, 1, 0};
      j.rest_relative = scene.states[i].orientation.conjugate() * scene.states[i + 1].orientation;
      scene.joints.push_back(j);
    }
    scene.agents.push_back({0, k});
    auto contacts = detect_contacts(scene, 0.02);
    std::vector<double> torques(scene.joints.size(), 1.0);
    auto sys = assemble_system(scene, contacts, torques, StepConfig{});
    auto dense = sys.matrix.to_dense();
    const int n = sys.matrix.dim();
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c)
        CHECK(std::abs(dense[r * n + c] - dense[c * n + r]) <= 1e-12);
  }
}

TEST_CASE("friction cone holds for a pushed box") {
  for (double push : {5.0, 15.0, 40.0}) {
    Scene scene;
    add_body(scene, {0, 0, 0.5}, {}, 1.0, {1.0 / 6, 1.0 / 6, 1.0 / 6}, box({0.5, 0.5, 0.5}));
    scene.agents.push_back({0, 1});
    StepConfig cfg;
    for (int i = 0; i < 60; ++i) step(scene, {}, cfg);  // settle
    for (int i = 0; i < 60; ++i) {
      scene.ensure_load_buffers();
      scene.external_force[0] = {push, 0, 0};
      auto report = step(scene, {}, cfg);
      for (const auto& c : report.contacts) {
        CHECK(c.normal_impulse >= -1e-9);
        const double cone = c.geom.friction * c.normal_impulse;
        CHECK(c.tangential_impulse.norm() <= cone * (1 + 1e-9) + 1e-12);
      }
    }
    // strong push slides, weak push creeps slower than 1 cm/s
    if (push == 40.0) CHECK(scene.states[0].linear_velocity.x > 0.05);
    if (push == 5.0) CHECK(scene.states[0].linear_velocity.x < 0.01);
  }
}

TEST_CASE("joint limits are respected under saturating torque") {
  PendulumSetup p = make_pendulum();
  p.scene.joints[0].limit_lo = -0.5;
  p.scene.joints[0].limit_hi = 0.5;
  StepConfig cfg = tight_config(4, 200);
  const std::vector<double> drive = {100.0};
  const std::vector<double> reverse = {-100.0};
  for (int i = 0; i < 240; ++i) {
    step(p.scene, drive, cfg);  // drive hard into the upper limit
    const double angle = joint_angle(p.scene.states[0], p.scene.states[p.rod], p.scene.joints[0]);
    CHECK(angle <= 0.5 + 1e-3);
    CHECK(angle >= -0.5 - 1e-3);
  }
  for (int i = 0; i < 240; ++i) {
    step(p.scene, reverse, cfg);
    const double angle = joint_angle(p.scene.states[0], p.scene.states[p.rod], p.scene.joints[0]);
    CHECK(angle >= -0.5 - 1e-3);
  }
}

TEST_CASE("energy never grows for a free swinging chain") {
  Scene scene;
  scene.has_ground_plane = false;
  const int links = 3;
  const int base = add_body(scene, {0, 0, 3}, {}, 1, {1, 1, 1}, sphere(0.01), true);
  int prev = base;
  for (int i = 0; i < links; ++i) {
    const Quat rot = Quat::from_axis_angle({0, 1, 0}, M_PI / 2);
    const int b = add_body(scene, {0.25 + 0.5 * i, 0, 3}, rot, 1.0, {0.02, 0.02, 1e-4},
                           capsule(0.02, 0.24));
    JointDesc j;
    j.parent = prev;
    j.child = b;
    j.anchor_parent = prev == base ? Vec3{0, 0, 0} : Vec3{0, 0, 0.25};
    j.anchor_child = {0, 0, -0.25};
    j.axis_parent = j.axis_child = {0, 1, 0};
    j.rest_relative = scene.states[prev].orientation.conjugate() * scene.states[b].orientation;
    j.max_torque = 50;
    scene.joints.push_back(j);
    prev = b;
  }
  scene.agents.push_back({1, 1 + links});

  auto energy = [&] {
    double e = 0;
    for (int b = 1; b <= links; ++b) {
      const auto& s = scene.states[b];
      const auto& bi = scene.inertials[b];
      e += 0.5 * bi.mass * s.linear_velocity.norm2();
      const Mat3 r = s.orientation.to_matrix();
      const Mat3 iw = r * Mat3::diag(bi.inertia_diag) * r.transposed();
      e += 0.5 * s.angular_velocity.dot(iw * s.angular_velocity);
      e += bi.mass * 9.8 * s.position.z;
    }
    return e;
  };

  const double e0 = energy();
  StepConfig cfg = tight_config(2, 100);
  std::vector<double> zeros(links, 0.0);
  for (int i = 0; i < 120; ++i) {
    step(scene, zeros, cfg);
    CHECK(energy() <= e0 + 1e-3 * (std::abs(e0) + 1.0));
  }
}

TEST_CASE("batched stepping equals separate single-agent scenes") {
  // three 2-link agents falling onto the ground with motor torques
  auto build = [&](const std::vector<int>& which) {
    Scene scene;
    for (int idx : which) {
      const double ox = 2.0 * idx;
      const int start = scene.body_count();
      const Quat rot = Quat::from_axis_angle({0, 1, 0}, M_PI / 2);
      add_body(scene, {ox, 0, 0.8}, rot, 1.0, {0.02, 0.02, 1e-3}, capsule(0.05, 0.2));
      add_body(scene, {ox + 0.5, 0, 0.8}, rot, 0.7, {0.015, 0.015, 1e-3}, capsule(0.04, 0.2));
      JointDesc j;
      j.parent = start;
      j.child = start + 1;
      j.anchor_parent = {0, 0, 0.25};
      j.anchor_child = {0, 0, -0.25};
      j.axis_parent = j.axis_child = {0, 1, 0};
      j.max_torque = 20;
      scene.joints.push_back(j);
      scene.agents.push_back({start, start + 2});
    }
    return scene;
  };

  const int M = 3, T = 50;
  Scene batched = build({0, 1, 2});
  std::vector<Scene> singles;
  for (int i = 0; i < M; ++i) singles.push_back(build({i}));

  StepConfig cfg;
  auto torque_for = [](int agent, int t) { return 3.0 * std::sin(0.1 * t + agent); };

  stampede::util::ThreadPool pool(2);
  for (int t = 0; t < T; ++t) {
    std::vector<double> torques(M);
    for (int a = 0; a < M; ++a) torques[a] = torque_for(a, t);
    step(batched, torques, cfg, &pool);
    for (int a = 0; a < M; ++a) {
      std::vector<double> single_torque = {torque_for(a, t)};
      step(singles[a], single_torque, cfg);
    }
  }

  for (int a = 0; a < M; ++a) {
    for (int b = 0; b < 2; ++b) {
      const auto& sb = batched.states[2 * a + b];
      const auto& ss = singles[a].states[b];
      CHECK(std::abs(sb.position.x - ss.position.x) <= 1e-6);
      CHECK(std::abs(sb.position.y - ss.position.y) <= 1e-6);
      CHECK(std::abs(sb.position.z - ss.position.z) <= 1e-6);
      CHECK(std::abs(sb.linear_velocity.x - ss.linear_velocity.x) <= 1e-6);
      CHECK(std::abs(sb.orientation.w - ss.orientation.w) <= 1e-6);
    }
  }
}

TEST_CASE("scene snapshot round-trips") {
  Scene scene = sphere_scene(3.0);
  StepConfig cfg;
  for (int i = 0; i < 5; ++i) step(scene, {}, cfg);

  std::stringstream buf;
  scene.save_snapshot(buf);
  Scene restored = sphere_scene(99.0);
  restored.load_snapshot(buf);
  CHECK(restored.states[0].position.z == scene.states[0].position.z);
  CHECK(restored.states[0].linear_velocity.z == scene.states[0].linear_velocity.z);

  std::stringstream buf2;
  scene.save_snapshot(buf2);
  Scene wrong;
  add_body(wrong, {0, 0, 1}, {}, 1, {1, 1, 1}, sphere(0.1));
  add_body(wrong, {0, 0, 2}, {}, 1, {1, 1, 1}, sphere(0.1));
  CHECK_THROWS(wrong.load_snapshot(buf2));
}

TEST_CASE("scene validation catches bad structure") {
  Scene scene = sphere_scene(1.0);
  CHECK_NOTHROW(scene.validate());
  scene.gravity = {0, 0, -9.81};
  CHECK_THROWS_AS(scene.validate(), std::invalid_argument);
  scene.gravity = {0, 0, -9.8};
  scene.agents.push_back({0, 1});  // overlap
  CHECK_THROWS_AS(scene.validate(), std::invalid_argument);
}

TEST_CASE("step rejects wrong torque count") {
  Scene scene = sphere_scene(1.0);
  std::vector<double> torques = {1.0};
  CHECK_THROWS_AS(step(scene, torques, StepConfig{}), std::invalid_argument);
}
