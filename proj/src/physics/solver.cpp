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

#include "stampede/physics/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

#include "stampede/linalg/krylov.hpp"

namespace stampede::physics {

namespace {

using linalg::BlockSparseSym;
using linalg::KrylovOptions;

enum RowKind : int { kEquality = 0, kUnilateral = 1, kFriction = 2 };

// One scalar constraint row: rate = ja . u_a + jb . u_b with u = (v, w).
// The implicit impulse law is p = proj(reg * (bias - rate)), so the row
// contributes reg * J^T J to the system matrix and reg * bias * J^T to the
// right-hand side while active.
struct Row {
  int a = kStaticBody;
  int b = kStaticBody;
  double ja[6] = {0, 0, 0, 0, 0, 0};
  double jb[6] = {0, 0, 0, 0, 0, 0};
  double bias = 0;
  double reg = 0;          // regularization weight D (kg)
  int kind = kEquality;
  bool active = true;      // refreshed per Newton iteration for unilateral/friction
  int contact = -1;        // SolvedContact slot for contact normal rows
  int friction_pair = -1;  // index of the first of the two paired friction rows
};

struct BodyDyn {
  double inv_mass = 0;
  Mat3 inertia_world;
  Mat3 inv_inertia_world;
  double vfree[6] = {0, 0, 0, 0, 0, 0};
};

double row_dot(const double* j, const double* u) {
  return j[0] * u[0] + j[1] * u[1] + j[2] * u[2] + j[3] * u[3] + j[4] * u[4] + j[5] * u[5];
}

void pack6(double* j, const Vec3& lin, const Vec3& ang) {
  j[0] = lin.x; j[1] = lin.y; j[2] = lin.z;
  j[3] = ang.x; j[4] = ang.y; j[5] = ang.z;
}

// 1 / (J M^-1 J^T); scales each row's regularization so hardness is
// dimensionless and conditioning does not depend on body masses.
double effective_mass(const Row& row, const Scene& scene, const std::vector<BodyDyn>& dyn) {
  double w = 0;
  for (const auto& [body, j] : {std::pair<int, const double*>{row.a, row.ja},
                                std::pair<int, const double*>{row.b, row.jb}}) {
    if (body == kStaticBody || scene.inertials[body].is_static) continue;
    const BodyDyn& d = dyn[body];
    w += d.inv_mass * (j[0] * j[0] + j[1] * j[1] + j[2] * j[2]);
    const Vec3 ang{j[3], j[4], j[5]};
    w += ang.dot(d.inv_inertia_world * ang);
  }
  return w > 1e-12 ? 1.0 / w : 0.0;
}

// Speculative unilateral bias: Baumgarte pushout when violating, approach
// budget (reach zero gap at end of step, no sooner) while separated.
double unilateral_bias(double gap, double beta, double dt) {
  if (gap < 0) return -(beta / dt) * gap;
  return -gap / dt;
}

struct RowSet {
  std::vector<Row> rows;
  std::vector<SolvedContact> contacts;
};

// Builds every candidate row at the current positions. joint_ids selects a
// subset of scene.joints (an island); activity of unilateral rows and the
// friction weights are decided per Newton iteration from the velocity
// iterate, not here.
RowSet build_rows(const Scene& scene, const std::vector<int>& joint_ids,
                  const std::vector<ContactPoint>& contacts, const std::vector<BodyDyn>& dyn,
                  const StepConfig& cfg) {
  RowSet set;
  const double beta = cfg.baumgarte;
  const double dt = cfg.dt;

  for (int jid : joint_ids) {
    const JointDesc& joint = scene.joints[jid];
    const RigidBodyState& sp = scene.states[joint.parent];
    const RigidBodyState& sc = scene.states[joint.child];
    const Vec3 ra = sp.orientation.rotate(joint.anchor_parent);
    const Vec3 rb = sc.orientation.rotate(joint.anchor_child);
    const Vec3 cpos = (sc.position + rb) - (sp.position + ra);

    // 3 positional rows: anchor points coincide.
    const Vec3 axes[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int k = 0; k < 3; ++k) {
      Row r;
      r.a = joint.parent;
      r.b = joint.child;
      pack6(r.ja, -axes[k], -(ra.cross(axes[k])));
      pack6(r.jb, axes[k], rb.cross(axes[k]));
      r.bias = -(beta / dt) * (&cpos.x)[k];
      r.reg = cfg.joint_hardness * effective_mass(r, scene, dyn);
      set.rows.push_back(r);
    }

    // 2 angular rows keep the child axis aligned with the parent axis.
    const Vec3 aw = sp.orientation.rotate(joint.axis_parent);
    const Vec3 bw = sc.orientation.rotate(joint.axis_child);
    const Vec3 ref = std::abs(aw.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    const Vec3 t1 = aw.cross(ref).normalized();
    const Vec3 t2 = aw.cross(t1);
    const Vec3 err = aw.cross(bw);
    for (const Vec3& t : {t1, t2}) {
      Row r;
      r.a = joint.parent;
      r.b = joint.child;
      pack6(r.ja, Vec3{}, -t);
      pack6(r.jb, Vec3{}, t);
      r.bias = -(beta / dt) * t.dot(err);
      r.reg = cfg.joint_hardness * effective_mass(r, scene, dyn);
      set.rows.push_back(r);
    }

    // Joint limits: a row exists while the angle is near a bound or the
    // current rate would cross it within ~1.5 steps (speculative).
    const double angle = joint_angle(sp, sc, joint);
    const double rate = joint_velocity(sp, sc, joint);
    const Vec3 axis_w = sc.orientation.rotate(joint.axis_child);
    const double lo_gap = angle - joint.limit_lo;
    const double hi_gap = joint.limit_hi - angle;
    const double travel = 1.5 * std::abs(rate) * dt;
    if (lo_gap < std::max(cfg.limit_activation, travel)) {
      Row r;
      r.a = joint.parent;
      r.b = joint.child;
      pack6(r.ja, Vec3{}, -axis_w);
      pack6(r.jb, Vec3{}, axis_w);
      r.bias = unilateral_bias(lo_gap, beta, dt);
      r.reg = cfg.limit_hardness * effective_mass(r, scene, dyn);
      r.kind = kUnilateral;
      set.rows.push_back(r);
    }
    if (hi_gap < std::max(cfg.limit_activation, travel)) {
      Row r;
      r.a = joint.parent;
      r.b = joint.child;
      pack6(r.ja, Vec3{}, axis_w);
      pack6(r.jb, Vec3{}, -axis_w);
      r.bias = unilateral_bias(hi_gap, beta, dt);
      r.reg = cfg.limit_hardness * effective_mass(r, scene, dyn);
      r.kind = kUnilateral;
      set.rows.push_back(r);
    }
  }

  set.contacts.reserve(contacts.size());
  for (const auto& c : contacts) {
    const int slot = static_cast<int>(set.contacts.size());
    set.contacts.push_back(SolvedContact{c, 0.0, Vec3{}});

    const Vec3 ra = c.point - scene.states[c.body_a].position;
    const Vec3 rb = c.body_b == kStaticBody ? Vec3{} : c.point - scene.states[c.body_b].position;

    Row normal_row;
    normal_row.a = c.body_a;
    normal_row.b = c.body_b;
    pack6(normal_row.ja, c.normal, ra.cross(c.normal));
    if (c.body_b != kStaticBody) pack6(normal_row.jb, -c.normal, -(rb.cross(c.normal)));
    normal_row.bias = unilateral_bias(c.separation, beta, dt);
    normal_row.reg = cfg.contact_hardness * effective_mass(normal_row, scene, dyn);
    normal_row.kind = kUnilateral;
    normal_row.contact = slot;
    normal_row.friction_pair = static_cast<int>(set.rows.size()) + 1;
    set.rows.push_back(normal_row);

    const Vec3 ref = std::abs(c.normal.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    const Vec3 t1 = c.normal.cross(ref).normalized();
    const Vec3 t2 = c.normal.cross(t1);
    for (const Vec3& t : {t1, t2}) {
      Row f;
      f.a = c.body_a;
      f.b = c.body_b;
      pack6(f.ja, t, ra.cross(t));
      if (c.body_b != kStaticBody) pack6(f.jb, -t, -(rb.cross(t)));
      f.kind = kFriction;
      f.contact = slot;
      f.active = false;
      set.rows.push_back(f);
    }
  }
  return set;
}

// Implicit gyroscopic update: two Newton steps on
// I w' + h w' x (I w') = I w + h tau. Never injects rotational energy.
Vec3 implicit_gyro(const Mat3& inertia, const Vec3& omega, const Vec3& torque, double dt) {
  Vec3 w = omega;
  const Vec3 momentum = inertia * omega + torque * dt;
  for (int it = 0; it < 2; ++it) {
    const Vec3 iw = inertia * w;
    const Vec3 f = iw + w.cross(iw) * dt - momentum;
    const Mat3 jac = inertia + (Mat3::skew(w) * inertia + Mat3::skew(iw) * (-1.0)) * dt;
    w = w - jac.inverse() * f;
  }
  return w.finite() ? w : omega;
}

// Per-body mass data and unconstrained end-of-step velocity (gravity,
// external loads, joint motor torques, implicit gyroscopic term).
std::vector<BodyDyn> body_dynamics(const Scene& scene, std::span<const double> joint_torques,
                                   const StepConfig& cfg) {
  const int n = scene.body_count();
  std::vector<BodyDyn> dyn(n);
  std::vector<Vec3> torque(n);
  if (!scene.external_torque.empty()) {
    for (int b = 0; b < n; ++b) torque[b] = scene.external_torque[b];
  }
  for (std::size_t j = 0; j < scene.joints.size(); ++j) {
    const JointDesc& joint = scene.joints[j];
    const Vec3 axis_w = scene.states[joint.parent].orientation.rotate(joint.axis_parent);
    torque[joint.child] += axis_w * joint_torques[j];
    torque[joint.parent] -= axis_w * joint_torques[j];
  }
  for (int b = 0; b < n; ++b) {
    const BodyInertial& bi = scene.inertials[b];
    if (bi.is_static) continue;
    BodyDyn& d = dyn[b];
    d.inv_mass = 1.0 / bi.mass;
    const Mat3 r = scene.states[b].orientation.to_matrix();
    d.inertia_world = r * Mat3::diag(bi.inertia_diag) * r.transposed();
    const Vec3 inv_diag{1.0 / bi.inertia_diag.x, 1.0 / bi.inertia_diag.y, 1.0 / bi.inertia_diag.z};
    d.inv_inertia_world = r * Mat3::diag(inv_diag) * r.transposed();

    Vec3 force = scene.gravity * bi.mass;
    if (!scene.external_force.empty()) force += scene.external_force[b];
    const Vec3 v = scene.states[b].linear_velocity + force * (cfg.dt * d.inv_mass);
    const Vec3 w = implicit_gyro(d.inertia_world, scene.states[b].angular_velocity, torque[b], cfg.dt);
    d.vfree[0] = v.x; d.vfree[1] = v.y; d.vfree[2] = v.z;
    d.vfree[3] = w.x; d.vfree[4] = w.y; d.vfree[5] = w.z;
  }
  return dyn;
}

// Damping weight of the smooth saturated Coulomb law
// p_t = -mu p_n s / sqrt(1 + s^2) vhat with s = |v_t| / eps_f, so the
// tangential impulse magnitude never exceeds mu p_n.
double friction_weight(double mu, double normal_impulse, double vt_norm, double eps_f) {
  const double s = vt_norm / eps_f;
  return mu * normal_impulse / (eps_f * std::sqrt(1.0 + s * s));
}

const double* velocity_of(const std::vector<int>& body_slot, std::span<const double> u, int body) {
  static const double kZeros[6] = {0, 0, 0, 0, 0, 0};
  const int slot = body < 0 ? -1 : body_slot[body];
  return slot < 0 ? kZeros : u.data() + static_cast<std::size_t>(slot) * 6;
}

// Refreshes unilateral activity and friction weights at the iterate u, then
// assembles H = M + sum J^T D J and rhs = M v_free + sum J^T D bias over
// active rows. h must be freshly constructed (all blocks zero).
void assemble(const Scene& scene, const std::vector<BodyDyn>& dyn, RowSet& set,
              const std::vector<int>& body_slot, const std::vector<int>& slot_body,
              std::span<const double> u, const StepConfig& cfg, BlockSparseSym& h,
              std::vector<double>& rhs) {
  const int nslots = h.block_count();
  rhs.assign(static_cast<std::size_t>(nslots) * 6, 0.0);

  for (int slot = 0; slot < nslots; ++slot) {
    const int b = slot_body[slot];
    const BodyDyn& d = dyn[b];
    double* blk = h.block(slot, slot);
    const double mass = scene.inertials[b].mass;
    blk[0] += mass;
    blk[7] += mass;
    blk[14] += mass;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) blk[(3 + r) * 6 + (3 + c)] += d.inertia_world(r, c);
    double* out = rhs.data() + static_cast<std::size_t>(slot) * 6;
    for (int k = 0; k < 3; ++k) out[k] = mass * d.vfree[k];
    const Vec3 iw = d.inertia_world * Vec3{d.vfree[3], d.vfree[4], d.vfree[5]};
    out[3] = iw.x; out[4] = iw.y; out[5] = iw.z;
  }

  // Non-smooth part: active set and friction weights from the iterate.
  for (auto& row : set.rows) {
    if (row.kind != kUnilateral) continue;
    const double rate = row_dot(row.ja, velocity_of(body_slot, u, row.a)) +
                        row_dot(row.jb, velocity_of(body_slot, u, row.b));
    const double predicted = row.reg * (row.bias - rate);
    row.active = predicted > 0;
    if (row.contact >= 0) {
      Row& f1 = set.rows[row.friction_pair];
      Row& f2 = set.rows[row.friction_pair + 1];
      if (row.active) {
        const double vt1 = row_dot(f1.ja, velocity_of(body_slot, u, f1.a)) +
                           row_dot(f1.jb, velocity_of(body_slot, u, f1.b));
        const double vt2 = row_dot(f2.ja, velocity_of(body_slot, u, f2.a)) +
                           row_dot(f2.jb, velocity_of(body_slot, u, f2.b));
        const double vt = std::sqrt(vt1 * vt1 + vt2 * vt2);
        const double w = friction_weight(set.contacts[row.contact].geom.friction, predicted, vt,
                                         cfg.friction_smoothing);
        f1.active = f2.active = true;
        f1.reg = f2.reg = w;
      } else {
        f1.active = f2.active = false;
      }
    }
  }

  for (const auto& row : set.rows) {
    if (!row.active || row.reg <= 0) continue;
    const double d = row.reg;
    const int sa = row.a < 0 ? -1 : body_slot[row.a];
    const int sb = row.b < 0 ? -1 : body_slot[row.b];
    if (sa >= 0) {
      double* blk = h.block(sa, sa);
      for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) blk[r * 6 + c] += d * row.ja[r] * row.ja[c];
      double* out = rhs.data() + static_cast<std::size_t>(sa) * 6;
      for (int r = 0; r < 6; ++r) out[r] += row.ja[r] * d * row.bias;
    }
    if (sb >= 0) {
      double* blk = h.block(sb, sb);
      for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) blk[r * 6 + c] += d * row.jb[r] * row.jb[c];
      double* out = rhs.data() + static_cast<std::size_t>(sb) * 6;
      for (int r = 0; r < 6; ++r) out[r] += row.jb[r] * d * row.bias;
    }
    if (sa >= 0 && sb >= 0) {
      double* ab = h.block(sa, sb);
      double* ba = h.block(sb, sa);
      for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c) {
          const double v = d * row.ja[r] * row.jb[c];
          ab[r * 6 + c] += v;
          ba[c * 6 + r] += v;
        }
    }
  }
}

// Consistent impulse report from the final velocities: normal impulse from
// the unilateral law, tangential from the saturated Coulomb law at that
// normal impulse, so the cone bound holds exactly.
void report_impulses(RowSet& set, const std::vector<int>& body_slot, std::span<const double> u,
                     const StepConfig& cfg) {
  for (std::size_t r = 0; r < set.rows.size(); ++r) {
    const Row& row = set.rows[r];
    if (row.kind != kUnilateral || row.contact < 0) continue;
    const double rate = row_dot(row.ja, velocity_of(body_slot, u, row.a)) +
                        row_dot(row.jb, velocity_of(body_slot, u, row.b));
    const double pn = std::max(0.0, row.reg * (row.bias - rate));
    SolvedContact& sc = set.contacts[row.contact];
    sc.normal_impulse = pn;
    if (pn <= 0) {
      sc.tangential_impulse = Vec3{};
      continue;
    }
    const Row& f1 = set.rows[row.friction_pair];
    const Row& f2 = set.rows[row.friction_pair + 1];
    const double vt1 = row_dot(f1.ja, velocity_of(body_slot, u, f1.a)) +
                       row_dot(f1.jb, velocity_of(body_slot, u, f1.b));
    const double vt2 = row_dot(f2.ja, velocity_of(body_slot, u, f2.a)) +
                       row_dot(f2.jb, velocity_of(body_slot, u, f2.b));
    const double vt = std::sqrt(vt1 * vt1 + vt2 * vt2);
    const double w = friction_weight(sc.geom.friction, pn, vt, cfg.friction_smoothing);
    const Vec3 t1{f1.ja[0], f1.ja[1], f1.ja[2]};
    const Vec3 t2{f2.ja[0], f2.ja[1], f2.ja[2]};
    sc.tangential_impulse = t1 * (-w * vt1) + t2 * (-w * vt2);
  }
}

}  // namespace

std::vector<double> clamp_torques(std::span<const double> torques,
                                  const std::vector<JointDesc>& joints) {
  if (torques.size() != joints.size())
    throw std::invalid_argument("clamp_torques: torque count must equal joint count");
  std::vector<double> out(torques.begin(), torques.end());
  for (std::size_t j = 0; j < joints.size(); ++j)
    out[j] = std::clamp(out[j], -joints[j].max_torque, joints[j].max_torque);
  return out;
}

double joint_angle(const RigidBodyState& parent, const RigidBodyState& child, const JointDesc& j) {
  const Quat rel = parent.orientation.conjugate() * child.orientation;
  Quat d = j.rest_relative.conjugate() * rel;
  if (d.w < 0) d = Quat{-d.w, -d.x, -d.y, -d.z};
  const double proj = d.x * j.axis_child.x + d.y * j.axis_child.y + d.z * j.axis_child.z;
  return 2.0 * std::atan2(proj, d.w);
}

double joint_velocity(const RigidBodyState& parent, const RigidBodyState& child,
                      const JointDesc& j) {
  const Vec3 axis_w = child.orientation.rotate(j.axis_child);
  return axis_w.dot(child.angular_velocity - parent.angular_velocity);
}

AssembledSystem assemble_system(const Scene& scene, const std::vector<ContactPoint>& contacts,
                                std::span<const double> torques, const StepConfig& cfg) {
  const int n = scene.body_count();
  std::vector<int> body_slot(n, -1), slot_body;
  for (int b = 0; b < n; ++b) {
    if (scene.inertials[b].is_static) continue;
    body_slot[b] = static_cast<int>(slot_body.size());
    slot_body.push_back(b);
  }

  const std::vector<double> clamped = clamp_torques(torques, scene.joints);
  const std::vector<BodyDyn> dyn = body_dynamics(scene, clamped, cfg);
  std::vector<int> all_joints(scene.joints.size());
  std::iota(all_joints.begin(), all_joints.end(), 0);
  RowSet set = build_rows(scene, all_joints, contacts, dyn, cfg);

  std::vector<double> u(slot_body.size() * 6);
  for (std::size_t s = 0; s < slot_body.size(); ++s) {
    const auto& st = scene.states[slot_body[s]];
    double* ub = u.data() + s * 6;
    ub[0] = st.linear_velocity.x; ub[1] = st.linear_velocity.y; ub[2] = st.linear_velocity.z;
    ub[3] = st.angular_velocity.x; ub[4] = st.angular_velocity.y; ub[5] = st.angular_velocity.z;
  }

  AssembledSystem sys{BlockSparseSym(6, static_cast<int>(slot_body.size())), {}, body_slot};
  assemble(scene, dyn, set, body_slot, slot_body, u, cfg, sys.matrix, sys.rhs);
  return sys;
}

StepReport step(Scene& scene, std::span<const double> torques, const StepConfig& cfg,
                util::ThreadPool* pool) {
  const int n = scene.body_count();
  scene.ensure_load_buffers();
  const std::vector<double> clamped = clamp_torques(torques, scene.joints);

  StepReport report;
  const std::vector<ContactPoint> contacts = detect_contacts(scene, cfg.contact_margin);
  const std::vector<BodyDyn> dyn = body_dynamics(scene, clamped, cfg);

  // Islands: connected components over joints and dynamic contact pairs.
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  // Static bodies never merge islands: their velocities are not solved, so
  // two agents anchored to the same static body stay independent.
  for (const auto& j : scene.joints)
    if (!scene.inertials[j.parent].is_static && !scene.inertials[j.child].is_static)
      parent[find(j.parent)] = find(j.child);
  for (const auto& c : contacts)
    if (c.body_b != kStaticBody && !scene.inertials[c.body_a].is_static &&
        !scene.inertials[c.body_b].is_static)
      parent[find(c.body_a)] = find(c.body_b);

  std::vector<std::vector<int>> island_bodies;
  std::vector<int> island_of(n, -1);
  for (int b = 0; b < n; ++b) {
    if (scene.inertials[b].is_static) continue;
    const int root = find(b);
    if (island_of[root] < 0) {
      island_of[root] = static_cast<int>(island_bodies.size());
      island_bodies.emplace_back();
    }
    island_of[b] = island_of[root];
    island_bodies[island_of[b]].push_back(b);
  }
  const int num_islands = static_cast<int>(island_bodies.size());

  std::vector<std::vector<int>> island_joints(num_islands), island_contacts(num_islands);
  for (std::size_t j = 0; j < scene.joints.size(); ++j) {
    // assign by whichever side is dynamic (anchored joints have a static parent)
    int isl = island_of[scene.joints[j].parent];
    if (isl < 0) isl = island_of[scene.joints[j].child];
    if (isl >= 0) island_joints[isl].push_back(static_cast<int>(j));
  }
  for (std::size_t c = 0; c < contacts.size(); ++c) {
    const int isl = island_of[contacts[c].body_a];
    if (isl >= 0) island_contacts[isl].push_back(static_cast<int>(c));
  }

  report.contacts.resize(contacts.size());
  std::vector<int> island_newton(num_islands, 0), island_krylov(num_islands, 0);
  std::vector<char> island_failed(num_islands, 0);
  const std::vector<RigidBodyState> saved = scene.states;

  // Shared slot map: islands are disjoint, so concurrent writes never
  // overlap and static bodies stay at -1.
  std::vector<int> body_slot(n, -1);

  auto solve_island = [&](int isl) {
    const std::vector<int>& bodies = island_bodies[isl];
    const int k = static_cast<int>(bodies.size());

    if (island_joints[isl].empty() && island_contacts[isl].empty()) {
      for (int b : bodies) {
        auto& s = scene.states[b];
        const double* vf = dyn[b].vfree;
        s.linear_velocity = {vf[0], vf[1], vf[2]};
        s.angular_velocity = {vf[3], vf[4], vf[5]};
      }
    } else {
      for (int i = 0; i < k; ++i) body_slot[bodies[i]] = i;

      std::vector<ContactPoint> cpts;
      cpts.reserve(island_contacts[isl].size());
      for (int c : island_contacts[isl]) cpts.push_back(contacts[c]);
      RowSet set = build_rows(scene, island_joints[isl], cpts, dyn, cfg);

      std::vector<double> u(static_cast<std::size_t>(k) * 6);
      for (int i = 0; i < k; ++i) {
        const auto& s = scene.states[bodies[i]];
        double* ub = u.data() + static_cast<std::size_t>(i) * 6;
        ub[0] = s.linear_velocity.x; ub[1] = s.linear_velocity.y; ub[2] = s.linear_velocity.z;
        ub[3] = s.angular_velocity.x; ub[4] = s.angular_velocity.y; ub[5] = s.angular_velocity.z;
      }

      std::vector<double> rhs;
      for (int it = 0; it < cfg.newton_iters; ++it) {
        BlockSparseSym h(6, k);
        assemble(scene, dyn, set, body_slot, bodies, u, cfg, h, rhs);
        const linalg::SolveStats stats = linalg::solve_krylov_inplace(
            h, rhs, u, KrylovOptions{cfg.krylov_tol, cfg.krylov_max_iters});
        island_krylov[isl] += stats.iterations;
        ++island_newton[isl];
      }

      report_impulses(set, body_slot, u, cfg);
      for (std::size_t ci = 0; ci < island_contacts[isl].size(); ++ci)
        report.contacts[island_contacts[isl][ci]] = set.contacts[ci];

      for (int i = 0; i < k; ++i) {
        auto& s = scene.states[bodies[i]];
        const double* ub = u.data() + static_cast<std::size_t>(i) * 6;
        s.linear_velocity = {ub[0], ub[1], ub[2]};
        s.angular_velocity = {ub[3], ub[4], ub[5]};
      }
    }

    bool ok = true;
    for (int b : bodies) {
      auto& s = scene.states[b];
      s.position += s.linear_velocity * cfg.dt;
      s.orientation = (Quat::exp_map(s.angular_velocity * cfg.dt) * s.orientation).normalized();
      if (!s.finite()) ok = false;
    }
    if (!ok) island_failed[isl] = 1;
  };

  if (pool && num_islands > 1) {
    util::parallel_for(pool, num_islands, [&](int begin, int end) {
      for (int i = begin; i < end; ++i) solve_island(i);
    });
  } else {
    for (int i = 0; i < num_islands; ++i) solve_island(i);
  }

  for (int isl = 0; isl < num_islands; ++isl) {
    report.newton_iterations += island_newton[isl];
    report.krylov_iterations += island_krylov[isl];
    if (island_failed[isl]) {
      for (int b : island_bodies[isl]) {
        scene.states[b] = saved[b];
        const int agent = scene.agent_of(b);
        if (agent >= 0) report.failed_agents.push_back(agent);
      }
    }
  }
  std::sort(report.failed_agents.begin(), report.failed_agents.end());
  report.failed_agents.erase(std::unique(report.failed_agents.begin(), report.failed_agents.end()),
                             report.failed_agents.end());

  scene.clear_external_loads();
  return report;
}

}  // namespace stampede::physics
