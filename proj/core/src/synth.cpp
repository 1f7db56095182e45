//==============================================================================
// Copyright 2026 The lidargait Authors
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
//==============================================================================

#include "lidargait/synth.hpp"

#include "lidargait/dataset.hpp"
#include "lidargait/parallel.hpp"
#include "lidargait/pcf_io.hpp"
#include "lidargait/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <system_error>

namespace lidargait {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegToRad = kPi / 180.0;

// Bounding sphere of a shape, used to restrict which rays are cast.
struct Bounds
{
  Point3 center;
  double radius;
};

Bounds bounds_of(const Shape& s)
{
  if (const auto* c = std::get_if<Capsule>(&s))
    return {(c->a + c->b) * 0.5, (c->b - c->a).norm() * 0.5 + c->radius};
  const auto& d = std::get<Disc>(s);
  return {d.center, d.radius};
}

// Conservative azimuth/elevation window (degrees) covered by a bounding sphere.
struct AngularBox
{
  double az_lo, az_hi, el_lo, el_hi;
  bool contains(double az, double el) const { return az >= az_lo && az <= az_hi && el >= el_lo && el <= el_hi; }
};

AngularBox angular_box(const Bounds& b)
{
  const double horizontal = std::hypot(b.center.x, b.center.y);
  const double range = b.center.norm();
  if (range <= b.radius || horizontal <= b.radius)
    return {-180.0, 180.0, -90.0, 90.0};
  const double az = std::atan2(b.center.y, b.center.x) / kDegToRad;
  const double el = std::asin(b.center.z / range) / kDegToRad;
  const double daz = std::asin(b.radius / horizontal) / kDegToRad;
  const double del = std::asin(b.radius / range) / kDegToRad;
  return {az - daz, az + daz, el - del, el + del};
}

Point3 limb_direction(double angle)
{
  return {std::sin(angle), 0.0, -std::cos(angle)};
}

} // namespace

bool IdentityProfile::valid() const
{
  auto in = [](double v, double lo, double hi) { return v >= lo && v <= hi; };
  return in(height, 1.50, 1.90) && in(leg_ratio, 0.45, 0.53) && in(shoulder_width, 0.36, 0.50) &&
         in(limb_radius, 0.04, 0.07) && in(stride_freq, 0.8, 1.2) && in(stride_amplitude, 0.35, 0.60) &&
         in(arm_swing, 0.2, 0.5);
}

IdentityProfile sample_identity(std::uint64_t seed)
{
  Xorshift64Star rng(seed);
  IdentityProfile p;
  p.height = rng.uniform(1.50, 1.90);
  p.leg_ratio = rng.uniform(0.45, 0.53);
  p.shoulder_width = rng.uniform(0.36, 0.50);
  p.limb_radius = rng.uniform(0.04, 0.07);
  p.stride_freq = rng.uniform(0.8, 1.2);
  p.stride_amplitude = rng.uniform(0.35, 0.60);
  p.arm_swing = rng.uniform(0.2, 0.5);
  return p;
}

void LidarModel::validate() const
{
  if (!(delta_theta > 0.0) || !(delta_phi > 0.0))
    throw std::invalid_argument("LiDAR angular resolution must be positive");
  if (!(azimuth_fov > 0.0) || !(elevation_max > elevation_min))
    throw std::invalid_argument("LiDAR field of view must be positive");
  if (!(frame_rate > 0.0) || !(max_range > 0.0))
    throw std::invalid_argument("LiDAR frame rate and range must be positive");
}

std::optional<double> intersect(const Point3& ro, const Point3& rd, const Capsule& cap)
{
  const Point3 ba = cap.b - cap.a;
  const Point3 oa = ro - cap.a;
  const double r2 = cap.radius * cap.radius;
  const double baba = ba.dot(ba);
  const double bard = ba.dot(rd);
  const double baoa = ba.dot(oa);
  const double rdoa = rd.dot(oa);
  const double oaoa = oa.dot(oa);

  auto sphere = [&](const Point3& oc) -> std::optional<double> {
    const double b = rd.dot(oc);
    const double c = oc.dot(oc) - r2;
    const double h = b * b - c;
    if (h < 0.0)
      return std::nullopt;
    const double t = -b - std::sqrt(h);
    if (t > 0.0)
      return t;
    return std::nullopt;
  };

  const double a = baba - bard * bard;
  if (baba == 0.0 || a <= 1e-12 * baba)
  {
    // Degenerate segment or ray parallel to the axis: only the end caps matter.
    const auto ta = sphere(oa);
    const auto tb = sphere(ro - cap.b);
    if (ta && tb)
      return std::min(*ta, *tb);
    return ta ? ta : tb;
  }

  const double b = baba * rdoa - baoa * bard;
  const double c = baba * oaoa - baoa * baoa - r2 * baba;
  const double h = b * b - a * c;
  if (h < 0.0)
    return std::nullopt;
  const double t = (-b - std::sqrt(h)) / a;
  const double y = baoa + t * bard;
  if (y > 0.0 && y < baba)
  {
    if (t > 0.0)
      return t;
    return std::nullopt;
  }
  return sphere(y <= 0.0 ? oa : ro - cap.b);
}

std::optional<double> intersect(const Point3& ro, const Point3& rd, const Disc& d)
{
  const double denom = d.normal.dot(rd);
  if (std::abs(denom) < 1e-12)
    return std::nullopt;
  const double t = d.normal.dot(d.center - ro) / denom;
  if (!(t > 0.0))
    return std::nullopt;
  const Point3 hit = ro + rd * t - d.center;
  if (hit.dot(hit) > d.radius * d.radius)
    return std::nullopt;
  return t;
}

std::optional<double> intersect(const Point3& ro, const Point3& rd, const Shape& s)
{
  return std::visit([&](const auto& shape) { return intersect(ro, rd, shape); }, s);
}

double BodyPose::head_top() const
{
  const Capsule& h = part(BodyPart::Head);
  return std::max(h.a.z, h.b.z) + h.radius;
}

double BodyPose::lowest_point() const
{
  double lo = std::numeric_limits<double>::infinity();
  for (const Capsule& c : capsules)
    lo = std::min({lo, c.a.z - c.radius, c.b.z - c.radius});
  return lo;
}

BodyPose pose_at(const IdentityProfile& p, double phase, double limb_scale)
{
  BodyPose pose;
  const double height = p.height;
  const double leg = p.leg_ratio * height;
  const double limb = p.limb_radius * limb_scale;
  const double r_thigh = 1.4 * limb;
  const double r_shin = 1.0 * limb;
  const double r_upper_arm = 0.9 * limb;
  const double r_forearm = 0.75 * limb;
  const double r_torso = 0.28 * p.shoulder_width;
  const double r_head = 0.065 * height;

  // Segment lengths use the unscaled radius so clothing does not change stature.
  const double segment = 0.5 * (leg - p.limb_radius);
  const double upper_arm = 0.17 * height;
  const double forearm = 0.15 * height;

  const double hip_z = leg + 0.02 * height * std::abs(std::sin(phase));
  const double shoulder_z = hip_z + (height - leg) - 2.0 * r_head - r_torso;

  // Left leg follows the phase, the right leg runs half a cycle behind.
  const std::array<double, 2> leg_phase = {phase, phase + kPi};
  const std::array<double, 2> side = {1.0, -1.0};

  for (std::size_t s = 0; s < 2; ++s)
  {
    const double thigh = p.stride_amplitude * std::sin(leg_phase[s]);
    const double knee = std::max(0.0, -0.7 * p.stride_amplitude * std::sin(leg_phase[s] + kPi / 2.0));
    const double arm = -p.arm_swing * std::sin(leg_phase[s]);
    pose.thigh_angle[s] = thigh;
    pose.knee_flexion[s] = knee;
    pose.arm_angle[s] = arm;

    const Point3 hip{0.0, side[s] * 0.3 * p.shoulder_width, hip_z};
    const Point3 knee_pt = hip + limb_direction(thigh) * segment;
    const Point3 ankle = knee_pt + limb_direction(thigh - knee) * segment;
    pose.capsules[static_cast<std::size_t>(BodyPart::ThighLeft) + s] = {hip, knee_pt, r_thigh};
    pose.capsules[static_cast<std::size_t>(BodyPart::ShinLeft) + s] = {knee_pt, ankle, r_shin};

    const Point3 shoulder{0.0, side[s] * 0.5 * p.shoulder_width, shoulder_z};
    const Point3 elbow = shoulder + limb_direction(arm) * upper_arm;
    const double forearm_angle = arm + 0.25 + 0.5 * std::max(0.0, arm);
    const Point3 hand = elbow + limb_direction(forearm_angle) * forearm;
    pose.capsules[static_cast<std::size_t>(BodyPart::UpperArmLeft) + s] = {shoulder, elbow, r_upper_arm};
    pose.capsules[static_cast<std::size_t>(BodyPart::ForearmLeft) + s] = {elbow, hand, r_forearm};
  }

  pose.capsules[static_cast<std::size_t>(BodyPart::Torso)] = {
    {0.0, 0.0, hip_z + 0.5 * r_torso}, {0.0, 0.0, shoulder_z}, r_torso};
  const double head_center = hip_z + (height - leg) - r_head;
  pose.capsules[static_cast<std::size_t>(BodyPart::Head)] = {
    {0.0, 0.0, head_center - 0.4 * r_head}, {0.0, 0.0, head_center}, r_head};
  return pose;
}

Point3 RigidTransform::rotate(const Point3& v) const
{
  const double c = std::cos(yaw), s = std::sin(yaw);
  return {c * v.x - s * v.y, s * v.x + c * v.y, v.z};
}

Point3 RigidTransform::apply(const Point3& p) const
{
  return rotate(p) + translation;
}

Capsule transformed(const Capsule& c, const RigidTransform& t)
{
  return {t.apply(c.a), t.apply(c.b), c.radius};
}

Disc transformed(const Disc& d, const RigidTransform& t)
{
  return {t.apply(d.center), t.rotate(d.normal), d.radius};
}

Shape transformed(const Shape& s, const RigidTransform& t)
{
  return std::visit([&](const auto& shape) -> Shape { return transformed(shape, t); }, s);
}

PointFrame scan_shapes(const std::vector<Shape>& shapes, const LidarModel& lidar)
{
  lidar.validate();
  PointFrame frame;
  if (shapes.empty())
    return frame;

  std::vector<AngularBox> boxes;
  boxes.reserve(shapes.size());
  AngularBox all{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                 std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const Shape& s : shapes)
  {
    boxes.push_back(angular_box(bounds_of(s)));
    all.az_lo = std::min(all.az_lo, boxes.back().az_lo);
    all.az_hi = std::max(all.az_hi, boxes.back().az_hi);
    all.el_lo = std::min(all.el_lo, boxes.back().el_lo);
    all.el_hi = std::max(all.el_hi, boxes.back().el_hi);
  }

  // Ray (i, j) points at the centre of range-view cell (i, j).
  const double half_fov = 0.5 * lidar.azimuth_fov;
  const auto i_lo = static_cast<long>(std::ceil(std::max(-half_fov, all.az_lo) / lidar.delta_theta - 0.5));
  const auto i_hi = static_cast<long>(std::floor(std::min(half_fov, all.az_hi) / lidar.delta_theta - 0.5));
  const auto j_lo = static_cast<long>(std::ceil(std::max(lidar.elevation_min, all.el_lo) / lidar.delta_phi - 0.5));
  const auto j_hi = static_cast<long>(std::floor(std::min(lidar.elevation_max, all.el_hi) / lidar.delta_phi - 0.5));

  const Point3 origin{};
  std::vector<std::size_t> candidates;
  for (long j = j_hi; j >= j_lo; --j)
  {
    const double el = (static_cast<double>(j) + 0.5) * lidar.delta_phi;
    const double el_rad = el * kDegToRad;
    for (long i = i_lo; i <= i_hi; ++i)
    {
      const double az = (static_cast<double>(i) + 0.5) * lidar.delta_theta;
      double best = lidar.max_range;
      bool hit = false;
      Point3 dir{};
      bool have_dir = false;
      for (std::size_t s = 0; s < shapes.size(); ++s)
      {
        if (!boxes[s].contains(az, el))
          continue;
        if (!have_dir)
        {
          const double az_rad = az * kDegToRad;
          dir = {std::cos(el_rad) * std::cos(az_rad), std::cos(el_rad) * std::sin(az_rad), std::sin(el_rad)};
          have_dir = true;
        }
        if (const auto t = intersect(origin, dir, shapes[s]); t && *t <= best)
        {
          best = *t;
          hit = true;
        }
      }
      if (hit)
        frame.points.push_back(dir * best);
    }
  }
  return frame;
}

PointFrame scan_frame(const BodyPose& pose, const RigidTransform& body_to_sensor, const LidarModel& lidar)
{
  std::vector<Shape> shapes;
  shapes.reserve(pose.capsules.size());
  for (const Capsule& c : pose.capsules)
    shapes.emplace_back(transformed(c, body_to_sensor));
  return scan_shapes(shapes, lidar);
}

double walking_speed(const IdentityProfile& p)
{
  return 4.0 * p.leg_ratio * p.height * p.stride_freq * std::sin(p.stride_amplitude);
}

RigidTransform body_placement(const IdentityProfile& profile, int view_deg, DistanceTag distance, double t,
                              double mid_time, const LidarModel& lidar)
{
  // Heading: "towards the sensor" (-x) rotated by the view angle.
  const double psi = view_deg * kDegToRad;
  const Point3 heading{-std::cos(psi), -std::sin(psi), 0.0};
  const double crossing = distance == DistanceTag::Near ? kNearCrossing : kFarCrossing;
  const Point3 ground = Point3{crossing, 0.0, -lidar.sensor_height} + heading * (walking_speed(profile) * (t - mid_time));
  return {std::atan2(heading.y, heading.x), ground};
}

std::vector<Shape> attribute_props(const BodyPose& pose, Attribute attribute)
{
  std::vector<Shape> props;
  const Point3 hand = pose.right_hand();
  switch (attribute)
  {
    case Attribute::Bag:
      props.emplace_back(Capsule{hand + Point3{0.0, -0.06, -0.06}, hand + Point3{0.0, -0.06, -0.30}, 0.11});
      break;
    case Attribute::Carrying:
      props.emplace_back(Capsule{hand + Point3{-0.15, -0.05, -0.08}, hand + Point3{0.20, -0.05, -0.08}, 0.09});
      break;
    case Attribute::Umbrella:
    {
      const Point3 canopy{0.05, -0.05, pose.head_top() + 0.35};
      props.emplace_back(Capsule{hand, canopy, 0.012});
      props.emplace_back(Disc{canopy, {0.0, 0.0, 1.0}, 0.5});
      break;
    }
    default:
      break;
  }
  return props;
}

GaitSequence generate_sequence(const IdentityProfile& profile, int view_deg, DistanceTag distance,
                               Attribute attribute, const LidarModel& lidar, std::uint64_t seed,
                               const SequenceOptions& options)
{
  lidar.validate();
  Xorshift64Star rng(seed);
  const double phase0 = rng.uniform(0.0, 2.0 * kPi);

  const int n_frames = std::max(1, static_cast<int>(std::lround(options.duration * lidar.frame_rate)));
  const double mid_time = 0.5 * (n_frames - 1) / lidar.frame_rate;
  const double limb_scale = attribute == Attribute::Clothing ? 1.4 : attribute == Attribute::Uniform ? 1.15 : 1.0;

  // Static post close to the sensor on the line of sight to the mid-path
  // position, present for the middle third of the frames. It sits inside the
  // region the preprocessing crops away, so only its shadow survives.
  std::optional<Capsule> occluder;
  if (attribute == Attribute::Occlusion && options.occluder)
  {
    const Point3 mid = body_placement(profile, view_deg, distance, mid_time, mid_time, lidar).translation;
    const double range = std::hypot(mid.x, mid.y);
    const double s = kOccluderRange / range;
    const Point3 foot{s * mid.x, s * mid.y, -lidar.sensor_height};
    occluder = Capsule{foot, foot + Point3{0.0, 0.0, kOccluderHeight - kOccluderRadius}, kOccluderRadius};
  }

  GaitSequence seq;
  seq.view_deg = view_deg;
  seq.attribute = attribute;
  seq.distance = distance;
  seq.frames.reserve(static_cast<std::size_t>(n_frames));
  for (int f = 0; f < n_frames; ++f)
  {
    const double t = f / lidar.frame_rate;
    const double phase = phase0 + 2.0 * kPi * profile.stride_freq * t;
    const BodyPose pose = pose_at(profile, phase, limb_scale);
    const RigidTransform place = body_placement(profile, view_deg, distance, t, mid_time, lidar);

    std::vector<Shape> shapes;
    for (const Capsule& c : pose.capsules)
      shapes.emplace_back(transformed(c, place));
    for (const Shape& s : attribute_props(pose, attribute))
      shapes.push_back(transformed(s, place));
    if (options.ground_patch)
      shapes.emplace_back(Disc{place.translation, {0.0, 0.0, 1.0}, options.ground_radius});
    if (occluder && 3 * f >= n_frames && 3 * f < 2 * n_frames)
      shapes.emplace_back(*occluder);

    PointFrame frame = scan_shapes(shapes, lidar);
    frame.timestamp = t;
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

std::string identity_label(int index)
{
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d", index);
  return buf;
}

DatasetSummary generate_dataset(const DatasetConfig& cfg, const fs::path& root)
{
  if (cfg.n_ids < 2)
    throw std::invalid_argument("generate_dataset: at least two identities are required");
  if (cfg.attributes.empty() || cfg.views.empty() || cfg.seqs_per_attribute < 1)
    throw std::invalid_argument("generate_dataset: attributes, views and sequences must be nonempty");
  if (!(cfg.far_fraction >= 0.0 && cfg.far_fraction <= 1.0))
    throw std::invalid_argument("generate_dataset: far_fraction must lie in [0, 1]");
  cfg.lidar.validate();

  std::vector<ManifestEntry> entries;
  std::vector<std::uint64_t> seeds;
  std::vector<int> id_index;
  for (int id = 0; id < cfg.n_ids; ++id)
    for (Attribute attr : cfg.attributes)
      for (int s = 0; s < cfg.seqs_per_attribute; ++s)
        for (int view : cfg.views)
        {
          const std::uint64_t tag = (static_cast<std::uint64_t>(id) << 32) ^
                                    (static_cast<std::uint64_t>(attr) << 24) ^
                                    (static_cast<std::uint64_t>(s) << 12) ^ static_cast<std::uint64_t>(view);
          const std::uint64_t seq_seed = derive_seed(cfg.seed, tag);
          Xorshift64Star pick(derive_seed(seq_seed, 1));
          ManifestEntry e;
          e.identity = identity_label(id);
          e.attribute = attr;
          e.seq = s;
          e.view_deg = view;
          e.distance = pick.uniform() < cfg.far_fraction ? DistanceTag::Far : DistanceTag::Near;
          entries.push_back(e);
          seeds.push_back(seq_seed);
          id_index.push_back(id);
        }

  const bool root_existed = fs::exists(root);
  std::vector<fs::path> created;
  auto cleanup = [&] {
    std::error_code ec;
    if (!root_existed)
      fs::remove_all(root, ec);
    else
      for (const fs::path& p : created)
        fs::remove_all(p, ec);
  };

  try
  {
    fs::create_directories(root);
    for (int id = 0; id < cfg.n_ids; ++id)
    {
      const fs::path dir = root / identity_label(id);
      if (!fs::exists(dir))
        created.push_back(dir);
    }
    created.push_back(root / kManifestName);

    const std::uint64_t profile_root = derive_seed(cfg.seed, 0x9F0F11E5ULL);
    std::vector<int> frame_counts(entries.size(), 0);
    parallel_for(entries.size(), cfg.threads, [&](std::size_t i) {
      const ManifestEntry& e = entries[i];
      const IdentityProfile profile = sample_identity(derive_seed(profile_root, static_cast<std::uint64_t>(id_index[i])));
      const GaitSequence seq =
        generate_sequence(profile, e.view_deg, e.distance, e.attribute, cfg.lidar, seeds[i], cfg.sequence);
      const fs::path dir = e.dir(root);
      fs::create_directories(dir);
      for (std::size_t f = 0; f < seq.frames.size(); ++f)
        write_pcf(dir / frame_file_name(f), seq.frames[f]);
      frame_counts[i] = static_cast<int>(seq.frames.size());
    });

    DatasetSummary summary;
    for (std::size_t i = 0; i < entries.size(); ++i)
    {
      entries[i].frames = frame_counts[i];
      summary.frames += static_cast<std::size_t>(frame_counts[i]);
    }
    summary.sequences = entries.size();
    summary.manifest = root / kManifestName;
    write_manifest(summary.manifest, entries);
    return summary;
  }
  catch (...)
  {
    cleanup();
    throw;
  }
}

} // namespace lidargait
