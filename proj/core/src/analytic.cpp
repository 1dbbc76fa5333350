#include "gifs/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <tuple>

#include "json.hpp"

#include "gifs/error.hpp"
#include "gifs/geometry.hpp"

namespace gifs {

using nlohmann::json;

AnalyticShapeSpec AnalyticShapeSpec::sphere_shell(const Vec3& center, double radius) {
  AnalyticShapeSpec s;
  s.kind = ShapeKind::SphereShell;
  s.center = center;
  s.radius = radius;
  return s;
}

AnalyticShapeSpec AnalyticShapeSpec::double_sphere(const Vec3& center, double inner, double outer) {
  AnalyticShapeSpec s;
  s.kind = ShapeKind::DoubleSphere;
  s.center = center;
  s.inner_radius = inner;
  s.radius = outer;
  return s;
}

AnalyticShapeSpec AnalyticShapeSpec::open_disc(const Vec3& center, const Vec3& normal, double radius) {
  AnalyticShapeSpec s;
  s.kind = ShapeKind::OpenDisc;
  s.center = center;
  s.normal = normal;
  s.radius = radius;
  return s;
}

AnalyticShapeSpec AnalyticShapeSpec::composite(std::vector<AnalyticShapeSpec> children) {
  AnalyticShapeSpec s;
  s.kind = ShapeKind::Composite;
  s.children = std::move(children);
  return s;
}

void validate(const AnalyticShapeSpec& spec) {
  switch (spec.kind) {
    case ShapeKind::SphereShell:
      if (!(spec.radius > 0.0)) throw InvalidArgument("sphere_shell radius must be positive");
      break;
    case ShapeKind::DoubleSphere:
      if (!(spec.inner_radius > 0.0)) throw InvalidArgument("double_sphere inner radius must be positive");
      if (!(spec.inner_radius < spec.radius))
        throw InvalidArgument("double_sphere inner radius must be below the outer radius");
      break;
    case ShapeKind::OpenDisc:
      if (!(spec.radius > 0.0)) throw InvalidArgument("open_disc radius must be positive");
      if (!(norm(spec.normal) > 0.0)) throw InvalidArgument("open_disc normal must be non-zero");
      break;
    case ShapeKind::Composite:
      if (spec.children.empty()) throw InvalidArgument("composite needs at least one child");
      for (const auto& child : spec.children) validate(child);
      return;
  }
  if (!is_finite(spec.center) || !is_finite(spec.normal) || !std::isfinite(spec.radius))
    throw InvalidArgument("shape parameters must be finite");
}

namespace {

const char* kind_name(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::SphereShell: return "sphere_shell";
    case ShapeKind::DoubleSphere: return "double_sphere";
    case ShapeKind::OpenDisc: return "open_disc";
    case ShapeKind::Composite: return "composite";
  }
  return "";
}

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 json_vec(const json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("shape spec missing '") + key + "'");
  const json& a = j.at(key);
  if (!a.is_array() || a.size() != 3) throw FormatError(std::string("'") + key + "' must be a 3-vector");
  return {a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
}

double json_real(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number())
    throw FormatError(std::string("shape spec missing number '") + key + "'");
  return j.at(key).get<double>();
}

json spec_json(const AnalyticShapeSpec& spec) {
  json j;
  j["kind"] = kind_name(spec.kind);
  switch (spec.kind) {
    case ShapeKind::SphereShell:
      j["center"] = vec_json(spec.center);
      j["radius"] = spec.radius;
      break;
    case ShapeKind::DoubleSphere:
      j["center"] = vec_json(spec.center);
      j["inner_radius"] = spec.inner_radius;
      j["outer_radius"] = spec.radius;
      break;
    case ShapeKind::OpenDisc:
      j["center"] = vec_json(spec.center);
      j["normal"] = vec_json(spec.normal);
      j["radius"] = spec.radius;
      break;
    case ShapeKind::Composite: {
      json children = json::array();
      for (const auto& c : spec.children) children.push_back(spec_json(c));
      j["children"] = std::move(children);
      break;
    }
  }
  return j;
}

AnalyticShapeSpec json_spec(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw FormatError("shape spec needs a string 'kind'");
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "sphere_shell") return AnalyticShapeSpec::sphere_shell(json_vec(j, "center"), json_real(j, "radius"));
  if (kind == "double_sphere")
    return AnalyticShapeSpec::double_sphere(json_vec(j, "center"), json_real(j, "inner_radius"),
                                            json_real(j, "outer_radius"));
  if (kind == "open_disc")
    return AnalyticShapeSpec::open_disc(json_vec(j, "center"), json_vec(j, "normal"), json_real(j, "radius"));
  if (kind == "composite") {
    if (!j.contains("children") || !j.at("children").is_array())
      throw FormatError("composite needs a 'children' array");
    std::vector<AnalyticShapeSpec> children;
    for (const auto& c : j.at("children")) children.push_back(json_spec(c));
    return AnalyticShapeSpec::composite(std::move(children));
  }
  throw FormatError("unknown shape kind '" + kind + "'");
}

bool sphere_flag(const Vec3& c, double r, const Vec3& a, const Vec3& b) {
  const double dmin = distance(c, closest_point_on_segment(c, a, b));
  const double dmax = std::max(distance(c, a), distance(c, b));
  return dmin <= r + kGeomEpsilon && dmax >= r - kGeomEpsilon;
}

bool disc_flag(const AnalyticShapeSpec& s, const Vec3& a, const Vec3& b) {
  const Vec3 n = normalized(s.normal);
  const double ha = dot(n, a - s.center);
  const double hb = dot(n, b - s.center);
  const double eps = kGeomEpsilon;
  if ((ha > eps && hb > eps) || (ha < -eps && hb < -eps)) return false;
  auto radial = [&](const Vec3& p) {
    const Vec3 q = p - s.center;
    return norm(q - n * dot(n, q));
  };
  if (std::abs(ha) <= eps && std::abs(hb) <= eps)
    return radial(closest_point_on_segment(s.center, a, b)) <= s.radius + eps;
  const double t = std::clamp(ha / (ha - hb), 0.0, 1.0);
  return radial(a + (b - a) * t) <= s.radius + eps;
}

double disc_udf(const AnalyticShapeSpec& s, const Vec3& p) {
  const Vec3 n = normalized(s.normal);
  const Vec3 q = p - s.center;
  const double h = dot(n, q);
  const double rho = norm(q - n * h);
  if (rho <= s.radius) return std::abs(h);
  return std::hypot(rho - s.radius, h);
}

using Primitive = AnalyticSurfaceSampler::Primitive;

void collect_primitives(const AnalyticShapeSpec& spec, std::vector<Primitive>& out) {
  switch (spec.kind) {
    case ShapeKind::SphereShell:
      out.push_back({ShapeKind::SphereShell, spec.center, spec.radius, {},
                     4.0 * std::numbers::pi * spec.radius * spec.radius});
      break;
    case ShapeKind::DoubleSphere:
      collect_primitives(AnalyticShapeSpec::sphere_shell(spec.center, spec.inner_radius), out);
      collect_primitives(AnalyticShapeSpec::sphere_shell(spec.center, spec.radius), out);
      break;
    case ShapeKind::OpenDisc:
      out.push_back({ShapeKind::OpenDisc, spec.center, spec.radius, normalized(spec.normal),
                     std::numbers::pi * spec.radius * spec.radius});
      break;
    case ShapeKind::Composite:
      for (const auto& c : spec.children) collect_primitives(c, out);
      break;
  }
}

}  // namespace

std::string to_json(const AnalyticShapeSpec& spec) { return spec_json(spec).dump(2); }

AnalyticShapeSpec shape_spec_from_json(const std::string& text) {
  AnalyticShapeSpec spec;
  try {
    spec = json_spec(json::parse(text));
  } catch (const json::exception& e) {
    throw FormatError(std::string("invalid shape spec JSON: ") + e.what());
  }
  validate(spec);
  return spec;
}

AnalyticShapeSpec read_shape_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return shape_spec_from_json(buf.str());
}

void write_shape_spec(const std::filesystem::path& path, const AnalyticShapeSpec& spec) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json(spec) << '\n';
}

bool analytic_flag(const AnalyticShapeSpec& spec, const Point3& p1, const Point3& p2) {
  // Canonical endpoint order makes the result bitwise symmetric.
  if (std::tie(p2.x, p2.y, p2.z) < std::tie(p1.x, p1.y, p1.z)) return analytic_flag(spec, p2, p1);
  switch (spec.kind) {
    case ShapeKind::SphereShell: return sphere_flag(spec.center, spec.radius, p1, p2);
    case ShapeKind::DoubleSphere:
      return sphere_flag(spec.center, spec.inner_radius, p1, p2) || sphere_flag(spec.center, spec.radius, p1, p2);
    case ShapeKind::OpenDisc: return disc_flag(spec, p1, p2);
    case ShapeKind::Composite:
      return std::any_of(spec.children.begin(), spec.children.end(),
                         [&](const AnalyticShapeSpec& c) { return analytic_flag(c, p1, p2); });
  }
  return false;
}

double analytic_udf(const AnalyticShapeSpec& spec, const Point3& p) {
  switch (spec.kind) {
    case ShapeKind::SphereShell: return std::abs(distance(p, spec.center) - spec.radius);
    case ShapeKind::DoubleSphere: {
      const double d = distance(p, spec.center);
      return std::min(std::abs(d - spec.inner_radius), std::abs(d - spec.radius));
    }
    case ShapeKind::OpenDisc: return disc_udf(spec, p);
    case ShapeKind::Composite: {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : spec.children) best = std::min(best, analytic_udf(c, p));
      return best;
    }
  }
  return 0.0;
}

double analytic_surface_area(const AnalyticShapeSpec& spec) {
  std::vector<Primitive> prims;
  collect_primitives(spec, prims);
  double total = 0.0;
  for (const auto& p : prims) total += p.area;
  return total;
}

AnalyticSurfaceSampler::AnalyticSurfaceSampler(const AnalyticShapeSpec& spec) {
  validate(spec);
  collect_primitives(spec, primitives_);
  double total = 0.0;
  for (const auto& p : primitives_) cumulative_.push_back(total += p.area);
}

Vec3 AnalyticSurfaceSampler::sample(Rng& rng) const {
  const double r = uniform01(rng) * cumulative_.back();
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
  if (it == cumulative_.end()) --it;
  const Primitive& prim = primitives_[static_cast<std::size_t>(it - cumulative_.begin())];
  if (prim.kind == ShapeKind::SphereShell) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec3 d;
    do {
      d = {gauss(rng), gauss(rng), gauss(rng)};
    } while (squared_norm(d) < 1e-300);
    return prim.center + normalized(d) * prim.radius;
  }
  const Vec3 helper = std::abs(prim.normal.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
  const Vec3 e1 = normalized(cross(prim.normal, helper));
  const Vec3 e2 = cross(prim.normal, e1);
  const double rho = prim.radius * std::sqrt(uniform01(rng));
  const double phi = 2.0 * std::numbers::pi * uniform01(rng);
  return prim.center + e1 * (rho * std::cos(phi)) + e2 * (rho * std::sin(phi));
}

std::vector<Vec3> sample_surface(const AnalyticShapeSpec& spec, std::size_t n, RngSeed seed) {
  if (n == 0) throw InvalidArgument("sample count must be at least 1");
  const AnalyticSurfaceSampler sampler(spec);
  Rng rng = make_rng(seed);
  std::vector<Vec3> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(sampler.sample(rng));
  return out;
}

AnalyticField::AnalyticField(AnalyticShapeSpec spec) : spec_(std::move(spec)) { validate(spec_); }

double AnalyticField::flag(const Point3& p1, const Point3& p2) const {
  return analytic_flag(spec_, p1, p2) ? 1.0 : 0.0;
}

double AnalyticField::udf(const Point3& p) const { return analytic_udf(spec_, p); }

}  // namespace gifs
