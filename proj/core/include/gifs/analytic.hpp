#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "gifs/field.hpp"
#include "gifs/sampling.hpp"

namespace gifs {

enum class ShapeKind { SphereShell, DoubleSphere, OpenDisc, Composite };

/// Closed-form test shapes. A sphere shell is the surface |p - c| = r; a
/// double sphere is two concentric shells; an open disc is the planar
/// region {|p - c| <= r, n . (p - c) = 0}; a composite is the union of its
/// children.
struct AnalyticShapeSpec {
  ShapeKind kind = ShapeKind::SphereShell;
  Vec3 center{};
  double radius = 0.0;        // shell radius, outer radius, or disc radius
  double inner_radius = 0.0;  // double sphere only
  Vec3 normal{0.0, 0.0, 1.0};  // disc only
  std::vector<AnalyticShapeSpec> children;

  static AnalyticShapeSpec sphere_shell(const Vec3& center, double radius);
  static AnalyticShapeSpec double_sphere(const Vec3& center, double inner, double outer);
  static AnalyticShapeSpec open_disc(const Vec3& center, const Vec3& normal, double radius);
  static AnalyticShapeSpec composite(std::vector<AnalyticShapeSpec> children);

  friend bool operator==(const AnalyticShapeSpec&, const AnalyticShapeSpec&) = default;
};

/// Throws InvalidArgument on non-positive radii, inner >= outer, a zero
/// normal or an empty composite.
void validate(const AnalyticShapeSpec& spec);

std::string to_json(const AnalyticShapeSpec& spec);
/// Throws FormatError on malformed documents, InvalidArgument on invalid specs.
AnalyticShapeSpec shape_spec_from_json(const std::string& text);
AnalyticShapeSpec read_shape_spec(const std::filesystem::path& path);
void write_shape_spec(const std::filesystem::path& path, const AnalyticShapeSpec& spec);

/// Exact closed-membership segment test (tolerance kGeomEpsilon).
bool analytic_flag(const AnalyticShapeSpec& spec, const Point3& p1, const Point3& p2);
double analytic_udf(const AnalyticShapeSpec& spec, const Point3& p);
double analytic_surface_area(const AnalyticShapeSpec& spec);
/// Area-uniform point sampler over the primitive surfaces of a spec.
class AnalyticSurfaceSampler {
 public:
  explicit AnalyticSurfaceSampler(const AnalyticShapeSpec& spec);
  Vec3 sample(Rng& rng) const;

  struct Primitive {
    ShapeKind kind;  // SphereShell or OpenDisc
    Vec3 center;
    double radius;
    Vec3 normal;
    double area;
  };

 private:
  std::vector<Primitive> primitives_;
  std::vector<double> cumulative_;
};

std::vector<Vec3> sample_surface(const AnalyticShapeSpec& spec, std::size_t n, RngSeed seed);

class AnalyticField final : public PairField {
 public:
  explicit AnalyticField(AnalyticShapeSpec spec);

  double flag(const Point3& p1, const Point3& p2) const override;
  double udf(const Point3& p) const override;

  const AnalyticShapeSpec& spec() const { return spec_; }

 private:
  AnalyticShapeSpec spec_;
};

}  // namespace gifs
