#include <string>

#include "gifs/error.hpp"
#include "gifs_cli/cli.hpp"

namespace gifs::cli {

namespace {

// Off-lattice centre: keeps every shape clear of extraction grid vertices
// and grid planes at the default resolutions.
constexpr Vec3 kCenter{0.0013, 0.0021, 0.0034};

}  // namespace

std::vector<std::string> demo_shape_names() { return {"sphere", "double-sphere", "open-disc", "ball-on-plane"}; }

AnalyticShapeSpec demo_shape(std::string_view name) {
  if (name == "sphere") return AnalyticShapeSpec::sphere_shell(kCenter, 0.4);
  if (name == "double-sphere") return AnalyticShapeSpec::double_sphere(kCenter, 0.2, 0.4);
  if (name == "open-disc") return AnalyticShapeSpec::open_disc(kCenter, {0.0, 0.0, 1.0}, 0.3);
  if (name == "ball-on-plane") {
    return AnalyticShapeSpec::composite({
        AnalyticShapeSpec::double_sphere(kCenter + Vec3{0.0, 0.0, 0.1}, 0.15, 0.3),
        AnalyticShapeSpec::open_disc(kCenter + Vec3{0.0, 0.0, -0.28}, {0.0, 0.0, 1.0}, 0.42),
    });
  }
  throw UsageError("unknown demo shape '" + std::string(name) + "'");
}

}  // namespace gifs::cli
