#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <vector>

#include "gifs/field.hpp"
#include "gifs/mesh.hpp"
#include "gifs/sampling.hpp"

namespace gifs {

struct ExtractionConfig {
  int initial_res = 20;
  int subdivisions = 3;
  double tau = 2.0;
  /// Used only for diagnostics; the assignment cost consumes raw flags.
  double flag_threshold = 0.5;
  int refine_iters = 30;
  double refine_lr = 2e-4;
  /// Must be a cube.
  Aabb domain{{-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}};
  RngSeed seed{0};
};

void validate(const ExtractionConfig& cfg);

/// Number of cubes per axis at `stage` (initial_res * 2^stage).
std::uint32_t stage_resolution(const ExtractionConfig& cfg, int stage);
double stage_cube_size(const ExtractionConfig& cfg, int stage);
double final_cube_size(const ExtractionConfig& cfg);

/// Lattice point of the final-stage grid; exact integer arithmetic keeps
/// vertices shared by neighbouring cubes bitwise identical.
Point3 lattice_point(const ExtractionConfig& cfg, std::uint32_t i, std::uint32_t j, std::uint32_t k);

struct CubeIndex {
  std::uint32_t i = 0;
  std::uint32_t j = 0;
  std::uint32_t k = 0;

  auto operator<=>(const CubeIndex&) const = default;
};

/// Coarse-to-fine localization. At each of the T stages a cube survives if
/// the UDF at its centre is below s * tau, and survivors are split into 8.
/// Returns the final-stage children in lexicographic order.
std::vector<CubeIndex> locate_cubes(const PairField& field, const ExtractionConfig& cfg);

// Cube corners: 0=(0,0,0) 1=(1,0,0) 2=(1,1,0) 3=(0,1,0) 4=(0,0,1)
// 5=(1,0,1) 6=(1,1,1) 7=(0,1,1).
inline constexpr std::array<std::array<int, 3>, 8> kCubeCorners{{
    {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}, {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}}};

inline constexpr std::array<std::array<int, 2>, 12> kCubeEdges{{
    {0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6}, {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}}};

inline constexpr int kCornerPairs = 28;

/// Index of the unordered corner pair (i, j), i != j, in lexicographic order
/// of (min, max).
int corner_pair_index(int i, int j);

/// Flags between all 28 unordered pairs of cube corners.
struct AssignmentProblem {
  std::array<double, kCornerPairs> flags{};

  double flag(int i, int j) const { return flags[static_cast<std::size_t>(corner_pair_index(i, j))]; }
  void set_flag(int i, int j, double b) { flags[static_cast<std::size_t>(corner_pair_index(i, j))] = b; }
};

/// Bit i of `labels` is the class of corner i.
struct Assignment {
  std::uint8_t labels = 0;
  double cost = 0.0;

  int label(int corner) const { return (labels >> corner) & 1; }
};

/// Disagreement cost: pairs split by the labeling pay 1 - b, pairs kept
/// together pay b.
double assignment_cost(const AssignmentProblem& prob, std::uint8_t labels);

/// Exhaustive minimization over all labelings with corner 0 in class 0.
/// Ties go to the smallest labeling.
Assignment solve_assignment(const AssignmentProblem& prob);

/// Triangles of one cube configuration as triples of cube edge ids.
///
/// The table is built by tracing the label boundary over the six cube faces.
/// On a face whose labels alternate, the two corners on the diagonal through
/// the face's minimum corner are cut off separately; the choice depends only
/// on lattice position, so cubes sharing a face always agree. Triangles face
/// from class 1 towards class 0.
std::span<const std::array<int, 3>> marching_cubes_triangles(std::uint8_t labels);

/// Per-cube triangulation with welded edge-midpoint vertices. Cubes are
/// final-stage indices of `cfg`.
TriangleMesh adapted_marching_cubes(const PairField& field, std::span<const CubeIndex> cubes,
                                    const ExtractionConfig& cfg);

/// Moves vertices to decrease the summed UDF of one random point per face
/// per iteration (RMSprop). Connectivity is unchanged.
TriangleMesh refine_mesh(const PairField& field, const TriangleMesh& mesh, const ExtractionConfig& cfg);

struct ExtractionResult {
  std::vector<CubeIndex> cubes;
  TriangleMesh unrefined;
  TriangleMesh mesh;
};

ExtractionResult extract_detailed(const PairField& field, const ExtractionConfig& cfg);
TriangleMesh extract(const PairField& field, const ExtractionConfig& cfg);

}  // namespace gifs
