#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gifs/error.hpp"
#include "gifs/mesh.hpp"
#include "gifs/sampling.hpp"
#include "test_support.hpp"

namespace gifs {
namespace {

TEST(Mesh, ValidateRejectsBadIndices) {
  TriangleMesh m{{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 3}}};
  EXPECT_THROW(validate(m), InvalidMesh);
  m.faces = {{0, 1, 1}};
  EXPECT_THROW(validate(m), InvalidMesh);
  m.faces = {{0, 1, 2}};
  m.vertices[1].x = std::nan("");
  EXPECT_THROW(validate(m), InvalidMesh);
  m.vertices[1].x = 1;
  EXPECT_NO_THROW(validate(m));
}

TEST(Mesh, AreaOfBox) {
  const TriangleMesh box = make_box({0, 0, 0}, {1, 2, 3});
  EXPECT_NEAR(surface_area(box), 2 * (2 + 6 + 3), 1e-12);
  const MeshTopology t = analyze_topology(box);
  EXPECT_TRUE(t.closed_manifold());
  EXPECT_EQ(t.euler_characteristic, 2);
}

TEST(Mesh, IcosphereIsClosedGenusZero) {
  for (int depth = 0; depth <= 3; ++depth) {
    const TriangleMesh s = make_icosphere({0.1, 0.2, 0.3}, 0.5, depth);
    const MeshTopology t = analyze_topology(s);
    EXPECT_EQ(t.faces, 20u << (2 * depth));
    EXPECT_TRUE(t.closed_manifold());
    EXPECT_EQ(t.euler_characteristic, 2);
    EXPECT_EQ(t.components, 1u);
    for (const Vec3& v : s.vertices) EXPECT_NEAR(distance(v, {0.1, 0.2, 0.3}), 0.5, 1e-12);
  }
}

TEST(Mesh, SquareHasBoundary) {
  const TriangleMesh sq = make_square(0.5, 0.1, 4);
  const MeshTopology t = analyze_topology(sq);
  EXPECT_EQ(t.faces, 32u);
  EXPECT_EQ(t.boundary_edges, 16u);
  EXPECT_EQ(t.euler_characteristic, 1);
  EXPECT_NEAR(surface_area(sq), 1.0, 1e-12);
}

TEST(Mesh, ComponentsOfDisjointUnion) {
  TriangleMesh a = make_icosphere({-0.5, 0, 0}, 0.2, 1);
  const TriangleMesh b = make_box({0.2, 0.2, 0.2}, {0.4, 0.4, 0.4});
  const auto base = static_cast<std::uint32_t>(a.vertices.size());
  a.vertices.insert(a.vertices.end(), b.vertices.begin(), b.vertices.end());
  for (Face f : b.faces) a.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
  EXPECT_EQ(connected_components(a).size(), 2u);
  EXPECT_EQ(analyze_topology(a).euler_characteristic, 4);
}

TEST(Mesh, NonManifoldEdgeDetected) {
  const TriangleMesh fan{{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}},
                         {{0, 1, 2}, {1, 0, 3}, {0, 1, 4}}};
  EXPECT_EQ(analyze_topology(fan).nonmanifold_edges, 1u);
}

TEST(Normalize, FitsExtentAndRoundTrips) {
  const TriangleMesh box = make_box({3, -1, 10}, {7, 1, 11});
  const NormalizedMesh n = normalize_mesh(box);
  const Aabb b = bounds(n.mesh);
  EXPECT_NEAR(b.extent().x, kNormalizedExtent, 1e-12);
  EXPECT_NEAR(b.extent().y, kNormalizedExtent / 2, 1e-12);
  EXPECT_NEAR(b.center().x, 0, 1e-12);
  EXPECT_NEAR(b.center().z, 0, 1e-12);
  const TriangleMesh back = invert_transform(n.mesh, n.transform);
  for (std::size_t i = 0; i < box.vertices.size(); ++i)
    EXPECT_NEAR(distance(back.vertices[i], box.vertices[i]), 0, 1e-12);
}

TEST(Normalize, CubeArithmetic) {
  const NormalizedMesh n = normalize_mesh(make_box({0, 0, 0}, {2, 2, 2}));
  EXPECT_DOUBLE_EQ(n.transform.scale, 0.45);
  EXPECT_EQ(n.transform.offset, (Vec3{-1, -1, -1}));
  const Aabb b = bounds(n.mesh);
  EXPECT_EQ(b.lo, (Vec3{-0.45, -0.45, -0.45}));
  EXPECT_EQ(b.hi, (Vec3{0.45, 0.45, 0.45}));
}

TEST(Normalize, Idempotent) {
  const NormalizedMesh once = normalize_mesh(make_icosphere({1, 2, 3}, 7, 2));
  const NormalizedMesh twice = normalize_mesh(once.mesh);
  for (std::size_t i = 0; i < once.mesh.vertices.size(); ++i)
    ASSERT_NEAR(distance(once.mesh.vertices[i], twice.mesh.vertices[i]), 0, 1e-12);
}

TEST(Normalize, RandomMeshRoundTrip) {
  const TriangleMesh soup = testing::random_soup(200, RngSeed{6}, -30, 45);
  const NormalizedMesh n = normalize_mesh(soup);
  const TriangleMesh back = invert_transform(n.mesh, n.transform);
  for (std::size_t i = 0; i < soup.vertices.size(); ++i)
    ASSERT_NEAR(distance(back.vertices[i], soup.vertices[i]), 0, 1e-9);
}

TEST(Normalize, Errors) {
  EXPECT_THROW(normalize_mesh(TriangleMesh{}), EmptyMesh);
  const TriangleMesh point{{{1, 1, 1}, {1, 1, 1}, {1, 1, 1}}, {{0, 1, 2}}};
  EXPECT_THROW(normalize_mesh(point), DegenerateMesh);
}

TEST(Sampling, StreamsAreDeterministicAndDistinct) {
  Rng a = make_rng(RngSeed{5}, 3), b = make_rng(RngSeed{5}, 3), c = make_rng(RngSeed{5}, 4);
  const auto x = a(), y = b(), z = c();
  EXPECT_EQ(x, y);
  EXPECT_NE(x, z);
}

TEST(Sampling, PointsLieOnSurface) {
  const TriangleMesh s = make_icosphere({0, 0, 0}, 0.3, 2);
  const auto pts = sample_surface(s, 2000, RngSeed{1});
  ASSERT_EQ(pts.size(), 2000u);
  for (const Vec3& p : pts) {
    EXPECT_LE(norm(p), 0.3 + 1e-12);
    EXPECT_GT(norm(p), 0.3 * 0.9);
  }
  EXPECT_EQ(pts, sample_surface(s, 2000, RngSeed{1}));
}

TEST(Sampling, AreaWeightedFaceChoice) {
  // Area ratio 9:1; the count on the large face is Binomial(n, 0.9).
  const TriangleMesh m{{{0, 0, 0}, {3, 0, 0}, {0, 3, 0}, {0, 0, 1}, {1, 0, 1}, {0, 1, 1}},
                       {{0, 1, 2}, {3, 4, 5}}};
  const SurfaceSampler sampler(m);
  Rng rng = make_rng(RngSeed{11});
  const int n = 10000;
  int large = 0;
  for (int i = 0; i < n; ++i) large += sampler.sample(rng).face == 0;
  EXPECT_NEAR(large, n * 0.9, 3 * std::sqrt(n * 0.9 * 0.1));
}

TEST(Sampling, SingleTriangleSamplesInside) {
  const TriangleMesh tri{{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, {{0, 1, 2}}};
  const auto pts = sample_surface(tri, 3, RngSeed{3});
  ASSERT_EQ(pts.size(), 3u);
  for (const Vec3& p : pts) {
    EXPECT_EQ(p.z, 0.0);
    EXPECT_GE(p.x, 0.0);
    EXPECT_GE(p.y, 0.0);
    EXPECT_LE(p.x + p.y, 1.0 + 1e-15);
  }
}

TEST(Sampling, BarycentricUniformWithinTriangle) {
  // Fraction landing in the sub-triangle cut at x + y < 1/2 must be 1/4.
  Rng rng = make_rng(RngSeed{12});
  const int n = 40000;
  int inside = 0;
  for (int i = 0; i < n; ++i) {
    const Vec3 p = barycentric_sample({0, 0, 0}, {1, 0, 0}, {0, 1, 0}, uniform01(rng), uniform01(rng));
    ASSERT_GE(p.x, 0);
    ASSERT_GE(p.y, 0);
    ASSERT_LE(p.x + p.y, 1 + 1e-15);
    inside += p.x + p.y < 0.5;
  }
  EXPECT_NEAR(inside, n * 0.25, 5 * std::sqrt(n * 0.25 * 0.75));
}

TEST(Sampling, ZeroAreaMeshThrows) {
  const TriangleMesh flat{{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}}, {{0, 1, 2}}};
  EXPECT_THROW(SurfaceSampler{flat}, DegenerateMesh);
  EXPECT_THROW(SurfaceSampler{TriangleMesh{}}, EmptyMesh);
}

}  // namespace
}  // namespace gifs
