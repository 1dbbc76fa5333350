#pragma once

#include <span>

#include "gifs/vec3.hpp"

namespace gifs {

struct PointPair {
  Point3 first;
  Point3 second;
};

/// A shape described by pairwise intersection flags and an unsigned
/// distance field.
///
/// flag(p1, p2) in [0, 1] estimates whether the closed segment p1-p2 meets
/// the surface; it is symmetric in its arguments. udf(p) >= 0 is the
/// distance to the surface. Implementations are immutable after
/// construction and every call is safe from concurrent threads.
///
/// The batched variants have the same semantics as the scalar calls. Their
/// default implementations split the input into fixed chunks and fan out
/// over the worker pool; outputs are written in input order.
class PairField {
 public:
  virtual ~PairField() = default;

  virtual double flag(const Point3& p1, const Point3& p2) const = 0;
  virtual double udf(const Point3& p) const = 0;

  virtual void flag_batch(std::span<const PointPair> pairs, std::span<double> out) const;
  virtual void udf_batch(std::span<const Point3> points, std::span<double> out) const;
};

}  // namespace gifs
