#include "gifs/field.hpp"

#include "gifs/error.hpp"
#include "gifs/parallel.hpp"

namespace gifs {
namespace {
constexpr std::size_t kChunk = 1024;
}

void PairField::flag_batch(std::span<const PointPair> pairs, std::span<double> out) const {
  if (out.size() != pairs.size()) throw InvalidArgument("flag_batch output size mismatch");
  parallel_for_chunks(pairs.size(), kChunk, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = flag(pairs[i].first, pairs[i].second);
  });
}

void PairField::udf_batch(std::span<const Point3> points, std::span<double> out) const {
  if (out.size() != points.size()) throw InvalidArgument("udf_batch output size mismatch");
  parallel_for_chunks(points.size(), kChunk, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = udf(points[i]);
  });
}

}  // namespace gifs
