#pragma once

#include <filesystem>
#include <iosfwd>

#include "gifs/mesh.hpp"

namespace gifs {

/// Wavefront OBJ: `v` and `f` records, 1-based (or negative relative)
/// indices, polygons fan-triangulated. Other records are ignored.
TriangleMesh read_obj(std::istream& in);
TriangleMesh read_obj(const std::filesystem::path& path);
void write_obj(std::ostream& out, const TriangleMesh& mesh);
void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh);

/// Binary little-endian PLY. The writer stores float64 coordinates and
/// `list uchar int` faces; the reader accepts float/double coordinates,
/// any integer list types and skips unrelated scalar properties.
TriangleMesh read_ply(std::istream& in);
TriangleMesh read_ply(const std::filesystem::path& path);
void write_ply(std::ostream& out, const TriangleMesh& mesh);
void write_ply(const std::filesystem::path& path, const TriangleMesh& mesh);

/// Dispatch on the file extension (.obj or .ply).
TriangleMesh read_mesh(const std::filesystem::path& path);
void write_mesh(const std::filesystem::path& path, const TriangleMesh& mesh);

}  // namespace gifs
