#include "gifs/mesh_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "gifs/error.hpp"

namespace gifs {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

template <typename T>
T parse_number(std::string_view token, std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw FormatError("line " + std::to_string(line) + ": bad number '" + std::string(token) + "'");
  return value;
}

void append_fan(TriangleMesh& mesh, const std::vector<std::uint32_t>& polygon) {
  for (std::size_t k = 1; k + 1 < polygon.size(); ++k) {
    const Face f{polygon[0], polygon[k], polygon[k + 1]};
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) continue;
    mesh.faces.push_back(f);
  }
}

void append_double(std::string& buf, double v) {
  char tmp[32];
  const auto [ptr, ec] = std::to_chars(tmp, tmp + sizeof(tmp), v);
  buf.append(tmp, ptr);
}

}  // namespace

TriangleMesh read_obj(std::istream& in) {
  TriangleMesh mesh;
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::uint32_t> polygon;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view s = trim(line);
    if (s.size() < 2 || s[0] == '#') continue;
    if (s[0] == 'v' && (s[1] == ' ' || s[1] == '\t')) {
      const auto tok = split_ws(s.substr(2));
      if (tok.size() < 3) throw FormatError("line " + std::to_string(line_no) + ": vertex needs 3 coordinates");
      mesh.vertices.push_back({parse_number<double>(tok[0], line_no), parse_number<double>(tok[1], line_no),
                               parse_number<double>(tok[2], line_no)});
    } else if (s[0] == 'f' && (s[1] == ' ' || s[1] == '\t')) {
      polygon.clear();
      for (std::string_view tok : split_ws(s.substr(2))) {
        tok = tok.substr(0, tok.find('/'));
        const auto raw = parse_number<long long>(tok, line_no);
        const auto n = static_cast<long long>(mesh.vertices.size());
        const long long idx = raw > 0 ? raw - 1 : n + raw;
        if (raw == 0 || idx < 0 || idx >= n)
          throw FormatError("line " + std::to_string(line_no) + ": face index out of range");
        polygon.push_back(static_cast<std::uint32_t>(idx));
      }
      if (polygon.size() < 3) throw FormatError("line " + std::to_string(line_no) + ": face needs 3 indices");
      append_fan(mesh, polygon);
    }
  }
  validate(mesh);
  return mesh;
}

TriangleMesh read_obj(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_obj(in);
}

void write_obj(std::ostream& out, const TriangleMesh& mesh) {
  std::string buf;
  buf.reserve(mesh.vertices.size() * 64 + mesh.faces.size() * 32);
  for (const Vec3& v : mesh.vertices) {
    buf += "v ";
    append_double(buf, v.x);
    buf += ' ';
    append_double(buf, v.y);
    buf += ' ';
    append_double(buf, v.z);
    buf += '\n';
  }
  for (const Face& f : mesh.faces) {
    buf += 'f';
    for (auto idx : f) {
      buf += ' ';
      buf += std::to_string(idx + 1);
    }
    buf += '\n';
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("failed writing OBJ data");
}

void write_obj(const std::filesystem::path& path, const TriangleMesh& mesh) {
  auto out = open_output(path);
  write_obj(out, mesh);
}

namespace {

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

PlyType parse_ply_type(std::string_view name) {
  if (name == "char" || name == "int8") return PlyType::Int8;
  if (name == "uchar" || name == "uint8") return PlyType::UInt8;
  if (name == "short" || name == "int16") return PlyType::Int16;
  if (name == "ushort" || name == "uint16") return PlyType::UInt16;
  if (name == "int" || name == "int32") return PlyType::Int32;
  if (name == "uint" || name == "uint32") return PlyType::UInt32;
  if (name == "float" || name == "float32") return PlyType::Float32;
  if (name == "double" || name == "float64") return PlyType::Float64;
  throw FormatError("unknown PLY type '" + std::string(name) + "'");
}

std::size_t ply_size(PlyType t) {
  switch (t) {
    case PlyType::Int8:
    case PlyType::UInt8: return 1;
    case PlyType::Int16:
    case PlyType::UInt16: return 2;
    case PlyType::Int32:
    case PlyType::UInt32:
    case PlyType::Float32: return 4;
    case PlyType::Float64: return 8;
  }
  return 0;
}

double decode_ply(PlyType t, const char* p) {
  auto load = [p]<typename T>(T) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    return static_cast<double>(v);
  };
  switch (t) {
    case PlyType::Int8: return load(std::int8_t{});
    case PlyType::UInt8: return load(std::uint8_t{});
    case PlyType::Int16: return load(std::int16_t{});
    case PlyType::UInt16: return load(std::uint16_t{});
    case PlyType::Int32: return load(std::int32_t{});
    case PlyType::UInt32: return load(std::uint32_t{});
    case PlyType::Float32: return load(float{});
    case PlyType::Float64: return load(double{});
  }
  return 0.0;
}

struct PlyProperty {
  std::string name;
  bool is_list = false;
  PlyType count_type = PlyType::UInt8;
  PlyType type = PlyType::Float32;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

class ByteReader {
 public:
  explicit ByteReader(std::istream& in) : in_(in) {}
  const char* take(std::size_t n) {
    buf_.resize(n);
    in_.read(buf_.data(), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw TruncatedFile("PLY body ends early");
    return buf_.data();
  }

 private:
  std::istream& in_;
  std::vector<char> buf_;
};

}  // namespace

TriangleMesh read_ply(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != "ply") throw FormatError("missing PLY magic");
  std::vector<PlyElement> elements;
  bool binary_le = false;
  bool header_done = false;
  while (std::getline(in, line)) {
    const auto tok = split_ws(trim(line));
    if (tok.empty()) continue;
    if (tok[0] == "end_header") {
      header_done = true;
      break;
    }
    if (tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "format") {
      if (tok.size() < 2) throw FormatError("bad PLY format line");
      if (tok[1] != "binary_little_endian")
        throw FormatError("unsupported PLY format '" + std::string(tok[1]) + "'");
      binary_le = true;
    } else if (tok[0] == "element") {
      if (tok.size() != 3) throw FormatError("bad PLY element line");
      elements.push_back({std::string(tok[1]), parse_number<std::size_t>(tok[2], 0), {}});
    } else if (tok[0] == "property") {
      if (elements.empty()) throw FormatError("PLY property before element");
      PlyProperty prop;
      if (tok.size() == 5 && tok[1] == "list") {
        prop.is_list = true;
        prop.count_type = parse_ply_type(tok[2]);
        prop.type = parse_ply_type(tok[3]);
        prop.name = tok[4];
      } else if (tok.size() == 3) {
        prop.type = parse_ply_type(tok[1]);
        prop.name = tok[2];
      } else {
        throw FormatError("bad PLY property line");
      }
      elements.back().properties.push_back(prop);
    } else {
      throw FormatError("unexpected PLY header line '" + line + "'");
    }
  }
  if (!header_done) throw TruncatedFile("PLY header ends early");
  if (!binary_le) throw FormatError("PLY format line missing");

  TriangleMesh mesh;
  ByteReader reader(in);
  std::vector<std::uint32_t> polygon;
  for (const PlyElement& el : elements) {
    const bool is_vertex = el.name == "vertex";
    const bool is_face = el.name == "face";
    int coord_slot[3] = {-1, -1, -1};
    for (std::size_t p = 0; p < el.properties.size(); ++p) {
      const auto& name = el.properties[p].name;
      if (is_vertex && name.size() == 1 && name[0] >= 'x' && name[0] <= 'z') {
        if (el.properties[p].is_list) throw FormatError("PLY vertex coordinate is a list");
        coord_slot[name[0] - 'x'] = static_cast<int>(p);
      }
    }
    if (is_vertex && (coord_slot[0] < 0 || coord_slot[1] < 0 || coord_slot[2] < 0))
      throw FormatError("PLY vertex element lacks x/y/z");

    for (std::size_t item = 0; item < el.count; ++item) {
      Vec3 v{};
      for (std::size_t p = 0; p < el.properties.size(); ++p) {
        const PlyProperty& prop = el.properties[p];
        if (!prop.is_list) {
          const char* bytes = reader.take(ply_size(prop.type));
          if (is_vertex) {
            for (int a = 0; a < 3; ++a)
              if (coord_slot[a] == static_cast<int>(p)) v[a] = decode_ply(prop.type, bytes);
          }
          continue;
        }
        const double count_value = decode_ply(prop.count_type, reader.take(ply_size(prop.count_type)));
        if (count_value < 0) throw FormatError("negative PLY list length");
        const auto count = static_cast<std::size_t>(count_value);
        const char* bytes = reader.take(count * ply_size(prop.type));
        if (is_face && (prop.name == "vertex_indices" || prop.name == "vertex_index")) {
          polygon.clear();
          for (std::size_t k = 0; k < count; ++k) {
            const double idx = decode_ply(prop.type, bytes + k * ply_size(prop.type));
            if (idx < 0 || idx >= static_cast<double>(mesh.vertices.size()))
              throw FormatError("PLY face index out of range");
            polygon.push_back(static_cast<std::uint32_t>(idx));
          }
          if (polygon.size() < 3) throw FormatError("PLY face needs 3 indices");
          append_fan(mesh, polygon);
        }
      }
      if (is_vertex) mesh.vertices.push_back(v);
    }
  }
  validate(mesh);
  return mesh;
}

TriangleMesh read_ply(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_ply(in);
}

void write_ply(std::ostream& out, const TriangleMesh& mesh) {
  std::ostringstream header;
  header << "ply\nformat binary_little_endian 1.0\ncomment written by gifs\n"
         << "element vertex " << mesh.vertices.size() << "\n"
         << "property double x\nproperty double y\nproperty double z\n"
         << "element face " << mesh.faces.size() << "\n"
         << "property list uchar int vertex_indices\nend_header\n";
  const std::string h = header.str();
  std::string body;
  body.resize(mesh.vertices.size() * 24 + mesh.faces.size() * 13);
  char* p = body.data();
  for (const Vec3& v : mesh.vertices) {
    const double xyz[3] = {v.x, v.y, v.z};
    std::memcpy(p, xyz, 24);
    p += 24;
  }
  for (const Face& f : mesh.faces) {
    *p++ = 3;
    const std::int32_t idx[3] = {static_cast<std::int32_t>(f[0]), static_cast<std::int32_t>(f[1]),
                                 static_cast<std::int32_t>(f[2])};
    std::memcpy(p, idx, 12);
    p += 12;
  }
  out.write(h.data(), static_cast<std::streamsize>(h.size()));
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw IoError("failed writing PLY data");
}

void write_ply(const std::filesystem::path& path, const TriangleMesh& mesh) {
  auto out = open_output(path);
  write_ply(out, mesh);
}

TriangleMesh read_mesh(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".obj") return read_obj(path);
  if (ext == ".ply") return read_ply(path);
  throw FormatError("unsupported mesh extension '" + ext + "'");
}

void write_mesh(const std::filesystem::path& path, const TriangleMesh& mesh) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".obj") return write_obj(path, mesh);
  if (ext == ".ply") return write_ply(path, mesh);
  throw FormatError("unsupported mesh extension '" + ext + "'");
}

}  // namespace gifs
