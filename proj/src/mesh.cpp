#include "npr/mesh.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace npr {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

bool parse_double(std::string_view s, double& out) {
  // std::from_chars for double is unavailable on some toolchains; strtod needs a terminator.
  std::string tmp(s);
  char* end = nullptr;
  out = std::strtod(tmp.c_str(), &end);
  return end == tmp.c_str() + tmp.size() && !tmp.empty();
}

bool parse_long(std::string_view s, long long& out) {
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc{};
}

[[noreturn]] void fail(const std::string& origin, std::size_t line, const std::string& what) {
  std::ostringstream os;
  os << origin;
  if (line > 0) os << ":" << line;
  os << ": " << what;
  throw MeshError(os.str());
}

void fan_triangulate(const std::vector<std::uint32_t>& poly, std::vector<Face>& faces) {
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) faces.push_back({poly[0], poly[k], poly[k + 1]});
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MeshError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --- PLY ----------------------------------------------------------------

enum class PlyType { i8, u8, i16, u16, i32, u32, f32, f64 };

std::size_t ply_size(PlyType t) {
  switch (t) {
    case PlyType::i8:
    case PlyType::u8:
      return 1;
    case PlyType::i16:
    case PlyType::u16:
      return 2;
    case PlyType::i32:
    case PlyType::u32:
    case PlyType::f32:
      return 4;
    case PlyType::f64:
      return 8;
  }
  return 0;
}

bool ply_type(std::string_view name, PlyType& t) {
  if (name == "char" || name == "int8") t = PlyType::i8;
  else if (name == "uchar" || name == "uint8") t = PlyType::u8;
  else if (name == "short" || name == "int16") t = PlyType::i16;
  else if (name == "ushort" || name == "uint16") t = PlyType::u16;
  else if (name == "int" || name == "int32") t = PlyType::i32;
  else if (name == "uint" || name == "uint32") t = PlyType::u32;
  else if (name == "float" || name == "float32") t = PlyType::f32;
  else if (name == "double" || name == "float64") t = PlyType::f64;
  else return false;
  return true;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::f32;
  bool is_list = false;
  PlyType count_type = PlyType::u8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

double read_binary(const char*& p, const char* end, PlyType t, const std::string& origin) {
  const std::size_t n = ply_size(t);
  if (static_cast<std::size_t>(end - p) < n) fail(origin, 0, "truncated binary PLY body");
  double v = 0.0;
  switch (t) {
    case PlyType::i8: { std::int8_t x; std::memcpy(&x, p, 1); v = x; break; }
    case PlyType::u8: { std::uint8_t x; std::memcpy(&x, p, 1); v = x; break; }
    case PlyType::i16: { std::int16_t x; std::memcpy(&x, p, 2); v = x; break; }
    case PlyType::u16: { std::uint16_t x; std::memcpy(&x, p, 2); v = x; break; }
    case PlyType::i32: { std::int32_t x; std::memcpy(&x, p, 4); v = x; break; }
    case PlyType::u32: { std::uint32_t x; std::memcpy(&x, p, 4); v = x; break; }
    case PlyType::f32: { float x; std::memcpy(&x, p, 4); v = x; break; }
    case PlyType::f64: { double x; std::memcpy(&x, p, 8); v = x; break; }
  }
  p += n;
  return v;
}

Mesh parse_ply(const std::string& data, const std::string& origin) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&]() -> std::string {
    if (pos >= data.size()) fail(origin, line_no, "unexpected end of PLY header");
    const auto nl = data.find('\n', pos);
    const auto end = nl == std::string::npos ? data.size() : nl;
    std::string line = data.substr(pos, end - pos);
    pos = nl == std::string::npos ? data.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  };

  if (trim(next_line()) != "ply") fail(origin, 1, "missing 'ply' magic");
  bool binary = false;
  std::vector<PlyElement> elements;
  for (;;) {
    const std::string line = next_line();
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "end_header") break;
    if (tok[0] == "format") {
      if (tok.size() < 2) fail(origin, line_no, "malformed format line");
      if (tok[1] == "ascii") binary = false;
      else if (tok[1] == "binary_little_endian") binary = true;
      else fail(origin, line_no, "unsupported PLY format '" + std::string(tok[1]) + "'");
    } else if (tok[0] == "element") {
      long long n = 0;
      if (tok.size() != 3 || !parse_long(tok[2], n) || n < 0) fail(origin, line_no, "malformed element line");
      elements.push_back({std::string(tok[1]), static_cast<std::size_t>(n), {}});
    } else if (tok[0] == "property") {
      if (elements.empty()) fail(origin, line_no, "property before element");
      PlyProperty prop;
      if (tok.size() == 5 && tok[1] == "list") {
        prop.is_list = true;
        if (!ply_type(tok[2], prop.count_type) || !ply_type(tok[3], prop.type))
          fail(origin, line_no, "unknown list property type");
        prop.name = tok[4];
      } else if (tok.size() == 3) {
        if (!ply_type(tok[1], prop.type)) fail(origin, line_no, "unknown property type");
        prop.name = tok[2];
      } else {
        fail(origin, line_no, "malformed property line");
      }
      elements.back().props.push_back(prop);
    } else {
      fail(origin, line_no, "unexpected header keyword '" + std::string(tok[0]) + "'");
    }
  }

  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<std::uint32_t> poly;

  const char* p = data.data() + pos;
  const char* end = data.data() + data.size();
  std::istringstream ascii(binary ? std::string{} : data.substr(pos));

  auto read_ascii = [&]() -> double {
    std::string tok;
    if (!(ascii >> tok)) fail(origin, 0, "truncated ascii PLY body");
    double v = 0.0;
    if (!parse_double(tok, v)) fail(origin, 0, "unparseable PLY value '" + tok + "'");
    return v;
  };
  auto read_value = [&](PlyType t) { return binary ? read_binary(p, end, t, origin) : read_ascii(); };

  for (const auto& el : elements) {
    const bool is_vertex = el.name == "vertex";
    const bool is_face = el.name == "face";
    int ix = -1, iy = -1, iz = -1, ilist = -1;
    for (int k = 0; k < static_cast<int>(el.props.size()); ++k) {
      const auto& n = el.props[k].name;
      if (n == "x") ix = k;
      if (n == "y") iy = k;
      if (n == "z") iz = k;
      if (el.props[k].is_list && (n == "vertex_indices" || n == "vertex_index")) ilist = k;
    }
    if (is_vertex && (ix < 0 || iy < 0 || iz < 0)) fail(origin, 0, "vertex element lacks x/y/z");
    if (is_face && ilist < 0) fail(origin, 0, "face element lacks vertex_indices");
    for (std::size_t i = 0; i < el.count; ++i) {
      Vec3 v;
      for (int k = 0; k < static_cast<int>(el.props.size()); ++k) {
        const auto& prop = el.props[k];
        if (prop.is_list) {
          const double cnt = read_value(prop.count_type);
          if (cnt < 0) fail(origin, 0, "negative list length");
          poly.clear();
          for (std::size_t j = 0; j < static_cast<std::size_t>(cnt); ++j) {
            const double idx = read_value(prop.type);
            if (k == ilist) {
              if (idx < 0) fail(origin, 0, "negative vertex index in face " + std::to_string(i));
              poly.push_back(static_cast<std::uint32_t>(idx));
            }
          }
          if (is_face && k == ilist) {
            if (poly.size() < 3) fail(origin, 0, "face " + std::to_string(i) + " has fewer than 3 vertices");
            fan_triangulate(poly, faces);
          }
        } else {
          const double val = read_value(prop.type);
          if (k == ix) v.x = val;
          if (k == iy) v.y = val;
          if (k == iz) v.z = val;
        }
      }
      if (is_vertex) vertices.push_back(v);
    }
  }
  return make_mesh(std::move(vertices), std::move(faces));
}

}  // namespace

Mesh make_mesh(std::vector<Vec3> vertices, std::vector<Face> faces) {
  Mesh m;
  m.vertices = std::move(vertices);
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    if (!is_finite(m.vertices[i])) throw MeshError("vertex " + std::to_string(i) + " is not finite");
  }
  const auto n = static_cast<std::uint32_t>(m.vertices.size());
  m.faces.reserve(faces.size());
  m.face_normal.reserve(faces.size());
  m.face_centroid.reserve(faces.size());
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const Face& face = faces[f];
    for (auto idx : face) {
      if (idx >= n) {
        throw MeshError("face " + std::to_string(f) + " references vertex " + std::to_string(idx) +
                        " (have " + std::to_string(n) + ")");
      }
    }
    if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2]) continue;
    const Vec3& a = m.vertices[face[0]];
    const Vec3& b = m.vertices[face[1]];
    const Vec3& c = m.vertices[face[2]];
    const Vec3 e1 = b - a;
    const Vec3 e2 = c - a;
    const Vec3 cr = cross(e1, e2);
    const double scale = std::max({dot(e1, e1), dot(e2, e2), dot(c - b, c - b)});
    if (!(length(cr) > 1e-12 * scale)) continue;
    m.faces.push_back(face);
    m.face_normal.push_back(normalize(cr));
    m.face_centroid.push_back((a + b + c) / 3.0);
  }
  return m;
}

Mesh parse_obj(std::string_view text, const std::string& origin) {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  std::vector<std::uint32_t> poly;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const auto line = text.substr(pos, (nl == std::string_view::npos ? text.size() : nl) - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    const auto tok = split_ws(line);
    if (tok.empty() || tok[0].front() == '#') continue;
    if (tok[0] == "v") {
      if (tok.size() < 4) fail(origin, line_no, "vertex record needs 3 coordinates");
      Vec3 v;
      if (!parse_double(tok[1], v.x) || !parse_double(tok[2], v.y) || !parse_double(tok[3], v.z))
        fail(origin, line_no, "unparseable vertex record");
      vertices.push_back(v);
    } else if (tok[0] == "f") {
      poly.clear();
      for (std::size_t k = 1; k < tok.size(); ++k) {
        const auto slash = tok[k].find('/');
        long long idx = 0;
        if (!parse_long(tok[k].substr(0, slash), idx) || idx == 0)
          fail(origin, line_no, "unparseable face index '" + std::string(tok[k]) + "'");
        // Negative indices are relative to the current vertex count.
        const long long resolved = idx > 0 ? idx - 1 : static_cast<long long>(vertices.size()) + idx;
        if (resolved < 0 || resolved >= static_cast<long long>(vertices.size()))
          fail(origin, line_no, "face index " + std::to_string(idx) + " out of range");
        poly.push_back(static_cast<std::uint32_t>(resolved));
      }
      if (poly.size() < 3) fail(origin, line_no, "face with fewer than 3 vertices");
      fan_triangulate(poly, faces);
    }
    // vt, vn, g, o, s, usemtl, mtllib carry nothing we need.
  }
  return make_mesh(std::move(vertices), std::move(faces));
}

Mesh load_mesh(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw MeshError(path.string() + ": no such file");
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  const std::string data = read_file(path);
  Mesh m;
  if (ext == ".obj") m = parse_obj(data, path.string());
  else if (ext == ".ply") m = parse_ply(data, path.string());
  else throw MeshError(path.string() + ": unsupported extension '" + ext + "'");
  if (m.faces.empty()) throw MeshError(path.string() + ": mesh has no faces");
  return m;
}

void write_obj(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw MeshError(path.string() + ": cannot write file");
  out.precision(17);
  for (const auto& v : mesh.vertices) out << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
  for (const auto& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

Bounds bounds(const Mesh& mesh) {
  if (mesh.vertices.empty()) return {};
  Bounds b{mesh.vertices.front(), mesh.vertices.front()};
  for (const auto& v : mesh.vertices) {
    b.min = {std::min(b.min.x, v.x), std::min(b.min.y, v.y), std::min(b.min.z, v.z)};
    b.max = {std::max(b.max.x, v.x), std::max(b.max.y, v.y), std::max(b.max.z, v.z)};
  }
  return b;
}

double bounding_radius(const Mesh& mesh, const Vec3& center) {
  double r2 = 0.0;
  for (const auto& v : mesh.vertices) r2 = std::max(r2, dot(v - center, v - center));
  return std::sqrt(r2);
}

Mesh merge(std::span<const Mesh> parts) {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;
  for (const auto& part : parts) {
    const auto offset = static_cast<std::uint32_t>(vertices.size());
    vertices.insert(vertices.end(), part.vertices.begin(), part.vertices.end());
    for (const auto& f : part.faces) faces.push_back({f[0] + offset, f[1] + offset, f[2] + offset});
  }
  return make_mesh(std::move(vertices), std::move(faces));
}

EdgeAdjacency build_adjacency(const Mesh& mesh) {
  struct HalfEdge {
    std::uint32_t a, b, face;
  };
  std::vector<HalfEdge> half;
  half.reserve(mesh.faces.size() * 3);
  for (std::uint32_t f = 0; f < mesh.faces.size(); ++f) {
    const Face& face = mesh.faces[f];
    for (int k = 0; k < 3; ++k) {
      const auto u = face[k];
      const auto v = face[(k + 1) % 3];
      half.push_back({std::min(u, v), std::max(u, v), f});
    }
  }
  std::sort(half.begin(), half.end(), [](const HalfEdge& l, const HalfEdge& r) {
    if (l.a != r.a) return l.a < r.a;
    if (l.b != r.b) return l.b < r.b;
    return l.face < r.face;
  });

  EdgeAdjacency adj;
  adj.edges.reserve(half.size() / 2 + 1);
  for (std::size_t i = 0; i < half.size();) {
    std::size_t j = i;
    while (j < half.size() && half[j].a == half[i].a && half[j].b == half[i].b) ++j;
    if (j - i > 2) {
      const Vec3& p = mesh.vertices[half[i].a];
      const Vec3& q = mesh.vertices[half[i].b];
      std::ostringstream os;
      os << "non-manifold edge (" << p.x << ", " << p.y << ", " << p.z << ") - (" << q.x << ", " << q.y
         << ", " << q.z << ") has " << (j - i) << " adjacent faces";
      throw MeshError(os.str());
    }
    Edge e;
    e.v0 = half[i].a;
    e.v1 = half[i].b;
    e.face_count = static_cast<std::uint8_t>(j - i);
    for (std::size_t k = i; k < j; ++k) e.faces[k - i] = half[k].face;
    adj.edges.push_back(e);
    i = j;
  }
  return adj;
}

double face_orientation(std::uint32_t face, const Mesh& mesh, const Vec3& eye) {
  return dot(mesh.face_normal[face], mesh.face_centroid[face] - eye);
}

}  // namespace npr
