#include "hoieval/mesh_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hoieval/errors.hpp"

namespace hoieval {

namespace {

[[noreturn]] void fail(const std::filesystem::path &path, std::size_t line, const std::string &why) {
  throw Error(ErrorKind::kParseError,
              path.string() + ":" + std::to_string(line) + ": " + why);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

bool parse_double(std::string_view tok, double &out) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

bool parse_long(std::string_view tok, long &out) {
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return res.ec == std::errc() && res.ptr == tok.data() + tok.size();
}

void add_polygon(TriMesh &mesh, const std::vector<std::uint32_t> &poly,
                 const std::filesystem::path &path, std::size_t line) {
  if (poly.size() < 3) fail(path, line, "face needs at least 3 vertices");
  for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
    const Face f{poly[0], poly[k], poly[k + 1]};
    if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) {
      fail(path, line, "degenerate face repeats a vertex index");
    }
    mesh.faces.push_back(f);
  }
}

TriMesh load_obj(const std::filesystem::path &path, std::istream &in) {
  TriMesh mesh;
  std::string text;
  std::size_t line_no = 0;
  std::vector<std::uint32_t> poly;
  while (std::getline(in, text)) {
    ++line_no;
    const auto toks = split_ws(text);
    if (toks.empty() || toks[0].front() == '#') continue;
    if (toks[0] == "v") {
      if (toks.size() < 4) fail(path, line_no, "vertex needs 3 coordinates");
      Vec3 v;
      for (int c = 0; c < 3; ++c) {
        if (!parse_double(toks[1 + c], v[c])) fail(path, line_no, "bad vertex coordinate");
      }
      if (!v.allFinite()) fail(path, line_no, "non-finite vertex coordinate");
      mesh.vertices.push_back(v);
    } else if (toks[0] == "f") {
      poly.clear();
      for (std::size_t k = 1; k < toks.size(); ++k) {
        const std::string_view tok = toks[k].substr(0, toks[k].find('/'));
        long idx = 0;
        if (!parse_long(tok, idx) || idx == 0) fail(path, line_no, "bad face index");
        const long n = static_cast<long>(mesh.vertices.size());
        const long zero_based = idx > 0 ? idx - 1 : n + idx;
        if (zero_based < 0 || zero_based >= n) {
          fail(path, line_no, "face index " + std::string(tok) + " out of range (" +
                                  std::to_string(n) + " vertices so far)");
        }
        poly.push_back(static_cast<std::uint32_t>(zero_based));
      }
      add_polygon(mesh, poly, path, line_no);
    }
    // vn, vt, g, o, s, usemtl, mtllib: not geometry we need
  }
  return mesh;
}

TriMesh load_ply(const std::filesystem::path &path, std::istream &in) {
  std::string text;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    if (!std::getline(in, text)) return false;
    ++line_no;
    return true;
  };
  if (!next_line() || split_ws(text).empty() || split_ws(text)[0] != "ply") {
    fail(path, line_no, "missing 'ply' magic");
  }
  struct Element {
    std::string name;
    std::size_t count = 0;
    std::vector<std::string> props;
  };
  std::vector<Element> elements;
  bool ascii = false;
  for (;;) {
    if (!next_line()) fail(path, line_no, "unterminated header");
    const auto toks = split_ws(text);
    if (toks.empty()) continue;
    if (toks[0] == "end_header") break;
    if (toks[0] == "format") {
      if (toks.size() < 2 || toks[1] != "ascii") fail(path, line_no, "only ASCII PLY is supported");
      ascii = true;
    } else if (toks[0] == "element") {
      long count = 0;
      if (toks.size() != 3 || !parse_long(toks[2], count) || count < 0) {
        fail(path, line_no, "bad element declaration");
      }
      elements.push_back({std::string(toks[1]), static_cast<std::size_t>(count), {}});
    } else if (toks[0] == "property") {
      if (elements.empty() || toks.size() < 3) fail(path, line_no, "property outside element");
      elements.back().props.emplace_back(toks.back());
    }
  }
  if (!ascii) fail(path, line_no, "missing format line");

  TriMesh mesh;
  std::vector<std::uint32_t> poly;
  for (const Element &el : elements) {
    int ix = -1, iy = -1, iz = -1;
    for (std::size_t p = 0; p < el.props.size(); ++p) {
      if (el.props[p] == "x") ix = static_cast<int>(p);
      if (el.props[p] == "y") iy = static_cast<int>(p);
      if (el.props[p] == "z") iz = static_cast<int>(p);
    }
    for (std::size_t r = 0; r < el.count; ++r) {
      if (!next_line()) fail(path, line_no, "unexpected end of file in element '" + el.name + "'");
      const auto toks = split_ws(text);
      if (el.name == "vertex") {
        if (ix < 0 || iy < 0 || iz < 0) fail(path, line_no, "vertex element lacks x/y/z");
        if (toks.size() < el.props.size()) fail(path, line_no, "short vertex line");
        Vec3 v;
        if (!parse_double(toks[ix], v.x()) || !parse_double(toks[iy], v.y()) ||
            !parse_double(toks[iz], v.z()) || !v.allFinite()) {
          fail(path, line_no, "bad vertex coordinate");
        }
        mesh.vertices.push_back(v);
      } else if (el.name == "face") {
        long n = 0;
        if (toks.empty() || !parse_long(toks[0], n) || n < 0 ||
            toks.size() < static_cast<std::size_t>(n) + 1) {
          fail(path, line_no, "bad face list");
        }
        poly.clear();
        for (long k = 0; k < n; ++k) {
          long idx = 0;
          if (!parse_long(toks[1 + k], idx)) fail(path, line_no, "bad face index");
          if (idx < 0 || static_cast<std::size_t>(idx) >= mesh.vertices.size()) {
            fail(path, line_no, "face index " + std::to_string(idx) + " out of range");
          }
          poly.push_back(static_cast<std::uint32_t>(idx));
        }
        add_polygon(mesh, poly, path, line_no);
      }
    }
  }
  return mesh;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::ofstream open_out(const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIoError, "cannot write " + path.string());
  return out;
}

}  // namespace

TriMesh load_mesh(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIoError, "cannot open mesh " + path.string());
  std::string ext = path.extension().string();
  for (auto &c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (ext == ".obj") return load_obj(path, in);
  if (ext == ".ply") return load_ply(path, in);
  throw Error(ErrorKind::kParseError, "unsupported mesh extension: " + path.string());
}

void save_obj(const TriMesh &mesh, const std::filesystem::path &path) {
  std::ostringstream s;
  for (const Vec3 &v : mesh.vertices) {
    s << "v " << format_double(v.x()) << ' ' << format_double(v.y()) << ' '
      << format_double(v.z()) << '\n';
  }
  for (const Face &f : mesh.faces) {
    s << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  }
  open_out(path) << s.str();
}

void save_ply(const TriMesh &mesh, const std::filesystem::path &path) {
  std::ostringstream s;
  s << "ply\nformat ascii 1.0\nelement vertex " << mesh.vertices.size()
    << "\nproperty double x\nproperty double y\nproperty double z\nelement face "
    << mesh.faces.size() << "\nproperty list uchar int vertex_indices\nend_header\n";
  for (const Vec3 &v : mesh.vertices) {
    s << format_double(v.x()) << ' ' << format_double(v.y()) << ' ' << format_double(v.z())
      << '\n';
  }
  for (const Face &f : mesh.faces) s << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  open_out(path) << s.str();
}

}  // namespace hoieval
