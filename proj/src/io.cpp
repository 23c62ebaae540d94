#include "fabopt/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace fabopt {

namespace {

// Next whitespace-delimited PGM header token, skipping # comments.
std::string header_token(std::istream& in) {
  std::string tok;
  char ch = 0;
  while (in.get(ch)) {
    if (ch == '#') {
      in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(ch);
  }
  if (tok.empty()) throw IoError("truncated PGM header");
  return tok;
}

int header_int(std::istream& in, const char* what) {
  const std::string tok = header_token(in);
  int v = 0;
  const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size() || v < 0) {
    throw IoError(std::string("bad PGM ") + what + ": " + tok);
  }
  return v;
}

std::int8_t pixel_from_level(int level, int maxval) {
  if (level == 0) return BinaryGrid::kVoid;
  if (level == maxval) return BinaryGrid::kSolid;
  throw IoError("PGM design must contain only 0 and " + std::to_string(maxval));
}

std::string lower_extension(const std::filesystem::path& p) {
  std::string e = p.extension().string();
  for (char& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return e;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) throw IoError("cannot format number");
  return std::string(buf.data(), p);
}

BinaryGrid read_pgm(std::istream& in) {
  const std::string magic = header_token(in);
  if (magic != "P2" && magic != "P5") throw IoError("not a PGM file (expected P2 or P5)");
  const int width = header_int(in, "width");
  const int height = header_int(in, "height");
  const int maxval = header_int(in, "maxval");
  if (width == 0 || height == 0) throw IoError("PGM has zero size");
  if (maxval < 1 || maxval > 255) throw IoError("PGM maxval must be in 1..255");
  std::vector<std::int8_t> values(static_cast<std::size_t>(width) * height);
  if (magic == "P5") {
    std::vector<char> raw(values.size());
    if (!in.read(raw.data(), static_cast<std::streamsize>(raw.size()))) throw IoError("truncated PGM data");
    for (std::size_t i = 0; i < raw.size(); ++i) {
      values[i] = pixel_from_level(static_cast<unsigned char>(raw[i]), maxval);
    }
  } else {
    for (auto& v : values) {
      int level = 0;
      if (!(in >> level)) throw IoError("truncated PGM data");
      v = pixel_from_level(level, maxval);
    }
  }
  return BinaryGrid::from_values(height, width, std::move(values));
}

void write_pgm(std::ostream& out, const BinaryGrid& x, PgmFormat format) {
  out << (format == PgmFormat::kPlain ? "P2" : "P5") << '\n' << x.cols() << ' ' << x.rows() << "\n255\n";
  for (int r = 0; r < x.rows(); ++r) {
    for (int c = 0; c < x.cols(); ++c) {
      const int level = x(r, c) > 0 ? 255 : 0;
      if (format == PgmFormat::kRaw) {
        out.put(static_cast<char>(level));
      } else {
        out << (c ? " " : "") << level;
      }
    }
    if (format == PgmFormat::kPlain) out << '\n';
  }
}

BinaryGrid read_csv(std::istream& in) {
  std::vector<std::int8_t> values;
  int rows = 0, cols = -1;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string cell;
    int n = 0;
    while (std::getline(ss, cell, ',')) {
      const auto b = cell.find_first_not_of(" \t");
      const auto e = cell.find_last_not_of(" \t");
      if (b == std::string::npos) throw IoError("empty CSV cell");
      const std::string t = cell.substr(b, e - b + 1);
      if (t == "1" || t == "+1") {
        values.push_back(BinaryGrid::kSolid);
      } else if (t == "-1") {
        values.push_back(BinaryGrid::kVoid);
      } else {
        throw IoError("CSV design values must be -1 or 1, got '" + t + "'");
      }
      ++n;
    }
    if (cols >= 0 && n != cols) throw IoError("CSV rows have different lengths");
    cols = n;
    ++rows;
  }
  if (rows == 0) throw IoError("empty CSV design");
  return BinaryGrid::from_values(rows, cols, std::move(values));
}

void write_csv(std::ostream& out, const BinaryGrid& x) {
  for (int r = 0; r < x.rows(); ++r) {
    for (int c = 0; c < x.cols(); ++c) out << (c ? "," : "") << static_cast<int>(x(r, c));
    out << '\n';
  }
}

BinaryGrid read_design(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string ext = lower_extension(path);
  if (ext == ".pgm") return read_pgm(in);
  if (ext == ".csv") return read_csv(in);
  throw IoError("unknown design file extension: " + path.string());
}

void write_design(const std::filesystem::path& path, const BinaryGrid& x) {
  const std::string ext = lower_extension(path);
  if (ext != ".pgm" && ext != ".csv") throw IoError("unknown design file extension: " + path.string());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  if (ext == ".pgm") {
    write_pgm(out, x);
  } else {
    write_csv(out, x);
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void write_real_csv(std::ostream& out, const RealGrid& g) {
  for (int r = 0; r < g.rows(); ++r) {
    for (int c = 0; c < g.cols(); ++c) out << (c ? "," : "") << format_double(g(r, c));
    out << '\n';
  }
}

std::vector<Contour> outline(const BinaryGrid& x) {
  const int rows = x.rows(), cols = x.cols();
  const int vcols = cols + 1;
  auto solid = [&](int r, int c) { return r >= 0 && r < rows && c >= 0 && c < cols && x(r, c) > 0; };
  struct Edge {
    int x0, y0, x1, y1;
    bool used = false;
  };
  std::vector<Edge> edges;
  // Up to two outgoing edges per vertex.
  std::vector<std::array<int, 2>> out((static_cast<std::size_t>(rows) + 1) * vcols, {-1, -1});
  auto add = [&](int x0, int y0, int x1, int y1) {
    auto& slot = out[static_cast<std::size_t>(x0) * vcols + y0];
    slot[slot[0] < 0 ? 0 : 1] = static_cast<int>(edges.size());
    edges.push_back({x0, y0, x1, y1});
  };
  // Edges run with the solid pixel on their left.
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!solid(r, c)) continue;
      if (!solid(r, c - 1)) add(r, c, r + 1, c);
      if (!solid(r + 1, c)) add(r + 1, c, r + 1, c + 1);
      if (!solid(r, c + 1)) add(r + 1, c + 1, r, c + 1);
      if (!solid(r - 1, c)) add(r, c + 1, r, c);
    }
  }

  std::vector<Contour> loops;
  for (std::size_t start = 0; start < edges.size(); ++start) {
    if (edges[start].used) continue;
    std::vector<std::array<int, 2>> pts;
    int e = static_cast<int>(start);
    while (!edges[e].used) {
      Edge& cur = edges[e];
      cur.used = true;
      pts.push_back({cur.x0, cur.y0});
      const int dx = cur.x1 - cur.x0, dy = cur.y1 - cur.y0;
      const auto& cand = out[static_cast<std::size_t>(cur.x1) * vcols + cur.y1];
      // At a diagonal contact take the left turn, so the pairing depends only
      // on the incoming edge and diagonal neighbours stay separate loops.
      int next = cand[0];
      if (cand[1] >= 0) {
        const Edge& a = edges[cand[0]];
        const bool left = a.x1 - a.x0 == -dy && a.y1 - a.y0 == dx;
        if (!left) next = cand[1];
      }
      e = next;
    }
    // Drop collinear vertices.
    Contour loop;
    const std::size_t n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = pts[(i + n - 1) % n];
      const auto& b = pts[i];
      const auto& c = pts[(i + 1) % n];
      const long long cross =
          static_cast<long long>(b[0] - a[0]) * (c[1] - b[1]) - static_cast<long long>(b[1] - a[1]) * (c[0] - b[0]);
      if (cross != 0) loop.vertices.push_back(b);
    }
    loop.hole = signed_area2(loop) < 0;
    loops.push_back(std::move(loop));
  }
  return loops;
}

long long signed_area2(const Contour& c) {
  long long a = 0;
  const std::size_t n = c.vertices.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = c.vertices[i];
    const auto& q = c.vertices[(i + 1) % n];
    a += static_cast<long long>(p[0]) * q[1] - static_cast<long long>(q[0]) * p[1];
  }
  return a;
}

nlohmann::json contours_to_json(const std::vector<Contour>& loops, const BinaryGrid& x, double pitch_nm) {
  nlohmann::json j;
  j["units"] = "nm";
  j["pitch_nm"] = pitch_nm;
  j["rows"] = x.rows();
  j["cols"] = x.cols();
  j["axes"] = "x = row * pitch, y = column * pitch";
  j["loops"] = nlohmann::json::array();
  for (const auto& c : loops) {
    nlohmann::json v = nlohmann::json::array();
    for (const auto& p : c.vertices) v.push_back({p[0] * pitch_nm, p[1] * pitch_nm});
    j["loops"].push_back({{"orientation", c.hole ? "cw" : "ccw"}, {"hole", c.hole}, {"vertices", std::move(v)}});
  }
  return j;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& t) {
  out << "step,loss,spec_ok,feasible,design_hash\n";
  for (const auto& s : t.steps) {
    std::ostringstream hash;
    hash << std::hex << std::setw(16) << std::setfill('0') << s.design_hash;
    out << s.step << ',' << format_double(s.loss) << ',' << (s.spec_met ? 1 : 0) << ',' << (s.feasible ? 1 : 0)
        << ',' << hash.str() << '\n';
  }
}

void write_spectra_csv(std::ostream& out, const SVector& s) {
  out << "wavelength_nm,out_port,in_port,power_db\n";
  for (const auto& v : s) {
    out << format_double(v.wavelength_nm) << ',' << v.out_port << ',' << v.in_port << ','
        << format_double(power_db(v.s)) << '\n';
  }
}

nlohmann::json to_json(const StepRecord& r) {
  static constexpr const char* kinds[] = {"free", "resolving", "valid"};
  nlohmann::json touches = nlohmann::json::array();
  for (const auto& t : r.touches) {
    touches.push_back({{"row", t.row}, {"col", t.col}, {"phase", t.phase == Phase::kSolid ? "solid" : "void"}});
  }
  auto pair = [](const std::array<std::size_t, 2>& a) { return nlohmann::json{{"solid", a[0]}, {"void", a[1]}}; };
  return {{"iteration", r.iteration},
          {"kind", kinds[static_cast<int>(r.kind)]},
          {"touches", std::move(touches)},
          {"reward", r.reward},
          {"newly_decided", r.newly_decided},
          {"undecided_after", r.undecided_after},
          {"valid", pair(r.valid_count)},
          {"resolving", pair(r.resolving_count)},
          {"free", pair(r.free_count)},
          {"required", pair(r.required_count)}};
}

nlohmann::json to_json(const StepResult& r) {
  std::ostringstream hash;
  hash << std::hex << std::setw(16) << std::setfill('0') << r.design_hash;
  nlohmann::json s = nlohmann::json::array();
  for (const auto& v : r.s) {
    s.push_back({{"out", v.out_port}, {"in", v.in_port}, {"wavelength_nm", v.wavelength_nm},
                 {"re", v.s.real()}, {"im", v.s.imag()}});
  }
  return {{"step", r.step}, {"loss", r.loss},   {"spec_ok", r.spec_met},
          {"feasible", r.feasible}, {"design_hash", hash.str()}, {"s", std::move(s)}};
}

}  // namespace fabopt
