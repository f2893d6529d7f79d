#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fipp/errors.hpp"
#include "fipp/io.hpp"

namespace fipp {

namespace {

constexpr double kMaxPedSpeed = 3.0;

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view s, const char* what, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty() || !std::isfinite(v))
    throw InputError(std::string("invalid ") + what + " '" + std::string(s) + "'", line);
  return v;
}

long long parse_int(std::string_view s, const char* what, std::size_t line) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw InputError(std::string("invalid ") + what + " '" + std::string(s) + "'", line);
  return v;
}

bool skip_line(std::string_view s) { return s.empty() || s.front() == '#'; }

}  // namespace

std::string format_double(double v) {
  if (v == 0.0) return "0";  // folds -0 as well
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

TrackLog read_track_log(std::istream& in) {
  TrackLog log;
  std::set<PedId> ids_in_frame;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (skip_line(line)) continue;
    const auto f = split(line);
    if (f.size() != 6)
      throw InputError("expected 6 fields t,id,x,y,vx,vy, got " + std::to_string(f.size()),
                       line_no);
    PedObservation o;
    const double t = parse_double(f[0], "time", line_no);
    o.id = parse_int(f[1], "id", line_no);
    o.position = {parse_double(f[2], "x", line_no), parse_double(f[3], "y", line_no)};
    o.velocity = {parse_double(f[4], "vx", line_no), parse_double(f[5], "vy", line_no)};
    if (t < 0.0) throw InputError("negative time", line_no);
    if (o.velocity.norm() > kMaxPedSpeed)
      throw InputError("pedestrian speed exceeds " + format_double(kMaxPedSpeed) + " m/s",
                       line_no);

    if (log.empty() || t > log.back().t) {
      log.push_back({t, {}});
      ids_in_frame.clear();
    } else if (t < log.back().t) {
      throw InputError("rows not sorted by time", line_no);
    }
    if (!ids_in_frame.insert(o.id).second)
      throw InputError("duplicate pedestrian id " + std::to_string(o.id) + " in frame",
                       line_no);
    log.back().observations.push_back(o);
  }
  return log;
}

TrackLog read_track_log_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open track log '" + path + "'");
  return read_track_log(in);
}

void write_track_log(std::ostream& out, const TrackLog& log) {
  out << "# t,id,x,y,vx,vy\n";
  for (const auto& frame : log) {
    for (const auto& o : frame.observations) {
      out << format_double(frame.t) << ',' << o.id << ',' << format_double(o.position.x) << ','
          << format_double(o.position.y) << ',' << format_double(o.velocity.x) << ','
          << format_double(o.velocity.y) << '\n';
    }
  }
}

void write_field(std::ostream& out, const FlowField& field) {
  const auto& s = field.spec;
  out << "# grid origin_x=" << format_double(s.origin.x)
      << " origin_y=" << format_double(s.origin.y)
      << " cell_size=" << format_double(s.cell_size) << " width=" << s.width
      << " height=" << s.height << '\n';
  out << "# i,j,cx,cy,fx,fy,mag\n";
  for (int j = 0; j < s.height; ++j) {
    for (int i = 0; i < s.width; ++i) {
      const Vec2 c = s.center(i, j);
      const Vec2 f = field.at(i, j).force;
      out << i << ',' << j << ',' << format_double(c.x) << ',' << format_double(c.y) << ','
          << format_double(f.x) << ',' << format_double(f.y) << ',' << format_double(f.norm())
          << '\n';
    }
  }
}

FlowField read_field(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;
  bool have_grid = false;
  GridSpec spec;
  FlowField field;
  std::vector<bool> seen;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line.rfind("# grid", 0) == 0) {
        std::istringstream kv{std::string(line.substr(6))};
        std::string tok;
        int found = 0;
        while (kv >> tok) {
          const auto eq = tok.find('=');
          if (eq == std::string::npos) continue;
          const std::string_view key = std::string_view(tok).substr(0, eq);
          const std::string_view val = std::string_view(tok).substr(eq + 1);
          if (key == "origin_x") spec.origin.x = parse_double(val, "origin_x", line_no), ++found;
          else if (key == "origin_y") spec.origin.y = parse_double(val, "origin_y", line_no), ++found;
          else if (key == "cell_size") spec.cell_size = parse_double(val, "cell_size", line_no), ++found;
          else if (key == "width") spec.width = static_cast<int>(parse_int(val, "width", line_no)), ++found;
          else if (key == "height") spec.height = static_cast<int>(parse_int(val, "height", line_no)), ++found;
        }
        if (found != 5) throw InputError("incomplete grid header", line_no);
        try {
          field = FlowField(spec);
        } catch (const std::invalid_argument& e) {
          throw InputError(e.what(), line_no);
        }
        seen.assign(spec.cellCount(), false);
        have_grid = true;
      }
      continue;
    }
    if (!have_grid) throw InputError("field row before '# grid' header", line_no);
    const auto f = split(line);
    if (f.size() != 7) throw InputError("expected 7 fields i,j,cx,cy,fx,fy,mag", line_no);
    const long long i = parse_int(f[0], "i", line_no);
    const long long j = parse_int(f[1], "j", line_no);
    if (i < 0 || j < 0 || i >= spec.width || j >= spec.height)
      throw InputError("cell index out of range", line_no);
    const CellIndex c = spec.index(static_cast<int>(i), static_cast<int>(j));
    if (seen[c]) throw InputError("duplicate cell", line_no);
    seen[c] = true;
    field.cells[c].force = {parse_double(f[4], "fx", line_no), parse_double(f[5], "fy", line_no)};
  }
  if (!have_grid) throw InputError("missing '# grid' header");
  for (bool s : seen)
    if (!s) throw InputError("field file does not cover every cell");
  return field;
}

FlowField read_field_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open field file '" + path + "'");
  return read_field(in);
}

}  // namespace fipp
