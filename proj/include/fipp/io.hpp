#pragma once

// Delimited-text formats. Every file starts with '#' header lines.
//
//   track log   t,id,x,y,vx,vy            one row per observation, sorted by t
//   flow field  i,j,cx,cy,fx,fy,mag       one row per cell, preceded by a
//               "# grid origin_x=.. origin_y=.. cell_size=.. width=.. height=.."
//               line so the grid can be rebuilt on import

#include <iosfwd>
#include <string>

#include "fipp/flowfield.hpp"

namespace fipp {

// Full-precision decimal rendering used by every text writer.
std::string format_double(double v);

// Throws InputError with the offending line number.
TrackLog read_track_log(std::istream& in);
TrackLog read_track_log_file(const std::string& path);
void write_track_log(std::ostream& out, const TrackLog& log);

void write_field(std::ostream& out, const FlowField& field);
// Rebuilds grid and per-cell forces; velocities are not part of the export.
FlowField read_field(std::istream& in);
FlowField read_field_file(const std::string& path);

}  // namespace fipp
