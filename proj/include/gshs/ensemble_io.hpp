#pragma once

#include <iosfwd>
#include <string>

#include "gshs/csv.hpp"
#include "gshs/dynamics.hpp"

namespace gshs {

// Binary layout (all integers and floats little-endian):
//   char[8] magic "GSHSENS\0", u32 version (1), u32 d, u64 n_paths,
//   u64 grid length, u32 has_velocity, u32 reserved (0), u64 config hash,
//   f64 times[grid], f64 states[n_paths][grid][state_dim].
void write_binary(const PathEnsemble& ens, std::ostream& os);
PathEnsemble read_binary(std::istream& is);

// Columns path_id,t,x_1..x_d[,v_1..v_d]; trailing "# config_hash=..." line.
void write_csv(const PathEnsemble& ens, std::ostream& os);

}  // namespace gshs
