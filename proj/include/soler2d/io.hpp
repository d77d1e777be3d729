#pragma once

// Artifact emission: the binary snapshot records with their JSON manifest and
// the CSV diagnostic series. Snapshot record layout (little-endian, packed):
//   header: t (float64), n (uint32), m (float64)
//   body:   n*n points row-major; per point re/im of component 0 then
//           re/im of component 1, each float64

#include <filesystem>
#include <string>

#include "soler2d/evolve.hpp"

namespace soler2d {

void write_snapshot_record(const std::filesystem::path& file, const Snapshot& snap,
                           const Grid& grid, double mass);

Snapshot read_snapshot_record(const std::filesystem::path& file, Grid& grid_out,
                              double& mass_out);

// writes all records plus manifest.json into dir/snapshots
void write_history(const std::filesystem::path& dir, const History& h);

void write_csv(const std::filesystem::path& file,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

}  // namespace soler2d
