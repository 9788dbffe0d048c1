#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "parapos/fdm.hpp"

namespace parapos {

/// Shortest round-trip decimal form of a double ("nan", "inf", "-inf" for non-finite values).
std::string format_number(double v);

/// Long-format field CSV: a "# source=<tag>" line, then t,i[,j],component,value rows for
/// every snapshot, node and component (components numbered from 1).
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const std::string& source);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj, const std::string& source);

/// Per-step diagnostics: t,min_value,sup_norm,negpart_norm,dudt_min,dvdt_max.
void write_diagnostics_csv(std::ostream& out, const Trajectory& traj);
void write_diagnostics_csv(const std::filesystem::path& path, const Trajectory& traj);

/// Binary snapshots. Layout, all little-endian:
///   "PPOS1" | u32 dims | u32 m | u32 counts[dims] | u64 snapshot count |
///   per snapshot: f64 t, then f64 values ordered (component, j, i) with i fastest.
struct SnapshotFile {
    int dims = 1;
    int components = 1;
    std::vector<int> counts;
    std::vector<double> times;
    std::vector<std::vector<double>> values;  ///< one flat array per snapshot
};

void write_snapshots(const std::filesystem::path& path, const Trajectory& traj);
SnapshotFile read_snapshots(const std::filesystem::path& path);

}  // namespace parapos
