#include "parapos/trajectory_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

namespace parapos {

namespace {

std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
    std::ofstream f(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
    if (!f) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    return f;
}

void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) {
        b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    }
    out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) {
        b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
    }
    out.write(b, 8);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_bytes(std::istream& in, int n) {
    unsigned char b[8] = {};
    in.read(reinterpret_cast<char*>(b), n);
    if (!in) {
        throw Error("truncated snapshot file");
    }
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
        v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    }
    return v;
}

}  // namespace

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const std::string& source) {
    out << "# source=" << source << '\n';
    if (traj.snapshots.empty()) {
        out << "t,i,component,value\n";
        return;
    }
    const Grid& g = traj.snapshots.front().grid();
    const bool two_d = g.dimension() == 2;
    out << (two_d ? "t,i,j,component,value\n" : "t,i,component,value\n");
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        const Field& f = traj.snapshots[s];
        const std::string t = format_number(traj.snapshot_times[s]);
        for (int k = 0; k < f.components(); ++k) {
            for (std::size_t idx = 0; idx < g.size(); ++idx) {
                const auto [i, j] = g.coords(idx);
                out << t << ',' << i << ',';
                if (two_d) {
                    out << j << ',';
                }
                out << k + 1 << ',' << format_number(f.at(k, idx)) << '\n';
            }
        }
    }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj, const std::string& source) {
    auto f = open_out(path);
    write_trajectory_csv(f, traj, source);
}

void write_diagnostics_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,min_value,sup_norm,negpart_norm,dudt_min,dvdt_max\n";
    for (const auto& d : traj.diagnostics) {
        out << format_number(d.t) << ',' << format_number(d.min_value) << ',' << format_number(d.sup_norm) << ','
            << format_number(d.negpart_norm) << ',' << format_number(d.dudt_min) << ','
            << format_number(d.dvdt_max) << '\n';
    }
}

void write_diagnostics_csv(const std::filesystem::path& path, const Trajectory& traj) {
    auto f = open_out(path);
    write_diagnostics_csv(f, traj);
}

void write_snapshots(const std::filesystem::path& path, const Trajectory& traj) {
    auto out = open_out(path, true);
    out.write("PPOS1", 5);
    if (traj.snapshots.empty()) {
        throw Error("trajectory has no snapshots");
    }
    const Grid& g = traj.snapshots.front().grid();
    put_u32(out, static_cast<std::uint32_t>(g.dimension()));
    put_u32(out, static_cast<std::uint32_t>(traj.snapshots.front().components()));
    for (int a = 0; a < g.dimension(); ++a) {
        put_u32(out, static_cast<std::uint32_t>(g.nodes(a)));
    }
    put_u64(out, traj.snapshots.size());
    for (std::size_t s = 0; s < traj.snapshots.size(); ++s) {
        put_f64(out, traj.snapshot_times[s]);
        for (double v : traj.snapshots[s].raw()) {
            put_f64(out, v);
        }
    }
    if (!out) {
        throw Error("failed writing " + path.string());
    }
}

SnapshotFile read_snapshots(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    char magic[5];
    in.read(magic, 5);
    if (!in || std::string(magic, 5) != "PPOS1") {
        throw Error("not a PPOS1 snapshot file: " + path.string());
    }
    SnapshotFile f;
    f.dims = static_cast<int>(get_bytes(in, 4));
    f.components = static_cast<int>(get_bytes(in, 4));
    if (f.dims < 1 || f.dims > 2 || f.components < 1) {
        throw Error("corrupt snapshot header");
    }
    std::size_t nodes = 1;
    for (int a = 0; a < f.dims; ++a) {
        f.counts.push_back(static_cast<int>(get_bytes(in, 4)));
        nodes *= static_cast<std::size_t>(f.counts.back());
    }
    const std::uint64_t count = get_bytes(in, 8);
    for (std::uint64_t s = 0; s < count; ++s) {
        f.times.push_back(std::bit_cast<double>(get_bytes(in, 8)));
        std::vector<double> v(nodes * static_cast<std::size_t>(f.components));
        for (double& e : v) {
            e = std::bit_cast<double>(get_bytes(in, 8));
        }
        f.values.push_back(std::move(v));
    }
    return f;
}

}  // namespace parapos
