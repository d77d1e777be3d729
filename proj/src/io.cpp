#include "soler2d/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>

#include <nlohmann/json.hpp>

#include "soler2d/errors.hpp"

namespace soler2d {

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot records are little-endian; big-endian hosts unsupported");

template <typename T>
void put(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T get(std::istream& is) {
    T v{};
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}

}  // namespace

void write_snapshot_record(const std::filesystem::path& file, const Snapshot& snap,
                           const Grid& grid, double mass) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + file.string());
    put<double>(os, snap.t);
    put<std::uint32_t>(os, static_cast<std::uint32_t>(grid.n));
    put<double>(os, mass);
    for (std::size_t k = 0; k < snap.c0.size(); ++k) {
        put<double>(os, snap.c0[k].real());
        put<double>(os, snap.c0[k].imag());
        put<double>(os, snap.c1[k].real());
        put<double>(os, snap.c1[k].imag());
    }
}

Snapshot read_snapshot_record(const std::filesystem::path& file, Grid& grid_out,
                              double& mass_out) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + file.string());
    Snapshot snap;
    snap.t = get<double>(is);
    const auto n = get<std::uint32_t>(is);
    mass_out = get<double>(is);
    grid_out.n = static_cast<int>(n);
    const std::size_t count = static_cast<std::size_t>(n) * n;
    snap.c0.resize(count);
    snap.c1.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double a_re = get<double>(is), a_im = get<double>(is);
        const double b_re = get<double>(is), b_im = get<double>(is);
        snap.c0[k] = {a_re, a_im};
        snap.c1[k] = {b_re, b_im};
    }
    if (!is) throw std::runtime_error("truncated snapshot record: " + file.string());
    return snap;
}

void write_history(const std::filesystem::path& dir, const History& h) {
    namespace fs = std::filesystem;
    const fs::path snapdir = dir / "snapshots";
    fs::create_directories(snapdir);

    nlohmann::json manifest;
    manifest["grid"] = {{"n", h.grid.n}, {"L", h.grid.half_width}};
    manifest["mass"] = h.mass;
    manifest["t0"] = h.t0;
    manifest["snapshot_dt"] = h.snap_dt;
    manifest["records"] = nlohmann::json::array();
    for (std::size_t j = 0; j < h.snaps.size(); ++j) {
        char name[32];
        std::snprintf(name, sizeof(name), "snap_%05zu.bin", j);
        write_snapshot_record(snapdir / name, h.snaps[j], h.grid, h.mass);
        manifest["records"].push_back({{"t", h.snaps[j].t}, {"file", std::string("snapshots/") + name}});
    }
    std::ofstream os(dir / "manifest.json");
    os << manifest.dump(2) << "\n";
}

void write_csv(const std::filesystem::path& file,
               const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream os(file);
    if (!os) throw std::runtime_error("cannot open " + file.string());
    os << std::setprecision(17);
    for (std::size_t c = 0; c < columns.size(); ++c)
        os << columns[c] << (c + 1 < columns.size() ? "," : "\n");
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (std::isnan(row[c]))
                os << "";  // blank cell (e.g. improved monitor when m != 0)
            else
                os << row[c];
            os << (c + 1 < row.size() ? "," : "\n");
        }
    }
}

}  // namespace soler2d
