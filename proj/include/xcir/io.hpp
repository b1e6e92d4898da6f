#pragma once

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <string_view>

#include "xcir/path_simulator.hpp"
#include "xcir/scenario.hpp"

namespace xcir {

// shortest exact decimal round-trip, stable across runs
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

inline std::uint64_t config_hash(const ScenarioConfig& cfg) {
    return fnv1a64(to_json(cfg).dump());
}

// ---------------------------------------------------------------------------
// CSV export: paths as `t,x`, jump records as `n,s_n,x_pre,xi,x_post`;
// the long formats prepend a path_id column.
// ---------------------------------------------------------------------------

inline void write_path_csv(std::ostream& os, const SimulatedPath& path) {
    os << "t,x\n";
    for (std::size_t i = 0; i < path.times.size(); ++i)
        os << format_double(path.times[i]) << ',' << format_double(path.values[i])
           << '\n';
}

inline void write_paths_long_csv(std::ostream& os,
                                 std::span<const SimulatedPath> paths) {
    os << "path_id,t,x\n";
    for (std::size_t p = 0; p < paths.size(); ++p)
        for (std::size_t i = 0; i < paths[p].times.size(); ++i)
            os << p << ',' << format_double(paths[p].times[i]) << ','
               << format_double(paths[p].values[i]) << '\n';
}

inline void write_jumps_csv(std::ostream& os, const SimulatedPath& path) {
    os << "n,s_n,x_pre,xi,x_post\n";
    for (const auto& r : path.jumps)
        os << r.n << ',' << format_double(r.time) << ',' << format_double(r.x_pre)
           << ',' << format_double(r.xi) << ',' << format_double(r.x_post) << '\n';
}

inline void write_jumps_long_csv(std::ostream& os,
                                 std::span<const SimulatedPath> paths) {
    os << "path_id,n,s_n,x_pre,xi,x_post\n";
    for (std::size_t p = 0; p < paths.size(); ++p)
        for (const auto& r : paths[p].jumps)
            os << p << ',' << r.n << ',' << format_double(r.time) << ','
               << format_double(r.x_pre) << ',' << format_double(r.xi) << ','
               << format_double(r.x_post) << '\n';
}

} // namespace xcir
