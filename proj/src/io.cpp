#include "caos/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include <fmt/format.h>

#include "caos/errors.hpp"

namespace caos {

std::string format_csv(std::span<const EnergyReport> series) {
    std::string out = "t,l2_theta,l2_q,l2_T,l2_S,h1_theta,h1_q,h1_T,h1_S,trace_T,E\n";
    for (const auto& r : series)
        fmt::format_to(std::back_inserter(out),
                       "{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n",
                       r.t, r.l2_theta, r.l2_q, r.l2_T, r.l2_S, r.h1_theta, r.h1_q, r.h1_T, r.h1_S, r.trace_T,
                       r.E);
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.close();
    if (!out) throw IoError("write failed for " + path.string());
}

void write_csv(std::span<const EnergyReport> series, const std::filesystem::path& path) {
    write_text(path, format_csv(series));
}

namespace {

template <class T>
void put(std::string& buf, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    buf.append(bytes, sizeof(T));
}

template <class T>
T get(const std::string& buf, std::size_t& pos, const std::string& path) {
    if (pos + sizeof(T) > buf.size())
        throw FormatError(path + ": truncated snapshot at byte " + std::to_string(pos));
    char bytes[sizeof(T)];
    std::memcpy(bytes, buf.data() + pos, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    pos += sizeof(T);
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

}  // namespace

void write_snapshot(const State& s, const std::filesystem::path& path) {
    const Grid& g = s.grid();
    std::string buf = "CAOS";
    put<std::uint32_t>(buf, kSnapshotVersion);
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(g.ny));
    put<std::uint32_t>(buf, static_cast<std::uint32_t>(g.nz));
    put<double>(buf, s.t);
    for (int i = 0; i <= g.ny; ++i) put<double>(buf, s.theta(i));
    for (const OceanField* f : {&s.q, &s.psi, &s.T, &s.S})
        for (int i = 0; i <= g.ny; ++i)
            for (int j = 0; j <= g.nz; ++j) put<double>(buf, (*f)(i, j));
    write_text(path, buf);
}

State read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open snapshot " + path.string());
    const std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::string p = path.string();
    if (buf.size() < 4 || buf.compare(0, 4, "CAOS") != 0) {
        std::string found;
        for (std::size_t k = 0; k < std::min<std::size_t>(4, buf.size()); ++k)
            found += fmt::format("{}{:02x}", k ? " " : "", static_cast<unsigned char>(buf[k]));
        throw FormatError(p + ": bad magic, expected \"CAOS\" (43 41 4f 53), found [" + found + "]");
    }
    std::size_t pos = 4;
    const auto version = get<std::uint32_t>(buf, pos, p);
    if (version != kSnapshotVersion)
        throw FormatError(p + ": unsupported snapshot version " + std::to_string(version));
    const auto ny = get<std::uint32_t>(buf, pos, p);
    const auto nz = get<std::uint32_t>(buf, pos, p);
    if (ny < kMinCells || nz < kMinCells || ny > (1u << 16) || nz > (1u << 16))
        throw FormatError(p + ": implausible grid " + std::to_string(ny) + " x " + std::to_string(nz));
    const std::size_t expected = 4 + 12 + 8 + 8 * ((ny + 1) + 4 * std::size_t(ny + 1) * (nz + 1));
    if (buf.size() != expected)
        throw FormatError(p + ": size " + std::to_string(buf.size()) + " bytes, expected " +
                          std::to_string(expected));
    State s = State::zeros(make_grid(static_cast<int>(ny), static_cast<int>(nz)));
    s.t = get<double>(buf, pos, p);
    for (int i = 0; i <= s.grid().ny; ++i) s.theta.at(i) = get<double>(buf, pos, p);
    for (OceanField* f : {&s.q, &s.psi, &s.T, &s.S})
        for (int i = 0; i <= s.grid().ny; ++i)
            for (int j = 0; j <= s.grid().nz; ++j) f->at(i, j) = get<double>(buf, pos, p);
    fill_neumann_ghosts(s.theta);
    fill_dirichlet_ghosts(s.q);
    fill_dirichlet_ghosts(s.psi);
    fill_neumann_ghosts(s.T);
    fill_neumann_ghosts(s.S);
    return s;
}

}  // namespace caos
