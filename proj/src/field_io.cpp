#include "qlp/field_io.hpp"

#include "qlp/errors.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>

namespace qlp {

static_assert(std::endian::native == std::endian::little, "field dumps assume a little-endian host");

namespace {

constexpr std::array<char, 4> kMagic{'Q', 'L', 'P', 'F'};
constexpr std::size_t kHeaderSize = 64;

template <class T>
void put(std::array<char, kHeaderSize>& h, std::size_t off, T v) {
    std::memcpy(h.data() + off, &v, sizeof(T));
}

template <class T>
T get(const std::array<char, kHeaderSize>& h, std::size_t off) {
    T v;
    std::memcpy(&v, h.data() + off, sizeof(T));
    return v;
}

} // namespace

void write_field(const std::filesystem::path& path, const SpaceTimeField& f) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    const Grid& g = f.grid();
    std::array<char, kHeaderSize> h{};
    std::memcpy(h.data(), kMagic.data(), kMagic.size());
    put<std::uint32_t>(h, 4, kFieldFormatVersion);
    put<std::uint32_t>(h, 8, static_cast<std::uint32_t>(g.dim()));
    put<std::uint32_t>(h, 12, static_cast<std::uint32_t>(g.cells_per_axis()));
    put<double>(h, 16, g.box_length());
    put<std::uint64_t>(h, 24, f.frame_count());
    put<std::uint32_t>(h, 32, static_cast<std::uint32_t>(f.vector_rank()));
    out.write(h.data(), h.size());
    const auto times = f.times();
    out.write(reinterpret_cast<const char*>(times.data()), static_cast<std::streamsize>(times.size_bytes()));
    for (std::size_t k = 0; k < f.frame_count(); ++k) {
        const auto fr = f.frame(k);
        out.write(reinterpret_cast<const char*>(fr.data()), static_cast<std::streamsize>(fr.size_bytes()));
    }
    if (!out) {
        throw Error("write to " + path.string() + " failed");
    }
}

SpaceTimeField read_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::array<char, kHeaderSize> h{};
    in.read(h.data(), h.size());
    if (!in || std::memcmp(h.data(), kMagic.data(), kMagic.size()) != 0) {
        throw Error(path.string() + " is not a field dump");
    }
    if (get<std::uint32_t>(h, 4) != kFieldFormatVersion) {
        throw Error(path.string() + ": unsupported format version " + std::to_string(get<std::uint32_t>(h, 4)));
    }
    const Grid grid(static_cast<int>(get<std::uint32_t>(h, 8)), static_cast<int>(get<std::uint32_t>(h, 12)),
                    get<double>(h, 16));
    const auto frames = get<std::uint64_t>(h, 24);
    const int rank = static_cast<int>(get<std::uint32_t>(h, 32));
    SpaceTimeField f(grid, rank);
    std::vector<double> times(frames);
    in.read(reinterpret_cast<char*>(times.data()), static_cast<std::streamsize>(times.size() * sizeof(double)));
    const std::size_t per_frame = grid.size() * static_cast<std::size_t>(f.components());
    for (std::uint64_t k = 0; k < frames; ++k) {
        std::vector<double> data(per_frame);
        in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(per_frame * sizeof(double)));
        if (!in) {
            throw Error(path.string() + " is truncated");
        }
        f.push_frame(times[k], std::move(data));
    }
    return f;
}

void write_field_csv(const std::filesystem::path& path, const SpaceTimeField& f, std::size_t stride) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw Error("cannot open " + path.string() + " for writing");
    }
    out.precision(17);
    const Grid& g = f.grid();
    out << "t,cell,x,y";
    for (int c = 0; c < f.components(); ++c) {
        out << ",v" << c;
    }
    out << '\n';
    stride = std::max<std::size_t>(stride, 1);
    for (std::size_t k = 0; k < f.frame_count(); ++k) {
        if (k % stride != 0 && k + 1 != f.frame_count()) {
            continue;
        }
        for (std::size_t c = 0; c < g.size(); ++c) {
            const Point x = g.node(c);
            out << f.time(k) << ',' << c << ',' << x.x << ',' << x.y;
            for (int comp = 0; comp < f.components(); ++comp) {
                out << ',' << f.component(k, comp)[c];
            }
            out << '\n';
        }
    }
}

} // namespace qlp
