#include "svq/codebook_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <vector>

#include "svq/error.hpp"

namespace svq {
namespace {

static_assert(std::numeric_limits<double>::is_iec559, "codebook files store IEEE-754 doubles");

constexpr std::array<char, 4> kMagic{'S', 'V', 'Q', '1'};
// Sanity bound on header sizes so a corrupt header cannot trigger a huge allocation.
constexpr std::uint32_t kMaxExtent = 1u << 24;

template <typename T>
void put_le(std::ostream& out, T value) {
    static_assert(std::is_integral_v<T>);
    std::array<char, sizeof(T)> bytes{};
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        bytes[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF);
    }
    out.write(bytes.data(), bytes.size());
}

void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    template <typename T>
    T get_le() {
        std::array<unsigned char, sizeof(T)> bytes{};
        in_.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
        if (in_.gcount() != static_cast<std::streamsize>(bytes.size())) throw FormatError("codebook file is truncated");
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
        return static_cast<T>(v);
    }

    double get_f64() { return std::bit_cast<double>(get_le<std::uint64_t>()); }

private:
    std::istream& in_;
};

}  // namespace

void write_codebook(std::ostream& out, const Codebook& cb) {
    out.write(kMagic.data(), kMagic.size());
    put_le<std::uint32_t>(out, kCodebookFormatVersion);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cb.size()));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(cb.dim()));
    put_le<std::uint8_t>(out, static_cast<std::uint8_t>(cb.mode()));
    put_f64(out, cb.mode() == EncoderMode::thresholded ? cb.theta() : 0.0);
    put_f64(out, cb.norm_target());
    for (std::size_t y = 0; y < cb.size(); ++y) {
        for (const double v : cb.weight(y)) put_f64(out, v);
        put_f64(out, cb.bias(y));
        for (const double v : cb.recon(y)) put_f64(out, v);
        put_f64(out, cb.recon_scale(y));
    }
    if (!out) throw IoError("failed writing codebook");
}

Codebook read_codebook(std::istream& in) {
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (in.gcount() != 4 || magic != kMagic) throw FormatError("not a codebook file (bad magic)");
    Reader r(in);
    const auto version = r.get_le<std::uint32_t>();
    if (version != kCodebookFormatVersion) {
        throw UnsupportedVersionError("unsupported codebook format version " + std::to_string(version));
    }
    const auto m = r.get_le<std::uint32_t>();
    const auto d = r.get_le<std::uint32_t>();
    if (m == 0 || d == 0 || m > kMaxExtent || d > kMaxExtent) throw FormatError("codebook header has invalid M or d");
    const auto mode = r.get_le<std::uint8_t>();
    if (mode > 1) throw FormatError("codebook header has unknown mode " + std::to_string(mode));
    const double theta = r.get_f64();
    const double w0 = r.get_f64();

    // Read everything before constructing so a truncated file yields no codebook.
    std::vector<double> weights(std::size_t{m} * d), recons(std::size_t{m} * d), biases(m), scales(m);
    for (std::size_t y = 0; y < m; ++y) {
        for (std::size_t i = 0; i < d; ++i) weights[y * d + i] = r.get_f64();
        biases[y] = r.get_f64();
        for (std::size_t i = 0; i < d; ++i) recons[y * d + i] = r.get_f64();
        scales[y] = r.get_f64();
    }

    Codebook cb(m, d);
    for (std::size_t y = 0; y < m; ++y) {
        cb.set_weight(y, std::span<const double>(weights).subspan(y * d, d));
        cb.set_bias(y, biases[y]);
        cb.set_recon(y, std::span<const double>(recons).subspan(y * d, d));
        cb.set_recon_scale(y, scales[y]);
    }
    if (mode == 1) cb.set_thresholded(theta);
    // Weights are already at the stored norm; assigning the target directly
    // through set_norm_target would rescale them and break bit-exactness.
    if (w0 != 0.0) cb.restore_norm_target(w0);
    return cb;
}

void save_codebook(const Codebook& cb, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    write_codebook(out, cb);
}

Codebook load_codebook(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return read_codebook(in);
}

}  // namespace svq
