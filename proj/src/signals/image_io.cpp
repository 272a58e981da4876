#include "diner/image_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "diner/binary_io.hpp"
#include "diner/errors.hpp"

namespace diner {

namespace {

std::string describe_bytes(const std::string& bytes) {
    std::ostringstream os;
    os << '"';
    for (unsigned char ch : bytes.substr(0, 32)) {
        if (std::isprint(ch)) {
            os << ch;
        } else {
            os << "\\x" << std::hex << std::setw(2) << std::setfill('0') << int(ch) << std::dec;
        }
    }
    os << '"';
    return os.str();
}

class HeaderReader {
public:
    explicit HeaderReader(std::istream& is) : is_(is) {}

    std::string token() {
        std::string tok;
        int ch = is_.get();
        while (ch != EOF) {
            if (ch == '#') {
                raw_.push_back(static_cast<char>(ch));
                while ((ch = is_.get()) != EOF && ch != '\n') {
                    raw_.push_back(static_cast<char>(ch));
                }
            } else if (std::isspace(ch)) {
                raw_.push_back(static_cast<char>(ch));
                if (!tok.empty()) {
                    return tok;
                }
            } else {
                raw_.push_back(static_cast<char>(ch));
                tok.push_back(static_cast<char>(ch));
            }
            ch = is_.get();
        }
        return tok;
    }

    std::size_t number(const char* what) {
        const std::string tok = token();
        if (tok.empty() || !std::all_of(tok.begin(), tok.end(), ::isdigit) || tok.size() > 9) {
            fail(std::string("bad ") + what);
        }
        return std::stoul(tok);
    }

    [[noreturn]] void fail(const std::string& why) const {
        throw FormatError("image: " + why + " in header " + describe_bytes(raw_));
    }

private:
    std::istream& is_;
    std::string raw_;
};

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw FormatError("cannot open '" + path.string() + "' for writing");
    }
    return os;
}

} // namespace

GridSignal load_image(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw FormatError("cannot open image '" + path.string() + "'");
    }
    HeaderReader header(is);
    const std::string magic = header.token();
    std::size_t channels = 0;
    if (magic == "P5") {
        channels = 1;
    } else if (magic == "P6") {
        channels = 3;
    } else {
        header.fail("unsupported format (need binary P5/P6)");
    }
    const std::size_t width = header.number("width");
    const std::size_t height = header.number("height");
    const std::size_t maxval = header.number("maxval");
    if (width == 0 || height == 0) {
        header.fail("empty image");
    }
    if (maxval == 0 || maxval > 65535) {
        header.fail("maxval " + std::to_string(maxval) + " outside [1, 65535]");
    }
    const std::size_t bytes_per_sample = maxval > 255 ? 2 : 1;
    const std::size_t count = width * height * channels;
    std::string data(count * bytes_per_sample, '\0');
    if (!is.read(data.data(), static_cast<std::streamsize>(data.size()))) {
        throw FormatError("image '" + path.string() + "': truncated pixel data");
    }
    DenseMatrix attrs(width * height, channels);
    auto out = attrs.values();
    const double scale = 1.0 / static_cast<double>(maxval);
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t q = static_cast<unsigned char>(data[i * bytes_per_sample]);
        if (bytes_per_sample == 2) {
            q = (q << 8) | static_cast<unsigned char>(data[i * 2 + 1]);
        }
        out[i] = std::min(1.0, static_cast<double>(q) * scale);
    }
    return GridSignal(GridIndexer({height, width}), std::move(attrs));
}

void save_image(const GridSignal& signal, const std::filesystem::path& path, int bits) {
    if (signal.grid().rank() != 2) {
        throw DimensionError("save_image: need a 2D grid, got " +
                             std::to_string(signal.grid().rank()) + " axes");
    }
    if (signal.channels() != 1 && signal.channels() != 3) {
        throw DimensionError("save_image: need 1 or 3 channels, got " +
                             std::to_string(signal.channels()));
    }
    if (bits != 8 && bits != 16) {
        throw ValidationError("save_image: bits must be 8 or 16");
    }
    const std::uint32_t maxval = bits == 8 ? 255u : 65535u;
    auto os = open_out(path);
    os << (signal.channels() == 1 ? "P5" : "P6") << '\n'
       << signal.width() << ' ' << signal.height() << '\n'
       << maxval << '\n';
    std::string data;
    data.reserve(signal.attributes().size() * (bits / 8));
    for (double v : signal.attributes().values()) {
        const auto q = static_cast<std::uint32_t>(std::lround(std::clamp(v, 0.0, 1.0) * maxval));
        if (bits == 16) {
            data.push_back(static_cast<char>(q >> 8));
        }
        data.push_back(static_cast<char>(q & 0xff));
    }
    os.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!os) {
        throw FormatError("save_image: write to '" + path.string() + "' failed");
    }
}

GridSignal load_image_sequence(const std::vector<std::filesystem::path>& frames) {
    if (frames.empty()) {
        throw ValidationError("image sequence: no frames");
    }
    std::vector<GridSignal> loaded;
    loaded.reserve(frames.size());
    for (const auto& f : frames) {
        loaded.push_back(load_image(f));
        if (loaded.back().grid() != loaded.front().grid() ||
            loaded.back().channels() != loaded.front().channels()) {
            throw DimensionError("image sequence: frame '" + f.string() +
                                 "' differs in size from the first frame");
        }
    }
    const std::size_t per_frame = loaded.front().size();
    DenseMatrix attrs(per_frame * frames.size(), loaded.front().channels());
    for (std::size_t t = 0; t < loaded.size(); ++t) {
        const auto src = loaded[t].attributes().values();
        std::copy(src.begin(), src.end(), attrs.values().begin() + t * src.size());
    }
    return GridSignal(
        GridIndexer({frames.size(), loaded.front().height(), loaded.front().width()}),
        std::move(attrs));
}

void save_grid(const GridSignal& signal, const std::filesystem::path& path) {
    auto os = open_out(path);
    binio::write_magic(os, "DING");
    binio::write_le<std::uint32_t>(os, 1);
    binio::write_le<std::uint64_t>(os, signal.size());
    binio::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(signal.channels()));
    binio::write_le<std::uint8_t>(os, binio::dtype_f64);
    binio::write_le<std::uint32_t>(os, static_cast<std::uint32_t>(signal.grid().rank()));
    for (std::size_t d : signal.grid().dims()) {
        binio::write_le<std::uint64_t>(os, d);
    }
    for (double v : signal.attributes().values()) {
        binio::write_le<double>(os, v);
    }
    if (!os) {
        throw FormatError("save_grid: write to '" + path.string() + "' failed");
    }
}

GridSignal load_grid(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) {
        throw FormatError("cannot open grid '" + path.string() + "'");
    }
    binio::expect_magic(is, "DING");
    const auto version = binio::read_le<std::uint32_t>(is, "grid version");
    if (version != 1) {
        throw FormatError("grid: unsupported version " + std::to_string(version));
    }
    const auto n = binio::read_le<std::uint64_t>(is, "grid size");
    const auto channels = binio::read_le<std::uint32_t>(is, "grid channels");
    const auto dtype = binio::read_le<std::uint8_t>(is, "grid dtype");
    const auto rank = binio::read_le<std::uint32_t>(is, "grid rank");
    if (dtype != binio::dtype_f32 && dtype != binio::dtype_f64) {
        throw FormatError("grid: unknown dtype tag " + std::to_string(dtype));
    }
    std::vector<std::size_t> dims(rank);
    for (auto& d : dims) {
        d = binio::read_le<std::uint64_t>(is, "grid extent");
    }
    GridIndexer grid(dims);
    if (grid.size() != n) {
        throw FormatError("grid: extents multiply to " + std::to_string(grid.size()) +
                          " but header says " + std::to_string(n));
    }
    DenseMatrix attrs(n, channels);
    for (double& v : attrs.values()) {
        v = dtype == binio::dtype_f64 ? binio::read_le<double>(is, "grid value")
                                      : binio::read_le<float>(is, "grid value");
    }
    return GridSignal(std::move(grid), std::move(attrs));
}

} // namespace diner
