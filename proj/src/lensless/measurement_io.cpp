#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "diner/errors.hpp"
#include "diner/image_io.hpp"
#include "diner/lensless.hpp"

namespace diner {

namespace {

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::map<std::string, std::string>& kv, const std::string& key,
                    const std::filesystem::path& file) {
    const auto it = kv.find(key);
    if (it == kv.end()) {
        throw FormatError(file.string() + ": missing key '" + key + "'");
    }
    double v = 0;
    const auto& s = it->second;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw FormatError(file.string() + ": key '" + key + "' has non-numeric value '" + s + "'");
    }
    return v;
}

std::filesystem::path plane_path(const std::filesystem::path& dir, std::size_t k) {
    return dir / ("intensity_" + std::to_string(k) + ".pgm");
}

} // namespace

void save_measurements(const MeasurementSet& set, const std::filesystem::path& dir) {
    set.validate();
    std::filesystem::create_directories(dir);
    double scale = set.peak_intensity();
    if (!(scale > 0)) {
        scale = 1.0;
    }
    std::ofstream meta(dir / "metadata.txt");
    if (!meta) {
        throw FormatError("cannot write " + (dir / "metadata.txt").string());
    }
    meta << "propagation = angular_spectrum\n"
         << "wavelength = " << fmt(set.illumination.wavelength) << '\n'
         << "pixel_pitch = " << fmt(set.illumination.pixel_pitch) << '\n'
         << "height = " << set.height() << '\n'
         << "width = " << set.width() << '\n'
         << "intensity_scale = " << fmt(scale) << '\n'
         << "planes = " << set.distances.size() << '\n';
    for (std::size_t k = 0; k < set.distances.size(); ++k) {
        meta << "z_" << k << " = " << fmt(set.distances[k]) << '\n';
    }

    const GridIndexer grid({set.height(), set.width()});
    for (std::size_t k = 0; k < set.distances.size(); ++k) {
        DenseMatrix a(grid.size(), 1);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            a(i, 0) = set.intensities[k][i] / scale;
        }
        save_image(GridSignal(grid, a), plane_path(dir, k), 16);
    }
    DenseMatrix p(grid.size(), 2);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        p(i, 0) = set.illumination.plane.data[i].real();
        p(i, 1) = set.illumination.plane.data[i].imag();
    }
    save_grid(GridSignal(grid, p), dir / "illumination.grid");
}

MeasurementSet load_measurements(const std::filesystem::path& dir) {
    const auto meta_path = dir / "metadata.txt";
    std::ifstream meta(meta_path);
    if (!meta) {
        throw FormatError("cannot open " + meta_path.string());
    }
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(meta, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw FormatError(meta_path.string() + ": expected 'key = value', got '" + line + "'");
        }
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    const auto height = static_cast<std::size_t>(parse_number(kv, "height", meta_path));
    const auto width = static_cast<std::size_t>(parse_number(kv, "width", meta_path));
    const auto planes = static_cast<std::size_t>(parse_number(kv, "planes", meta_path));
    const double scale = parse_number(kv, "intensity_scale", meta_path);

    MeasurementSet set;
    const auto p = load_grid(dir / "illumination.grid");
    if (p.grid().dims() != std::vector<std::size_t>{height, width} || p.channels() != 2) {
        throw FormatError((dir / "illumination.grid").string() +
                          ": expected a two-channel " + std::to_string(height) + "x" +
                          std::to_string(width) + " grid");
    }
    set.illumination = ComplexField(height, width, parse_number(kv, "pixel_pitch", meta_path),
                                    parse_number(kv, "wavelength", meta_path));
    for (std::size_t i = 0; i < p.size(); ++i) {
        set.illumination.plane.data[i] = {p.attributes()(i, 0), p.attributes()(i, 1)};
    }
    for (std::size_t k = 0; k < planes; ++k) {
        set.distances.push_back(parse_number(kv, "z_" + std::to_string(k), meta_path));
        const auto img = load_image(plane_path(dir, k));
        if (img.size() != height * width || img.channels() != 1) {
            throw FormatError(plane_path(dir, k).string() + ": expected a " +
                              std::to_string(height) + "x" + std::to_string(width) +
                              " grayscale image");
        }
        auto values = img.channel(0);
        for (auto& v : values) {
            v *= scale;
        }
        set.intensities.push_back(std::move(values));
    }
    set.validate();
    return set;
}

} // namespace diner
