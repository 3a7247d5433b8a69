#include "renormlab/io_formats.hpp"

#include "renormlab/width_engine.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace renormlab {

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path dir = target.parent_path();
    if (dir.empty()) dir = ".";
    std::error_code ec;
    fs::create_directories(dir, ec);
    fs::path tmp = dir / (target.filename().string() + ".tmp-" +
                          std::to_string(std::random_device{}()));
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw IoError("short write to " + tmp.string());
    }
    fs::rename(tmp, target, ec);
    if (ec) throw IoError("rename to " + path + " failed: " + ec.message());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string encode_pgm(const GrayImage& img) {
    std::ostringstream out;
    out << "P5\n" << img.width << " " << img.height << "\n" << img.maxval << "\n";
    if (img.maxval < 256) {
        for (uint16_t v : img.px) out.put(static_cast<char>(v & 0xff));
    } else {
        for (uint16_t v : img.px) {
            out.put(static_cast<char>((v >> 8) & 0xff));
            out.put(static_cast<char>(v & 0xff));
        }
    }
    return out.str();
}

namespace {

int next_token(const std::string& s, std::size_t& pos) {
    while (pos < s.size()) {
        if (std::isspace(static_cast<unsigned char>(s[pos]))) {
            ++pos;
        } else if (s[pos] == '#') {
            while (pos < s.size() && s[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
    std::size_t start = pos;
    while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (start == pos) throw IoError("PGM: truncated header");
    return std::stoi(s.substr(start, pos - start));
}

}  // namespace

GrayImage decode_pgm(const std::string& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') throw IoError("PGM: not a P5 file");
    std::size_t pos = 2;
    GrayImage img;
    img.width = next_token(bytes, pos);
    img.height = next_token(bytes, pos);
    img.maxval = next_token(bytes, pos);
    ++pos;  // single whitespace after maxval
    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    img.px.resize(n);
    if (img.maxval < 256) {
        if (bytes.size() - pos < n) throw IoError("PGM: truncated pixel data");
        for (std::size_t k = 0; k < n; ++k) img.px[k] = static_cast<uint8_t>(bytes[pos + k]);
    } else {
        if (bytes.size() - pos < 2 * n) throw IoError("PGM: truncated pixel data");
        for (std::size_t k = 0; k < n; ++k)
            img.px[k] = static_cast<uint16_t>((static_cast<uint8_t>(bytes[pos + 2 * k]) << 8) |
                                              static_cast<uint8_t>(bytes[pos + 2 * k + 1]));
    }
    return img;
}

std::string encode_ppm(const RgbImage& img) {
    std::ostringstream out;
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.px.data()),
              static_cast<std::streamsize>(img.px.size()));
    return out.str();
}

void write_pgm(const std::string& path, const GrayImage& img) {
    write_file_atomic(path, encode_pgm(img));
}

GrayImage read_pgm(const std::string& path) { return decode_pgm(read_file(path)); }

void write_ppm(const std::string& path, const RgbImage& img) {
    write_file_atomic(path, encode_ppm(img));
}

// --- GridDomain persistence: PGM mask + sidecar JSON ---------------------------

namespace {
constexpr int kInteriorColor = 255;
constexpr int kExteriorColor = 0;
}  // namespace

void save_domain(const GridDomain& dom, const std::string& path_base) {
    GrayImage img;
    img.width = dom.nx;
    img.height = dom.ny;
    img.maxval = 255;
    img.px.resize(dom.cell.size());
    // color index = component label for boundary cells (rows top-down)
    for (int j = 0; j < dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i) {
            std::size_t k = dom.idx(i, j);
            uint16_t v = kExteriorColor;
            if (dom.cell[k] == GridDomain::Interior) v = kInteriorColor;
            if (dom.cell[k] == GridDomain::Boundary) v = dom.label[k];
            img.px[static_cast<std::size_t>(dom.ny - 1 - j) * dom.nx + i] = v;
        }
    write_pgm(path_base + ".pgm", img);

    nlohmann::json meta;
    meta["x0"] = dom.x0;
    meta["y0"] = dom.y0;
    meta["hx"] = dom.hx;
    meta["hy"] = dom.hy;
    meta["periodic_x"] = dom.periodic_x;
    meta["interior_color"] = kInteriorColor;
    meta["exterior_color"] = kExteriorColor;
    nlohmann::json colors = nlohmann::json::object();
    for (int l : dom.labels_present()) colors[std::to_string(l)] = {{"component", l}};
    // arcs recorded as explicit cell lists per color
    nlohmann::json arcs = nlohmann::json::array();
    for (std::size_t k = 0; k < dom.cell.size(); ++k)
        if (dom.arc[k] != 0)
            arcs.push_back({{"cell", k}, {"component", dom.label[k]}, {"arc", dom.arc[k]}});
    meta["colors"] = colors;
    meta["arcs"] = arcs;
    write_file_atomic(path_base + ".json", meta.dump(2) + "\n");
}

GridDomain load_domain(const std::string& path_base) {
    GrayImage img = read_pgm(path_base + ".pgm");
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(read_file(path_base + ".json"));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("domain sidecar JSON: ") + e.what());
    }
    GridDomain dom;
    dom.nx = img.width;
    dom.ny = img.height;
    dom.x0 = meta.at("x0").get<double>();
    dom.y0 = meta.at("y0").get<double>();
    dom.hx = meta.at("hx").get<double>();
    dom.hy = meta.at("hy").get<double>();
    dom.periodic_x = meta.value("periodic_x", false);
    dom.cell.assign(img.px.size(), GridDomain::Exterior);
    dom.label.assign(img.px.size(), 0);
    dom.arc.assign(img.px.size(), 0);
    for (int j = 0; j < dom.ny; ++j)
        for (int i = 0; i < dom.nx; ++i) {
            uint16_t v = img.px[static_cast<std::size_t>(dom.ny - 1 - j) * dom.nx + i];
            std::size_t k = dom.idx(i, j);
            if (v == kInteriorColor) {
                dom.cell[k] = GridDomain::Interior;
            } else if (v != kExteriorColor) {
                dom.cell[k] = GridDomain::Boundary;
                dom.label[k] = static_cast<uint8_t>(v);
            }
        }
    if (meta.contains("arcs"))
        for (const auto& a : meta["arcs"]) {
            std::size_t k = a.at("cell").get<std::size_t>();
            if (k < dom.arc.size()) dom.arc[k] = a.at("arc").get<uint8_t>();
        }
    dom.validate();
    return dom;
}

}  // namespace renormlab
