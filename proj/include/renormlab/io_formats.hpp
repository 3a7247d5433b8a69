#pragma once

#include "renormlab/types.hpp"

namespace renormlab {

// 17 significant digits: lossless double round-trip, diff-stable output.
std::string fmt17(double v);

// temp file + rename in the target directory
void write_file_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

struct GrayImage {
    int width = 0, height = 0;
    int maxval = 255;
    std::vector<uint16_t> px;  // row-major, top row first
};

struct RgbImage {
    int width = 0, height = 0;
    std::vector<uint8_t> px;  // RGB triples
};

std::string encode_pgm(const GrayImage& img);  // P5
GrayImage decode_pgm(const std::string& bytes);
std::string encode_ppm(const RgbImage& img);  // P6

void write_pgm(const std::string& path, const GrayImage& img);
GrayImage read_pgm(const std::string& path);
void write_ppm(const std::string& path, const RgbImage& img);

}  // namespace renormlab
