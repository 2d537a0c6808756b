#pragma once

#include <string>

#include "unmix/potts.hpp"
#include "unmix/types.hpp"

namespace unmix {

// Cube files are a pair: a JSON header at `path` (keys width, height,
// bands, dtype="f32", interleave="bsq", byte_order="little") and a raw
// band-sequential float32 payload next to it with the extension replaced
// by ".raw". Pixels are row-major within each band.
ImageCube read_cube(const std::string& path);
void write_cube(const ImageCube& cube, const std::string& path);

std::string cube_payload_path(const std::string& header_path);

// CSV with L rows and R numeric columns; an optional header row supplies
// endmember names.
EndmemberMatrix read_endmembers(const std::string& path);
void write_endmembers(const EndmemberMatrix& endmembers,
                      const std::string& path);

// Labels as 8-bit PGM: class k maps to gray floor(255 (k-1) / (K-1)),
// K = 1 maps to 0.
void write_label_map(const LabelField& field, const std::string& path);
LabelField read_label_map(const std::string& path, int num_classes,
                          double beta = 0.0);

// One float32 cube with R bands plus one 8-bit PGM quicklook per endmember
// (gray = round-half-up of 255 a).
void write_abundance_maps(const AbundanceMatrix& abundances, int width,
                          int height, const std::string& dir,
                          const std::vector<std::string>& names = {});
AbundanceMatrix read_abundance_cube(const std::string& path);

void write_pgm(const std::string& path, int width, int height,
               const std::vector<unsigned char>& gray);

}  // namespace unmix
