#include "unmix/io.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "unmix/errors.hpp"

namespace unmix {

namespace fs = std::filesystem;

std::string cube_payload_path(const std::string& header_path) {
  fs::path p(header_path);
  p.replace_extension(".raw");
  return p.string();
}

ImageCube read_cube(const std::string& path) {
  std::ifstream hf(path);
  if (!hf) throw data_error("read_cube: cannot open header " + path);
  nlohmann::json j;
  try {
    hf >> j;
  } catch (const nlohmann::json::exception& e) {
    throw data_error("read_cube: bad JSON header " + path + ": " + e.what());
  }
  for (const char* key : {"width", "height", "bands", "dtype", "interleave",
                          "byte_order"})
    if (!j.contains(key))
      throw data_error("read_cube: header missing key '" + std::string(key) +
                       "' in " + path);
  for (auto it = j.begin(); it != j.end(); ++it) {
    static const char* known[] = {"width",      "height",    "bands",
                                  "dtype",      "interleave", "byte_order"};
    bool found = false;
    for (const char* k : known)
      if (it.key() == k) found = true;
    if (!found)
      std::cerr << "read_cube: warning: ignoring unknown header key '"
                << it.key() << "'\n";
  }
  if (j["dtype"] != "f32" || j["interleave"] != "bsq" ||
      j["byte_order"] != "little")
    throw data_error("read_cube: unsupported dtype/interleave/byte_order in " +
                     path);
  ImageCube cube;
  cube.width = j["width"].get<int>();
  cube.height = j["height"].get<int>();
  cube.bands = j["bands"].get<int>();
  if (cube.width < 1 || cube.height < 1 || cube.bands < 1)
    throw data_error("read_cube: nonpositive dimension in " + path);

  const std::string ppath = cube_payload_path(path);
  std::ifstream pf(ppath, std::ios::binary | std::ios::ate);
  if (!pf) throw data_error("read_cube: cannot open payload " + ppath);
  const std::int64_t expected =
      static_cast<std::int64_t>(cube.pixels()) * cube.bands * 4;
  const std::int64_t actual = pf.tellg();
  if (actual != expected)
    throw data_error("read_cube: payload " + ppath + " has " +
                     std::to_string(actual) + " bytes, expected " +
                     std::to_string(expected));
  pf.seekg(0);
  const int P = cube.pixels();
  cube.data.resize(P, cube.bands);
  std::vector<float> band(P);
  for (int b = 0; b < cube.bands; ++b) {
    pf.read(reinterpret_cast<char*>(band.data()), P * 4);
    for (int p = 0; p < P; ++p) {
      if (!std::isfinite(band[p]))
        throw data_error("read_cube: non-finite value at byte offset " +
                         std::to_string((static_cast<std::int64_t>(b) * P +
                                         p) * 4) +
                         " of " + ppath);
      cube.data(p, b) = band[p];
    }
  }
  return cube;
}

void write_cube(const ImageCube& cube, const std::string& path) {
  cube.validate();
  nlohmann::json j;
  j["width"] = cube.width;
  j["height"] = cube.height;
  j["bands"] = cube.bands;
  j["dtype"] = "f32";
  j["interleave"] = "bsq";
  j["byte_order"] = "little";
  std::ofstream hf(path, std::ios::trunc);
  if (!hf) throw data_error("write_cube: cannot open " + path);
  hf << j.dump(2) << "\n";

  const std::string ppath = cube_payload_path(path);
  std::ofstream pf(ppath, std::ios::binary | std::ios::trunc);
  if (!pf) throw data_error("write_cube: cannot open " + ppath);
  const int P = cube.pixels();
  std::vector<float> band(P);
  for (int b = 0; b < cube.bands; ++b) {
    for (int p = 0; p < P; ++p) band[p] = static_cast<float>(cube.data(p, b));
    pf.write(reinterpret_cast<const char*>(band.data()), P * 4);
  }
  if (!pf) throw data_error("write_cube: write failed for " + ppath);
}

EndmemberMatrix read_endmembers(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw data_error("read_endmembers: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::vector<std::string> names;
  std::string line;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    std::vector<double> row;
    bool numeric = true;
    for (const auto& c : cells) {
      try {
        size_t pos = 0;
        row.push_back(std::stod(c, &pos));
        while (pos < c.size() && std::isspace(static_cast<unsigned char>(c[pos])))
          ++pos;
        if (pos != c.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
      if (!numeric) break;
    }
    if (!numeric) {
      if (line_no == 1 && rows.empty()) {
        names = cells;  // header row with endmember names
        continue;
      }
      throw data_error("read_endmembers: non-numeric cell at line " +
                       std::to_string(line_no) + " of " + path);
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw data_error("read_endmembers: ragged row at line " +
                       std::to_string(line_no) + " of " + path);
    rows.push_back(row);
  }
  if (rows.empty())
    throw data_error("read_endmembers: no data rows in " + path);
  EndmemberMatrix out;
  const int L = static_cast<int>(rows.size());
  const int R = static_cast<int>(rows.front().size());
  out.spectra.resize(L, R);
  for (int l = 0; l < L; ++l)
    for (int r = 0; r < R; ++r) out.spectra(l, r) = rows[l][r];
  out.names = names;
  out.validate();
  return out;
}

void write_endmembers(const EndmemberMatrix& endmembers,
                      const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw data_error("write_endmembers: cannot open " + path);
  if (!endmembers.names.empty()) {
    for (int r = 0; r < endmembers.count(); ++r)
      f << (r ? "," : "") << endmembers.names[r];
    f << "\n";
  }
  f.precision(17);
  for (int l = 0; l < endmembers.bands(); ++l) {
    for (int r = 0; r < endmembers.count(); ++r)
      f << (r ? "," : "") << endmembers.spectra(l, r);
    f << "\n";
  }
}

void write_pgm(const std::string& path, int width, int height,
               const std::vector<unsigned char>& gray) {
  if (static_cast<int>(gray.size()) != width * height)
    throw std::invalid_argument("write_pgm: pixel count mismatch");
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw data_error("write_pgm: cannot open " + path);
  f << "P5\n" << width << " " << height << "\n255\n";
  f.write(reinterpret_cast<const char*>(gray.data()), gray.size());
  if (!f) throw data_error("write_pgm: write failed for " + path);
}

namespace {

std::vector<unsigned char> read_pgm(const std::string& path, int& width,
                                    int& height) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw data_error("read_pgm: cannot open " + path);
  std::string magic;
  int maxval = 0;
  f >> magic >> width >> height >> maxval;
  if (magic != "P5" || maxval != 255)
    throw data_error("read_pgm: unsupported PGM variant in " + path);
  f.get();  // single whitespace after maxval
  std::vector<unsigned char> gray(static_cast<size_t>(width) * height);
  f.read(reinterpret_cast<char*>(gray.data()), gray.size());
  if (!f) throw data_error("read_pgm: truncated payload in " + path);
  return gray;
}

}  // namespace

void write_label_map(const LabelField& field, const std::string& path) {
  field.validate();
  if (field.num_classes > 256)
    throw std::invalid_argument("write_label_map: K > 256 unsupported");
  std::vector<unsigned char> gray(field.pixels());
  for (int p = 0; p < field.pixels(); ++p) {
    int k = field.labels[p];
    gray[p] = field.num_classes == 1
                  ? 0
                  : static_cast<unsigned char>(255 * (k - 1) /
                                               (field.num_classes - 1));
  }
  write_pgm(path, field.width, field.height, gray);
}

LabelField read_label_map(const std::string& path, int num_classes,
                          double beta) {
  LabelField field;
  std::vector<unsigned char> gray =
      read_pgm(path, field.width, field.height);
  field.num_classes = num_classes;
  field.beta = beta;
  field.labels.resize(field.pixels());
  for (int p = 0; p < field.pixels(); ++p) {
    int k = num_classes == 1
                ? 1
                : 1 + static_cast<int>(std::lround(
                          gray[p] * (num_classes - 1) / 255.0));
    field.labels[p] = std::min(std::max(k, 1), num_classes);
  }
  field.validate();
  return field;
}

void write_abundance_maps(const AbundanceMatrix& abundances, int width,
                          int height, const std::string& dir,
                          const std::vector<std::string>& names) {
  const int R = static_cast<int>(abundances.values.rows());
  const int P = static_cast<int>(abundances.values.cols());
  if (P != width * height)
    throw std::invalid_argument("write_abundance_maps: pixel count mismatch");
  fs::create_directories(dir);

  ImageCube cube;
  cube.width = width;
  cube.height = height;
  cube.bands = R;
  cube.data = abundances.values.transpose();
  write_cube(cube, (fs::path(dir) / "abundances.json").string());

  for (int r = 0; r < R; ++r) {
    std::vector<unsigned char> gray(P);
    for (int p = 0; p < P; ++p) {
      double a = std::min(std::max(abundances.values(r, p), 0.0), 1.0);
      gray[p] = static_cast<unsigned char>(std::floor(a * 255.0 + 0.5));
    }
    std::string name = r < static_cast<int>(names.size())
                           ? names[r]
                           : "endmember_" + std::to_string(r + 1);
    write_pgm((fs::path(dir) / ("abundance_" + name + ".pgm")).string(),
              width, height, gray);
  }
}

AbundanceMatrix read_abundance_cube(const std::string& path) {
  ImageCube cube = read_cube(path);
  AbundanceMatrix out;
  out.values = cube.data.transpose();
  return out;
}

}  // namespace unmix
