#include "rset/io.hpp"

#include <cctype>
#include <cerrno>
#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rset/meanset.hpp"

namespace fs = std::filesystem;

namespace rset {
namespace {

// Reads one whitespace-delimited PNM header token, skipping '#' comments.
std::string next_pnm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {}
      continue;
    }
    if (std::isspace(c)) continue;
    tok.push_back(static_cast<char>(c));
    while ((c = in.get()) != EOF && !std::isspace(c) && c != '#') tok.push_back(static_cast<char>(c));
    if (c == '#') in.unget();
    return tok;
  }
  fail(Errc::io_error, "truncated PGM header");
}

struct PgmHeader {
  int width;
  int height;
  int maxval;
};

PgmHeader read_pgm_header(std::istream& in, const std::string& path) {
  if (next_pnm_token(in) != "P5") fail(Errc::io_error, path + ": not a binary PGM (magic P5)");
  PgmHeader h{};
  try {
    h.width = std::stoi(next_pnm_token(in));
    h.height = std::stoi(next_pnm_token(in));
    h.maxval = std::stoi(next_pnm_token(in));
  } catch (const std::exception&) {
    fail(Errc::io_error, path + ": malformed PGM header");
  }
  if (h.width < 1 || h.height < 1) fail(Errc::io_error, path + ": bad PGM dimensions");
  if (h.maxval < 1 || h.maxval > 255) fail(Errc::io_error, path + ": only 8-bit PGM supported");
  return h;
}

}  // namespace

std::pair<int, int> read_pgm_dims(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, path + ": cannot open");
  PgmHeader h = read_pgm_header(in, path);
  return {h.width, h.height};
}

BinaryMask read_mask_pgm(const std::string& path, const GridDomain& domain) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io_error, path + ": cannot open");
  PgmHeader h = read_pgm_header(in, path);
  if (h.width != domain.nx || h.height != domain.ny)
    fail(Errc::domain_mismatch, path + ": image is " + std::to_string(h.width) + "x" +
                                    std::to_string(h.height) + " but grid wants " +
                                    std::to_string(domain.nx) + "x" + std::to_string(domain.ny));
  std::vector<std::uint8_t> bytes(domain.cell_count());
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
    fail(Errc::io_error, path + ": truncated PGM raster");
  BinaryMask mask(domain);
  for (std::size_t k = 0; k < bytes.size(); ++k) mask.set_index(k, bytes[k] >= 128);
  return mask;
}

void write_mask_pgm(const BinaryMask& mask, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_error, path + ": cannot open for writing");
  const GridDomain& d = mask.domain();
  out << "P5\n" << d.nx << " " << d.ny << "\n255\n";
  std::vector<std::uint8_t> bytes(d.cell_count());
  for (std::size_t k = 0; k < bytes.size(); ++k) bytes[k] = mask[k] ? 255 : 0;
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(Errc::io_error, path + ": write failed");
}

ScalarField read_field_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::io_error, path + ": cannot open");
  std::string header;
  if (!std::getline(in, header)) fail(Errc::io_error, path + ": empty file");
  GridDomain dom;
  {
    std::istringstream hs(header);
    std::string hash;
    hs >> hash >> dom.nx >> dom.ny >> dom.x0 >> dom.y0 >> dom.h;
    if (hash != "#" || hs.fail())
      fail(Errc::io_error, path + ": expected header '# nx ny x0 y0 h'");
  }
  dom.validate();
  std::vector<double> values;
  values.reserve(dom.cell_count());
  std::string line;
  for (int j = 0; j < dom.ny; ++j) {
    if (!std::getline(in, line)) fail(Errc::io_error, path + ": missing data row " + std::to_string(j));
    const char* p = line.c_str();
    for (int i = 0; i < dom.nx; ++i) {
      char* end = nullptr;
      errno = 0;
      double v = std::strtod(p, &end);
      if (end == p || errno == ERANGE)
        fail(Errc::io_error, path + ": bad value at row " + std::to_string(j) + " col " + std::to_string(i));
      values.push_back(v);
      p = end;
      while (*p == ',' || *p == ' ' || *p == '\t') ++p;
    }
  }
  ScalarField f(dom, std::move(values));
  f.validate_finite();
  return f;
}

void write_field_csv(const ScalarField& field, const std::string& path) {
  std::FILE* out = std::fopen(path.c_str(), "w");
  if (!out) fail(Errc::io_error, path + ": cannot open for writing");
  const GridDomain& d = field.domain();
  std::fprintf(out, "# %d %d %.17g %.17g %.17g\n", d.nx, d.ny, d.x0, d.y0, d.h);
  for (int j = 0; j < d.ny; ++j) {
    for (int i = 0; i < d.nx; ++i)
      std::fprintf(out, i + 1 == d.nx ? "%.17g" : "%.17g,", field[d.index(i, j)]);
    std::fputc('\n', out);
  }
  if (std::fclose(out) != 0) fail(Errc::io_error, path + ": write failed");
}

void write_stack(const SampleStack& stack, const std::string& dir) {
  if (stack.fields.empty()) fail(Errc::empty_stack, "cannot write an empty stack");
  std::error_code ec;
  fs::create_directories(dir, ec);
  nlohmann::json names = nlohmann::json::array();
  char buf[32];
  for (std::size_t k = 0; k < stack.fields.size(); ++k) {
    std::snprintf(buf, sizeof buf, "b%05zu.csv", k);
    write_field_csv(stack.fields[k], (fs::path(dir) / buf).string());
    names.push_back(buf);
  }
  nlohmann::json manifest;
  manifest["fields"] = names;
  std::ofstream out(fs::path(dir) / "manifest.json");
  if (!out) fail(Errc::io_error, dir + ": cannot write manifest.json");
  out << manifest.dump(2) << "\n";
}

SampleStack read_stack(const std::string& dir) {
  std::ifstream in(fs::path(dir) / "manifest.json");
  if (!in) fail(Errc::io_error, dir + ": missing manifest.json");
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const std::exception& e) {
    fail(Errc::io_error, dir + ": bad manifest.json: " + e.what());
  }
  if (!manifest.contains("fields") || !manifest["fields"].is_array())
    fail(Errc::io_error, dir + ": manifest.json lacks a \"fields\" array");
  SampleStack stack;
  for (const auto& name : manifest["fields"]) {
    if (!name.is_string()) fail(Errc::io_error, dir + ": manifest entries must be filenames");
    stack.fields.push_back(read_field_csv((fs::path(dir) / name.get<std::string>()).string()));
  }
  if (stack.fields.empty()) fail(Errc::empty_stack, dir + ": manifest lists no fields");
  stack.validate();
  return stack;
}

}  // namespace rset
