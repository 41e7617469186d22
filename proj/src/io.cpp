#include "rwl/io.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "rwl/error.hpp"

namespace rwl {
namespace fs = std::filesystem;
namespace {

static_assert(std::endian::native == std::endian::little,
              "field dumps assume a little-endian host");

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, mode | std::ios::trunc);
  require(os.good(), ErrorCode::Io, "cannot open " + path.string() + " for writing");
  return os;
}

}  // namespace

void write_field_dump(const fs::path& path, const ScalarField& f) {
  std::ofstream os = open_out(path, std::ios::binary);
  const std::vector<std::uint32_t> dims =
      f.layout() == Layout::Volume
          ? std::vector<std::uint32_t>{static_cast<std::uint32_t>(f.shape().nx()),
                                       static_cast<std::uint32_t>(f.shape().ny()),
                                       static_cast<std::uint32_t>(f.shape().nz())}
          : std::vector<std::uint32_t>{static_cast<std::uint32_t>(f.shape().nx()),
                                       static_cast<std::uint32_t>(f.shape().ny())};
  const std::uint32_t rank = static_cast<std::uint32_t>(dims.size());
  os.write("RWL1", 4);
  os.write(reinterpret_cast<const char*>(&rank), sizeof rank);
  os.write(reinterpret_cast<const char*>(dims.data()), dims.size() * sizeof(std::uint32_t));
  os.write(reinterpret_cast<const char*>(f.values().data()), f.size() * sizeof(double));
  require(os.good(), ErrorCode::Io, "failed writing " + path.string());
}

FieldDump read_field_dump(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), ErrorCode::Io, "cannot open " + path.string());
  char magic[4];
  is.read(magic, 4);
  require(is.good() && std::memcmp(magic, "RWL1", 4) == 0, ErrorCode::Io,
          path.string() + " is not a field dump");
  std::uint32_t rank = 0;
  is.read(reinterpret_cast<char*>(&rank), sizeof rank);
  require(is.good() && rank >= 1 && rank <= 8, ErrorCode::Io, "bad rank in " + path.string());
  FieldDump d;
  d.dims.resize(rank);
  is.read(reinterpret_cast<char*>(d.dims.data()), rank * sizeof(std::uint32_t));
  std::size_t n = 1;
  for (std::uint32_t x : d.dims) n *= x;
  d.data.resize(n);
  is.read(reinterpret_cast<char*>(d.data.data()), n * sizeof(double));
  require(is.good(), ErrorCode::Io, "truncated field dump " + path.string());
  return d;
}

ScalarField read_field(const fs::path& path, const SlabGrid& g, Layout layout, Parity parity) {
  const FieldDump d = read_field_dump(path);
  ScalarField f(g, layout, parity);
  const Shape& s = f.shape();
  const bool ok = layout == Layout::Volume
                      ? d.dims == std::vector<std::uint32_t>{static_cast<std::uint32_t>(s.nx()),
                                                             static_cast<std::uint32_t>(s.ny()),
                                                             static_cast<std::uint32_t>(s.nz())}
                      : d.dims == std::vector<std::uint32_t>{static_cast<std::uint32_t>(s.nx()),
                                                             static_cast<std::uint32_t>(s.ny())};
  require(ok, ErrorCode::GridMismatch, path.string() + " does not match the configured grid");
  std::copy(d.data.begin(), d.data.end(), f.values().begin());
  require(f.all_finite(), ErrorCode::NonFinite, path.string() + " contains non-finite samples");
  return f;
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns) {
  require(header.size() == columns.size(), ErrorCode::InvalidArgument,
          "CSV header and columns differ in count");
  const std::size_t rows = columns.empty() ? 0 : columns.front().size();
  for (const auto& c : columns)
    require(c.size() == rows, ErrorCode::InvalidArgument, "CSV columns differ in length");
  std::ofstream os = open_out(path);
  for (std::size_t k = 0; k < header.size(); ++k) os << (k ? "," : "") << header[k];
  os << '\n';
  char buf[64];
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t k = 0; k < columns.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", columns[k][r]);
      os << (k ? "," : "") << buf;
    }
    os << '\n';
  }
  require(os.good(), ErrorCode::Io, "failed writing " + path.string());
}

const std::vector<double>& CsvTable::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  require(it != header.end(), ErrorCode::InvalidArgument, "no CSV column named " + name);
  return columns[it - header.begin()];
}

CsvTable read_csv(const fs::path& path) {
  std::ifstream is(path);
  require(is.good(), ErrorCode::Io, "cannot open " + path.string());
  CsvTable t;
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), ErrorCode::Io, path.string() + " is empty");
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
  t.columns.resize(t.header.size());
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream rs(line);
    std::size_t k = 0;
    for (std::string cell; std::getline(rs, cell, ','); ++k) {
      require(k < t.columns.size(), ErrorCode::Io, "ragged row in " + path.string());
      t.columns[k].push_back(std::stod(cell));
    }
    require(k == t.columns.size(), ErrorCode::Io, "ragged row in " + path.string());
  }
  return t;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), ErrorCode::Io, "cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  require(ctx != nullptr, ErrorCode::Internal, "cannot allocate a digest context");
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  std::array<char, 1 << 16> buf;
  while (is) {
    is.read(buf.data(), buf.size());
    if (is.gcount() > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(is.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  char b[3];
  for (unsigned i = 0; i < len; ++i) {
    std::snprintf(b, sizeof b, "%02x", md[i]);
    hex += b;
  }
  return hex;
}

ArtifactDir::ArtifactDir(fs::path root) : root_(std::move(root)) {
  fs::create_directories(root_);
  write_manifest(false);
}

ArtifactDir::~ArtifactDir() {
  if (!finished_) {
    try {
      write_manifest(false);
    } catch (...) {
    }
  }
}

fs::path ArtifactDir::file(const std::string& relative) {
  const fs::path p = root_ / relative;
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  if (std::find(files_.begin(), files_.end(), relative) == files_.end())
    files_.push_back(relative);
  return p;
}

void ArtifactDir::write_text(const std::string& relative, const std::string& text) {
  std::ofstream os = open_out(file(relative));
  os << text;
  require(os.good(), ErrorCode::Io, "failed writing " + relative);
}

void ArtifactDir::finish(bool complete) {
  write_manifest(complete);
  finished_ = true;
}

void ArtifactDir::write_manifest(bool complete) const {
  std::vector<std::string> sorted = files_;
  std::sort(sorted.begin(), sorted.end());
  std::ofstream os = open_out(root_ / "MANIFEST");
  os << "status " << (complete ? "COMPLETE" : "INCOMPLETE") << '\n';
  for (const std::string& f : sorted) {
    const fs::path p = root_ / f;
    if (fs::exists(p)) os << sha256_file(p) << "  " << f << '\n';
  }
}

}  // namespace rwl
