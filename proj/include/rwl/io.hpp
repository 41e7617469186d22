#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rwl/field.hpp"

namespace rwl {

/// Raw contents of a field dump: "RWL1", u32 rank, u32 dims[rank], then f64
/// samples in row-major order, all little-endian.
struct FieldDump {
  std::vector<std::uint32_t> dims;
  std::vector<double> data;
};

/// Volume fields are written with rank 3 (nx, ny, nz), planar ones with rank 2.
void write_field_dump(const std::filesystem::path& path, const ScalarField& f);
FieldDump read_field_dump(const std::filesystem::path& path);
/// Reads a dump into a field on g; the dims must match g and the layout.
ScalarField read_field(const std::filesystem::path& path, const SlabGrid& g, Layout layout,
                       Parity parity = Parity::None);

/// Column-oriented CSV with a header row and "%.17g" values.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& columns);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;

  const std::vector<double>& column(const std::string& name) const;
};

CsvTable read_csv(const std::filesystem::path& path);

/// Lowercase hex SHA-256 of a file's contents.
std::string sha256_file(const std::filesystem::path& path);

/// Output directory with a MANIFEST of every produced file. The manifest is
/// written as INCOMPLETE when the directory is opened and rewritten with
/// hashes by finish(); an abandoned run therefore stays flagged.
class ArtifactDir {
 public:
  explicit ArtifactDir(std::filesystem::path root);
  ~ArtifactDir();

  ArtifactDir(const ArtifactDir&) = delete;
  ArtifactDir& operator=(const ArtifactDir&) = delete;

  const std::filesystem::path& root() const { return root_; }

  /// Path for a new file relative to the root; parent directories are created.
  std::filesystem::path file(const std::string& relative);

  void write_text(const std::string& relative, const std::string& text);

  /// Rewrites the INCOMPLETE manifest with the files produced so far.
  void checkpoint() const { write_manifest(false); }

  /// Writes the final manifest. `complete` = false keeps the INCOMPLETE flag.
  void finish(bool complete);

 private:
  void write_manifest(bool complete) const;

  std::filesystem::path root_;
  std::vector<std::string> files_;
  bool finished_ = false;
};

}  // namespace rwl
