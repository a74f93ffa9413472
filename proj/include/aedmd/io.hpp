#pragma once

#include "aedmd/edmd.hpp"
#include "aedmd/error.hpp"
#include "aedmd/kernel.hpp"
#include "aedmd/spectral.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace aedmd {

class ParseError : public Error {
public:
  using Error::Error;
};

// Shortest round-trip-safe text for a double (17 significant digits).
std::string format_double(double v);
double parse_double(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

// Snapshot CSV:
//   # key=value           metadata (n, dt, seed, system, box, equilibrium, rescale, ...)
//   x1,...,xn,y1,...,yn   header
//   one pair per row
// Coordinates are stored as fitted, i.e. after any rescaling; `equilibrium`
// is kept in the original coordinates.
struct SnapshotFile {
  PointSet xs;
  PointSet ys;
  std::optional<double> dt;
  std::map<std::string, std::string> metadata;

  double rescale() const;
  std::optional<Eigen::VectorXd> equilibrium() const; // original coordinates
  // SnapshotSet in fitted coordinates with the equilibrium scaled accordingly.
  SnapshotSet snapshot_set(std::optional<Eigen::VectorXd> equilibrium_override = std::nullopt) const;
};

void write_snapshots(std::ostream& out, const SnapshotFile& file);
SnapshotFile read_snapshots(std::istream& in);
void write_snapshots(const std::filesystem::path& path, const SnapshotFile& file);
SnapshotFile read_snapshots(const std::filesystem::path& path);

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(std::istream& in);

// A fitted matrix plus everything needed to interpret it later.
struct KoopmanFile {
  explicit KoopmanFile(KoopmanMatrix matrix) : k(std::move(matrix)) {}

  KoopmanMatrix k;
  KernelFamily kernel = KernelFamily::SzegoPolydisc;
  std::optional<double> dt;
  Eigen::VectorXd equilibrium; // original coordinates
  double rescale = 1.0;
  std::string policy = "exact";
  TriangularityResidual triangularity;
};

// Writes <path> (N x N CSV) and <path>.blocks.json (basis and block metadata).
void write_koopman(const std::filesystem::path& path, const KoopmanFile& file);
KoopmanFile read_koopman(const std::filesystem::path& path);
std::filesystem::path sidecar_path(const std::filesystem::path& matrix_path);

std::string format_label(const std::optional<MultiIndex>& label);

// degree,re_mu,im_mu,re_lambda,im_lambda,lattice_label,match_error
void write_eigen_csv(std::ostream& out, const std::vector<LatticeEigenvalue>& eigs,
                     const std::string& method = {});

struct GridColumn {
  std::size_t index;
  EigenfunctionValues values;
};

// x1..xn then re_phi,im_phi,abs_phi,arg_phi per selected eigenfunction (suffixed
// with _<index> when more than one is selected).
void write_grid_csv(std::ostream& out, const PointSet& grid, const std::vector<GridColumn>& columns,
                    const std::vector<std::string>& header_notes);

} // namespace aedmd
