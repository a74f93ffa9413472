#include "aedmd/io.hpp"

#include "json.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace aedmd {

using nlohmann::json;

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& text) {
  std::size_t begin = text.find_first_not_of(" \t\r");
  std::size_t end = text.find_last_not_of(" \t\r");
  if (begin == std::string::npos) throw ParseError("expected a number, got an empty field");
  const std::string trimmed = text.substr(begin, end - begin + 1);
  char* stop = nullptr;
  const double v = std::strtod(trimmed.c_str(), &stop);
  if (stop != trimmed.c_str() + trimmed.size()) throw ParseError("invalid number '" + trimmed + "'");
  return v;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_double(item));
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream in(line);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  return s;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return in;
}

} // namespace

double SnapshotFile::rescale() const {
  const auto it = metadata.find("rescale");
  return it == metadata.end() ? 1.0 : parse_double(it->second);
}

std::optional<Eigen::VectorXd> SnapshotFile::equilibrium() const {
  const auto it = metadata.find("equilibrium");
  if (it == metadata.end()) return std::nullopt;
  const auto v = parse_double_list(it->second);
  if (static_cast<Eigen::Index>(v.size()) != xs.cols())
    throw ParseError("equilibrium metadata has " + std::to_string(v.size()) +
                     " entries, data dimension is " + std::to_string(xs.cols()));
  return Eigen::Map<const Eigen::VectorXd>(v.data(), xs.cols());
}

SnapshotSet SnapshotFile::snapshot_set(std::optional<Eigen::VectorXd> equilibrium_override) const {
  auto eq = equilibrium_override ? equilibrium_override : equilibrium();
  if (!eq) eq = Eigen::VectorXd::Zero(xs.cols());
  if (eq->size() != xs.cols()) throw DimensionMismatch("equilibrium dimension does not match data");
  return SnapshotSet(xs, ys, dt, Eigen::VectorXd(rescale() * *eq));
}

void write_snapshots(std::ostream& out, const SnapshotFile& file) {
  const auto n = file.xs.cols();
  auto meta = file.metadata;
  meta["n"] = std::to_string(n);
  meta["m"] = std::to_string(file.xs.rows());
  if (file.dt) meta["dt"] = format_double(*file.dt);
  for (const auto& [key, value] : meta) out << "# " << key << '=' << value << '\n';
  for (Eigen::Index i = 0; i < n; ++i) out << (i ? "," : "") << 'x' << i + 1;
  for (Eigen::Index i = 0; i < n; ++i) out << ",y" << i + 1;
  out << '\n';
  for (Eigen::Index k = 0; k < file.xs.rows(); ++k) {
    for (Eigen::Index i = 0; i < n; ++i) out << (i ? "," : "") << format_double(file.xs(k, i));
    for (Eigen::Index i = 0; i < n; ++i) out << ',' << format_double(file.ys(k, i));
    out << '\n';
  }
}

SnapshotFile read_snapshots(std::istream& in) {
  SnapshotFile file;
  std::string line;
  std::vector<std::vector<double>> rows;
  std::size_t width = 0;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto body = line.substr(line.find_first_not_of("# "));
      const auto eq = body.find('=');
      if (eq != std::string::npos) file.metadata[body.substr(0, eq)] = body.substr(eq + 1);
      continue;
    }
    const auto fields = split(line, ',');
    if (!header_seen) {
      if (fields.empty() || fields.size() % 2 != 0 || fields[0] != "x1")
        throw ParseError("line " + std::to_string(line_no) + ": expected header x1,...,xn,y1,...,yn");
      width = fields.size();
      header_seen = true;
      continue;
    }
    if (fields.size() != width)
      throw ParseError("line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                       " fields, got " + std::to_string(fields.size()));
    std::vector<double> row;
    for (const auto& f : fields) {
      try {
        row.push_back(parse_double(f));
      } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    rows.push_back(std::move(row));
  }
  if (!header_seen) throw ParseError("snapshot file has no header row");
  if (rows.empty()) throw ParseError("snapshot file has no data rows");
  const auto n = static_cast<Eigen::Index>(width / 2);
  file.xs.resize(static_cast<Eigen::Index>(rows.size()), n);
  file.ys.resize(file.xs.rows(), n);
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (Eigen::Index i = 0; i < n; ++i) {
      file.xs(static_cast<Eigen::Index>(k), i) = rows[k][static_cast<std::size_t>(i)];
      file.ys(static_cast<Eigen::Index>(k), i) = rows[k][static_cast<std::size_t>(n + i)];
    }
  if (auto it = file.metadata.find("dt"); it != file.metadata.end() && it->second != "none")
    file.dt = parse_double(it->second);
  file.metadata.erase("dt");
  file.metadata.erase("n");
  file.metadata.erase("m");
  return file;
}

void write_snapshots(const std::filesystem::path& path, const SnapshotFile& file) {
  auto out = open_out(path);
  write_snapshots(out, file);
}

SnapshotFile read_snapshots(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_snapshots(in);
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
}

Eigen::MatrixXd read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    line = strip(line);
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    for (const auto& f : split(line, ',')) row.push_back(parse_double(f));
    if (!rows.empty() && row.size() != rows.front().size())
      throw ParseError("matrix CSV has ragged rows");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("matrix CSV is empty");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return m;
}

std::filesystem::path sidecar_path(const std::filesystem::path& matrix_path) {
  return std::filesystem::path(matrix_path.string() + ".blocks.json");
}

void write_koopman(const std::filesystem::path& path, const KoopmanFile& file) {
  {
    auto out = open_out(path);
    write_matrix_csv(out, file.k.values);
  }
  json meta;
  meta["dimension"] = file.k.basis.dimension();
  meta["max_degree"] = file.k.basis.max_degree();
  meta["weights"] = file.k.basis.scheme() == WeightScheme::Unit ? "unit" : "inverse_sqrt_factorial";
  meta["kernel"] = std::string(to_string(file.kernel));
  meta["method"] = std::string(to_string(file.k.method));
  meta["policy"] = file.policy;
  meta["dt"] = file.dt ? json(*file.dt) : json(nullptr);
  meta["equilibrium"] = std::vector<double>(file.equilibrium.data(),
                                            file.equilibrium.data() + file.equilibrium.size());
  meta["rescale"] = file.rescale;
  meta["gram_condition"] = file.k.gram_condition;
  meta["triangularity"] = {{"max_entry", file.triangularity.max_entry},
                           {"relative_frobenius", file.triangularity.relative_frobenius}};
  json indices = json::array();
  for (const auto& alpha : file.k.basis.indices()) indices.push_back(alpha.exponents());
  meta["indices"] = indices;
  json blocks = json::array();
  for (const auto& b : file.k.blocks)
    blocks.push_back({{"degree", b.degree}, {"start", b.start}, {"size", b.size}});
  meta["blocks"] = blocks;
  auto out = open_out(sidecar_path(path));
  out << meta.dump(2) << '\n';
}

KoopmanFile read_koopman(const std::filesystem::path& path) {
  Eigen::MatrixXd values;
  {
    auto in = open_in(path);
    values = read_matrix_csv(in);
  }
  json meta;
  {
    auto in = open_in(sidecar_path(path));
    try {
      in >> meta;
    } catch (const json::exception& e) {
      throw ParseError("malformed block metadata '" + sidecar_path(path).string() + "': " + e.what());
    }
  }
  try {
    const auto scheme = meta.at("weights").get<std::string>() == "unit"
                            ? WeightScheme::Unit
                            : WeightScheme::InverseSqrtFactorial;
    MonomialBasis basis(meta.at("dimension").get<int>(), meta.at("max_degree").get<int>(), scheme);
    const auto method_name = meta.at("method").get<std::string>();
    FitMethod method = FitMethod::AnalyticEdmd;
    for (auto m : {FitMethod::AnalyticEdmd, FitMethod::AnalyticEdmdNonOrtho, FitMethod::Edmd,
                   FitMethod::KernelEdmd})
      if (to_string(m) == method_name) method = m;
    KoopmanFile file{KoopmanMatrix(std::move(values), basis, method)};
    // The stored index list must agree with the graded order we regenerate.
    const auto& stored = meta.at("indices");
    if (stored.size() != basis.size()) throw ParseError("index list length does not match basis");
    for (std::size_t i = 0; i < basis.size(); ++i)
      if (stored[i].get<std::vector<int>>() != basis.index(i).exponents())
        throw ParseError("index list does not match the graded monomial order");
    file.kernel = parse_kernel_family(meta.at("kernel").get<std::string>());
    if (!meta.at("dt").is_null()) file.dt = meta.at("dt").get<double>();
    const auto eq = meta.at("equilibrium").get<std::vector<double>>();
    file.equilibrium = Eigen::Map<const Eigen::VectorXd>(eq.data(), static_cast<Eigen::Index>(eq.size()));
    file.rescale = meta.value("rescale", 1.0);
    file.policy = meta.value("policy", std::string("exact"));
    file.k.gram_condition = meta.value("gram_condition", 0.0);
    file.triangularity = triangularity_residual(file.k);
    return file;
  } catch (const json::exception& e) {
    throw ParseError("malformed block metadata: " + std::string(e.what()));
  } catch (const DimensionMismatch& e) {
    throw ParseError(std::string("Koopman matrix does not match its metadata: ") + e.what());
  }
}

std::string format_label(const std::optional<MultiIndex>& label) {
  if (!label) return {};
  std::string out;
  for (std::size_t i = 0; i < label->dimension(); ++i) {
    if (i) out += ';';
    out += std::to_string((*label)[i]);
  }
  return out;
}

void write_eigen_csv(std::ostream& out, const std::vector<LatticeEigenvalue>& eigs,
                     const std::string& method) {
  if (!method.empty()) out << "method,";
  out << "degree,re_mu,im_mu,re_lambda,im_lambda,lattice_label,match_error\n";
  for (const auto& e : eigs) {
    if (!method.empty()) out << method << ',';
    out << e.degree << ',' << format_double(e.mu.real()) << ',' << format_double(e.mu.imag()) << ',';
    if (e.lambda) out << format_double(e.lambda->real()) << ',' << format_double(e.lambda->imag());
    else out << ',';
    out << ',' << format_label(e.lattice_label) << ',';
    if (e.match_error >= 0.0) out << format_double(e.match_error);
    out << '\n';
  }
}

void write_grid_csv(std::ostream& out, const PointSet& grid, const std::vector<GridColumn>& columns,
                    const std::vector<std::string>& header_notes) {
  for (const auto& note : header_notes) out << "# " << note << '\n';
  const bool suffix = columns.size() > 1;
  for (Eigen::Index i = 0; i < grid.cols(); ++i) out << (i ? "," : "") << 'x' << i + 1;
  for (const auto& c : columns) {
    const std::string s = suffix ? "_" + std::to_string(c.index) : "";
    out << ",re_phi" << s << ",im_phi" << s << ",abs_phi" << s << ",arg_phi" << s;
  }
  out << '\n';
  for (Eigen::Index k = 0; k < grid.rows(); ++k) {
    for (Eigen::Index i = 0; i < grid.cols(); ++i) out << (i ? "," : "") << format_double(grid(k, i));
    for (const auto& c : columns) {
      const auto v = c.values.values(k);
      out << ',' << format_double(v.real()) << ',' << format_double(v.imag()) << ','
          << format_double(c.values.abs(k)) << ',' << format_double(c.values.arg(k));
    }
    out << '\n';
  }
}

} // namespace aedmd
