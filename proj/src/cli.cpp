#include "aedmd/cli.hpp"

#include "aedmd/basis.hpp"
#include "aedmd/dynamics.hpp"
#include "aedmd/edmd.hpp"
#include "aedmd/io.hpp"
#include "aedmd/kernel.hpp"
#include "aedmd/projection.hpp"
#include "aedmd/spectral.hpp"
#include "aedmd/svg.hpp"

#include "CLI11.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

namespace aedmd::cli {

namespace fs = std::filesystem;

namespace {

// Flat keys shared by every command; a config file may set any of them and
// command-line flags take precedence.
struct RunConfig {
  std::string system = "cubic1d";
  std::string input;
  std::string kernel = "szego";
  std::string equilibrium;
  int degree = 4;
  std::size_t m = 20;
  std::string box;
  double dt = 0.5;
  std::uint64_t seed = 0;
  int substeps = 0;
  std::string policy = "exact";
  double rescale = 1.0;
  std::string out_dir = ".";
  std::string out;
  std::string svg;
  std::string koopman;
  std::vector<std::string> grid;
  std::string index;
  double tol = 0.1;
  std::string method = "analytic";
  std::string function = "log1p";
  bool drop_out_of_domain = false;
};

fs::path output_path(const RunConfig& cfg, const std::string& fallback) {
  return cfg.out.empty() ? fs::path(cfg.out_dir) / fallback : fs::path(cfg.out);
}

fs::path svg_path(const RunConfig& cfg, const std::string& fallback) {
  return cfg.svg.empty() ? fs::path(cfg.out_dir) / fallback : fs::path(cfg.svg);
}

std::optional<Eigen::VectorXd> parse_vector(const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto v = parse_double_list(text);
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::string join(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v(i));
  return out;
}

std::string format_complex(Complex z) {
  std::ostringstream s;
  s << std::setprecision(6) << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  f << text;
}

std::ofstream open_file(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw Error("cannot open '" + path.string() + "' for writing");
  return f;
}

SamplingPlan make_plan(const RunConfig& cfg, int dimension) {
  SamplingPlan plan;
  plan.count = cfg.m;
  plan.dt = cfg.dt;
  plan.seed = cfg.seed;
  std::vector<double> box = cfg.box.empty() ? std::vector<double>{} : parse_double_list(cfg.box);
  if (box.empty())
    for (int i = 0; i < dimension; ++i) box.insert(box.end(), {-1.0, 1.0});
  if (box.size() != 2 * static_cast<std::size_t>(dimension))
    throw InvalidArgument("--box needs " + std::to_string(2 * dimension) +
                          " values (low,high per coordinate), got " + std::to_string(box.size()));
  plan.low.resize(dimension);
  plan.high.resize(dimension);
  for (int i = 0; i < dimension; ++i) {
    plan.low(i) = box[2 * static_cast<std::size_t>(i)];
    plan.high(i) = box[2 * static_cast<std::size_t>(i) + 1];
  }
  plan.validate();
  return plan;
}

int cmd_generate(const RunConfig& cfg, std::ostream& out) {
  const SystemSpec system = system_by_name(cfg.system);
  const SamplingPlan plan = make_plan(cfg, system.dimension);
  const int substeps = cfg.substeps > 0 ? cfg.substeps : default_substeps(cfg.dt);
  SnapshotSet data = generate_snapshots(system, plan, substeps);
  if (cfg.rescale != 1.0) data = rescale(data, cfg.rescale);

  SnapshotFile file{data.xs, data.ys, data.dt, {}};
  file.metadata["system"] = cfg.system;
  file.metadata["seed"] = std::to_string(plan.seed);
  std::string box;
  for (Eigen::Index i = 0; i < plan.low.size(); ++i)
    box += (i ? "," : "") + format_double(plan.low(i)) + "," + format_double(plan.high(i));
  file.metadata["box"] = box;
  file.metadata["substeps"] = std::to_string(substeps);
  file.metadata["rescale"] = format_double(cfg.rescale);
  const auto eq = parse_vector(cfg.equilibrium);
  file.metadata["equilibrium"] = join(eq ? *eq : Eigen::VectorXd::Zero(system.dimension));
  const fs::path path = output_path(cfg, "snapshots.csv");
  write_snapshots(path, file);
  out << "generated " << data.size() << " pairs of " << system.name << " (n=" << system.dimension
      << ", dt=" << plan.dt << ", seed=" << plan.seed << ", box=" << file.metadata["box"]
      << ", substeps=" << substeps << ", rescale=" << cfg.rescale << ") -> " << path.string() << '\n';
  return kSuccess;
}

struct KnownFunction {
  std::function<double(double)> f;
  std::function<double(int)> taylor; // exact coefficient of x^k
};

KnownFunction known_function(const std::string& name) {
  if (name == "log1p")
    return {[](double x) { return std::log1p(x); },
            [](int k) { return k == 0 ? 0.0 : (k % 2 ? 1.0 : -1.0) / k; }};
  if (name == "invsqrt") // x / sqrt(1 - x^2)
    return {[](double x) { return x / std::sqrt(1.0 - x * x); },
            [](int k) {
              if (k % 2 == 0) return 0.0;
              double c = 1.0; // binomial series of (1 - u)^(-1/2), u = x^2
              for (int j = 1; j <= (k - 1) / 2; ++j) c *= (2.0 * j - 1.0) / (2.0 * j);
              return c;
            }};
  if (name == "square") return {[](double x) { return x * x; }, [](int k) { return k == 2 ? 1.0 : 0.0; }};
  throw InvalidArgument("unknown function '" + name + "' (expected log1p | invsqrt | square)");
}

int cmd_project(const RunConfig& cfg, std::ostream& out) {
  const KernelFamily family = parse_kernel_family(cfg.kernel);
  const InversionPolicy policy = parse_inversion_policy(cfg.policy);
  PointSet points;
  Eigen::VectorXd values;
  std::optional<KnownFunction> known;
  if (!cfg.input.empty()) {
    std::ifstream in(cfg.input);
    if (!in) throw ParseError("cannot open '" + cfg.input + "'");
    std::string line;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line[0] == 'x') continue;
      rows.push_back(parse_double_list(line));
    }
    if (rows.empty() || rows[0].size() < 2) throw ParseError("sample file needs rows x1,...,xn,f");
    const auto n = static_cast<Eigen::Index>(rows[0].size() - 1);
    points.resize(static_cast<Eigen::Index>(rows.size()), n);
    values.resize(points.rows());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      if (static_cast<Eigen::Index>(rows[k].size()) != n + 1) throw ParseError("ragged sample file");
      for (Eigen::Index i = 0; i < n; ++i) points(static_cast<Eigen::Index>(k), i) = rows[k][static_cast<std::size_t>(i)];
      values(static_cast<Eigen::Index>(k)) = rows[k].back();
    }
  } else {
    known = known_function(cfg.function);
    RunConfig sampling = cfg;
    if (sampling.box.empty()) sampling.box = "-0.95,0.95";
    points = sample_uniform(make_plan(sampling, 1));
    values.resize(points.rows());
    for (Eigen::Index k = 0; k < points.rows(); ++k) values(k) = known->f(points(k, 0));
  }
  const int n = static_cast<int>(points.cols());
  const auto eq = parse_vector(cfg.equilibrium).value_or(Eigen::VectorXd::Zero(n));
  const PointSet shifted = translate(points, eq);
  const KernelSpec spec(family, n);
  const MonomialBasis basis(n, cfg.degree, weight_scheme(family));
  const GramMatrix gram = gram_matrix(spec, shifted);
  const auto taylor = taylor_project(SampledFunction(shifted, values), basis, gram, policy);

  const fs::path path = output_path(cfg, "projection.csv");
  auto file = open_file(path);
  file << "# kernel=" << to_string(family) << "\n# policy=" << policy.describe()
       << "\n# m=" << points.rows() << "\n# seed=" << cfg.seed
       << "\n# gram_condition=" << format_double(gram.condition_estimate()) << '\n';
  file << "index,degree,exponents,coefficient" << (known ? ",exact" : "") << '\n';
  out << "Taylor projection (" << points.rows() << " samples, Gram condition "
      << std::setprecision(3) << gram.condition_estimate() << ")\n";
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto& alpha = basis.index(i);
    file << i << ',' << alpha.total_degree() << ',' << format_label(alpha) << ','
         << format_double(taylor.coefficients(static_cast<Eigen::Index>(i)));
    out << "  [" << format_label(alpha) << "] " << std::setprecision(6)
        << taylor.coefficients(static_cast<Eigen::Index>(i));
    if (known) {
      const double exact = known->taylor(alpha.total_degree());
      file << ',' << format_double(exact);
      out << "  (exact " << exact << ")";
    }
    file << '\n';
    out << '\n';
  }
  out << "-> " << path.string() << '\n';
  return kSuccess;
}

SnapshotSet load_data(const RunConfig& cfg, SnapshotFile& file, std::ostream& err, KernelFamily family) {
  if (cfg.input.empty()) throw InvalidArgument("--input snapshot file is required");
  file = read_snapshots(fs::path(cfg.input));
  SnapshotSet data = file.snapshot_set(parse_vector(cfg.equilibrium));
  const KernelSpec spec(family, data.equilibrium);
  const auto rx = scan_domain(spec, data.xs);
  const auto ry = scan_domain(spec, data.ys);
  if (rx.ok() && ry.ok()) return data;
  if (cfg.drop_out_of_domain) {
    auto dropped = drop_out_of_domain(data, family);
    err << "warning: dropped " << dropped.dropped.size() << " of " << data.size()
        << " pairs outside the kernel domain\n";
    return std::move(dropped.data);
  }
  std::ostringstream msg;
  msg << "data leaves the " << to_string(family) << " kernel domain around the equilibrium (max |x - x*| = "
      << std::max(rx.max_abs_coordinate, ry.max_abs_coordinate) << ");";
  auto list = [&](const char* label, const std::vector<std::size_t>& idx) {
    if (idx.empty()) return;
    msg << ' ' << label << " samples:";
    for (std::size_t i = 0; i < idx.size() && i < 20; ++i) msg << ' ' << idx[i];
    if (idx.size() > 20) msg << " ...";
    msg << ';';
  };
  list("x", rx.offending);
  list("y", ry.offending);
  msg << " rescale the data (--rescale at generation) or pass --drop-out-of-domain";
  const auto first = !rx.ok() ? rx.offending.front() : ry.offending.front();
  throw DomainViolation(msg.str(), first, std::max(rx.max_abs_coordinate, ry.max_abs_coordinate));
}

int cmd_fit(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const KernelFamily family = parse_kernel_family(cfg.kernel);
  const InversionPolicy policy = parse_inversion_policy(cfg.policy);
  SnapshotFile file;
  const SnapshotSet data = load_data(cfg, file, err, family);
  const MonomialBasis basis(data.dimension(), cfg.degree, weight_scheme(family));
  const KernelSpec kernel(family, data.dimension());

  std::optional<KoopmanMatrix> k;
  if (cfg.method == "analytic") k = fit_analytic_edmd(data, basis, kernel, policy);
  else if (cfg.method == "nonortho") k = fit_analytic_edmd_nonortho(data, basis, kernel, policy);
  else if (cfg.method == "edmd") k = fit_edmd(data, basis);
  else throw InvalidArgument("unknown --method '" + cfg.method + "' (analytic | nonortho | edmd)");

  KoopmanFile kf{*k};
  kf.kernel = family;
  kf.dt = data.dt;
  kf.equilibrium = data.equilibrium / file.rescale();
  kf.rescale = file.rescale();
  kf.policy = policy.describe();
  kf.triangularity = triangularity_residual(*k);
  const fs::path path = output_path(cfg, "koopman.csv");
  write_koopman(path, kf);
  out << "fitted " << to_string(k->method) << " K (" << k->values.rows() << "x" << k->values.cols()
      << ", degree <= " << cfg.degree << ", " << data.size() << " pairs, policy " << kf.policy << ")\n"
      << "  Gram condition estimate: " << std::setprecision(3) << k->gram_condition << '\n'
      << "  triangularity residual: max " << kf.triangularity.max_entry << ", relative Frobenius "
      << kf.triangularity.relative_frobenius << '\n'
      << "-> " << path.string() << " (+ " << sidecar_path(path).filename().string() << ")\n";
  return kSuccess;
}

KoopmanFile load_koopman(const RunConfig& cfg) {
  if (cfg.koopman.empty()) throw InvalidArgument("--koopman matrix file is required");
  return read_koopman(fs::path(cfg.koopman));
}

std::vector<Complex> spectrum_points(const std::vector<LatticeEigenvalue>& eigs, bool continuous) {
  std::vector<Complex> pts;
  for (const auto& e : eigs) {
    if (continuous && e.lambda) pts.push_back(*e.lambda);
    else if (!continuous) pts.push_back(e.mu);
  }
  return pts;
}

int cmd_eig(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const KoopmanFile kf = load_koopman(cfg);
  const auto eigs = block_eigenvalues(kf.k, kf.dt);
  const auto report = lattice_match(eigs, cfg.tol);
  if (kf.dt && aliasing_risk(eigs, *kf.dt))
    err << "warning: |Im lambda| dt is close to pi for a degree-1 eigenvalue; log(mu)/dt may alias\n";

  const fs::path path = output_path(cfg, "eigenvalues.csv");
  {
    auto f = open_file(path);
    write_eigen_csv(f, report.eigenvalues);
  }
  std::vector<Complex> generators;
  for (const auto& e : report.eigenvalues)
    if (e.degree == 1) generators.push_back(report.continuous ? *e.lambda : e.mu);
  std::vector<Complex> reference;
  if (report.continuous) reference = lattice_points(generators, kf.k.basis.max_degree());
  const bool continuous = report.continuous;
  write_text(svg_path(cfg, "eigenvalues.svg"),
             render_complex_scatter(continuous ? "generator eigenvalues lambda" : "Koopman eigenvalues mu",
                                    {{"analytic EDMD", "#1f77b4", spectrum_points(report.eigenvalues, continuous)}},
                                    reference));

  out << "degree  " << (continuous ? "lambda" : "mu") << "  label  match_error\n";
  for (const auto& e : report.eigenvalues) {
    out << "  " << e.degree << "  " << format_complex(continuous && e.lambda ? *e.lambda : e.mu) << "  ["
        << (e.lattice_label ? format_label(e.lattice_label) : "unmatched") << "]  "
        << std::setprecision(3) << e.match_error << '\n';
  }
  out << report.unmatched.size() << " eigenvalue(s) unmatched at tol " << cfg.tol << "\n-> "
      << path.string() << '\n';
  return kSuccess;
}

PointSet make_grid(const std::vector<std::string>& specs, int n) {
  if (specs.empty()) throw InvalidArgument("--grid lo,hi,count is required (one per coordinate)");
  std::vector<std::vector<double>> axes;
  for (int i = 0; i < n; ++i) {
    const auto v = parse_double_list(specs[std::min<std::size_t>(static_cast<std::size_t>(i), specs.size() - 1)]);
    if (v.size() != 3 || !(v[2] >= 1) || v[2] != std::floor(v[2]) || !(v[0] <= v[1]))
      throw InvalidArgument("invalid grid axis (expected lo,hi,count with lo <= hi, count >= 1)");
    const int count = static_cast<int>(v[2]);
    std::vector<double> axis;
    for (int k = 0; k < count; ++k)
      axis.push_back(count == 1 ? v[0] : v[0] + (v[1] - v[0]) * k / (count - 1));
    axes.push_back(std::move(axis));
  }
  if (specs.size() > static_cast<std::size_t>(n)) throw InvalidArgument("more --grid axes than dimensions");
  Eigen::Index total = 1;
  for (const auto& a : axes) total *= static_cast<Eigen::Index>(a.size());
  PointSet grid(total, n);
  for (Eigen::Index k = 0; k < total; ++k) {
    Eigen::Index rem = k;
    for (int i = n - 1; i >= 0; --i) {
      const auto& a = axes[static_cast<std::size_t>(i)];
      grid(k, i) = a[static_cast<std::size_t>(rem % static_cast<Eigen::Index>(a.size()))];
      rem /= static_cast<Eigen::Index>(a.size());
    }
  }
  return grid;
}

int cmd_eigfun(const RunConfig& cfg, std::ostream& out) {
  const KoopmanFile kf = load_koopman(cfg);
  const auto& basis = kf.k.basis;
  auto efs = principal_eigenfunctions(kf.k);
  const PointSet grid = make_grid(cfg.grid, basis.dimension());

  std::vector<std::size_t> selected;
  if (cfg.index.empty() || cfg.index == "all") {
    for (std::size_t j = 0; j < efs.size(); ++j) selected.push_back(j);
  } else {
    for (double v : parse_double_list(cfg.index)) {
      if (v < 0 || v != std::floor(v) || static_cast<std::size_t>(v) >= efs.size())
        throw InvalidArgument("--index out of range (there are " + std::to_string(efs.size()) +
                              " principal eigenfunctions)");
      selected.push_back(static_cast<std::size_t>(v));
    }
  }
  std::vector<GridColumn> columns;
  std::vector<std::string> notes;
  for (auto j : selected) {
    const auto ef = kf.rescale != 1.0 ? unscale_eigenfunction(efs[j], basis, kf.rescale) : efs[j];
    auto values = evaluate_eigenfunction(ef, basis, grid, kf.equilibrium);
    std::ostringstream note;
    note << "eigenfunction " << j << ": mu=" << format_complex(ef.mu);
    if (kf.dt) note << " lambda=" << format_complex(std::log(ef.mu) / *kf.dt);
    note << " radius_estimate=" << format_double(values.radius_estimate);
    if (!ef.resonant_degrees.empty()) note << " resonant_degrees=" << ef.resonant_degrees.size();
    if (ef.invariant_subspace) note << " invariant_subspace_basis";
    notes.push_back(note.str());
    if (values.beyond_radius > 0)
      notes.push_back("warning: " + std::to_string(values.beyond_radius) + " grid point(s) of eigenfunction " +
                      std::to_string(j) + " lie beyond the estimated radius of convergence " +
                      format_double(values.radius_estimate));
    columns.push_back({j, std::move(values)});
  }
  const fs::path path = output_path(cfg, "eigenfunctions.csv");
  auto f = open_file(path);
  write_grid_csv(f, grid, columns, notes);
  for (const auto& n : notes) out << n << '\n';
  out << grid.rows() << " grid points -> " << path.string() << '\n';
  return kSuccess;
}

struct MethodSpectrum {
  std::string name;
  std::string color;
  std::vector<LatticeEigenvalue> eigs;
};

std::vector<LatticeEigenvalue> raw_spectrum(const Eigen::MatrixXd& m, std::optional<double> dt,
                                            std::size_t keep) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m, false);
  std::vector<Complex> ev(solver.eigenvalues().data(), solver.eigenvalues().data() + m.rows());
  std::stable_sort(ev.begin(), ev.end(), [](Complex a, Complex b) { return std::abs(a) > std::abs(b); });
  if (ev.size() > keep) ev.resize(keep);
  std::vector<LatticeEigenvalue> out;
  for (auto mu : ev) {
    LatticeEigenvalue e;
    e.mu = mu;
    e.degree = -1;
    e.zero_mode = std::abs(mu) == 0.0;
    if (dt && !e.zero_mode) e.lambda = std::log(mu) / *dt;
    out.push_back(e);
  }
  return out;
}

int cmd_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const KernelFamily family = parse_kernel_family(cfg.kernel);
  const InversionPolicy policy = parse_inversion_policy(cfg.policy);
  SnapshotFile file;
  const SnapshotSet data = load_data(cfg, file, err, family);
  const MonomialBasis basis(data.dimension(), cfg.degree, weight_scheme(family));
  const KernelSpec kernel(family, data.dimension());
  const auto n_basis = basis.size();

  std::vector<MethodSpectrum> methods;
  const auto analytic = fit_analytic_edmd(data, basis, kernel, policy);
  methods.push_back({"analytic-EDMD", "#1f77b4", block_eigenvalues(analytic, data.dt)});
  methods.push_back({"EDMD", "#d62728", raw_spectrum(fit_edmd(data, basis).values, data.dt, n_basis)});
  methods.push_back({"DMD", "#2ca02c", raw_spectrum(fit_dmd(data), data.dt, n_basis)});
  methods.push_back({"kernel-EDMD", "#9467bd",
                     raw_spectrum(fit_kernel_edmd(data, kernel, policy), data.dt, n_basis)});

  // Reference generators: the Jacobian at the equilibrium when the system is
  // known, otherwise analytic EDMD's own degree-1 block.
  const bool continuous = data.dt.has_value();
  std::vector<Complex> generators;
  std::string reference_source;
  const auto sys_it = file.metadata.find("system");
  if (sys_it != file.metadata.end()) {
    try {
      const auto system = system_by_name(sys_it->second);
      const Eigen::VectorXd eq = data.equilibrium / file.rescale();
      for (auto lam : jacobian_eigenvalues(system, eq))
        generators.push_back(continuous ? lam : std::exp(lam * 1.0));
      reference_source = "Jacobian of " + system.name + " at x*";
      if (!continuous) generators.clear();
    } catch (const Error&) {
      generators.clear();
    }
  }
  if (generators.empty()) {
    for (const auto& e : methods[0].eigs)
      if (e.degree == 1) generators.push_back(continuous ? e.lambda.value_or(Complex(0, 0)) : e.mu);
    reference_source = "analytic EDMD degree-1 block";
  }
  std::vector<Complex> lattice;
  if (continuous) {
    lattice = lattice_points(generators, cfg.degree);
  } else {
    for (const auto& alpha : enumerate_multiindices(static_cast<int>(generators.size()), cfg.degree)) {
      Complex z(1.0, 0.0);
      for (std::size_t j = 0; j < generators.size(); ++j) z *= std::pow(generators[j], alpha[j]);
      lattice.push_back(z);
    }
  }

  const fs::path path = output_path(cfg, "compare.csv");
  auto f = open_file(path);
  f << "# reference=" << reference_source << '\n';
  bool header = true;
  std::vector<ScatterSeries> series;
  out << "lattice reference: " << reference_source << "\nmethod            count  mean_err   max_err  outside_tol\n";
  for (auto& m : methods) {
    double sum = 0.0, worst = 0.0;
    std::size_t outside = 0, counted = 0;
    for (auto& e : m.eigs) {
      if (continuous && !e.lambda) continue;
      e.match_error = lattice_distance(continuous ? *e.lambda : e.mu, lattice);
      sum += e.match_error;
      worst = std::max(worst, e.match_error);
      outside += e.match_error > cfg.tol;
      ++counted;
    }
    std::ostringstream body;
    write_eigen_csv(body, m.eigs, m.name);
    std::string text = body.str();
    if (!header) text = text.substr(text.find('\n') + 1);
    header = false;
    f << text;
    out << std::left << std::setw(18) << m.name << std::right << std::setw(5) << counted << "  "
        << std::setw(9) << std::setprecision(3) << (counted ? sum / counted : 0.0) << ' ' << std::setw(9)
        << worst << ' ' << std::setw(6) << outside << '\n';
    series.push_back({m.name, m.color, spectrum_points(m.eigs, continuous)});
  }
  write_text(svg_path(cfg, "compare.svg"),
             render_complex_scatter(continuous ? "lambda by method" : "mu by method", series,
                                    continuous ? lattice : std::vector<Complex>{}));
  out << "-> " << path.string() << '\n';
  return kSuccess;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Koopman spectra near hyperbolic equilibria via orthogonal Taylor projection in an RKHS",
               "aedmd"};
  app.set_config("--config", "", "flat key = value file; command-line flags take precedence");
  // keep "box = 0,1" as one value; repeated keys use [a; b]
  app.get_config_formatter_base()->arrayDelimiter(';');
  app.require_subcommand(1, 1);
  RunConfig cfg;
  app.add_option("--system", cfg.system, "cubic1d | vanderpol | rotating | linear:r1,...");
  app.add_option("--input", cfg.input, "snapshot CSV (fit, compare) or x1..xn,f samples (project)");
  app.add_option("--kernel", cfg.kernel, "szego | exponential");
  app.add_option("--equilibrium", cfg.equilibrium, "expansion point x*, comma separated");
  app.add_option("--degree", cfg.degree, "maximal total degree of the monomial basis")->check(CLI::Range(1, 64));
  app.add_option("--m", cfg.m, "number of samples")->check(CLI::PositiveNumber);
  app.add_option("--box", cfg.box, "sampling box lo1,hi1,lo2,hi2,...");
  app.add_option("--dt", cfg.dt, "sampling time")->check(CLI::PositiveNumber);
  app.add_option("--seed", cfg.seed, "random seed")->envname("ANALYTIC_EDMD_SEED");
  app.add_option("--substeps", cfg.substeps, "RK4 substeps per sampling interval (default: h <= 0.01)");
  app.add_option("--policy", cfg.policy, "exact | pinv[:rtol] | ridge[:gamma]");
  app.add_option("--rescale", cfg.rescale, "fit on rho * x (generate)")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", cfg.out_dir, "directory for default output names");
  app.add_option("--out", cfg.out, "primary output file");
  app.add_option("--svg", cfg.svg, "SVG output file (eig, compare)");
  app.add_option("--koopman", cfg.koopman, "fitted K matrix CSV (eig, eigfun)");
  app.add_option("--grid", cfg.grid, "grid axis lo,hi,count; repeat once per coordinate");
  app.add_option("--index", cfg.index, "eigenfunction indices, comma separated, or all");
  app.add_option("--tol", cfg.tol, "lattice matching tolerance");
  app.add_option("--method", cfg.method, "analytic | nonortho | edmd (fit)");
  app.add_option("--function", cfg.function, "log1p | invsqrt | square (project)");
  app.add_flag("--drop-out-of-domain", cfg.drop_out_of_domain, "drop pairs outside the kernel domain");

  auto* generate = app.add_subcommand("generate", "integrate a benchmark system into a snapshot CSV");
  auto* project = app.add_subcommand("project", "data-driven Taylor coefficients of a sampled function");
  auto* fit = app.add_subcommand("fit", "fit the finite-section Koopman matrix");
  auto* eig = app.add_subcommand("eig", "block eigenvalues, generator eigenvalues and lattice labels");
  auto* eigfun = app.add_subcommand("eigfun", "principal eigenfunctions on a grid");
  auto* compare = app.add_subcommand("compare", "spectra of analytic EDMD, EDMD, DMD and kernel EDMD");
  for (auto* sub : {generate, project, fit, eig, eigfun, compare}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back(); // program name
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    if (generate->parsed()) return cmd_generate(cfg, out);
    if (project->parsed()) return cmd_project(cfg, out);
    if (fit->parsed()) return cmd_fit(cfg, out, err);
    if (eig->parsed()) return cmd_eig(cfg, out, err);
    if (eigfun->parsed()) return cmd_eigfun(cfg, out);
    if (compare->parsed()) return cmd_compare(cfg, out, err);
  } catch (const DomainViolation& e) {
    err << "error: " << e.what() << '\n';
    return kDomainViolation;
  } catch (const IntegrationBlowUp& e) {
    err << "error: " << e.what() << '\n';
    return kBlowUp;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}

} // namespace aedmd::cli
