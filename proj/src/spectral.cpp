#include "aedmd/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace aedmd {

namespace {

bool before(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() > b.real();
  return a.imag() > b.imag();
}

Eigen::VectorXcd sorted_eigenvalues(const Eigen::MatrixXd& block) {
  if (block.size() == 0) return {};
  Eigen::EigenSolver<Eigen::MatrixXd> solver(block, false);
  Eigen::VectorXcd ev = solver.eigenvalues();
  std::sort(ev.data(), ev.data() + ev.size(), before);
  return ev;
}

double condition_number(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double smin = s(s.size() - 1);
  return smin > 0.0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

// Unit norm, first non-negligible component real and positive.
Eigen::VectorXcd normalize(Eigen::VectorXcd v) {
  const double norm = v.norm();
  if (norm == 0.0) return v;
  v /= norm;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-8) {
      v *= std::conj(v(i)) / std::abs(v(i));
      v(i) = std::abs(v(i));
      break;
    }
  }
  return v;
}

} // namespace

std::vector<LatticeEigenvalue> block_eigenvalues(const KoopmanMatrix& k, std::optional<double> dt) {
  if (dt && !(*dt > 0.0)) throw InvalidArgument("block_eigenvalues: dt must be positive");
  std::vector<LatticeEigenvalue> out;
  for (const auto& b : k.blocks) {
    const auto ev = sorted_eigenvalues(k.block(b.degree, b.degree));
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
      LatticeEigenvalue e;
      e.mu = ev(i);
      e.degree = b.degree;
      e.zero_mode = (e.mu == Complex(0.0, 0.0));
      if (dt && !e.zero_mode) e.lambda = std::log(e.mu) / *dt;
      out.push_back(e);
    }
  }
  return out;
}

bool aliasing_risk(const std::vector<LatticeEigenvalue>& eigs, double dt) {
  for (const auto& e : eigs)
    if (e.degree == 1 && e.lambda && std::abs(e.lambda->imag()) * dt >= 0.9 * std::numbers::pi)
      return true;
  return false;
}

std::vector<PrincipalEigenfunction> principal_eigenfunctions(const KoopmanMatrix& k,
                                                             const EigenfunctionOptions& options) {
  if (k.blocks.size() < 2) throw InvalidArgument("principal_eigenfunctions: basis has no degree-1 block");
  const Eigen::MatrixXd k11 = k.block(1, 1);
  const auto n = k11.rows();
  const int dmax = k.basis.max_degree();

  // Eigenpairs of K_11, or an orthonormal Schur basis when K_11 is near-defective.
  Eigen::VectorXcd mus(n);
  Eigen::MatrixXcd ws(n, n);
  bool subspace = false;
  {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(k11, true);
    mus = solver.eigenvalues();
    ws = solver.eigenvectors();
    if (condition_number(ws) > options.defect_threshold) {
      Eigen::ComplexSchur<Eigen::MatrixXcd> schur(k11.cast<Complex>());
      mus = schur.matrixT().diagonal();
      ws = schur.matrixU();
      subspace = true;
    }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return before(mus(a), mus(b)); });

  std::vector<PrincipalEigenfunction> out;
  for (auto j : order) {
    PrincipalEigenfunction ef;
    ef.mu = mus(j);
    ef.degree_max = dmax;
    ef.invariant_subspace = subspace;
    ef.coefficients = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(k.basis.size()));
    ef.conditioning.assign(static_cast<std::size_t>(dmax) + 1, 1.0);

    const auto& b1 = k.blocks[1];
    ef.coefficients.segment(static_cast<Eigen::Index>(b1.start), n) = normalize(ws.col(j));

    for (int r = 2; r <= dmax; ++r) {
      const auto& br = k.blocks[static_cast<std::size_t>(r)];
      const auto rs = static_cast<Eigen::Index>(br.size);
      Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(rs);
      for (int s = 1; s < r; ++s) {
        const auto& bs = k.blocks[static_cast<std::size_t>(s)];
        rhs += k.block(r, s).cast<Complex>() *
               ef.coefficients.segment(static_cast<Eigen::Index>(bs.start),
                                       static_cast<Eigen::Index>(bs.size));
      }
      // sum_{s<=r} K_rs v_s = mu v_r  =>  (mu I - K_rr) v_r = sum_{s<r} K_rs v_s
      Eigen::MatrixXcd a = ef.mu * Eigen::MatrixXcd::Identity(rs, rs) - k.block(r, r).cast<Complex>();
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const auto& sv = svd.singularValues();
      const double smin = sv(sv.size() - 1);
      const double cond = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
      ef.conditioning[static_cast<std::size_t>(r)] = cond;
      if (cond > options.resonance_threshold) {
        svd.setThreshold(1.0 / options.resonance_threshold);
        ef.resonant_degrees.push_back(r);
      }
      ef.coefficients.segment(static_cast<Eigen::Index>(br.start), rs) = svd.solve(rhs);
    }
    out.push_back(std::move(ef));
  }
  return out;
}

double convergence_radius_estimate(const PrincipalEigenfunction& ef, const MonomialBasis& basis) {
  double radius = std::numeric_limits<double>::infinity();
  for (const auto& b : degree_offsets(basis)) {
    if (b.degree < 2) continue;
    double norm = 0.0;
    for (std::size_t i = b.start; i < b.start + b.size; ++i)
      norm = std::max(norm, std::abs(ef.coefficients(static_cast<Eigen::Index>(i))) * basis.weight(i));
    if (norm > 1e-14) radius = std::min(radius, std::pow(norm, -1.0 / b.degree));
  }
  return radius;
}

EigenfunctionValues evaluate_eigenfunction(const PrincipalEigenfunction& ef,
                                           const MonomialBasis& basis, const PointSet& grid,
                                           const Eigen::VectorXd& equilibrium) {
  if (ef.coefficients.size() != static_cast<Eigen::Index>(basis.size()))
    throw DimensionMismatch("evaluate_eigenfunction: coefficient count does not match basis");
  const PointSet shifted = translate(grid, equilibrium);
  const Eigen::MatrixXd phi = evaluate_basis<double>(basis, shifted);
  EigenfunctionValues out;
  out.values = phi.cast<Complex>() * ef.coefficients;
  out.abs = out.values.cwiseAbs();
  out.arg.resize(out.values.size());
  for (Eigen::Index i = 0; i < out.values.size(); ++i) out.arg(i) = std::arg(out.values(i));
  out.radius_estimate = convergence_radius_estimate(ef, basis);
  for (Eigen::Index i = 0; i < shifted.rows(); ++i)
    if (shifted.row(i).cwiseAbs().maxCoeff() > out.radius_estimate) ++out.beyond_radius;
  return out;
}

LatticeReport lattice_match(const std::vector<LatticeEigenvalue>& eigs, double tol) {
  LatticeReport report;
  report.eigenvalues = eigs;
  std::vector<LatticeEigenvalue> generators;
  int max_degree = 0;
  for (const auto& e : eigs) {
    if (e.degree == 1) generators.push_back(e);
    max_degree = std::max(max_degree, e.degree);
  }
  if (generators.empty()) throw InvalidArgument("lattice_match: no degree-1 eigenvalues");
  const int n = static_cast<int>(generators.size());
  report.continuous = std::all_of(generators.begin(), generators.end(),
                                  [](const LatticeEigenvalue& g) { return g.lambda.has_value(); });
  report.max_error_per_degree.assign(static_cast<std::size_t>(max_degree) + 1, 0.0);

  const auto candidates = enumerate_multiindices(n, max_degree);
  for (std::size_t p = 0; p < report.eigenvalues.size(); ++p) {
    auto& e = report.eigenvalues[p];
    double best = std::numeric_limits<double>::infinity();
    const MultiIndex* best_alpha = nullptr;
    for (const auto& alpha : candidates) {
      if (alpha.total_degree() != e.degree) continue;
      double err;
      if (report.continuous) {
        if (!e.lambda) break;
        Complex target(0.0, 0.0);
        for (int j = 0; j < n; ++j) target += double(alpha[static_cast<std::size_t>(j)]) * *generators[static_cast<std::size_t>(j)].lambda;
        err = std::abs(*e.lambda - target);
      } else {
        Complex target(1.0, 0.0);
        for (int j = 0; j < n; ++j)
          for (int q = 0; q < alpha[static_cast<std::size_t>(j)]; ++q) target *= generators[static_cast<std::size_t>(j)].mu;
        err = std::abs(e.mu - target);
      }
      if (err < best) {
        best = err;
        best_alpha = &alpha;
      }
    }
    e.match_error = best;
    auto& worst = report.max_error_per_degree[static_cast<std::size_t>(e.degree)];
    worst = std::max(worst, best);
    if (best_alpha && best <= tol) e.lattice_label = *best_alpha;
    else report.unmatched.push_back(p);
  }
  return report;
}

std::vector<Complex> lattice_points(const std::vector<Complex>& generators, int max_degree) {
  std::vector<Complex> out;
  if (generators.empty()) return out;
  for (const auto& alpha : enumerate_multiindices(static_cast<int>(generators.size()), max_degree)) {
    Complex z(0.0, 0.0);
    for (std::size_t j = 0; j < generators.size(); ++j) z += double(alpha[j]) * generators[j];
    out.push_back(z);
  }
  return out;
}

double lattice_distance(Complex z, const std::vector<Complex>& lattice) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : lattice) best = std::min(best, std::abs(z - p));
  return best;
}

PrincipalEigenfunction unscale_eigenfunction(const PrincipalEigenfunction& ef,
                                             const MonomialBasis& basis, double rho) {
  if (!(rho > 0.0)) throw InvalidArgument("unscale_eigenfunction: factor must be positive");
  PrincipalEigenfunction out = ef;
  for (std::size_t i = 0; i < basis.size(); ++i)
    out.coefficients(static_cast<Eigen::Index>(i)) *= std::pow(rho, basis.index(i).total_degree());
  const auto blocks = degree_offsets(basis);
  if (blocks.size() > 1) {
    const auto& b1 = blocks[1];
    const double norm = out.coefficients.segment(static_cast<Eigen::Index>(b1.start),
                                                 static_cast<Eigen::Index>(b1.size)).norm();
    if (norm > 0.0) out.coefficients /= norm;
  }
  return out;
}

} // namespace aedmd
