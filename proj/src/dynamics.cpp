#include "aedmd/dynamics.hpp"
#include "aedmd/precision.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>
#include <Eigen/Eigenvalues>

#include <algorithm>

#include <cmath>
#include <random>
#include <sstream>

namespace aedmd {

SystemSpec cubic1d() {
  SystemSpec s;
  s.kind = SystemKind::Cubic1D;
  s.name = "cubic1d";
  s.dimension = 1;
  s.field = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd dx(1);
    dx(0) = x(0) - x(0) * x(0) * x(0);
    return dx;
  };
  s.known_equilibria = {Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 1.0),
                        Eigen::VectorXd::Constant(1, -1.0)};
  s.known_jacobian_eigs = {1.0};
  return s;
}

SystemSpec van_der_pol() {
  SystemSpec s;
  s.kind = SystemKind::VanDerPol;
  s.name = "vanderpol";
  s.dimension = 2;
  s.field = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd dx(2);
    dx(0) = -x(1);
    dx(1) = -(1.0 - x(0) * x(0)) * x(1) + x(0);
    return dx;
  };
  s.known_equilibria = {Eigen::VectorXd::Zero(2)};
  s.known_jacobian_eigs = {{-0.5, std::sqrt(3.0) / 2.0}, {-0.5, -std::sqrt(3.0) / 2.0}};
  return s;
}

SystemSpec rotating2d() {
  SystemSpec s;
  s.kind = SystemKind::Rotating2D;
  s.name = "rotating";
  s.dimension = 2;
  s.field = [](const Eigen::VectorXd& x) {
    const double a = x(0), b = x(1);
    Eigen::VectorXd dx(2);
    dx(0) = -a - a * a * b - b * b * b;
    dx(1) = -b + a * b * b + a * a * a;
    return dx;
  };
  s.known_equilibria = {Eigen::VectorXd::Zero(2)};
  s.known_jacobian_eigs = {-1.0, -1.0};
  return s;
}

SystemSpec linear_diagonal(std::vector<double> rates) {
  if (rates.empty()) throw InvalidArgument("linear_diagonal: need at least one rate");
  SystemSpec s;
  s.kind = SystemKind::LinearDiagonal;
  s.name = "linear";
  s.dimension = static_cast<int>(rates.size());
  const Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(rates.data(), s.dimension);
  s.field = [r](const Eigen::VectorXd& x) -> Eigen::VectorXd { return r.cwiseProduct(x); };
  s.known_equilibria = {Eigen::VectorXd::Zero(s.dimension)};
  for (double v : rates) s.known_jacobian_eigs.emplace_back(v);
  return s;
}

SystemSpec custom_system(std::string name, int dimension, VectorField field,
                         std::vector<Eigen::VectorXd> equilibria) {
  if (dimension < 1) throw InvalidArgument("custom_system: dimension must be >= 1");
  SystemSpec s;
  s.kind = SystemKind::Custom;
  s.name = std::move(name);
  s.dimension = dimension;
  s.field = std::move(field);
  s.known_equilibria = std::move(equilibria);
  return s;
}

SystemSpec system_by_name(std::string_view name) {
  if (name == "cubic1d") return cubic1d();
  if (name == "vanderpol") return van_der_pol();
  if (name == "rotating") return rotating2d();
  if (name.starts_with("linear:")) {
    std::vector<double> rates;
    std::stringstream in{std::string(name.substr(7))};
    std::string item;
    while (std::getline(in, item, ',')) {
      try {
        rates.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw InvalidArgument("invalid rate '" + item + "' in system '" + std::string(name) + "'");
      }
    }
    return linear_diagonal(std::move(rates));
  }
  throw InvalidArgument("unknown system '" + std::string(name) +
                        "' (expected cubic1d | vanderpol | rotating | linear:r1,...)");
}

std::vector<std::complex<double>> jacobian_eigenvalues(const SystemSpec& system,
                                                       const Eigen::VectorXd& x) {
  if (x.size() != system.dimension) throw DimensionMismatch("jacobian_eigenvalues: dimension mismatch");
  const auto n = x.size();
  Eigen::MatrixXd jac(n, n);
  const double h = 1e-6;
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXd plus = x, minus = x;
    plus(j) += h;
    minus(j) -= h;
    jac.col(j) = (system(plus) - system(minus)) / (2.0 * h);
  }
  Eigen::EigenSolver<Eigen::MatrixXd> solver(jac, false);
  std::vector<std::complex<double>> out(solver.eigenvalues().data(),
                                        solver.eigenvalues().data() + n);
  std::sort(out.begin(), out.end(), [](auto a, auto b) {
    return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
  });
  return out;
}

Eigen::VectorXd rk4_flow(const SystemSpec& system, const Eigen::VectorXd& x0, double dt,
                         int substeps) {
  if (!(dt > 0.0)) throw InvalidArgument("rk4_flow: dt must be positive");
  if (substeps < 1) throw InvalidArgument("rk4_flow: substeps must be >= 1");
  if (x0.size() != system.dimension)
    throw DimensionMismatch("rk4_flow: state dimension does not match system");
  const double h = dt / substeps;
  Eigen::VectorXd x = x0;
  for (int i = 0; i < substeps; ++i) {
    const Eigen::VectorXd k1 = system(x);
    const Eigen::VectorXd k2 = system(x + 0.5 * h * k1);
    const Eigen::VectorXd k3 = system(x + 0.5 * h * k2);
    const Eigen::VectorXd k4 = system(x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite())
      throw IntegrationBlowUp("trajectory of " + system.name + " became non-finite after " +
                                  std::to_string(i + 1) + " steps",
                              std::nullopt);
  }
  return x;
}

int default_substeps(double dt) {
  return std::max(1, static_cast<int>(std::ceil(dt / 0.01 - 1e-9)));
}

void SamplingPlan::validate() const {
  if (count < 1) throw InvalidArgument("sampling plan: count must be >= 1");
  if (low.size() < 1 || low.size() != high.size())
    throw DimensionMismatch("sampling plan: box bounds must have equal, positive length");
  for (Eigen::Index i = 0; i < low.size(); ++i)
    if (!(low(i) <= high(i)))
      throw InvalidArgument("sampling plan: low > high on coordinate " + std::to_string(i));
  if (!(dt > 0.0)) throw InvalidArgument("sampling plan: dt must be positive");
}

PointSet sample_uniform(const SamplingPlan& plan) {
  plan.validate();
  std::mt19937_64 gen(plan.seed);
  const auto n = plan.low.size();
  PointSet xs(static_cast<Eigen::Index>(plan.count), n);
  for (Eigen::Index k = 0; k < xs.rows(); ++k) {
    for (Eigen::Index c = 0; c < n; ++c) {
      const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
      xs(k, c) = plan.low(c) + (plan.high(c) - plan.low(c)) * u;
    }
  }
  return xs;
}

SnapshotSet generate_snapshots(const SystemSpec& system, const SamplingPlan& plan, int substeps) {
  if (plan.low.size() != system.dimension)
    throw DimensionMismatch("sampling box dimension " + std::to_string(plan.low.size()) +
                            " does not match system dimension " +
                            std::to_string(system.dimension));
  PointSet xs = sample_uniform(plan);
  PointSet ys(xs.rows(), xs.cols());
  for (Eigen::Index k = 0; k < xs.rows(); ++k) {
    try {
      ys.row(k) = rk4_flow(system, xs.row(k).transpose(), plan.dt, substeps).transpose();
    } catch (const IntegrationBlowUp& e) {
      throw IntegrationBlowUp(std::string(e.what()) + " (sample " + std::to_string(k) + ")",
                              static_cast<std::size_t>(k));
    }
  }
  return SnapshotSet(std::move(xs), std::move(ys), plan.dt);
}

SnapshotSet rescale(const SnapshotSet& data, double rho) {
  if (!(rho > 0.0)) throw InvalidArgument("rescale: factor must be positive");
  return SnapshotSet(rho * data.xs, rho * data.ys, data.dt, Eigen::VectorXd(rho * data.equilibrium));
}

double PolynomialMap1D::operator()(double x) const {
  double y = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) y = y * x + it->value();
  return y;
}

namespace {

using CheckedInt = boost::multiprecision::checked_int128_t;
using Exact = boost::rational<CheckedInt>;

double value_of(double v) { return v; }
double value_of(const Exact& v) {
  return static_cast<double>(ExtReal(v.numerator()) / ExtReal(v.denominator()));
}

template <typename T>
std::vector<T> multiply_truncated(const std::vector<T>& a, const std::vector<T>& b, std::size_t len) {
  std::vector<T> out(len, T(0));
  for (std::size_t i = 0; i < a.size() && i < len; ++i)
    for (std::size_t j = 0; j < b.size() && i + j < len; ++j) out[i + j] += a[i] * b[j];
  return out;
}

// Column j: coefficients of p(x)^j up to degree d.
template <typename T, typename Convert>
Eigen::MatrixXd composition_matrix(const PolynomialMap1D& map, int d, Convert convert) {
  const auto len = static_cast<std::size_t>(d) + 1;
  std::vector<T> p;
  for (const auto& c : map.coefficients) p.push_back(convert(c));
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d + 1, d + 1);
  std::vector<T> power(len, T(0));
  power[0] = T(1);
  for (int j = 0; j <= d; ++j) {
    for (std::size_t i = 0; i < len; ++i)
      out(static_cast<Eigen::Index>(i), j) = value_of(power[i]);
    power = multiply_truncated(power, p, len);
  }
  return out;
}

} // namespace

OracleResult exact_koopman_matrix_oracle(const PolynomialMap1D& map, const MonomialBasis& basis) {
  if (basis.dimension() != 1) throw InvalidArgument("exact oracle: only 1D polynomial maps");
  if (map.coefficients.empty()) throw InvalidArgument("exact oracle: empty polynomial");
  for (const auto& c : map.coefficients)
    if (c.den == 0) throw InvalidArgument("exact oracle: zero denominator");
  const int d = basis.max_degree();
  Eigen::MatrixXd raw;
  bool exact = true;
  try {
    raw = composition_matrix<Exact>(map, d, [](const Rational& r) {
      return Exact(CheckedInt(r.num), CheckedInt(r.den));
    });
  } catch (const std::overflow_error&) {
    exact = false;
  } catch (const std::range_error&) {
    exact = false;
  }
  if (!exact) raw = composition_matrix<double>(map, d, [](const Rational& r) { return r.value(); });
  // Weighted basis e_j = beta_j x^j: K_ij = beta_j c_ij / beta_i.
  for (Eigen::Index j = 0; j <= d; ++j)
    for (Eigen::Index i = 0; i <= d; ++i)
      raw(i, j) *= basis.weight(static_cast<std::size_t>(j)) / basis.weight(static_cast<std::size_t>(i));
  return {KoopmanMatrix(std::move(raw), basis, FitMethod::AnalyticEdmd), exact};
}

} // namespace aedmd
