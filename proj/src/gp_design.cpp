#include "sitealloc/gp_design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sitealloc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMinReciprocalCondition = 1e-12;
constexpr double kSingularRatio = 1e-13;

double correlation(KernelFamily family, double h) {
  return family == KernelFamily::exponential ? std::exp(-h) : std::exp(-h * h);
}

// d rho(d / phi) / d phi for distance d.
double correlation_range_derivative(KernelFamily family, double d, double phi) {
  const double h = d / phi;
  if (family == KernelFamily::exponential) return (d / (phi * phi)) * std::exp(-h);
  return (2.0 * d * d / (phi * phi * phi)) * std::exp(-h * h);
}

void check_locations(std::span<const Point> locations, const KernelSpec& spec) {
  spec.validate();
  if (spec.tau2 > 0.0) return;
  for (std::size_t p = 0; p < locations.size(); ++p)
    for (std::size_t q = p + 1; q < locations.size(); ++q)
      if (locations[p] == locations[q]) throw NumericalError("singular covariance");
}

}  // namespace

std::string to_string(KernelFamily family) {
  return family == KernelFamily::exponential ? "exponential" : "squared_exponential";
}

KernelFamily parse_kernel_family(const std::string& name) {
  if (name == "exponential" || name == "exp") return KernelFamily::exponential;
  if (name == "squared_exponential" || name == "squared-exponential" || name == "se" ||
      name == "gaussian")
    return KernelFamily::squared_exponential;
  throw InputError("unknown kernel family '" + name + "'");
}

void KernelSpec::validate() const {
  if (!(sigma2 > 0.0) || !(phi > 0.0) || !(tau2 >= 0.0) || !std::isfinite(sigma2) ||
      !std::isfinite(phi) || !std::isfinite(tau2))
    throw InputError("kernel parameters must satisfy sigma2 > 0, phi > 0, tau2 >= 0");
}

ThetaGrid default_theta_grid(const Region& region, KernelFamily family) {
  double diag = 0.0;
  if (!region.areas.empty()) {
    double x0 = kInf, y0 = kInf, x1 = -kInf, y1 = -kInf;
    for (const auto& a : region.areas) {
      x0 = std::min(x0, a.centroid.x);
      x1 = std::max(x1, a.centroid.x);
      y0 = std::min(y0, a.centroid.y);
      y1 = std::max(y1, a.centroid.y);
    }
    diag = std::hypot(x1 - x0, y1 - y0);
  }
  if (!(diag > 0.0)) diag = 1.0;

  ThetaGrid grid;
  for (double sigma2 : {0.5, 2.0})
    for (double range : {0.25 * diag, diag})
      for (double tau2 : {0.1, 1.0}) grid.points.push_back({family, sigma2, range, tau2});
  return grid;
}

Eigen::MatrixXd kernel_covariance(std::span<const Point> locations, const KernelSpec& spec) {
  check_locations(locations, spec);
  const auto n = static_cast<Eigen::Index>(locations.size());
  Eigen::MatrixXd sigma(n, n);
  for (Eigen::Index p = 0; p < n; ++p) {
    sigma(p, p) = spec.sigma2 + spec.tau2;
    for (Eigen::Index q = p + 1; q < n; ++q) {
      const double d = distance(locations[p], locations[q]);
      sigma(p, q) = sigma(q, p) = spec.sigma2 * correlation(spec.family, d / spec.phi);
    }
  }
  return sigma;
}

std::vector<Eigen::MatrixXd> covariance_jacobian(std::span<const Point> locations,
                                                 const KernelSpec& spec) {
  check_locations(locations, spec);
  const auto n = static_cast<Eigen::Index>(locations.size());
  Eigen::MatrixXd d_sigma2(n, n), d_phi(n, n);
  for (Eigen::Index p = 0; p < n; ++p) {
    d_sigma2(p, p) = 1.0;
    d_phi(p, p) = 0.0;
    for (Eigen::Index q = p + 1; q < n; ++q) {
      const double d = distance(locations[p], locations[q]);
      d_sigma2(p, q) = d_sigma2(q, p) = correlation(spec.family, d / spec.phi);
      d_phi(p, q) = d_phi(q, p) =
          spec.sigma2 * correlation_range_derivative(spec.family, d, spec.phi);
    }
  }
  std::vector<Eigen::MatrixXd> out;
  out.reserve(KernelSpec::kParameterCount);
  out.push_back(std::move(d_sigma2));
  out.push_back(std::move(d_phi));
  out.push_back(Eigen::MatrixXd::Identity(n, n));
  return out;
}

Eigen::MatrixXd fisher_information(const Eigen::MatrixXd& sigma,
                                   std::span<const Eigen::MatrixXd> jacobians) {
  if (sigma.rows() != sigma.cols()) throw InputError("covariance must be square");
  for (const auto& j : jacobians)
    if (j.rows() != sigma.rows() || j.cols() != sigma.cols())
      throw InputError("jacobian dimension mismatch");

  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success || !(llt.rcond() >= kMinReciprocalCondition))
    throw NumericalError("ill-conditioned covariance");

  std::vector<Eigen::MatrixXd> solved;
  solved.reserve(jacobians.size());
  for (const auto& j : jacobians) solved.push_back(llt.solve(j));

  const auto p = static_cast<Eigen::Index>(jacobians.size());
  Eigen::MatrixXd f(p, p);
  for (Eigen::Index a = 0; a < p; ++a) {
    for (Eigen::Index b = a; b < p; ++b) {
      // tr(X Y) = sum_ij X_ij Y_ji
      const double tr = solved[a].cwiseProduct(solved[b].transpose()).sum();
      f(a, b) = f(b, a) = 0.5 * tr;
    }
  }
  return f;
}

std::optional<double> log_det_spd(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return std::nullopt;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() == Eigen::Success) {
    const Eigen::VectorXd pivots = llt.matrixLLT().diagonal();
    const double lo = pivots.minCoeff();
    const double hi = pivots.maxCoeff();
    if (lo > 0.0 && (lo * lo) > kSingularRatio * (hi * hi))
      return 2.0 * pivots.array().log().sum();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) return std::nullopt;
  const Eigen::VectorXd values = eig.eigenvalues();
  const double hi = values.maxCoeff();
  if (!(hi > 0.0) || !(values.minCoeff() > kSingularRatio * hi)) return std::nullopt;
  return values.array().log().sum();
}

double v0(std::span<const Point> design, const KernelSpec& spec) {
  spec.validate();
  if (design.empty()) return kInf;
  try {
    const Eigen::MatrixXd sigma = kernel_covariance(design, spec);
    const auto jac = covariance_jacobian(design, spec);
    const auto logdet = log_det_spd(fisher_information(sigma, jac));
    return logdet ? -*logdet : kInf;
  } catch (const NumericalError&) {
    return kInf;
  }
}

std::vector<Point> site_locations(std::span<const CandidateSite> sites,
                                  std::span<const std::size_t> selected) {
  std::vector<Point> out;
  out.reserve(selected.size());
  for (auto i : selected) {
    if (i >= sites.size()) throw std::out_of_range("site index " + std::to_string(i) + " out of range");
    out.push_back(sites[i].location);
  }
  return out;
}

double v0(std::span<const CandidateSite> sites, std::span<const std::size_t> selected,
          const KernelSpec& spec) {
  const auto design = site_locations(sites, selected);
  return v0(design, spec);
}

LocalDesign local_optimal_design(std::span<const CandidateSite> sites, std::size_t k,
                                 const KernelSpec& spec, const LocalSearch& search) {
  spec.validate();
  const std::size_t n = sites.size();
  if (k > n) throw InputError("budget k exceeds candidate count");

  const SubsetFitness fitness = [&](std::span<const std::size_t> subset) {
    return -v0(sites, subset, spec);
  };

  bool exhaustive = search.mode == LocalSearch::Mode::exhaustive;
  if (search.mode == LocalSearch::Mode::automatic) exhaustive = binomial(n, k) <= search.exhaustive_limit;

  LocalDesign out;
  double best = 0.0;
  if (exhaustive) {
    auto r = enumerate_best(n, k, fitness);
    out.selected = std::move(r.best);
    best = r.best_value;
  } else {
    GaHooks hooks;
    auto r = ga_maximize(n, k, search.ga, fitness, hooks);
    out.selected = std::move(r.best);
    best = r.best_value;
  }
  if (!std::isfinite(best)) throw NumericalError("no identifiable design");
  out.v0 = -best;
  return out;
}

void LocalDesignCache::warm(std::span<const CandidateSite> sites, std::size_t k) {
  if (by_size_.contains(k)) return;
  std::vector<LocalDesign> locals;
  locals.reserve(grid_.points.size());
  for (const auto& theta : grid_.points) locals.push_back(local_optimal_design(sites, k, theta, search_));
  by_size_.emplace(k, std::move(locals));
}

const std::vector<LocalDesign>& LocalDesignCache::at(std::size_t k) const {
  auto it = by_size_.find(k);
  if (it == by_size_.end())
    throw std::out_of_range("no local designs cached for k = " + std::to_string(k));
  return it->second;
}

DesignResult design_regret(std::span<const CandidateSite> sites, std::span<const std::size_t> selected,
                           const ThetaGrid& grid, std::span<const LocalDesign> locals) {
  if (grid.points.empty()) throw InputError("theta grid is empty");
  if (locals.size() != grid.points.size()) throw InputError("local designs do not match theta grid");
  DesignResult out;
  out.selected.assign(selected.begin(), selected.end());
  out.regret = -kInf;
  const auto design = site_locations(sites, selected);
  for (std::size_t g = 0; g < grid.points.size(); ++g) {
    const double value = v0(design, grid.points[g]);
    out.v0_by_theta.push_back(value);
    out.regret = std::max(out.regret, value - locals[g].v0);
  }
  return out;
}

double minimax_score(std::span<const CandidateSite> sites, std::span<const std::size_t> selected,
                     const ThetaGrid& grid, std::span<const LocalDesign> locals) {
  return design_regret(sites, selected, grid, locals).regret;
}

}  // namespace sitealloc
