#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sitealloc/domain.hpp"
#include "sitealloc/search.hpp"

namespace sitealloc {

/// Raised when a covariance or information matrix cannot be factorized.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class KernelFamily { exponential, squared_exponential };

std::string to_string(KernelFamily family);
KernelFamily parse_kernel_family(const std::string& name);

/// GP covariance parameters (sigma2 = marginal variance, phi = range in km,
/// tau2 = nugget). Parameter order for Jacobians and Fisher information is
/// (sigma2, phi, tau2).
struct KernelSpec {
  KernelFamily family = KernelFamily::exponential;
  double sigma2 = 1.0;
  double phi = 1.0;
  double tau2 = 0.0;

  static constexpr std::size_t kParameterCount = 3;
  void validate() const;
  friend bool operator==(const KernelSpec&, const KernelSpec&) = default;
};

struct ThetaGrid {
  std::vector<KernelSpec> points;
};

/// sigma2 in {0.5, 2} x phi in {0.25 L, L} x tau2 in {0.1, 1}, with L the
/// diagonal of the bounding box of the area centroids (1 km if degenerate).
ThetaGrid default_theta_grid(const Region& region, KernelFamily family = KernelFamily::exponential);

/// Sigma_pq = sigma2 * rho(|p - q| / phi) + tau2 * [p == q].
Eigen::MatrixXd kernel_covariance(std::span<const Point> locations, const KernelSpec& spec);

/// dSigma/dsigma2, dSigma/dphi, dSigma/dtau2 in that order.
std::vector<Eigen::MatrixXd> covariance_jacobian(std::span<const Point> locations,
                                                 const KernelSpec& spec);

/// F_jk = 1/2 tr(Sigma^-1 Sigma_j Sigma^-1 Sigma_k).
Eigen::MatrixXd fisher_information(const Eigen::MatrixXd& sigma,
                                   std::span<const Eigen::MatrixXd> jacobians);

/// log det of a symmetric positive-definite matrix; empty when the matrix is
/// singular or indefinite. Cholesky first, eigenvalue product as fallback.
std::optional<double> log_det_spd(const Eigen::MatrixXd& m);

/// -log det F for a design placed at `design`; +inf when F is not positive
/// definite or the covariance is singular.
double v0(std::span<const Point> design, const KernelSpec& spec);
double v0(std::span<const CandidateSite> sites, std::span<const std::size_t> selected,
          const KernelSpec& spec);

std::vector<Point> site_locations(std::span<const CandidateSite> sites,
                                  std::span<const std::size_t> selected);

struct LocalSearch {
  enum class Mode { automatic, exhaustive, genetic };
  Mode mode = Mode::automatic;
  /// Automatic mode enumerates when C(n, k) is at most this.
  std::uint64_t exhaustive_limit = 100000;
  GaParams ga;
};

struct LocalDesign {
  std::vector<std::size_t> selected;  // sorted
  double v0 = 0.0;
};

/// argmin over k-subsets of V0 at one parameter point.
LocalDesign local_optimal_design(std::span<const CandidateSite> sites, std::size_t k,
                                 const KernelSpec& spec, const LocalSearch& search = {});

/// Locally optimal designs per grid point, keyed by design size.
/// Warm every size before sharing the cache across threads; lookups are const.
class LocalDesignCache {
 public:
  LocalDesignCache() = default;
  explicit LocalDesignCache(ThetaGrid grid, LocalSearch search = {})
      : grid_(std::move(grid)), search_(std::move(search)) {}

  const ThetaGrid& grid() const { return grid_; }
  void warm(std::span<const CandidateSite> sites, std::size_t k);
  bool contains(std::size_t k) const { return by_size_.contains(k); }
  /// Throws std::out_of_range when `k` was never warmed.
  const std::vector<LocalDesign>& at(std::size_t k) const;

 private:
  ThetaGrid grid_;
  LocalSearch search_;
  std::map<std::size_t, std::vector<LocalDesign>> by_size_;
};

struct DesignResult {
  std::vector<std::size_t> selected;
  std::vector<double> v0_by_theta;
  double regret = 0.0;
};

/// Per-grid-point V0 and the worst-case regret against the local optima.
DesignResult design_regret(std::span<const CandidateSite> sites, std::span<const std::size_t> selected,
                           const ThetaGrid& grid, std::span<const LocalDesign> locals);

/// max_g V0(Z, theta_g) - V0(S(theta_g), theta_g); +inf if Z is unidentifiable anywhere.
double minimax_score(std::span<const CandidateSite> sites, std::span<const std::size_t> selected,
                     const ThetaGrid& grid, std::span<const LocalDesign> locals);

}  // namespace sitealloc
