#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sitealloc/domain.hpp"

namespace sitealloc {

inline constexpr double kDefaultCapacity = 1120.0;

enum class Ownership { public_site, private_site, unknown };
enum class OwnershipFilter { all, public_only, private_only, unknown_only };

std::string to_string(Ownership o);
OwnershipFilter parse_ownership_filter(const std::string& name);
std::string to_string(OwnershipFilter f);
bool admits(OwnershipFilter filter, Ownership o);

/// Equirectangular projection about (lon0, lat0), kilometres.
Point project(const ProjectionOrigin& origin, double lon, double lat);
std::pair<double, double> unproject(const ProjectionOrigin& origin, const Point& p);

struct SiteRecord {
  std::string id;
  double lon = 0.0;
  double lat = 0.0;
  std::optional<double> capacity;
  std::optional<int> site_type;
  Ownership ownership = Ownership::unknown;
};

struct SiteLoadResult {
  std::vector<CandidateSite> sites;
  std::vector<Ownership> ownership;  // parallel to `sites`
  std::size_t dropped = 0;
  std::vector<std::string> warnings;
};

/// Areas: `area_id,lon,lat,population`. Strata (optional):
/// `area_id,axis,level,count[,combo]`, where a non-empty combo such as
/// `race=black;sex=female` supplies a joint count and takes precedence over
/// per-axis marginal rows for that area. Marginals are combined as independent
/// proportions and rounded by largest remainder to the area population.
Region read_region(std::istream& areas, std::istream* strata, const std::string& areas_name = "areas",
                   const std::string& strata_name = "strata");
Region load_region(const std::filesystem::path& areas_path,
                   const std::optional<std::filesystem::path>& strata_path = std::nullopt);

/// Writes areas and joint strata in the formats read_region accepts.
void write_region(const Region& region, std::ostream& areas, std::ostream* strata);
void save_region(const Region& region, const std::filesystem::path& areas_path,
                 const std::optional<std::filesystem::path>& strata_path = std::nullopt);

/// Sites: `site_id,lon,lat,capacity,site_type,ownership`; capacity defaults to
/// 1,120 tests/week and site_type to 1.
SiteLoadResult read_sites(std::istream& in, const ProjectionOrigin& origin, OwnershipFilter filter,
                          const std::string& name = "sites");
SiteLoadResult load_sites(const std::filesystem::path& path, const ProjectionOrigin& origin,
                          OwnershipFilter filter);

void write_sites(const std::vector<CandidateSite>& sites, const ProjectionOrigin& origin,
                 std::ostream& out, Ownership ownership = Ownership::public_site);
void save_sites(const std::vector<CandidateSite>& sites, const ProjectionOrigin& origin,
                const std::filesystem::path& path, Ownership ownership = Ownership::public_site);

struct SynthParams {
  std::size_t rows = 6;
  std::size_t cols = 10;
  double spacing_km = 2.0;
  double jitter_km = 0.3;
  std::int64_t population_min = 2000;
  std::int64_t population_max = 6000;
  /// 0: identical stratum mix everywhere. 1: the first axis is fully
  /// separated into vertical bands, one level per band.
  double segregation = 0.0;
  std::vector<StratumAxis> axes = {{"group", {"A", "B"}}};
  std::size_t site_count = 25;
  /// Explicit area indices for candidate sites; overrides site_count.
  std::vector<std::size_t> site_areas;
  double site_capacity = kDefaultCapacity;
  std::uint64_t seed = 1;

  std::size_t m() const { return rows * cols; }
  void validate() const;
};

struct SynthRegion {
  Region region;
  std::vector<CandidateSite> sites;
};

/// Deterministic grid-shaped region for tests and demos.
SynthRegion synth_region(const SynthParams& params);

}  // namespace sitealloc
