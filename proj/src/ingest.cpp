#include "sitealloc/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_map>

#include "csv.hpp"

namespace sitealloc {
namespace {

constexpr double kEarthRadiusKm = 6371.0088;
constexpr double kDegree = std::numbers::pi / 180.0;

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  return out;
}

// Integer apportionment of `total` by `shares` (largest remainder, ties to the
// lower index).
std::vector<std::int64_t> apportion(std::int64_t total, const std::vector<double>& shares) {
  std::vector<std::int64_t> out(shares.size(), 0);
  if (total == 0 || shares.empty()) return out;
  const double sum = std::accumulate(shares.begin(), shares.end(), 0.0);
  std::vector<double> remainder(shares.size());
  std::int64_t assigned = 0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    const double exact = static_cast<double>(total) * shares[i] / sum;
    out[i] = static_cast<std::int64_t>(std::floor(exact));
    remainder[i] = exact - static_cast<double>(out[i]);
    assigned += out[i];
  }
  std::vector<std::size_t> order(shares.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < total; i = (i + 1) % order.size(), ++assigned) ++out[order[i]];
  return out;
}

struct AxisBuilder {
  std::vector<StratumAxis> axes;

  std::size_t axis(const std::string& name) {
    for (std::size_t a = 0; a < axes.size(); ++a)
      if (axes[a].name == name) return a;
    axes.push_back({name, {}});
    return axes.size() - 1;
  }
  std::size_t level(std::size_t a, const std::string& name) {
    auto& levels = axes[a].levels;
    auto it = std::find(levels.begin(), levels.end(), name);
    if (it != levels.end()) return static_cast<std::size_t>(it - levels.begin());
    levels.push_back(name);
    return levels.size() - 1;
  }
};

using LevelKey = std::vector<std::pair<std::size_t, std::size_t>>;  // (axis, level)

struct AreaStrata {
  std::map<std::size_t, std::map<std::size_t, std::int64_t>> marginal;  // axis -> level -> count
  std::vector<std::pair<LevelKey, std::int64_t>> joint;
};

LevelKey parse_combo(const std::string& combo, AxisBuilder& builder, const detail::CsvReader& reader) {
  LevelKey key;
  std::stringstream ss(combo);
  std::string part;
  while (std::getline(ss, part, ';')) {
    part = detail::trim(part);
    const auto eq = part.find('=');
    if (eq == std::string::npos) reader.fail("combo entry '" + part + "' is not axis=level");
    const std::size_t a = builder.axis(detail::trim(part.substr(0, eq)));
    key.emplace_back(a, builder.level(a, detail::trim(part.substr(eq + 1))));
  }
  return key;
}

void assemble_strata(Region& region, std::istream& strata, const std::string& name) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t j = 0; j < region.size(); ++j) index.emplace(region.areas[j].id, j);

  detail::CsvReader reader(strata, name);
  AxisBuilder builder;
  std::vector<AreaStrata> per_area(region.size());
  while (reader.next()) {
    const auto id = reader.require("area_id");
    auto it = index.find(id);
    if (it == index.end()) reader.fail("unknown area '" + id + "'");
    const std::int64_t count = reader.integer("count");
    if (count < 0) reader.fail("negative count");
    auto& target = per_area[it->second];
    const auto combo = reader.get("combo");
    if (!combo.empty()) {
      target.joint.emplace_back(parse_combo(combo, builder, reader), count);
    } else {
      const std::size_t a = builder.axis(reader.require("axis"));
      target.marginal[a][builder.level(a, reader.require("level"))] += count;
    }
  }

  region.stratum_axes = builder.axes;
  const std::size_t combos = region.combination_count();
  if (combos == 0) return;
  const std::size_t axis_count = region.stratum_axes.size();

  auto flatten = [&](const std::vector<std::size_t>& levels) {
    std::size_t c = 0;
    for (std::size_t a = 0; a < axis_count; ++a) c = c * region.stratum_axes[a].levels.size() + levels[a];
    return c;
  };

  for (std::size_t j = 0; j < region.size(); ++j) {
    auto& area = region.areas[j];
    const auto& src = per_area[j];
    area.stratum_counts.assign(combos, 0);
    if (!src.joint.empty()) {
      for (const auto& [key, count] : src.joint) {
        if (key.size() != axis_count)
          throw InputError(name + ": combo for area '" + area.id + "' does not name every axis");
        std::vector<std::size_t> levels(axis_count, std::numeric_limits<std::size_t>::max());
        for (auto [a, l] : key) levels[a] = l;
        if (std::count(levels.begin(), levels.end(), std::numeric_limits<std::size_t>::max()))
          throw InputError(name + ": combo for area '" + area.id + "' repeats an axis");
        area.stratum_counts[flatten(levels)] += count;
      }
      continue;
    }
    if (area.population == 0) continue;
    if (src.marginal.size() != axis_count)
      throw InputError(name + ": missing strata for area '" + area.id + "'");

    // Independent axes: joint share = product of per-axis shares.
    std::vector<double> shares(combos, 1.0);
    for (std::size_t c = 0; c < combos; ++c) {
      std::size_t rest = c;
      for (std::size_t a = axis_count; a-- > 0;) {
        const std::size_t levels = region.stratum_axes[a].levels.size();
        const std::size_t l = rest % levels;
        rest /= levels;
        const auto& counts = src.marginal.at(a);
        const double total = std::accumulate(counts.begin(), counts.end(), 0.0,
                                             [](double s, const auto& kv) { return s + static_cast<double>(kv.second); });
        if (total <= 0.0)
          throw InputError(name + ": strata for area '" + area.id + "' axis '" +
                           region.stratum_axes[a].name + "' sum to zero");
        auto lv = counts.find(l);
        shares[c] *= (lv == counts.end() ? 0.0 : static_cast<double>(lv->second)) / total;
      }
    }
    area.stratum_counts = apportion(area.population, shares);
  }
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return os.str();
}

Ownership parse_ownership(const std::string& text, const detail::CsvReader& reader) {
  std::string s = text;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "public") return Ownership::public_site;
  if (s == "private") return Ownership::private_site;
  if (s.empty() || s == "unknown") return Ownership::unknown;
  reader.fail("unknown ownership '" + text + "'");
}

}  // namespace

std::string to_string(Ownership o) {
  switch (o) {
    case Ownership::public_site: return "public";
    case Ownership::private_site: return "private";
    case Ownership::unknown: break;
  }
  return "unknown";
}

OwnershipFilter parse_ownership_filter(const std::string& name) {
  if (name == "all") return OwnershipFilter::all;
  if (name == "public") return OwnershipFilter::public_only;
  if (name == "private") return OwnershipFilter::private_only;
  if (name == "unknown") return OwnershipFilter::unknown_only;
  throw InputError("unknown ownership filter '" + name + "'");
}

std::string to_string(OwnershipFilter f) {
  switch (f) {
    case OwnershipFilter::public_only: return "public";
    case OwnershipFilter::private_only: return "private";
    case OwnershipFilter::unknown_only: return "unknown";
    case OwnershipFilter::all: break;
  }
  return "all";
}

bool admits(OwnershipFilter filter, Ownership o) {
  switch (filter) {
    case OwnershipFilter::all: return true;
    case OwnershipFilter::public_only: return o == Ownership::public_site;
    case OwnershipFilter::private_only: return o == Ownership::private_site;
    case OwnershipFilter::unknown_only: return o == Ownership::unknown;
  }
  return false;
}

Point project(const ProjectionOrigin& origin, double lon, double lat) {
  return {kEarthRadiusKm * (lon - origin.lon0) * kDegree * std::cos(origin.lat0 * kDegree),
          kEarthRadiusKm * (lat - origin.lat0) * kDegree};
}

std::pair<double, double> unproject(const ProjectionOrigin& origin, const Point& p) {
  const double lon = origin.lon0 + p.x / (kEarthRadiusKm * kDegree * std::cos(origin.lat0 * kDegree));
  const double lat = origin.lat0 + p.y / (kEarthRadiusKm * kDegree);
  return {lon, lat};
}

Region read_region(std::istream& areas, std::istream* strata, const std::string& areas_name,
                   const std::string& strata_name) {
  detail::CsvReader reader(areas, areas_name);
  struct Row {
    std::string id;
    double lon, lat;
    std::int64_t population;
  };
  std::vector<Row> rows;
  while (reader.next()) {
    Row r{reader.require("area_id"), reader.number("lon"), reader.number("lat"), reader.integer("population")};
    if (r.lon < -180.0 || r.lon > 180.0 || r.lat < -90.0 || r.lat > 90.0) reader.fail("coordinates out of range");
    rows.push_back(std::move(r));
  }

  Region region;
  if (!rows.empty()) {
    ProjectionOrigin origin;
    for (const auto& r : rows) {
      origin.lon0 += r.lon;
      origin.lat0 += r.lat;
    }
    origin.lon0 /= static_cast<double>(rows.size());
    origin.lat0 /= static_cast<double>(rows.size());
    region.origin = origin;
    region.areas.reserve(rows.size());
    for (auto& r : rows) region.areas.push_back({std::move(r.id), project(origin, r.lon, r.lat), r.population, {}});
  }
  if (strata) assemble_strata(region, *strata, strata_name);

  if (auto report = validate_region(region); !report.empty()) {
    std::string msg = areas_name + ": invalid region:";
    for (const auto& v : report) msg += " [" + v.area_id + ": " + v.reason + "]";
    throw InputError(msg);
  }
  return region;
}

Region load_region(const std::filesystem::path& areas_path,
                   const std::optional<std::filesystem::path>& strata_path) {
  auto areas = open_input(areas_path);
  if (!strata_path) return read_region(areas, nullptr, areas_path.string());
  auto strata = open_input(*strata_path);
  return read_region(areas, &strata, areas_path.string(), strata_path->string());
}

void write_region(const Region& region, std::ostream& areas, std::ostream* strata) {
  const ProjectionOrigin origin = region.origin.value_or(ProjectionOrigin{});
  areas << "area_id,lon,lat,population\n";
  for (const auto& a : region.areas) {
    const auto [lon, lat] = unproject(origin, a.centroid);
    areas << a.id << ',' << format_double(lon) << ',' << format_double(lat) << ',' << a.population << '\n';
  }
  if (!strata) return;
  *strata << "area_id,axis,level,count,combo\n";
  const std::size_t combos = region.combination_count();
  for (const auto& a : region.areas) {
    for (std::size_t c = 0; c < combos; ++c) {
      std::string combo;
      std::size_t rest = c;
      std::vector<std::string> parts(region.stratum_axes.size());
      for (std::size_t ax = region.stratum_axes.size(); ax-- > 0;) {
        const auto& axis = region.stratum_axes[ax];
        parts[ax] = axis.name + "=" + axis.levels[rest % axis.levels.size()];
        rest /= axis.levels.size();
      }
      for (std::size_t ax = 0; ax < parts.size(); ++ax) combo += (ax ? ";" : "") + parts[ax];
      *strata << a.id << ",,," << a.stratum_counts[c] << ',' << combo << '\n';
    }
  }
}

void save_region(const Region& region, const std::filesystem::path& areas_path,
                 const std::optional<std::filesystem::path>& strata_path) {
  auto areas = open_output(areas_path);
  if (!strata_path) {
    write_region(region, areas, nullptr);
    return;
  }
  auto strata = open_output(*strata_path);
  write_region(region, areas, &strata);
}

SiteLoadResult read_sites(std::istream& in, const ProjectionOrigin& origin, OwnershipFilter filter,
                          const std::string& name) {
  detail::CsvReader reader(in, name);
  SiteLoadResult out;
  while (reader.next()) {
    SiteRecord r;
    r.id = reader.require("site_id");
    r.lon = reader.number("lon");
    r.lat = reader.number("lat");
    if (r.lon < -180.0 || r.lon > 180.0 || r.lat < -90.0 || r.lat > 90.0) reader.fail("coordinates out of range");
    r.capacity = reader.optional_number("capacity");
    if (!reader.get("site_type").empty()) r.site_type = static_cast<int>(reader.integer("site_type"));
    r.ownership = parse_ownership(reader.get("ownership"), reader);

    if (!admits(filter, r.ownership)) {
      ++out.dropped;
      continue;
    }
    CandidateSite site{r.id, project(origin, r.lon, r.lat), r.capacity.value_or(kDefaultCapacity),
                       r.site_type.value_or(1)};
    if (!(site.capacity > 0.0)) reader.fail("capacity must be positive");
    if (site.site_type < 1) reader.fail("site_type must be >= 1");
    out.sites.push_back(std::move(site));
    out.ownership.push_back(r.ownership);
  }
  if (out.sites.empty())
    out.warnings.push_back(name + ": no sites left after ownership filter '" + to_string(filter) + "'");
  return out;
}

SiteLoadResult load_sites(const std::filesystem::path& path, const ProjectionOrigin& origin,
                          OwnershipFilter filter) {
  auto in = open_input(path);
  return read_sites(in, origin, filter, path.string());
}

void write_sites(const std::vector<CandidateSite>& sites, const ProjectionOrigin& origin,
                 std::ostream& out, Ownership ownership) {
  out << "site_id,lon,lat,capacity,site_type,ownership\n";
  for (const auto& s : sites) {
    const auto [lon, lat] = unproject(origin, s.location);
    out << s.id << ',' << format_double(lon) << ',' << format_double(lat) << ','
        << format_double(s.capacity) << ',' << s.site_type << ',' << to_string(ownership) << '\n';
  }
}

void save_sites(const std::vector<CandidateSite>& sites, const ProjectionOrigin& origin,
                const std::filesystem::path& path, Ownership ownership) {
  auto out = open_output(path);
  write_sites(sites, origin, out, ownership);
}

void SynthParams::validate() const {
  if (rows == 0 || cols == 0) throw InputError("synthetic grid must have at least one area");
  if (!(segregation >= 0.0 && segregation <= 1.0)) throw InputError("segregation must lie in [0,1]");
  if (population_min < 0 || population_max < population_min) throw InputError("invalid population range");
  if (site_areas.empty() && site_count > m()) throw InputError("more sites than areas");
  for (auto a : site_areas)
    if (a >= m()) throw InputError("site area index out of range");
  for (const auto& axis : axes)
    if (axis.levels.empty()) throw InputError("stratum axis without levels");
  if (!(site_capacity > 0.0)) throw InputError("site capacity must be positive");
}

SynthRegion synth_region(const SynthParams& params) {
  params.validate();
  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> jitter(-params.jitter_km, params.jitter_km);
  std::uniform_int_distribution<std::int64_t> pop(params.population_min, params.population_max);

  SynthRegion out;
  Region& region = out.region;
  region.stratum_axes = params.axes;
  region.origin = ProjectionOrigin{-84.388, 33.749};
  const std::size_t combos = region.combination_count();
  const auto unit = static_cast<std::int64_t>(std::max<std::size_t>(combos, 1));
  const std::size_t bands = params.axes.empty() ? 1 : params.axes.front().levels.size();

  auto width = std::to_string(params.m()).size();
  for (std::size_t r = 0; r < params.rows; ++r) {
    for (std::size_t c = 0; c < params.cols; ++c) {
      Area area;
      std::string index = std::to_string(r * params.cols + c);
      area.id = "T" + std::string(width + 1 - index.size(), '0') + index;
      area.centroid = {static_cast<double>(c) * params.spacing_km + jitter(rng),
                       static_cast<double>(r) * params.spacing_km + jitter(rng)};
      // Multiples of the combination count keep segregation = 0 exactly proportional.
      area.population = pop(rng) / unit * unit;
      if (combos > 0) {
        const std::size_t band = c * bands / params.cols;
        std::vector<double> shares(combos, 1.0);
        for (std::size_t k = 0; k < combos; ++k) {
          std::size_t rest = k;
          for (std::size_t a = params.axes.size(); a-- > 0;) {
            const std::size_t levels = params.axes[a].levels.size();
            const std::size_t l = rest % levels;
            rest /= levels;
            const double uniform = 1.0 / static_cast<double>(levels);
            shares[k] *= a == 0 ? (1.0 - params.segregation) * uniform + params.segregation * (l == band ? 1.0 : 0.0)
                                : uniform;
          }
        }
        area.stratum_counts = apportion(area.population, shares);
      }
      region.areas.push_back(std::move(area));
    }
  }
  // Centre on the origin so a saved region reloads with the same origin.
  Point mean{0.0, 0.0};
  for (const auto& a : region.areas) {
    mean.x += a.centroid.x / static_cast<double>(region.size());
    mean.y += a.centroid.y / static_cast<double>(region.size());
  }
  for (auto& a : region.areas) a.centroid = {a.centroid.x - mean.x, a.centroid.y - mean.y};

  std::vector<std::size_t> chosen = params.site_areas;
  if (chosen.empty()) {
    std::vector<std::size_t> all(params.m());
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::shuffle(all.begin(), all.end(), rng);
    chosen.assign(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(params.site_count));
    std::sort(chosen.begin(), chosen.end());
  }
  width = std::to_string(chosen.size()).size();
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    std::string index = std::to_string(i);
    out.sites.push_back({"S" + std::string(width + 1 - index.size(), '0') + index,
                         region.areas[chosen[i]].centroid, params.site_capacity, 1});
  }
  return out;
}

}  // namespace sitealloc
