#include "sitealloc/service.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "httplib.h"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sitealloc {
namespace {

HttpResult error_result(int status, const std::string& message) {
  return {status, Json{{"error", message}}};
}

KeyValues values_from_json(const Json& config) {
  KeyValues values;
  if (config.is_null()) return values;
  if (!config.is_object()) throw ConfigError("'config' must be an object");
  for (const auto& [key, value] : config.items()) {
    if (value.is_string())
      values[normalize_key(key)] = value.get<std::string>();
    else if (value.is_boolean())
      values[normalize_key(key)] = value.get<bool>() ? "true" : "false";
    else if (value.is_number())
      values[normalize_key(key)] = value.dump();
    else
      throw ConfigError("config value for '" + key + "' must be a string, number or boolean");
  }
  return values;
}

}  // namespace

std::string to_string(JobState state) {
  switch (state) {
    case JobState::queued: return "queued";
    case JobState::running: return "running";
    case JobState::done: return "done";
    case JobState::failed: break;
  }
  return "failed";
}

std::vector<CatalogEntry> load_catalog(const std::filesystem::path& data_dir, OwnershipFilter filter) {
  std::vector<CatalogEntry> out;
  if (!std::filesystem::is_directory(data_dir)) throw InputError("data dir " + data_dir.string() + " not found");
  std::vector<std::filesystem::path> dirs;
  for (const auto& entry : std::filesystem::directory_iterator(data_dir))
    if (entry.is_directory() && std::filesystem::exists(entry.path() / "areas.csv") &&
        std::filesystem::exists(entry.path() / "sites.csv"))
      dirs.push_back(entry.path());
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) {
    CatalogEntry e;
    e.id = dir.filename().string();
    e.name = e.id;
    if (std::ifstream name(dir / "name.txt"); name) std::getline(name, e.name);
    std::optional<std::filesystem::path> strata;
    if (std::filesystem::exists(dir / "strata.csv")) strata = dir / "strata.csv";
    e.region = load_region(dir / "areas.csv", strata);
    e.sites = load_sites(dir / "sites.csv", e.region.origin.value_or(ProjectionOrigin{}), filter).sites;
    out.push_back(std::move(e));
  }
  return out;
}

Service::Service(std::vector<CatalogEntry> catalog, ServiceOptions options) : options_(options) {
  for (auto& e : catalog) {
    const std::string id = e.id;
    catalog_.emplace(id, std::move(e));
  }
  const std::size_t workers = std::max<std::size_t>(1, options_.workers);
  for (std::size_t w = 0; w < workers; ++w) workers_.emplace_back([this] { work(); });
}

Service::~Service() {
  shutting_down_.store(true);
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  wake_.notify_all();
  for (auto& t : workers_) t.join();
}

const CatalogEntry* Service::find(const std::string& id) const {
  auto it = catalog_.find(id);
  return it == catalog_.end() ? nullptr : &it->second;
}

Scenario Service::scenario_for(const CatalogEntry& entry, const Json& config) const {
  const RunConfig rc = RunConfig::from_values(values_from_json(config), false);
  return make_scenario(rc, entry.region, entry.sites);
}

HttpResult Service::list_regions() const {
  Json out = Json::array();
  for (const auto& [id, e] : catalog_) {
    std::set<int> types;
    for (const auto& s : e.sites) types.insert(s.site_type);
    out.push_back({{"id", id},
                   {"name", e.name},
                   {"m", e.region.size()},
                   {"n", e.sites.size()},
                   {"site_types", Json(std::vector<int>(types.begin(), types.end()))}});
  }
  return {200, out};
}

HttpResult Service::score(const Json& body) const {
  try {
    if (!body.is_object() || !body.contains("region") || !body["region"].is_string())
      return error_result(400, "body must name a region");
    const CatalogEntry* entry = find(body["region"].get<std::string>());
    if (!entry) return error_result(404, "unknown region");
    if (!body.contains("site_ids") || !body["site_ids"].is_array())
      return error_result(422, "site_ids must be an array");
    std::vector<std::string> ids;
    for (const auto& v : body["site_ids"]) {
      if (!v.is_string()) return error_result(422, "site ids must be strings");
      ids.push_back(v.get<std::string>());
    }
    const Scenario scenario = scenario_for(*entry, body.value("config", Json::object()));
    return {200, score_report(scenario, ids)};
  } catch (const AllocationError& ex) {
    return error_result(422, ex.what());
  } catch (const ConfigError& ex) {
    return error_result(400, ex.what());
  } catch (const InputError& ex) {
    return error_result(400, ex.what());
  } catch (const std::exception& ex) {
    return error_result(500, ex.what());
  }
}

HttpResult Service::submit(const Json& body) {
  if (!body.is_object() || !body.contains("region") || !body["region"].is_string())
    return error_result(400, "body must name a region");
  const std::string region = body["region"].get<std::string>();
  const CatalogEntry* entry = find(region);
  if (!entry) return error_result(404, "unknown region");

  auto job = std::make_shared<Job>();
  try {
    job->scenario = scenario_for(*entry, body.value("config", Json::object()));
    if (!job->scenario.config.k) throw ConfigError("k required");
    if (*job->scenario.config.k > entry->sites.size()) throw ConfigError("budget k exceeds candidate count");
  } catch (const std::exception& ex) {
    return error_result(400, ex.what());
  }
  job->region = region;

  {
    std::lock_guard lock(mutex_);
    if (queue_.size() >= options_.max_queue) return error_result(409, "job queue full");
    job->id = "job-" + std::to_string(next_id_++);
    jobs_.emplace(job->id, job);
    queue_.push_back(job);
  }
  wake_.notify_one();
  return {202, Json{{"id", job->id}, {"state", "queued"}}};
}

HttpResult Service::poll(const std::string& job_id) const {
  std::shared_ptr<Job> job;
  {
    std::lock_guard lock(mutex_);
    auto it = jobs_.find(job_id);
    if (it == jobs_.end()) return error_result(404, "unknown job");
    job = it->second;
  }
  return {200, job_json(*job)};
}

void Service::drain() {
  std::unique_lock lock(mutex_);
  idle_.wait(lock, [this] { return queue_.empty() && running_ == 0; });
}

Json Service::job_json(const Job& job) {
  std::lock_guard lock(job.mutex);
  Json j;
  j["id"] = job.id;
  j["region"] = job.region;
  j["state"] = to_string(job.state);
  j["progress"] = {{"generation", job.generation},
                   {"best_combined", job.has_progress ? number_json(job.best) : Json(nullptr)}};
  j["result"] = job.state == JobState::done ? job.result : Json(nullptr);
  j["error"] = job.error.empty() ? Json(nullptr) : Json(job.error);
  return j;
}

void Service::work() {
  for (;;) {
    std::shared_ptr<Job> job;
    {
      std::unique_lock lock(mutex_);
      wake_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      job = queue_.front();
      queue_.pop_front();
      ++running_;
    }
    {
      std::lock_guard lock(job->mutex);
      job->state = JobState::running;
    }
#ifdef _OPENMP
    if (job->scenario.config.threads > 0) omp_set_num_threads(job->scenario.config.threads);
#endif
    OptimizeControl control;
    control.cancel = &shutting_down_;
    control.on_generation = [&job](const GaProgress& p) {
      std::lock_guard lock(job->mutex);
      job->generation = p.generation;
      job->best = p.best_value;
      job->has_progress = true;
    };
    try {
      Json result = optimize_report(job->scenario, control);
      std::lock_guard lock(job->mutex);
      job->result = std::move(result);
      job->state = JobState::done;
    } catch (const std::exception& ex) {
      std::lock_guard lock(job->mutex);
      job->error = ex.what();
      job->state = JobState::failed;
    }
    {
      std::lock_guard lock(mutex_);
      --running_;
    }
    idle_.notify_all();
  }
}

void mount_routes(httplib::Server& server, Service& service, bool cors) {
  auto send = [cors](httplib::Response& res, const HttpResult& r) {
    res.status = r.status;
    if (cors) res.set_header("Access-Control-Allow-Origin", "*");
    res.set_content(r.body.dump(), "application/json");
  };
  auto parse = [](const httplib::Request& req, Json& out) {
    out = Json::parse(req.body, nullptr, false);
    return !out.is_discarded();
  };

  server.Get("/regions", [&service, send](const httplib::Request&, httplib::Response& res) {
    send(res, service.list_regions());
  });
  server.Post("/score", [&service, send, parse](const httplib::Request& req, httplib::Response& res) {
    Json body;
    send(res, parse(req, body) ? service.score(body) : error_result(400, "malformed JSON"));
  });
  server.Post("/jobs", [&service, send, parse](const httplib::Request& req, httplib::Response& res) {
    Json body;
    send(res, parse(req, body) ? service.submit(body) : error_result(400, "malformed JSON"));
  });
  server.Get("/jobs/:id", [&service, send](const httplib::Request& req, httplib::Response& res) {
    send(res, service.poll(req.path_params.at("id")));
  });
  if (cors) {
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
      res.set_header("Access-Control-Allow-Origin", "*");
      res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
      res.set_header("Access-Control-Allow-Headers", "Content-Type");
      res.status = 204;
    });
  }
}

}  // namespace sitealloc
