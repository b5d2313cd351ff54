#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "sitealloc/app.hpp"

namespace httplib {
class Server;
}

namespace sitealloc {

struct CatalogEntry {
  std::string id;
  std::string name;
  Region region;
  std::vector<CandidateSite> sites;
};

/// Loads every subdirectory of `data_dir` holding areas.csv and sites.csv
/// (strata.csv and a one-line name.txt are optional).
std::vector<CatalogEntry> load_catalog(const std::filesystem::path& data_dir, OwnershipFilter filter);

struct HttpResult {
  int status = 200;
  Json body;
};

struct ServiceOptions {
  std::size_t workers = 1;
  std::size_t max_queue = 8;
};

enum class JobState { queued, running, done, failed };
std::string to_string(JobState state);

/// Request handling behind the HTTP endpoints. Handlers are thread-safe; the
/// catalog is read-only after construction.
class Service {
 public:
  Service(std::vector<CatalogEntry> catalog, ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  HttpResult list_regions() const;
  /// Body: {"region": id, "site_ids": [...], "config": {key: value, ...}}.
  HttpResult score(const Json& body) const;
  /// Body: {"region": id, "config": {...}}. 202 with {"id": ...}.
  HttpResult submit(const Json& body);
  HttpResult poll(const std::string& job_id) const;

  /// Blocks until no job is queued or running.
  void drain();

 private:
  struct Job {
    std::string id;
    std::string region;
    Scenario scenario;
    mutable std::mutex mutex;
    JobState state = JobState::queued;
    std::size_t generation = 0;
    double best = 0.0;
    bool has_progress = false;
    Json result;
    std::string error;
  };

  const CatalogEntry* find(const std::string& id) const;
  Scenario scenario_for(const CatalogEntry& entry, const Json& config) const;
  void work();
  static Json job_json(const Job& job);

  std::map<std::string, CatalogEntry> catalog_;
  ServiceOptions options_;

  mutable std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable idle_;
  std::deque<std::shared_ptr<Job>> queue_;
  std::map<std::string, std::shared_ptr<Job>> jobs_;
  std::size_t running_ = 0;
  std::uint64_t next_id_ = 1;
  bool stopping_ = false;
  std::atomic<bool> shutting_down_{false};
  std::vector<std::thread> workers_;
};

/// Registers GET /regions, POST /score, POST /jobs and GET /jobs/{id}.
void mount_routes(httplib::Server& server, Service& service, bool cors = false);

}  // namespace sitealloc
