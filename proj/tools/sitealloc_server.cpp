// HTTP front end: serves the region catalog, synchronous scoring and
// asynchronous optimize jobs.

#include <iostream>

#include "sitealloc/service.hpp"

#include "CLI11.hpp"
#include "httplib.h"

int main(int argc, char** argv) {
  CLI::App app{"sitealloc HTTP service"};
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string data_dir;
  std::string ownership = "all";
  std::string static_dir;
  std::size_t workers = 1;
  std::size_t max_queue = 8;
  bool cors = false;
  app.add_option("--port", port, "listen port");
  app.add_option("--host", host, "listen address");
  app.add_option("--data-dir", data_dir, "directory of region subdirectories")->required();
  app.add_option("--ownership", ownership, "site ownership filter: public|private|unknown|all");
  app.add_option("--workers", workers, "jobs executed concurrently");
  app.add_option("--max-queue", max_queue, "queued jobs before submissions get 409");
  app.add_option("--static-dir", static_dir, "serve console assets from this directory");
  app.add_flag("--cors", cors, "send permissive CORS headers");
  CLI11_PARSE(app, argc, argv);

  try {
    auto catalog = sitealloc::load_catalog(data_dir, sitealloc::parse_ownership_filter(ownership));
    std::cerr << "loaded " << catalog.size() << " region(s) from " << data_dir << '\n';
    sitealloc::Service service(std::move(catalog), {workers, max_queue});
    httplib::Server server;
    sitealloc::mount_routes(server, service, cors);
    if (!static_dir.empty() && !server.set_mount_point("/", static_dir)) {
      std::cerr << "error: static dir " << static_dir << " not found\n";
      return 2;
    }
    std::cerr << "listening on " << host << ':' << port << '\n';
    if (!server.listen(host, port)) {
      std::cerr << "error: cannot listen on " << host << ':' << port << '\n';
      return 3;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  }
  return 0;
}
