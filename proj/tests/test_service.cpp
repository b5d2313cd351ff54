#include <chrono>
#include <thread>

#include "sitealloc/service.hpp"

#include "doctest.h"
#include "httplib.h"
#include "support.hpp"

using namespace sitealloc;

namespace {

std::vector<CatalogEntry> catalog() {
  std::vector<CatalogEntry> out;
  for (std::uint64_t seed : {1, 2}) {
    auto s = testing::random_synth(seed, 6, 10, 25, 0.8);
    out.push_back({"county" + std::to_string(seed), "County " + std::to_string(seed), s.region, s.sites});
  }
  return out;
}

Scenario scenario_like_service(const CatalogEntry& e, const KeyValues& values) {
  return make_scenario(RunConfig::from_values(values, false), e.region, e.sites);
}

}  // namespace

TEST_CASE("region listing") {
  Service service(catalog());
  const auto r = service.list_regions();
  CHECK(r.status == 200);
  REQUIRE(r.body.size() == 2);
  CHECK(r.body[0]["id"] == "county1");
  CHECK(r.body[0]["m"] == 60);
  CHECK(r.body[0]["n"] == 25);
  CHECK(r.body[0]["site_types"] == Json::array({1}));
}

TEST_CASE("score status codes") {
  Service service(catalog());
  CHECK(service.score(Json{{"region", "nowhere"}, {"site_ids", {"S001"}}}).status == 404);
  CHECK(service.score(Json{{"region", "county1"}, {"site_ids", {"S001", "S099"}}}).status == 422);
  CHECK(service.score(Json{{"region", "county1"}, {"site_ids", {"S001", "S001"}}}).status == 422);
  CHECK(service.score(Json{{"region", "county1"}, {"site_ids", "S001"}}).status == 422);
  CHECK(service.score(Json{{"site_ids", {"S001"}}}).status == 400);
  CHECK(service.score(Json{{"region", "county1"}, {"site_ids", {"S001"}}, {"config", {{"lambda9", 1}}}}).status ==
        400);
  const auto ok = service.score(Json{{"region", "county1"}, {"site_ids", {"S001", "S007"}}});
  CHECK(ok.status == 200);
  CHECK(ok.body["allocation"]["k"] == 2);
}

TEST_CASE("score matches the shared report builder") {
  const auto entries = catalog();
  Service service(entries);
  const Json config = {{"equity-importance", "very"}, {"target_fraction", 0.2}};
  const auto r = service.score(Json{{"region", "county2"}, {"site_ids", {"S003", "S011", "S019"}}, {"config", config}});
  REQUIRE(r.status == 200);
  const auto expected = score_report(
      scenario_like_service(entries[1], {{"equity-importance", "very"}, {"target-fraction", "0.2"}}),
      {"S003", "S011", "S019"});
  CHECK(strip_volatile(r.body).dump() == strip_volatile(expected).dump());
}

TEST_CASE("optimize jobs") {
  const auto entries = catalog();
  Service service(entries);
  CHECK(service.submit(Json{{"region", "nowhere"}, {"config", {{"k", 3}}}}).status == 404);
  CHECK(service.submit(Json{{"region", "county1"}}).status == 400);
  CHECK(service.submit(Json{{"region", "county1"}, {"config", {{"k", 40}}}}).status == 400);
  CHECK(service.poll("job-404").status == 404);

  const Json config = {{"k", 4}, {"seed", 7}, {"generations", 40}};
  const auto accepted = service.submit(Json{{"region", "county1"}, {"config", config}});
  REQUIRE(accepted.status == 202);
  const std::string id = accepted.body["id"];
  service.drain();
  const auto polled = service.poll(id);
  CHECK(polled.status == 200);
  CHECK(polled.body["state"] == "done");
  CHECK(polled.body["progress"]["generation"] == 40);
  const auto expected =
      optimize_report(scenario_like_service(entries[0], {{"k", "4"}, {"seed", "7"}, {"generations", "40"}}));
  CHECK(strip_volatile(polled.body["result"]).dump() == strip_volatile(expected).dump());
  CHECK(polled.body["progress"]["best_combined"] == expected["combined"]);
}

TEST_CASE("a full queue rejects submissions") {
  {
    Service closed(catalog(), {1, 0});
    CHECK(closed.submit(Json{{"region", "county1"}, {"config", {{"k", 3}}}}).status == 409);
  }
  // Long jobs: the destructor cancels the running one.
  Service busy(catalog(), {1, 1});
  const Json body = {{"region", "county1"}, {"config", {{"k", 6}, {"generations", 1000000}}}};
  int rejected = 0;
  for (int i = 0; i < 4; ++i) rejected += busy.submit(body).status == 409;
  CHECK(rejected >= 2);
}

TEST_CASE("http endpoints") {
  Service service(catalog());
  httplib::Server server;
  mount_routes(server, service, true);
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread listener([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto regions = client.Get("/regions");
  REQUIRE(regions);
  CHECK(regions->status == 200);
  CHECK(regions->get_header_value("Access-Control-Allow-Origin") == "*");
  CHECK(Json::parse(regions->body).size() == 2);

  const Json score_body = {{"region", "county1"}, {"site_ids", {"S002", "S009"}}};
  auto scored = client.Post("/score", score_body.dump(), "application/json");
  REQUIRE(scored);
  CHECK(scored->status == 200);
  CHECK(strip_volatile(Json::parse(scored->body)).dump() == strip_volatile(service.score(score_body).body).dump());

  auto malformed = client.Post("/score", "{not json", "application/json");
  REQUIRE(malformed);
  CHECK(malformed->status == 400);

  const Json job_body = {{"region", "county2"}, {"config", {{"k", 3}, {"generations", 10}}}};
  auto submitted = client.Post("/jobs", job_body.dump(), "application/json");
  REQUIRE(submitted);
  CHECK(submitted->status == 202);
  const std::string id = Json::parse(submitted->body)["id"];
  service.drain();
  auto polled = client.Get("/jobs/" + id);
  REQUIRE(polled);
  CHECK(polled->status == 200);
  CHECK(Json::parse(polled->body)["state"] == "done");
  auto missing = client.Get("/jobs/job-999");
  REQUIRE(missing);
  CHECK(missing->status == 404);
  auto preflight = client.Options("/score");
  REQUIRE(preflight);
  CHECK(preflight->status == 204);

  server.stop();
  listener.join();
}

TEST_CASE("empty catalog and repeated jobs") {
  {
    Service empty({});
    CHECK(empty.list_regions().body == Json::array());
  }
  Service service(catalog(), {2, 8});
  const Json body = {{"region", "county2"}, {"config", {{"k", 5}, {"seed", 3}, {"generations", 30}}}};
  const std::string a = service.submit(body).body["id"];
  const std::string b = service.submit(body).body["id"];
  CHECK(a != b);
  service.drain();
  const auto ra = service.poll(a).body["result"];
  const auto rb = service.poll(b).body["result"];
  CHECK(strip_volatile(ra).dump() == strip_volatile(rb).dump());
  CHECK(service.list_regions().body == service.list_regions().body);
}
