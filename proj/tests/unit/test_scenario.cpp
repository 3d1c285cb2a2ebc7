// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: 2026 The fleetgoodput Authors

#include <doctest.h>

#include "fgp/errors.hpp"
#include "fgp/scenario.hpp"
#include "support.hpp"

using namespace fgp;
using nlohmann::json;

namespace {

std::string rejected_field(const json& doc) {
    try {
        parse_scenario(doc);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<accepted>";
}

}  // namespace

TEST_CASE("the single-job document parses with defaults filled in") {
    const Scenario sc = parse_scenario(testing::single_job_document());
    CHECK(sc.name == "unit");
    REQUIRE(sc.jobs.size() == 1);
    CHECK(sc.jobs[0].runtime.checkpoint_interval == 5);
    CHECK_FALSE(sc.jobs[0].runtime.async_checkpoint);
    CHECK(sc.jobs[0].request.runtime_tag == "default");
    CHECK(sc.horizon == 30 * kMicrosPerSecond);
    CHECK(sc.seed == 7);
    CHECK(sc.scheduler.policy.order().front() == SizeClass::medium);
    CHECK(flop_count(sc.graph("g")) == 2'000'000'000'000);
}

TEST_CASE("invalid values name their field") {
    json doc = testing::single_job_document();
    doc["jobs"][0]["runtime"]["init_time"] = -1;
    CHECK(rejected_field(doc) == "jobs[0].runtime.init_time");

    doc = testing::single_job_document();
    doc["jobs"][0]["bogus"] = 1;
    CHECK(rejected_field(doc).find("jobs[0]") == 0);

    doc = testing::single_job_document();
    doc["jobs"][0]["graph"] = "missing";
    CHECK(rejected_field(doc) == "jobs[0].graph");

    doc = testing::single_job_document();
    doc["jobs"][0]["chip_kind"] = "nope";
    CHECK(rejected_field(doc) == "jobs[0].chip_kind");

    doc = testing::single_job_document();
    doc["jobs"][0]["profile"]["overlap_fraction"] = 2.0;
    CHECK(rejected_field(doc).find("jobs[0].profile") == 0);

    doc = testing::single_job_document();
    doc["horizon"] = 0;
    CHECK(rejected_field(doc) == "horizon");

    doc = testing::single_job_document();
    doc["extra"] = true;
    CHECK(rejected_field(doc) != "<accepted>");

    doc = testing::single_job_document();
    doc["jobs"].push_back(doc["jobs"][0]);
    CHECK(rejected_field(doc).find("jobs[1]") == 0);
}

TEST_CASE("hashes are stable and section-local") {
    const json doc = testing::single_job_document();
    const Scenario a = parse_scenario(doc);
    const Scenario b = parse_scenario(doc);
    CHECK(a.hash == b.hash);
    json changed = doc;
    changed["jobs"][0]["runtime"]["checkpoint_interval"] = 3;
    const Scenario c = parse_scenario(changed);
    CHECK(c.hash != a.hash);
    CHECK(c.sections.runtime != a.sections.runtime);
    CHECK(c.sections.program == a.sections.program);
    CHECK(c.sections.scheduler == a.sections.scheduler);
    CHECK(c.sections.workload == a.sections.workload);
}

TEST_CASE("set_param overrides numeric and boolean fields") {
    json doc = testing::single_job_document();
    set_param(doc, "jobs[0].runtime.checkpoint_interval", "2");
    set_param(doc, "jobs[*].runtime.checkpoint_write_time", "0.5");
    set_param(doc, "seed", "11");
    const Scenario sc = parse_scenario(doc);
    CHECK(sc.jobs[0].runtime.checkpoint_interval == 2);
    CHECK(sc.jobs[0].runtime.checkpoint_write_time == 0.5);
    CHECK(sc.seed == 11);
    CHECK_THROWS_AS(set_param(doc, "jobs[0].runtime.checkpoint_interval", "abc"), ConfigError);
    CHECK_THROWS_AS(set_param(doc, "jobs[4].runtime.init_time", "1"), ConfigError);
    CHECK_THROWS_AS(set_param(doc, "name", "x"), ConfigError);
    // Only fields present in the document can be overridden.
    CHECK_THROWS_AS(set_param(doc, "jobs[0].runtime.async_checkpoint", "true"), ConfigError);
}

TEST_CASE("every bundled scenario loads") {
    for (const auto& name : testing::bundled_scenarios()) {
        CAPTURE(name);
        CHECK_NOTHROW(load_scenario_file(testing::scenario_path(name)));
    }
    CHECK_THROWS_AS(load_scenario_file("/nonexistent/file.json"), IoError);
}
