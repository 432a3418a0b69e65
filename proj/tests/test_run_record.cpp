#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>

#include "qchsh/run_record.hpp"
#include "schema_check.hpp"

using namespace qchsh;

namespace {

SeesawConfig small_config() {
  SeesawConfig c;
  c.restarts = 5;
  c.seed = 9;
  return c;
}

RunRecord breaking_record() {
  RunRecord r;
  r.command = "check-breaking";
  r.config = small_config();
  r.descriptor = make_descriptor(ProtocolKind::SingleChannel,
                                 make_param(ChannelFamily::AmplitudeDamping, 0.5));
  BreakingReport b;
  b.channel = make_param(ChannelFamily::AmplitudeDamping, 0.5);
  b.breaking = true;
  b.threshold = 0.5;
  b.numeric_max = 1.999999;
  r.breaking = b;
  r.seed = 9;
  r.wall_time = 0.125;
  return r;
}

RunRecord activation_record() {
  RunRecord r;
  r.command = "activate";
  r.config = small_config();
  r.descriptor = make_descriptor(ProtocolKind::Unidirectional,
                                 make_param(ChannelFamily::Erasure, 0.5),
                                 make_param(ChannelFamily::Depolarizing, 1.0 / std::sqrt(2.0)));
  ActivationSummary a;
  a.best_value = 2.00484;
  a.activated = true;
  a.channel1_breaking = true;
  a.channel2_breaking = true;
  a.converged = true;
  a.restart_index = 3;
  a.restart_values = {2.0, 2.00484, 1.9};
  r.activation = a;
  r.seed = 9;
  return r;
}

RunRecord sweep_record() {
  RunRecord r;
  r.command = "sweep";
  r.config = small_config();
  SweepResult s;
  s.kind = ProtocolKind::Bidirectional;
  s.family1 = ChannelFamily::AmplitudeDamping;
  s.family2 = ChannelFamily::AmplitudeDamping;
  s.points = {{0.48, 0.49, 2.0011, true}, {0.5, 0.5, 2.0119, true}};
  r.sweep = s;
  r.seed = 9;
  return r;
}

RunRecord superactivation_record() {
  RunRecord r;
  r.command = "superactivate";
  r.config = small_config();
  r.descriptor = make_descriptor(ProtocolKind::Bidirectional,
                                 make_param(ChannelFamily::AmplitudeDamping, 0.5),
                                 make_param(ChannelFamily::AmplitudeDamping, 0.5), true);
  SuperactivationSummary s;
  s.pair_value = 2.0117058;
  s.swapped_branch_value = 2.0117058;
  s.scheme_value = 2.0058529;
  s.single_copy_max = 2.0;
  s.sigma1_horodecki = 1.9966973;
  s.sigma2_horodecki = 1.9966973;
  s.symmetric = true;
  s.superactivated = true;
  s.converged = true;
  s.restart_values = {2.0, 2.0117058};
  r.superactivation = s;
  r.seed = 0xDEADBEEFDEADBEEFull;
  return r;
}

std::string write_temp(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  out << body;
  return path;
}

nlohmann::json load_schema() {
  std::ifstream in(QCHSH_SCHEMA_PATH);
  REQUIRE(in.good());
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_CASE("records of every payload kind survive a JSON round trip") {
  for (const RunRecord& r : {breaking_record(), activation_record(), sweep_record(),
                             superactivation_record()}) {
    const std::string text = to_json(r);
    const RunRecord back = parse_run_record(text);
    CHECK(back == r);
  }

  // seeds use the full unsigned range
  const RunRecord big = superactivation_record();
  CHECK(parse_run_record(to_json(big)).seed == 0xDEADBEEFDEADBEEFull);

  // descriptor stays optional
  const RunRecord no_desc = sweep_record();
  CHECK_FALSE(parse_run_record(to_json(no_desc)).descriptor.has_value());
  CHECK(parse_run_record(to_json(no_desc)).version == std::string(kVersion));
}

TEST_CASE("serialization demands exactly one result payload") {
  RunRecord none = breaking_record();
  none.breaking.reset();
  CHECK_THROWS_AS(to_json(none), contract_error);

  RunRecord both = breaking_record();
  both.sweep = sweep_record().sweep;
  CHECK_THROWS_AS(to_json(both), contract_error);
}

TEST_CASE("malformed record text is rejected as a parameter problem") {
  CHECK_THROWS_AS(parse_run_record("not json at all"), parameter_error);
  CHECK_THROWS_AS(parse_run_record("{}"), parameter_error);
  CHECK_THROWS_AS(parse_run_record(R"({"command":"sweep"})"), parameter_error);

  nlohmann::json j = nlohmann::json::parse(to_json(breaking_record()));
  j["result"]["type"] = "mystery";
  CHECK_THROWS_AS(parse_run_record(j.dump()), parameter_error);
}

TEST_CASE("every payload kind passes the published schema") {
  const nlohmann::json schema = load_schema();
  for (const RunRecord& r : {breaking_record(), activation_record(), sweep_record(),
                             superactivation_record()}) {
    const nlohmann::json instance = nlohmann::json::parse(to_json(r));
    std::string why;
    const bool ok = schema_check::validate(schema, instance, &why);
    INFO("schema violation: ", why);
    CHECK(ok);
  }
}

TEST_CASE("the schema checker actually rejects bad records") {
  const nlohmann::json schema = load_schema();
  std::string why;

  nlohmann::json extra = nlohmann::json::parse(to_json(breaking_record()));
  extra["surprise"] = 1;
  CHECK_FALSE(schema_check::validate(schema, extra, &why));

  nlohmann::json missing = nlohmann::json::parse(to_json(sweep_record()));
  missing.erase("seed");
  CHECK_FALSE(schema_check::validate(schema, missing, &why));

  nlohmann::json wrong_family = nlohmann::json::parse(to_json(activation_record()));
  wrong_family["descriptor"]["channel1"]["family"] = "fog";
  CHECK_FALSE(schema_check::validate(schema, wrong_family, &why));

  nlohmann::json negative = nlohmann::json::parse(to_json(breaking_record()));
  negative["wall_time"] = -1.0;
  CHECK_FALSE(schema_check::validate(schema, negative, &why));

  nlohmann::json two_types = nlohmann::json::parse(to_json(breaking_record()));
  two_types["result"] = {{"type", "mystery"}};
  CHECK_FALSE(schema_check::validate(schema, two_types, &why));
}

TEST_CASE("sweep CSV uses ten significant digits and 0/1 flags") {
  SweepResult g;
  g.kind = ProtocolKind::Bidirectional;
  g.family1 = ChannelFamily::AmplitudeDamping;
  g.family2 = ChannelFamily::Loss;
  g.points = {{0.48, 0.5, 1.0 / 3.0, true}, {0.5, 1.0, 3.0, false}};
  CHECK(sweep_csv(g) ==
        "p1,p2,chsh,activated\n"
        "0.48,0.5,0.3333333333,1\n"
        "0.5,1,3,0\n");

  SweepResult empty = g;
  empty.points.clear();
  CHECK(sweep_csv(empty) == "p1,p2,chsh,activated\n");
}

TEST_CASE("config files layer assignments onto the base configuration") {
  const std::string path = write_temp("/tmp/qchsh_cfg_ok.txt",
                                      "# tuning for slow boxes\n"
                                      "\n"
                                      "  epsilon = 0.25\n"
                                      "restarts=7\n"
                                      "seed= 42\n"
                                      "max_iterations =150\n");
  SeesawConfig base;
  const SeesawConfig got = apply_config_file(path, base);
  CHECK(got.epsilon == 0.25);
  CHECK(got.restarts == 7);
  CHECK(got.seed == 42);
  CHECK(got.max_iterations == 150);
  CHECK(got.perturb_probability == base.perturb_probability);
  CHECK(got.stall_threshold == base.stall_threshold);
  CHECK(got.value_equality_tol == base.value_equality_tol);

  CHECK_THROWS_AS(
      apply_config_file(write_temp("/tmp/qchsh_cfg_bad_key.txt", "wobble=3\n"), base),
      parameter_error);
  CHECK_THROWS_AS(
      apply_config_file(write_temp("/tmp/qchsh_cfg_bad_value.txt", "restarts=banana\n"), base),
      parameter_error);
  CHECK_THROWS_AS(
      apply_config_file(write_temp("/tmp/qchsh_cfg_no_eq.txt", "restarts 7\n"), base),
      parameter_error);
  CHECK_THROWS_AS(apply_config_file("/tmp/qchsh_cfg_does_not_exist.txt", base), parameter_error);
}

TEST_CASE("summaries copy the fields they claim to") {
  ActivationResult ar;
  ar.descriptor = make_descriptor(ProtocolKind::Bidirectional,
                                  make_param(ChannelFamily::AmplitudeDamping, 0.5),
                                  make_param(ChannelFamily::AmplitudeDamping, 0.5));
  ar.seesaw.best_value = 2.25;
  ar.seesaw.converged = true;
  ar.seesaw.restart_index = 3;
  ar.seesaw.restart_values = {1.0, 2.25};
  ar.channel1_breaking = true;
  ar.channel2_breaking = false;
  ar.activated = false;
  const ActivationSummary a = summarize(ar);
  CHECK(a.best_value == 2.25);
  CHECK(a.converged);
  CHECK(a.restart_index == 3);
  CHECK(a.restart_values == std::vector<double>{1.0, 2.25});
  CHECK(a.channel1_breaking);
  CHECK_FALSE(a.channel2_breaking);
  CHECK_FALSE(a.activated);

  SeesawConfig config;
  config.restarts = 2;
  config.seed = 1;
  const SuperactivationResult sr = superactivate(
      make_param(ChannelFamily::AmplitudeDamping, 0.5),
      make_param(ChannelFamily::AmplitudeDamping, 0.5), config);
  const SuperactivationSummary s = summarize(sr);
  CHECK(s.pair_value == sr.pair_value);
  CHECK(s.swapped_branch_value == sr.swapped_branch_value);
  CHECK(s.scheme_value == sr.scheme_value);
  CHECK(s.single_copy_max == sr.single_copy_max);
  CHECK(s.sigma1_horodecki == sr.sigma1_horodecki);
  CHECK(s.sigma2_horodecki == sr.sigma2_horodecki);
  CHECK(s.symmetric == sr.symmetric);
  CHECK(s.superactivated == sr.superactivated);
  CHECK(s.converged == sr.seesaw.converged);
  CHECK(s.restart_values == sr.seesaw.restart_values);
}

TEST_CASE("records carry the library version") {
  CHECK(std::string(kVersion) == "0.1.0");
  const nlohmann::json j = nlohmann::json::parse(to_json(breaking_record()));
  CHECK(j.at("version").get<std::string>() == "0.1.0");
}
