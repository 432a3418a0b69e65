#include "qchsh/run_record.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

#include <json.hpp>

#include "qchsh/types.hpp"

namespace qchsh {

namespace {

using jsonv = nlohmann::ordered_json;

jsonv param_json(const ChannelParam& p) {
  return jsonv{{"family", std::string(family_code(p.family))}, {"p", p.p}};
}

ChannelParam param_from(const jsonv& j) {
  return make_param(family_from_code(j.at("family").get<std::string>()),
                    j.at("p").get<double>());
}

jsonv descriptor_json(const ProtocolDescriptor& d) {
  jsonv j{{"kind", std::string(kind_code(d.kind))}, {"channel1", param_json(d.channel1)}};
  if (d.channel2) j["channel2"] = param_json(*d.channel2);
  j["cut_permutation"] = d.cut_permutation;
  j["symmetric_pair"] = d.symmetric_pair;
  return j;
}

ProtocolDescriptor descriptor_from(const jsonv& j) {
  ProtocolDescriptor d;
  d.kind = kind_from_code(j.at("kind").get<std::string>());
  d.channel1 = param_from(j.at("channel1"));
  if (j.contains("channel2")) d.channel2 = param_from(j.at("channel2"));
  d.cut_permutation = j.at("cut_permutation").get<std::vector<std::size_t>>();
  d.symmetric_pair = j.at("symmetric_pair").get<bool>();
  return d;
}

jsonv config_json(const SeesawConfig& c) {
  return jsonv{{"epsilon", c.epsilon},
               {"perturb_probability", c.perturb_probability},
               {"stall_threshold", c.stall_threshold},
               {"value_equality_tol", c.value_equality_tol},
               {"max_iterations", c.max_iterations},
               {"restarts", c.restarts},
               {"seed", c.seed}};
}

SeesawConfig config_from(const jsonv& j) {
  SeesawConfig c;
  c.epsilon = j.at("epsilon").get<double>();
  c.perturb_probability = j.at("perturb_probability").get<double>();
  c.stall_threshold = j.at("stall_threshold").get<int>();
  c.value_equality_tol = j.at("value_equality_tol").get<double>();
  c.max_iterations = j.at("max_iterations").get<int>();
  c.restarts = j.at("restarts").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

jsonv result_json(const RunRecord& r) {
  const int set = int(bool(r.breaking)) + int(bool(r.activation)) + int(bool(r.sweep)) +
                  int(bool(r.superactivation));
  if (set != 1) throw contract_error("run record needs exactly one result payload");
  if (r.breaking) {
    return jsonv{{"type", "breaking"},
                 {"channel", param_json(r.breaking->channel)},
                 {"breaking", r.breaking->breaking},
                 {"threshold", r.breaking->threshold},
                 {"numeric_max", r.breaking->numeric_max}};
  }
  if (r.activation) {
    const ActivationSummary& a = *r.activation;
    return jsonv{{"type", "activation"},
                 {"best_value", a.best_value},
                 {"activated", a.activated},
                 {"channel1_breaking", a.channel1_breaking},
                 {"channel2_breaking", a.channel2_breaking},
                 {"converged", a.converged},
                 {"restart_index", a.restart_index},
                 {"restart_values", a.restart_values}};
  }
  if (r.sweep) {
    jsonv points = jsonv::array();
    for (const SweepPoint& p : r.sweep->points) {
      points.push_back(jsonv{
          {"p1", p.p1}, {"p2", p.p2}, {"chsh", p.value}, {"activated", p.activated}});
    }
    return jsonv{{"type", "sweep"},
                 {"kind", std::string(kind_code(r.sweep->kind))},
                 {"family1", std::string(family_code(r.sweep->family1))},
                 {"family2", std::string(family_code(r.sweep->family2))},
                 {"points", std::move(points)}};
  }
  const SuperactivationSummary& s = *r.superactivation;
  return jsonv{{"type", "superactivation"},
               {"pair_value", s.pair_value},
               {"swapped_branch_value", s.swapped_branch_value},
               {"scheme_value", s.scheme_value},
               {"single_copy_max", s.single_copy_max},
               {"sigma1_horodecki", s.sigma1_horodecki},
               {"sigma2_horodecki", s.sigma2_horodecki},
               {"symmetric", s.symmetric},
               {"superactivated", s.superactivated},
               {"converged", s.converged},
               {"restart_values", s.restart_values}};
}

void result_from(const jsonv& j, RunRecord& r) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "breaking") {
    BreakingReport b;
    b.channel = param_from(j.at("channel"));
    b.breaking = j.at("breaking").get<bool>();
    b.threshold = j.at("threshold").get<double>();
    b.numeric_max = j.at("numeric_max").get<double>();
    r.breaking = std::move(b);
    return;
  }
  if (type == "activation") {
    ActivationSummary a;
    a.best_value = j.at("best_value").get<double>();
    a.activated = j.at("activated").get<bool>();
    a.channel1_breaking = j.at("channel1_breaking").get<bool>();
    a.channel2_breaking = j.at("channel2_breaking").get<bool>();
    a.converged = j.at("converged").get<bool>();
    a.restart_index = j.at("restart_index").get<int>();
    a.restart_values = j.at("restart_values").get<std::vector<double>>();
    r.activation = std::move(a);
    return;
  }
  if (type == "sweep") {
    SweepResult s;
    s.kind = kind_from_code(j.at("kind").get<std::string>());
    s.family1 = family_from_code(j.at("family1").get<std::string>());
    s.family2 = family_from_code(j.at("family2").get<std::string>());
    for (const jsonv& p : j.at("points")) {
      s.points.push_back({p.at("p1").get<double>(), p.at("p2").get<double>(),
                          p.at("chsh").get<double>(), p.at("activated").get<bool>()});
    }
    r.sweep = std::move(s);
    return;
  }
  if (type == "superactivation") {
    SuperactivationSummary s;
    s.pair_value = j.at("pair_value").get<double>();
    s.swapped_branch_value = j.at("swapped_branch_value").get<double>();
    s.scheme_value = j.at("scheme_value").get<double>();
    s.single_copy_max = j.at("single_copy_max").get<double>();
    s.sigma1_horodecki = j.at("sigma1_horodecki").get<double>();
    s.sigma2_horodecki = j.at("sigma2_horodecki").get<double>();
    s.symmetric = j.at("symmetric").get<bool>();
    s.superactivated = j.at("superactivated").get<bool>();
    s.converged = j.at("converged").get<bool>();
    s.restart_values = j.at("restart_values").get<std::vector<double>>();
    r.superactivation = std::move(s);
    return;
  }
  throw parameter_error("unknown run record result type '" + type + "'");
}

std::string format_sig10(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 10);
  return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const std::size_t b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const std::size_t e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

}  // namespace

ActivationSummary summarize(const ActivationResult& result) {
  ActivationSummary a;
  a.best_value = result.seesaw.best_value;
  a.activated = result.activated;
  a.channel1_breaking = result.channel1_breaking;
  a.channel2_breaking = result.channel2_breaking;
  a.converged = result.seesaw.converged;
  a.restart_index = result.seesaw.restart_index;
  a.restart_values = result.seesaw.restart_values;
  return a;
}

SuperactivationSummary summarize(const SuperactivationResult& result) {
  SuperactivationSummary s;
  s.pair_value = result.pair_value;
  s.swapped_branch_value = result.swapped_branch_value;
  s.scheme_value = result.scheme_value;
  s.single_copy_max = result.single_copy_max;
  s.sigma1_horodecki = result.sigma1_horodecki;
  s.sigma2_horodecki = result.sigma2_horodecki;
  s.symmetric = result.symmetric;
  s.superactivated = result.superactivated;
  s.converged = result.seesaw.converged;
  s.restart_values = result.seesaw.restart_values;
  return s;
}

std::string to_json(const RunRecord& record, int indent) {
  jsonv j;
  j["command"] = record.command;
  j["config"] = config_json(record.config);
  if (record.descriptor) j["descriptor"] = descriptor_json(*record.descriptor);
  j["result"] = result_json(record);
  j["seed"] = record.seed;
  j["wall_time"] = record.wall_time;
  j["version"] = record.version;
  return j.dump(indent);
}

RunRecord parse_run_record(const std::string& text) {
  jsonv j;
  try {
    j = jsonv::parse(text);
  } catch (const std::exception& e) {
    throw parameter_error(std::string("run record is not valid JSON: ") + e.what());
  }
  try {
    RunRecord r;
    r.command = j.at("command").get<std::string>();
    r.config = config_from(j.at("config"));
    if (j.contains("descriptor")) r.descriptor = descriptor_from(j.at("descriptor"));
    result_from(j.at("result"), r);
    r.seed = j.at("seed").get<std::uint64_t>();
    r.wall_time = j.at("wall_time").get<double>();
    r.version = j.at("version").get<std::string>();
    return r;
  } catch (const std::exception& e) {
    throw parameter_error(std::string("run record has missing or mistyped fields: ") + e.what());
  }
}

SeesawConfig apply_config_file(const std::string& path, const SeesawConfig& base) {
  std::ifstream in(path);
  if (!in) throw parameter_error("cannot open config file '" + path + "'");
  SeesawConfig c = base;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    const std::size_t eq = sv.find('=');
    if (eq == std::string_view::npos)
      throw parameter_error("config line " + std::to_string(lineno) + " is not key=value");
    const std::string key(trim(sv.substr(0, eq)));
    const std::string value(trim(sv.substr(eq + 1)));
    try {
      if (key == "epsilon") {
        c.epsilon = std::stod(value);
      } else if (key == "perturb_probability") {
        c.perturb_probability = std::stod(value);
      } else if (key == "stall_threshold") {
        c.stall_threshold = std::stoi(value);
      } else if (key == "value_equality_tol") {
        c.value_equality_tol = std::stod(value);
      } else if (key == "max_iterations") {
        c.max_iterations = std::stoi(value);
      } else if (key == "restarts") {
        c.restarts = std::stoi(value);
      } else if (key == "seed") {
        c.seed = std::stoull(value);
      } else {
        throw parameter_error("unknown config key '" + key + "'");
      }
    } catch (const parameter_error&) {
      throw;
    } catch (const std::exception&) {
      throw parameter_error("config line " + std::to_string(lineno) + ": bad value for '" +
                            key + "'");
    }
  }
  return c;
}

std::string sweep_csv(const SweepResult& grid) {
  std::ostringstream out;
  out << "p1,p2,chsh,activated\n";
  for (const SweepPoint& p : grid.points) {
    out << format_sig10(p.p1) << ',' << format_sig10(p.p2) << ',' << format_sig10(p.value)
        << ',' << (p.activated ? '1' : '0') << '\n';
  }
  return out.str();
}

}  // namespace qchsh
