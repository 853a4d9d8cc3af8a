// Copyright 2026 The plexus-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "plexus/report.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "plexus/error.hpp"
#include "plexus/yaml_util.hpp"

namespace plexus {

namespace {

using ojson = nlohmann::ordered_json;
using yamlio::format_double;

constexpr Condition kConditions[kConditionCount] = {Condition::kPLWithIndex, Condition::kPLWithoutIndex,
                                                    Condition::kLPWithIndex};

int index_of(Condition c) { return static_cast<int>(c); }

// --- minimal RFC 4180 reader/writer --------------------------------------

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct CsvLine {
  int number = 0;
  std::vector<std::string> fields;
};

// Splits text into records; '#' comment lines and blank lines are skipped.
std::vector<CsvLine> read_csv(const std::string& text, const std::string& source) {
  std::vector<CsvLine> out;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    CsvLine rec{number, {}};
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          field += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        rec.fields.push_back(field);
        field.clear();
      } else {
        field += c;
      }
    }
    if (quoted) {
      throw Error(ErrorCode::kSchemaError, source + ":" + std::to_string(number) + ": unterminated quoted field");
    }
    rec.fields.push_back(field);
    out.push_back(std::move(rec));
  }
  return out;
}

[[noreturn]] void csv_fail(const std::string& source, int line, const std::string& what) {
  throw Error(ErrorCode::kSchemaError, source + ":" + std::to_string(line) + ": " + what);
}

double csv_number(const std::string& s, const std::string& source, int line, const char* column) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    csv_fail(source, line, std::string("column '") + column + "': '" + s + "' is not a number");
  }
  return v;
}

int csv_int(const std::string& s, const std::string& source, int line, const char* column) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || v < 0) {
    csv_fail(source, line, std::string("column '") + column + "': '" + s + "' is not a count");
  }
  return v;
}

void expect_header(const std::vector<CsvLine>& lines, const std::vector<std::string>& header,
                   const std::string& source) {
  if (lines.empty()) csv_fail(source, 1, "missing header line");
  if (lines.front().fields != header) {
    std::string want;
    for (const std::string& h : header) want += (want.empty() ? "" : ",") + h;
    csv_fail(source, lines.front().number, "expected header '" + want + "'");
  }
}

const std::vector<std::string>& reference_header() {
  static const std::vector<std::string> h = {"object",         "shape",           "width_mm",
                                             "material",       "mass_g",          "PL_with_index",
                                             "PL_without_index", "LP_with_index", "source"};
  return h;
}

const std::vector<std::string>& report_header() {
  static const std::vector<std::string> h = [] {
    std::vector<std::string> v = {"object", "width_mm", "material", "mass_g", "condition", "success_rate",
                                  "shape",  "trials",   "successes", "mean_abs_w_error_mm"};
    for (int f = 1; f < kTrialFailureCount; ++f) {
      v.push_back("fail_" + std::string(to_string(static_cast<TrialFailure>(f))));
    }
    return v;
  }();
  return h;
}

std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

ojson opt_json(const std::optional<double>& v) { return v ? ojson(*v) : ojson(); }

int sign(double v) { return (v > 0.0) - (v < 0.0); }

// Rows of a report grouped per object, in first-appearance order.
struct ObjectRates {
  const SuiteRow* any = nullptr;
  std::array<const SuiteRow*, kConditionCount> rows{};
};

std::vector<ObjectRates> group_by_object(const SuiteReport& report) {
  std::vector<ObjectRates> out;
  std::map<std::string, std::size_t> index;
  for (const SuiteRow& row : report.rows) {
    auto [it, inserted] = index.emplace(row.label, out.size());
    if (inserted) out.push_back({&row, {}});
    out[it->second].rows[index_of(row.condition)] = &row;
  }
  return out;
}

std::optional<double> rate_of(const ObjectRates& o, Condition c) {
  const SuiteRow* r = o.rows[index_of(c)];
  return r ? std::optional<double>(r->success_rate()) : std::nullopt;
}

}  // namespace

const ReferenceRow* ReferenceTable::find(ObjectShape shape, double width, const std::string& material) const {
  for (const ReferenceRow& r : rows) {
    if (r.shape == shape && r.width == width && r.material == material) return &r;
  }
  return nullptr;
}

ReferenceTable parse_reference(const std::string& text, const std::string& source) {
  const std::vector<CsvLine> lines = read_csv(text, source);
  expect_header(lines, reference_header(), source);
  ReferenceTable table;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const CsvLine& l = lines[i];
    if (l.fields.size() != reference_header().size()) {
      csv_fail(source, l.number, "expected " + std::to_string(reference_header().size()) + " fields, got " +
                                     std::to_string(l.fields.size()));
    }
    ReferenceRow r;
    r.label = l.fields[0];
    try {
      r.shape = object_shape_from_string(l.fields[1]);
    } catch (const Error& e) {
      csv_fail(source, l.number, e.what());
    }
    r.width = csv_number(l.fields[2], source, l.number, "width_mm");
    r.material = l.fields[3];
    r.mass = csv_number(l.fields[4], source, l.number, "mass_g");
    for (int c = 0; c < kConditionCount; ++c) {
      const std::string& cell = l.fields[5 + c];
      if (cell.empty()) continue;
      const double v = csv_number(cell, source, l.number, reference_header()[5 + c].c_str());
      if (v < 0.0 || v > 100.0) csv_fail(source, l.number, "success rate outside [0, 100]");
      r.rates[c] = v;
    }
    r.source = l.fields[8];
    if (table.find(r.shape, r.width, r.material)) csv_fail(source, l.number, "duplicate object '" + r.label + "'");
    table.rows.push_back(std::move(r));
  }
  return table;
}

ReferenceTable load_reference(const std::string& path) {
  return parse_reference(yamlio::read_text_file(path), path);
}

std::vector<TrendRow> compare_trends(const SuiteReport& report, const ReferenceTable& reference) {
  std::vector<TrendRow> out;
  for (const ObjectRates& o : group_by_object(report)) {
    TrendRow t;
    t.label = o.any->label;
    t.shape = o.any->shape;
    t.width = o.any->width;
    t.material = o.any->material;
    t.mass = o.any->mass;
    for (Condition c : kConditions) t.sim_rates[index_of(c)] = rate_of(o, c);
    const int w = index_of(Condition::kPLWithIndex);
    const int wo = index_of(Condition::kPLWithoutIndex);
    if (t.sim_rates[w] && t.sim_rates[wo]) t.sim_delta = *t.sim_rates[w] - *t.sim_rates[wo];
    if (const ReferenceRow* ref = reference.find(t.shape, t.width, t.material)) {
      t.ref_rates = ref->rates;
      t.source = ref->source;
      if (t.ref_rates[w] && t.ref_rates[wo]) t.ref_delta = *t.ref_rates[w] - *t.ref_rates[wo];
    }
    if (t.sim_delta && t.ref_delta) t.agreement = sign(*t.sim_delta) == sign(*t.ref_delta);
    out.push_back(std::move(t));
  }
  return out;
}

std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::kPass:
      return "pass";
    case CheckStatus::kFail:
      return "fail";
    case CheckStatus::kSkipped:
      return "skipped";
  }
  return "skipped";
}

std::vector<TrendCheck> run_trend_checks(const SuiteReport& report, const TrendCheckConfig& config) {
  const std::vector<ObjectRates> objects = group_by_object(report);
  std::vector<TrendCheck> checks;

  {
    TrendCheck c{"full_success", "every " + config.full_success_material + " object reaches 100% under PL_with_index",
                 CheckStatus::kSkipped, ""};
    int checked = 0;
    std::string failing;
    for (const ObjectRates& o : objects) {
      if (o.any->material != config.full_success_material) continue;
      const auto rate = rate_of(o, Condition::kPLWithIndex);
      if (!rate) continue;
      ++checked;
      if (*rate < 100.0) failing += (failing.empty() ? "" : ", ") + o.any->label + "=" + format_double(*rate);
    }
    if (checked > 0) {
      c.status = failing.empty() ? CheckStatus::kPass : CheckStatus::kFail;
      c.detail = failing.empty() ? std::to_string(checked) + " objects at 100%" : "below 100%: " + failing;
    } else {
      c.detail = "no such rows";
    }
    checks.push_back(std::move(c));
  }

  {
    TrendCheck c{"index_dominance",
                 "PL_with_index >= PL_without_index - " + format_double(config.dominance_tolerance_pp) +
                     " pp for every object",
                 CheckStatus::kSkipped, ""};
    int checked = 0;
    std::string failing;
    for (const ObjectRates& o : objects) {
      const auto w = rate_of(o, Condition::kPLWithIndex);
      const auto wo = rate_of(o, Condition::kPLWithoutIndex);
      if (!w || !wo) continue;
      ++checked;
      if (*w < *wo - config.dominance_tolerance_pp) {
        failing += (failing.empty() ? "" : ", ") + o.any->label + " (" + format_double(*w) + " vs " +
                   format_double(*wo) + ")";
      }
    }
    if (checked > 0) {
      c.status = failing.empty() ? CheckStatus::kPass : CheckStatus::kFail;
      c.detail = failing.empty() ? std::to_string(checked) + " objects checked" : "violated by " + failing;
    } else {
      c.detail = "no object has both PL conditions";
    }
    checks.push_back(std::move(c));
  }

  {
    TrendCheck c{"heavy_object_gain",
                 config.heavy_object + ": PL_with_index - PL_without_index >= " +
                     format_double(config.heavy_margin_pp) + " pp",
                 CheckStatus::kSkipped, "object not in report"};
    for (const ObjectRates& o : objects) {
      if (o.any->label != config.heavy_object) continue;
      const auto w = rate_of(o, Condition::kPLWithIndex);
      const auto wo = rate_of(o, Condition::kPLWithoutIndex);
      if (!w || !wo) {
        c.detail = "missing PL condition";
        break;
      }
      const double gain = *w - *wo;
      c.status = gain >= config.heavy_margin_pp ? CheckStatus::kPass : CheckStatus::kFail;
      c.detail = "gain " + format_double(gain) + " pp (" + format_double(*w) + " vs " + format_double(*wo) + ")";
    }
    checks.push_back(std::move(c));
  }
  return checks;
}

bool all_checks_pass(const std::vector<TrendCheck>& checks) {
  for (const TrendCheck& c : checks) {
    if (c.status == CheckStatus::kFail) return false;
  }
  return true;
}

std::string report_to_csv(const SuiteReport& report) {
  std::ostringstream os;
  const auto& header = report_header();
  for (std::size_t i = 0; i < header.size(); ++i) os << (i ? "," : "") << header[i];
  os << '\n';
  for (const SuiteRow& r : report.rows) {
    os << csv_field(r.label) << ',' << format_double(r.width) << ',' << csv_field(r.material) << ','
       << format_double(r.mass) << ',' << to_string(r.condition) << ',' << format_double(r.success_rate()) << ','
       << to_string(r.shape) << ',' << r.trials << ',' << r.successes << ',' << format_double(r.mean_abs_w_error);
    for (int f = 1; f < kTrialFailureCount; ++f) os << ',' << r.failures[f];
    os << '\n';
  }
  return os.str();
}

SuiteReport parse_report_csv(const std::string& text, const std::string& source) {
  const std::vector<CsvLine> lines = read_csv(text, source);
  expect_header(lines, report_header(), source);
  SuiteReport report;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const CsvLine& l = lines[i];
    const auto& f = l.fields;
    if (f.size() != report_header().size()) {
      csv_fail(source, l.number, "expected " + std::to_string(report_header().size()) + " fields, got " +
                                     std::to_string(f.size()));
    }
    SuiteRow r;
    r.label = f[0];
    r.width = csv_number(f[1], source, l.number, "width_mm");
    r.material = f[2];
    r.mass = csv_number(f[3], source, l.number, "mass_g");
    try {
      r.condition = condition_from_string(f[4]);
      r.shape = object_shape_from_string(f[6]);
    } catch (const Error& e) {
      csv_fail(source, l.number, e.what());
    }
    r.trials = csv_int(f[7], source, l.number, "trials");
    r.successes = csv_int(f[8], source, l.number, "successes");
    r.mean_abs_w_error = csv_number(f[9], source, l.number, "mean_abs_w_error_mm");
    int failed = 0;
    for (int k = 1; k < kTrialFailureCount; ++k) {
      r.failures[k] = csv_int(f[9 + k], source, l.number, report_header()[9 + k].c_str());
      failed += r.failures[k];
    }
    r.failures[0] = r.successes;
    if (r.successes > r.trials || r.successes + failed != r.trials) {
      csv_fail(source, l.number, "outcome counts do not sum to trials");
    }
    report.rows.push_back(std::move(r));
  }
  return report;
}

std::string trends_to_csv(const std::vector<TrendRow>& trends) {
  std::ostringstream os;
  os << "object,shape,width_mm,material,mass_g,sim_PL_with_index,sim_PL_without_index,sim_LP_with_index,"
        "sim_delta,ref_PL_with_index,ref_PL_without_index,ref_LP_with_index,ref_delta,trend_agreement,"
        "ref_source\n";
  for (const TrendRow& t : trends) {
    os << csv_field(t.label) << ',' << to_string(t.shape) << ',' << format_double(t.width) << ','
       << csv_field(t.material) << ',' << format_double(t.mass);
    for (const auto& v : t.sim_rates) os << ',' << opt_text(v);
    os << ',' << opt_text(t.sim_delta);
    for (const auto& v : t.ref_rates) os << ',' << opt_text(v);
    os << ',' << opt_text(t.ref_delta) << ',' << (t.agreement ? (*t.agreement ? "agree" : "disagree") : "")
       << ',' << csv_field(t.source) << '\n';
  }
  return os.str();
}

ReportMetadata make_metadata(const Scenario& scenario, const CalibrationBundle& bundle) {
  ReportMetadata m;
  m.scenario_name = scenario.name;
  m.seeds = scenario.seeds();
  m.trials_per_seed = scenario.trials;
  m.noise = scenario.noise;
  m.params = scenario.params;
  m.gravity_direction_deg = scenario.gravity_direction_deg;
  m.geometry_hash = bundle.geometry_hash;
  m.theta_T_P = bundle.theta_T_P;
  m.theta_I_L_fixed = bundle.theta_I_L_fixed;
  return m;
}

std::string report_to_json(const SuiteReport& report, const ReportMetadata& metadata,
                           const std::vector<TrendRow>* trends, const std::vector<TrendCheck>& checks) {
  constexpr double kDeg = std::numbers::pi / 180.0;
  const HarnessParams& p = metadata.params;
  ojson meta;
  meta["scenario"] = metadata.scenario_name;
  meta["seeds"] = metadata.seeds;
  meta["trials_per_seed"] = metadata.trials_per_seed;
  meta["noise"] = {{"position_sigma_mm", metadata.noise.position_sigma},
                   {"orientation_sigma_deg", metadata.noise.orientation_sigma / kDeg},
                   {"friction_sigma", metadata.noise.friction_sigma},
                   {"truncation_sigma", metadata.noise.truncation}};
  meta["physics"] = {{"gravity_m_s2", p.physics.gravity},
                     {"gravity_direction_deg", metadata.gravity_direction_deg},
                     {"contact_tolerance_mm", p.physics.contact_tolerance},
                     {"pad_compliance_mm", p.physics.pad_compliance},
                     {"grip_travel_mm", p.physics.grip_travel},
                     {"prism_min_overlap_mm", p.physics.prism_min_overlap},
                     {"max_step_rad", p.physics.max_step},
                     {"resettle_step_mm", p.physics.resettle_step}};
  meta["forces"] = {{"preload_N", p.preload}, {"grip_N", p.grip}};
  meta["controller"] = {{"index_threshold_mA", p.controller.I_I_th},
                        {"thumb_threshold_mA", p.controller.I_T_th},
                        {"debounce_ticks", p.controller.debounce_ticks},
                        {"theta_T_P_rad", metadata.theta_T_P},
                        {"theta_I_L_fixed_rad", metadata.theta_I_L_fixed}};
  meta["geometry_hash"] = metadata.geometry_hash;

  ojson rows = ojson::array();
  for (const SuiteRow& r : report.rows) {
    ojson failures;
    for (int f = 1; f < kTrialFailureCount; ++f) {
      failures[std::string(to_string(static_cast<TrialFailure>(f)))] = r.failures[f];
    }
    rows.push_back({{"object", r.label},
                    {"shape", to_string(r.shape)},
                    {"width_mm", r.width},
                    {"material", r.material},
                    {"mass_g", r.mass},
                    {"condition", to_string(r.condition)},
                    {"trials", r.trials},
                    {"successes", r.successes},
                    {"success_rate", r.success_rate()},
                    {"mean_abs_w_error_mm", r.mean_abs_w_error},
                    {"failures", failures}});
  }

  ojson j;
  j["metadata"] = meta;
  j["rows"] = rows;
  if (trends) {
    ojson tj = ojson::array();
    for (const TrendRow& t : *trends) {
      ojson sim, ref;
      for (Condition c : kConditions) {
        sim[std::string(to_string(c))] = opt_json(t.sim_rates[index_of(c)]);
        ref[std::string(to_string(c))] = opt_json(t.ref_rates[index_of(c)]);
      }
      tj.push_back({{"object", t.label},
                    {"simulated", sim},
                    {"reference", ref},
                    {"sim_delta", opt_json(t.sim_delta)},
                    {"ref_delta", opt_json(t.ref_delta)},
                    {"agreement", t.agreement ? ojson(*t.agreement) : ojson()},
                    {"ref_source", t.source}});
    }
    j["trend"] = tj;
  }
  ojson cj = ojson::array();
  for (const TrendCheck& c : checks) {
    cj.push_back({{"id", c.id}, {"description", c.description}, {"status", to_string(c.status)}, {"detail", c.detail}});
  }
  j["checks"] = cj;
  return j.dump(2) + "\n";
}

}  // namespace plexus
