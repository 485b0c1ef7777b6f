#include "reglab/report.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace reglab {

using nlohmann::json;

namespace {

const char* estimator_name(GapReport::Estimator e) {
  return e == GapReport::Estimator::exact ? "exact" : "validation";
}

GapReport::Estimator parse_estimator(const std::string& name) {
  if (name == "exact") return GapReport::Estimator::exact;
  if (name == "validation") return GapReport::Estimator::validation;
  throw std::invalid_argument("report: unknown estimator '" + name + "'");
}

json gap_to_json(const GapRecord& record) {
  json out;
  out["estimator"] = estimator_name(record.report.estimator);
  out["train_loss"] = record.report.train_loss;
  out["eval_loss"] = record.report.eval_loss;
  out["gap"] = record.report.gap;
  out["seed"] = record.seed;
  out["label"] = record.label;
  return out;
}

GapRecord gap_from_json(const json& v) {
  GapRecord record;
  record.report.estimator = parse_estimator(v.at("estimator").get<std::string>());
  record.report.train_loss = v.at("train_loss").get<double>();
  record.report.eval_loss = v.at("eval_loss").get<double>();
  record.report.gap = v.at("gap").get<double>();
  record.seed = v.at("seed").get<std::uint64_t>();
  record.label = v.at("label").get<std::string>();
  return record;
}

json equivalence_to_json(const EquivalenceReport& r) {
  json out;
  out["claim"] = r.claim;
  out["discrepancy"] = r.discrepancy;
  out["tolerance"] = r.tolerance;
  out["pass"] = r.pass;
  out["sample_count"] = r.sample_count;
  out["standard_error"] = r.standard_error;
  out["seed"] = r.seed;
  out["detail"] = r.detail;
  return out;
}

EquivalenceReport equivalence_from_json(const json& v) {
  EquivalenceReport r;
  r.claim = v.at("claim").get<std::string>();
  r.discrepancy = v.at("discrepancy").get<double>();
  r.tolerance = v.at("tolerance").get<double>();
  r.pass = v.at("pass").get<bool>();
  r.sample_count = v.at("sample_count").get<std::size_t>();
  r.standard_error = v.at("standard_error").get<double>();
  r.seed = v.at("seed").get<std::uint64_t>();
  r.detail = v.at("detail").get<std::string>();
  return r;
}

json report_to_json(const RunReport& report) {
  json out;
  out["schema_version"] = kReportSchemaVersion;
  out["artifact_version"] = kArtifactVersion;
  out["subcommand"] = report.subcommand;
  out["config"] = json::parse(emit_config(report.config));
  out["seed"] = report.config.train.seed;
  out["trajectory"] = report.trajectory;
  json gaps = json::array();
  for (const auto& g : report.gaps) gaps.push_back(gap_to_json(g));
  out["gaps"] = std::move(gaps);
  json eqs = json::array();
  for (const auto& e : report.equivalences) eqs.push_back(equivalence_to_json(e));
  out["equivalences"] = std::move(eqs);
  out["notes"] = report.notes;
  json runs = json::array();
  for (const auto& child : report.runs) runs.push_back(report_to_json(child));
  out["runs"] = std::move(runs);
  return out;
}

RunReport report_from_json(const json& v) {
  RunReport report;
  report.subcommand = v.at("subcommand").get<std::string>();
  report.config = parse_config(v.at("config").dump());
  report.trajectory = v.at("trajectory").get<std::vector<double>>();
  for (const auto& g : v.at("gaps")) report.gaps.push_back(gap_from_json(g));
  for (const auto& e : v.at("equivalences")) {
    report.equivalences.push_back(equivalence_from_json(e));
  }
  report.notes = v.at("notes").get<std::vector<std::string>>();
  for (const auto& child : v.at("runs")) report.runs.push_back(report_from_json(child));
  return report;
}

std::string format_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void emit_csv_rows(const RunReport& report, const std::string& run_id, std::string& out) {
  const std::string seed = std::to_string(report.config.train.seed);
  auto row = [&](const std::string& metric, std::size_t step, double value) {
    out += run_id + "," + seed + "," + metric + "," + std::to_string(step) + "," +
           format_value(value) + "\n";
  };
  for (std::size_t e = 0; e < report.trajectory.size(); ++e) {
    row("epoch_loss", e, report.trajectory[e]);
  }
  for (std::size_t i = 0; i < report.gaps.size(); ++i) {
    row("train_loss", i, report.gaps[i].report.train_loss);
    row("eval_loss", i, report.gaps[i].report.eval_loss);
    row("gap", i, report.gaps[i].report.gap);
  }
  for (std::size_t i = 0; i < report.equivalences.size(); ++i) {
    const auto& eq = report.equivalences[i];
    row(eq.claim + ".discrepancy", i, eq.discrepancy);
    row(eq.claim + ".tolerance", i, eq.tolerance);
    row(eq.claim + ".pass", i, eq.pass ? 1.0 : 0.0);
  }
  for (std::size_t c = 0; c < report.runs.size(); ++c) {
    emit_csv_rows(report.runs[c], run_id + "." + std::to_string(c), out);
  }
}

}  // namespace

std::string emit_report(const RunReport& report, ReportFormat format) {
  if (format == ReportFormat::json) {
    return report_to_json(report).dump(2) + "\n";
  }
  std::string out = "run_id,seed,metric,step,value\n";
  emit_csv_rows(report, "run", out);
  return out;
}

void write_report(const RunReport& report, const std::string& path, ReportFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write report file: " + path);
  }
  out << emit_report(report, format);
  if (!out) {
    throw std::runtime_error("failed writing report file: " + path);
  }
}

RunReport parse_report_json(const std::string& text) {
  return report_from_json(json::parse(text));
}

bool all_verifications_pass(const RunReport& report) {
  for (const auto& eq : report.equivalences) {
    if (!eq.pass) return false;
  }
  for (const auto& child : report.runs) {
    if (!all_verifications_pass(child)) return false;
  }
  return true;
}

}  // namespace reglab
