#pragma once

#include <string>
#include <vector>

#include "reglab/config.hpp"
#include "reglab/experiment.hpp"

namespace reglab {

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

struct GapRecord {
  GapReport report;
  std::uint64_t seed = 0;
  std::string label;

  bool operator==(const GapRecord&) const = default;
};

struct RunReport {
  std::string subcommand;
  ExperimentConfig config;  // resolved echo, carries the effective seed
  std::vector<double> trajectory;
  std::vector<GapRecord> gaps;
  std::vector<EquivalenceReport> equivalences;
  std::vector<std::string> notes;
  std::vector<RunReport> runs;  // sweep children

  bool operator==(const RunReport&) const = default;
};

enum class ReportFormat { json, csv };

// Deterministic: equal reports serialize to identical bytes. Timing and
// other volatile diagnostics belong on the error stream, not in here.
std::string emit_report(const RunReport& report, ReportFormat format);
void write_report(const RunReport& report, const std::string& path, ReportFormat format);

RunReport parse_report_json(const std::string& text);

bool all_verifications_pass(const RunReport& report);

}  // namespace reglab
