#pragma once

#include <string>

#include "gpform/pipeline.hpp"
#include "gpform/polynomial.hpp"

namespace gpform {

struct ExportOptions {
  double sample_dt = 0.05;  // seconds between exported samples
  bool with_polynomials = false;
};

/// Write samples.csv, metrics.txt, plan.txt, trajectory.svg and timing.txt
/// (plus polynomials.txt on request) into `directory`. Everything except
/// timing.txt is byte-deterministic for a given scenario.
void export_result(const PipelineResult& result, const std::string& directory,
                   const ExportOptions& options = {});

std::string format_samples_csv(const PipelineResult& result, double sample_dt);
std::string format_metrics(const PipelineResult& result, double sample_dt);
std::string format_plan_report(const PipelineResult& result);
std::string format_timing(const StageTimes& stages, const SolveReport& report);
std::string format_svg(const PipelineResult& result, double sample_dt);
std::string format_polynomials(const PipelineResult& result);

/// Render one assignment matrix as integer rows, virtual slots as -1.
std::string format_assignment(const AssignmentMatrix& assignment);

}  // namespace gpform
