#pragma once

// The beltrami-lab command line as a library: spec files, catalog ids,
// subcommands and reports.

#include "beltrami/chart_diffeo.hpp"
#include "beltrami/expression.hpp"
#include "beltrami/family.hpp"
#include "beltrami/space_forms.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace beltrami {

inline constexpr const char* kSpecSchema = "beltrami-lab/spec-v1";
inline constexpr const char* kReportSchema = "beltrami-lab/report-v1";

// Exit codes.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitSpecError = 2;

struct MetricSpec {
  std::string name = "custom";  // catalog id or "custom"
  int dim = 0;
  Domain domain;
  std::vector<std::vector<Expression>> entries;  // custom only
  ParamMap params;
};

// Validated: symmetric and positive-definite at 16 probe points. Throws
// InputError otherwise.
ChartMetric build_metric(const MetricSpec& spec);

struct MapSpec {
  std::string name = "custom";
  int dim = 0;
  std::vector<Expression> components;
  ParamMap params;
};

ChartDiffeo build_map(const MapSpec& spec);

struct DeformationSpec {
  std::string name = "custom";
  MetricSpec base;
  std::vector<std::vector<Expression>> delta;
  std::vector<std::vector<Expression>> curve;  // optional g⁽ᵗ⁾ entries in t
  double t_max = 1.0;
};

DeformationFamily build_deformation(const DeformationSpec& spec);

struct RunOptions {
  int samples = 20;
  std::uint64_t seed = 1;
  std::optional<double> tol;  // subcommand default when unset
  double step = 1e-3;
};

// Parsed spec file. Sections missing from the file stay empty.
struct LabSpec {
  ParamMap params;
  std::optional<MetricSpec> metric;
  std::optional<MetricSpec> target;
  std::optional<MapSpec> map;
  std::optional<DeformationSpec> deformation;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<double> step;
};

// Throws InputError (ParseError for bad expressions).
LabSpec parse_spec(const std::string& text);
LabSpec load_spec(const std::string& path);

// Catalog ids:
//   metrics   euclidean:N, riemannian:C:N, gnomonic:T:N, sphere-uv,
//             conformal:A:N (e^{2A x1} δ)
//   families  gnomonic:T0:N and the shipped deformation fixtures
//   maps      identity, mobius-inversion, shear, homothety:C
MetricSpec catalog_metric_spec(const std::string& id);
ChartMetric catalog_metric(const std::string& id);
DeformationFamily catalog_family(const std::string& id);
ChartDiffeo catalog_map(const std::string& id, int dim);
// The space form behind a euclidean/riemannian id, if any.
std::optional<SpaceFormModel> catalog_space_form(const std::string& id);

struct LabInputs {
  std::optional<ChartMetric> metric;
  std::optional<SpaceFormModel> metric_form;
  std::optional<ChartMetric> target;
  std::optional<SpaceFormModel> target_form;
  std::optional<ChartDiffeo> map;
  std::optional<DeformationFamily> deformation;
};

struct CheckResult {
  std::string fixture;
  std::string name;
  double value = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct Quantity {
  std::string fixture;
  std::string name;
  double value = 0.0;
};

struct RunReport {
  std::string command;
  std::vector<std::string> fixtures;
  std::vector<CheckResult> checks;
  std::vector<Quantity> quantities;
  std::uint64_t seed = 0;
  int samples = 0;
  double step = 0.0;
  double wall_clock_s = 0.0;

  bool passed() const;
};

const std::vector<std::string>& subcommands();

// Throws InputError when the inputs do not fit the subcommand.
RunReport run_subcommand(const std::string& command, const LabInputs& inputs,
                         const RunOptions& options);

// json, csv or text. Timing is left out when include_timing is false.
std::string format_report(const RunReport& report, const std::string& format,
                          bool include_timing = true);

// Writes through a temporary file renamed into place.
void write_atomically(const std::string& path, const std::string& content);

// Full command line (without the program name). Returns the exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace beltrami
