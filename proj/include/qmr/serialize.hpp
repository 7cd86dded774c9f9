#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "qmr/chain_metric.hpp"
#include "qmr/cube_inequality.hpp"
#include "qmr/elevator.hpp"
#include "qmr/group_actions.hpp"
#include "qmr/hyperbolic.hpp"
#include "qmr/metric_core.hpp"
#include "qmr/metric_space.hpp"
#include "qmr/sphere_geometry.hpp"

namespace qmr {

using nlohmann::json;

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "1.0.0";

/// {"schema": 1, "kind": kind, "generator": provenance}; every file starts here.
json envelope(const std::string& kind, const json& provenance = json::object());

/// Throws ValidationError unless j carries a supported schema version.
void check_schema(const json& j);

std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

std::string read_file(const std::string& path);
/// Writes via a temporary file and rename.
void write_file(const std::string& path, const std::string& text);
json read_json(const std::string& path);
/// Pretty-printed with a trailing newline; doubles round-trip.
std::string dump(const json& j);

// Metric spaces. CSV: first line n, then n rows of n comma-separated distances.
std::string space_to_csv(const FiniteMetricSpace& space);
FiniteMetricSpace space_from_csv(const std::string& text, std::string label = "csv");
json space_to_json(const FiniteMetricSpace& space, const json& provenance = json::object());
FiniteMetricSpace space_from_json(const json& j);
/// Dispatches on the extension (.csv or .json).
FiniteMetricSpace load_space(const std::string& path);

json boundary_to_json(const BoundarySample& s, const json& provenance = json::object());
BoundarySample boundary_from_json(const json& j);
/// Gromov-product matrix as CSV: first line n, then n rows; diagonal "inf".
std::string boundary_to_csv(const BoundarySample& s);
BoundarySample boundary_from_csv(const std::string& text);
/// .csv by extension, JSON otherwise.
BoundarySample load_boundary(const std::string& path);

json model_to_json(const GroupActionModel& m, const json& provenance = json::object());

// Orbit files keep the sorted distances only (enough for N(r)).
json orbit_to_json(const OrbitBall& orbit);
OrbitBall orbit_from_json(const json& j);

// Report encoders.
json to_json(const DesnowflakeReport& r);
json to_json(const IterationLemmaReport& r);
json to_json(const LengthVolumeResult& r);
json to_json(const ChainCountMap& r);
/// Wall time is left out so reruns are byte-identical.
json to_json(const FuzzReport& r);
json to_json(const CubeCover& c);
json to_json(const SphereCube& c);
json to_json(const StereoSweep& s);
json to_json(const DeltaReport& r);
json to_json(const AcuReport& r);
json to_json(const VisualMetricReport& r, bool with_matrices = false);
json to_json(const EntropyEstimate& e);
json to_json(const BoundaryActionReport& r);
json to_json(const BoxCountFit& f);
json to_json(const ElevatorCertificate& c);
json to_json(const DistortionReport& r);
json to_json(const RegularityFit& r);
json to_json(const Mobius& g);

/// Flat CSV projection of a report (see plot_views()). Unknown views throw
/// ParameterError listing the available ones.
std::string emit_plot_data(const json& report, const std::string& view);
std::vector<std::string> plot_views();

}  // namespace qmr
