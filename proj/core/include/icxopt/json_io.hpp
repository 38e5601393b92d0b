#pragma once

#include <string>

#include <json.hpp>

#include "icxopt/beating.hpp"
#include "icxopt/solver.hpp"

namespace icxopt {

// JSON encodings used by the CLI and golden files.  Parsing is strict:
// unknown object fields are rejected.
//
//   StepQuantile  {"breakpoints": [...], "values": [...]}
//   SdfModel      {"type": "lognormal", "mu": m, "sigma": s}
//                 {"type": "discrete", "quantile": {...}}
//   IcxProblem    {"sdf": {...}, "benchmark": {...}, "budget": x,
//                  "grid_size": n, "mode": "exact"|"gridded"}
// grid_size and mode are optional and default to 4096 / "exact".

nlohmann::json quantile_to_json(const StepQuantile& q);
StepQuantile quantile_from_json(const nlohmann::json& j);

nlohmann::json sdf_to_json(const SdfModel& m);
SdfModel sdf_from_json(const nlohmann::json& j);

nlohmann::json problem_to_json(const IcxProblem& p);
/// `extra_keys` lists additional top-level fields the caller will consume
/// (e.g. "target_mean" for the mean-variance solve).
IcxProblem problem_from_json(const nlohmann::json& j,
                             const std::vector<std::string>& extra_keys = {});

nlohmann::json solution_to_json(const IcxSolution& s);
IcxSolution solution_from_json(const nlohmann::json& j);

nlohmann::json frontier_to_json(const std::vector<FrontierPoint>& pts);

}  // namespace icxopt
