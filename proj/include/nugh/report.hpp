#pragma once

// JSON serialization of fit, tail and check results. Key order is fixed and
// no timing or host data is written, so equal inputs give equal bytes.

#include <string>

#include <json.hpp>

#include "nugh/check_suite.hpp"
#include "nugh/fitting.hpp"
#include "nugh/inversion.hpp"
#include "nugh/version.hpp"

namespace nugh {

using Json = nlohmann::ordered_json;

inline Json toJson(const GHParams& p) {
  return Json{{"lambda", p.lambda}, {"alpha", p.alpha}, {"beta", p.beta}, {"delta", p.delta}, {"mu", p.mu}};
}

inline Json toJson(const FitResult& r) {
  return Json{{"family", r.family.name()},
              {"lambda", r.params.lambda},
              {"alpha", r.params.alpha},
              {"beta", r.params.beta},
              {"delta", r.params.delta},
              {"mu", r.params.mu},
              {"negLogLik", r.negLogLik},
              {"converged", r.converged},
              {"iterations", r.iterations},
              {"seed", r.seed},
              {"starts", r.starts},
              {"bestStart", r.bestStart},
              {"seedGrid", r.seedGrid}};
}

inline Json toJson(const TailReport& r) {
  return Json{{"side", r.side == TailSide::Left ? "left" : "right"},
              {"slope", r.slope},
              {"r2", r.r2},
              {"window", Json::array({r.window.first, r.window.second})},
              {"points", r.points}};
}

inline Json toJson(const CheckItem& i) {
  return Json{{"module", i.module},   {"name", i.name}, {"family", i.family}, {"value", i.value},
              {"tolerance", i.tolerance}, {"pass", i.pass}, {"detail", i.detail}};
}

inline Json toJson(const CheckReport& r) {
  Json items = Json::array();
  for (const auto& i : r.items) items.push_back(toJson(i));
  return Json{{"pass", r.pass()}, {"failures", r.failures()}, {"items", std::move(items)}};
}

/// Wraps a result with the library version, the command and its config.
inline Json reportEnvelope(const std::string& command, Json config, Json result) {
  return Json{{"library", "nugh"},
              {"version", kVersion},
              {"command", command},
              {"config", std::move(config)},
              {"result", std::move(result)}};
}

}  // namespace nugh
