#pragma once

#include <filesystem>
#include <string_view>

#include "json.hpp"

#include "qzb/integrator.hpp"
#include "qzb/oracles.hpp"
#include "qzb/scenarios.hpp"

// JSON round-tripping of run settings. Readers reject unknown keys and
// wrongly typed values with ConfigError (tag `config_parse`); semantic
// problems surface through the validate() methods with their own tags.
namespace qzb {

using Json = nlohmann::ordered_json;

/// Throws ConfigError(`config_parse`) on malformed text.
Json parse_config(std::string_view text);
Json load_config(const std::filesystem::path& path);

Json to_json(const IntegratorOptions& o);
Json to_json(const TruncationPolicy& p);
Json to_json(const SweepSpec& s);
Json to_json(const DesignPoint& d);
Json to_json(const McOptions& o);
Json to_json(const PeakSearch& s);

/// Missing keys keep their defaults from `base`.
IntegratorOptions integrator_options_from_json(const Json& j,
                                               IntegratorOptions base = {});
TruncationPolicy truncation_policy_from_json(const Json& j,
                                             TruncationPolicy base = {});
/// `theta` is either an array or {"start", "stop", "count"}.
SweepSpec sweep_spec_from_json(const Json& j, SweepSpec base = {});
DesignPoint design_point_from_json(const Json& j, DesignPoint base = {});
McOptions mc_options_from_json(const Json& j, McOptions base = {});

} // namespace qzb
