#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "shelab/diagnostics/audits.hpp"
#include "shelab/diagnostics/ledger.hpp"
#include "shelab/experiments/ensemble.hpp"
#include "shelab/models/conditions.hpp"
#include "shelab/spde/simulate.hpp"

namespace shelab::io {

using Json = nlohmann::ordered_json;

/// Shortest decimal that parses back to the same double; "inf", "-inf",
/// "nan" for non-finite values. Locale independent.
std::string format_double(double x);
/// Inverse of format_double. Throws ConfigError on junk.
double parse_double(std::string_view s);

/// Numbers as JSON; non-finite values become strings.
Json number(double x);
double number_from(const Json& j);

Json to_json(const models::ModelSpec& s);
models::ModelSpec model_spec_from_json(const Json& j);
Json to_json(const spde::SolverConfig& c);
spde::SolverConfig solver_config_from_json(const Json& j);

Json to_json(const models::OsgoodVerdict& v);
Json to_json(const models::AssumptionReport& r);
Json to_json(const models::CorollaryReport& r);
Json to_json(const diagnostics::Classification& c);
Json to_json(const diagnostics::StoppingRecord& r);
Json to_json(const diagnostics::BoundCheck& b);
Json to_json(const diagnostics::DoobRow& r);
Json to_json(const diagnostics::MomentProbe& p);
Json to_json(const diagnostics::TriplingSummary& s);
Json to_json(const diagnostics::WindowCheck& w);
Json to_json(const spde::TrajectoryHeader& h);
Json to_json(const experiments::ExperimentSpec& s);
Json to_json(const experiments::ExperimentResult& r);

std::string sha256_hex(std::string_view data);

/// SHA-256 of the canonical (key-sorted, compact) JSON form.
std::string canonical_hash(const Json& j);
std::string spec_hash(const experiments::ExperimentSpec& s);

/// beta, gamma, A, R, explosions, survivals, inconclusive, freq, ci-lo,
/// ci-hi, median-t*, regime. Missing medians are written as "nan".
std::string to_csv(const experiments::ExperimentResult& r);

}  // namespace shelab::io
