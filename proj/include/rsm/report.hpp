#pragma once

// JSON and CSV emission. JSON documents use insertion-ordered objects, carry
// schema_version, and serialize non-finite numbers as null, so identical
// inputs give byte-identical output.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "rsm/criterion.hpp"
#include "rsm/green.hpp"
#include "rsm/spectral.hpp"
#include "rsm/verify.hpp"

namespace rsm {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1.0.0";
inline constexpr const char* kToolVersion = "0.1.0";

/// A finite double, or null.
Json number(double x);

Json to_json(const ModelManifold& m);
Json to_json(const Tolerances& t);
Json to_json(const Classification& c);
Json to_json(const CurvatureScale& k);
Json to_json(const SlopeFit& f);
Json to_json(const SpectralEstimate& s);
Json to_json(const RadialSolution& s);
Json to_json(const DivergenceReport& d);
Json to_json(const VerdictEvidence& e);
Json to_json(const CriterionReport& r);
Json to_json(const ContainmentReport& r);
Json to_json(const SharpnessReport& r);
Json to_json(const TailAsymptoticReport& r);
Json to_json(const DonnellyReport& r);
Json to_json(const LevelSetBoundReport& r);
Json to_json(const ExponentialLowerReport& r);

/// Summary of a Green profile: kind, normalization, samples and flux checks.
Json green_summary(const GreenProfile& g);

/// Geometry overview: classification, volumes, curvature scales at R = 1, 2, 4, ...
Json manifold_info(const ModelManifold& m);

/// {"schema_version", "tool", "tool_version", "command", <payload keys>}.
Json envelope(const std::string& command, const Json& payload);

/// Two-space indented dump with a trailing newline.
std::string dump(const Json& j);

// ---------------------------------------------------------------------------
// CSV

struct CsvColumns {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
};

void write_csv(std::ostream& os, const CsvColumns& t);
CsvColumns to_csv(const RadialSamples& s, const std::string& value_name = "value");
CsvColumns to_csv(const CriterionReport& r);
CsvColumns to_csv(const SharpnessReport& r);
CsvColumns to_csv(const ContainmentReport& r);

// ---------------------------------------------------------------------------
// Verify suites

struct SuiteResult {
    Json report;
    bool pass = false;
    CsvColumns csv;   ///< sharpness points when the suite includes a sweep
};

/// sharpness, tail_asymptotic, donnelly, levelset, exponential_lower, containment.
const std::vector<std::string>& suite_names();

/// Runs one named suite or "all" on the built-in fixtures.
SuiteResult run_suite(const std::string& name, Exec exec = Exec::parallel);

}  // namespace rsm
