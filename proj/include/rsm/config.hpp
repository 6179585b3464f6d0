#pragma once

// JSON run configuration. Every object is validated against a fixed key set
// before any computation; unknown keys and wrong types raise a schema error
// naming the key path.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rsm/geometry.hpp"

namespace rsm {

struct ManifoldSpec {
    int dimension = 3;
    Family family = Family::euclidean;
    double curvature = -1.0;   ///< space_form
    double gamma = 2.0;        ///< power_exp
    double scale_b = 1.0;      ///< power_exp
    double r_max = 60.0;
    double eps0 = 0.1;
    Tolerances tolerances;
    /// custom family: CSV with columns r,phi,dphi,d2phi, or inline samples.
    std::string samples_file;
    CustomSamples samples;

    ModelManifold build() const;
};

Family parse_family(const std::string& s);

struct SpectrumParams {
    std::optional<double> exterior;   ///< radius R of M \ B_R
    bool ess = false;
};

struct GreenParams {
    std::string kind = "minimal";     ///< minimal | dirichlet | parabolic
    std::optional<double> radius;     ///< dirichlet ball radius (default r_max / 2)
};

struct PoissonParams {
    std::string source = "expdecay";  ///< power | expdecay | file
    double parameter = 1.0;           ///< alpha for power, rate for expdecay
    std::string file;                 ///< CSV with columns r,f
};

struct CriterionParams {
    std::string zeta = "power";       ///< power | constant
    double parameter = 1.5;           ///< alpha for power, c for constant
    int j0 = 2;
    int jmax = 40;
    std::string mode = "numerical";   ///< barta | numerical
};

struct SharpnessParams {
    double gamma = 2.0;
    double alpha_min = -0.3;
    double alpha_max = 0.3;
    double step = 0.05;
};

struct VerifyParams {
    std::string suite = "all";
};

struct OutputPaths {
    std::string json;
    std::string csv;
};

struct RunConfig {
    ManifoldSpec manifold;
    SpectrumParams spectrum;
    GreenParams green;
    PoissonParams poisson;
    CriterionParams criterion;
    SharpnessParams sharpness;
    VerifyParams verify;
    OutputPaths output;
    bool parallel = true;
};

/// Parses JSON text; relative file paths are resolved against base_dir.
RunConfig parse_config(std::string_view text, const std::string& base_dir = "");
RunConfig load_config(const std::string& path);

/// Reads a comma-separated numeric table with a header row.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
    const std::vector<double>& column(const std::string& name) const;
};

CsvTable read_csv_table(const std::string& path);

}  // namespace rsm
