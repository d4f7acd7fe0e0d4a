#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "dyon/fixed_point.hpp"
#include "dyon/oracle.hpp"
#include "dyon/params.hpp"
#include "dyon/profile.hpp"
#include "dyon/verifier.hpp"

namespace dyon {

using json = nlohmann::json;

struct RunConfig {
    Parameters params;
    SolveOptions solver;
    bool oracle = false;
    FitWindow window;
    double verify_tol = 1e-6;
    std::string out_dir = "out";
};

// Strict parsing: unknown keys, wrong types and out-of-range overrides throw
// Error(Config). A top-level "derived" block is accepted and ignored so that
// params.json can be fed back in.
RunConfig parse_config(const json& j);
RunConfig load_config(const std::filesystem::path& path);

// Resolved configuration (defaults and radii filled in) plus the derived constants.
json params_json(const RunConfig& cfg, const DerivedConstants& c);

json to_json(const FixedPointTrace& t);
json to_json(const VerificationReport& r);
json to_json(const FieldGaps& g, double threshold);
json to_json(const ValidationResult& v);

// Columns r, the six fields, then their derivatives; 17 significant digits.
void write_profile_csv(const std::filesystem::path& path, const FieldProfile& p);
void write_json(const std::filesystem::path& path, const json& j);

// plotdata_fields.csv and plotdata_decay.csv. Reference lines have the
// predicted slope and pass through the quantity at the window start.
void emit_plot_data(const FieldProfile& p, const DerivedConstants& c, const std::filesystem::path& dir,
                    FitWindow window = {});

}  // namespace dyon
