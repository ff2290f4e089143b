#pragma once

#include <pobounds/estimate.hpp>
#include <pobounds/serialize.hpp>

#include <optional>
#include <string>

namespace pobounds::cli {

// A data file is either raw records (CSV) or a pre-aggregated distribution
// (JSON matrix). Only raw records can be bootstrapped.
struct ExperimentalInput {
    ExperimentalMarginals distribution;
    std::optional<ExperimentalSample> sample;
};

struct ObservationalInput {
    ObservationalJoint distribution;
    std::optional<ObservationalSample> sample;
};

std::string read_file(const std::string& path);
Json read_json_file(const std::string& path);

// Header "arm,y"; one record per line. Errors name the 1-based data row.
ExperimentalSample parse_experimental_csv(const std::string& text, const Dims& dims);
// Header "x,y"; one record per line.
ObservationalSample parse_observational_csv(const std::string& text, const Dims& dims);

ExperimentalInput load_experimental(const std::string& path, const Dims& dims);
ObservationalInput load_observational(const std::string& path, const Dims& dims);

// "3,3" -> Dims(3, 3).
Dims parse_dims_flag(const std::string& text);

// Inline JSON (starting with '{' or '"'), a path to a JSON file, or a bare
// preset name. Returned as JSON so reports can echo it verbatim.
Json load_assumption_spec(const std::string& text);
// Inline JSON or a path to a JSON file.
Json load_query_spec(const std::string& text);

}  // namespace pobounds::cli
