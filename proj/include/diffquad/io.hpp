#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "diffquad/kernels.hpp"
#include "diffquad/operators.hpp"
#include "diffquad/quadrature.hpp"
#include "diffquad/spaces.hpp"

namespace diffquad::io {

using Json = nlohmann::json;

// Compact JSON with sorted keys and %.17g numbers; non-finite numbers are
// written as the strings "inf", "-inf", "nan".
std::string stable_dump(const Json& value);
// Reads a number written by stable_dump.
double number(const Json& value);

Json parse_file(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

EigenData eigendata_from_json(const Json& doc);
Json eigendata_to_json(const EigenData& data);
EigenData read_eigendata(const std::filesystem::path& path);

// { "points": [[coords...]], "weights": [...] }
PointMeasure measure_from_json(const Space& space, const Json& doc);
Json measure_to_json(const Space& space, const PointMeasure& nu);
PointMeasure read_measure(const Space& space, const std::filesystem::path& path);
void write_measure(const Space& space, const PointMeasure& nu, const std::filesystem::path& path);
// Header "index,x0,...,weight", one row per atom.
std::string measure_csv(const Space& space, const PointMeasure& nu);

// Node list from a measure file (weights optional) or a bare array of points.
std::vector<Point> nodes_from_json(const Space& space, const Json& doc);

// { "coefficients": [[k, value], ...] }, zero coefficients omitted.
SpectralFunction spectral_from_json(const Json& doc);
Json spectral_to_json(const SpectralFunction& f);

Json report_to_json(const QuadReport& report);
QuadReport report_from_json(const Json& doc);

inline constexpr const char* kSweepHeader = "n,wce,tv,reg_const,discrepancy";
std::string sweep_csv(std::span<const SweepRow> rows);

inline constexpr const char* kProfileHeader = "r,sup_abs,bound";
std::string profile_csv(const LocalizationProfile& profile);

}  // namespace diffquad::io
