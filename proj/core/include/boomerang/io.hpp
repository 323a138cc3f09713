#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "boomerang/gmm.hpp"
#include "boomerang/schedule.hpp"

namespace bmk {

// Shortest round-trip decimal rendering (std::to_chars); the same value
// always renders to the same bytes, which is what makes CSV artifacts
// byte-reproducible.
std::string format_double(double v);

// CSV: comma separators, '.' decimal point, mandatory header row, "\n" line
// endings.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

// Binary PGM (P5), 8-bit, row-major; values clamped from [0, 1] to 0..255.
void write_pgm(const std::filesystem::path& path, const std::vector<double>& pixels,
               int width, int height);
std::vector<double> read_pgm(const std::filesystem::path& path, int* width, int* height);

// JSON schedule spec:
//   {"T":..., "beta_min":..., "beta_max":..., "kind":"linear"|"stride",
//    "stride_steps":[...]}
struct ScheduleSpec {
    std::string kind = "linear";
    int T = 1000;
    double beta_min = 1e-4;
    double beta_max = 0.02;
    std::vector<int> stride_steps;  // required iff kind == "stride"

    NoiseSchedule build_base() const;
    std::optional<StrideSchedule> build_stride_for(const NoiseSchedule& base) const;
};

std::string schedule_spec_to_json(const ScheduleSpec& spec);
ScheduleSpec schedule_spec_from_json(const std::string& text);
ScheduleSpec load_schedule_spec(const std::filesystem::path& path);
void save_schedule_spec(const std::filesystem::path& path, const ScheduleSpec& spec);

// JSON mixture spec: {"weights":[...], "means":[[...],...], "variances":[...]}
std::string gmm_to_json(const GaussianMixture& gmm);
GaussianMixture gmm_from_json(const std::string& text);
GaussianMixture load_gmm(const std::filesystem::path& path);
void save_gmm(const std::filesystem::path& path, const GaussianMixture& gmm);

}  // namespace bmk
