#include "boomerang/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "boomerang/errors.hpp"

namespace bmk {

using nlohmann::json;

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    if (header.empty()) throw ValidationError("write_csv: header row is mandatory");
    std::ofstream os(path, std::ios::binary);  // binary: byte-stable line endings
    if (!os) throw ValidationError("write_csv: cannot open " + path.string());
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) os << ',';
        os << header[i];
    }
    os << '\n';
    for (const auto& row : rows) {
        if (row.size() != header.size())
            throw ValidationError("write_csv: row width does not match header");
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            os << format_double(row[i]);
        }
        os << '\n';
    }
    if (!os) throw ValidationError("write_csv: write failed: " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("read_csv: cannot open " + path.string());
    CsvTable table;
    std::string line;
    if (!std::getline(is, line)) throw ValidationError("read_csv: missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) table.header.push_back(cell);
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t start = 0;
        while (start <= line.size()) {
            std::size_t end = line.find(',', start);
            if (end == std::string::npos) end = line.size();
            double v = 0.0;
            const auto res = std::from_chars(line.data() + start, line.data() + end, v);
            if (res.ec != std::errc{} || res.ptr != line.data() + end)
                throw ValidationError("read_csv: bad number in " + path.string() + ": '" +
                                      line.substr(start, end - start) + "'");
            row.push_back(v);
            start = end + 1;
        }
        if (row.size() != table.header.size())
            throw ValidationError("read_csv: ragged row in " + path.string());
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_pgm(const std::filesystem::path& path, const std::vector<double>& pixels,
               int width, int height) {
    if (width < 1 || height < 1 ||
        pixels.size() != static_cast<std::size_t>(width) * height)
        throw ValidationError("write_pgm: pixel count does not match dimensions");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("write_pgm: cannot open " + path.string());
    os << "P5\n" << width << ' ' << height << "\n255\n";
    for (double p : pixels) {
        const double c = std::clamp(p, 0.0, 1.0);
        os.put(static_cast<char>(static_cast<unsigned char>(std::lround(c * 255.0))));
    }
    if (!os) throw ValidationError("write_pgm: write failed: " + path.string());
}

std::vector<double> read_pgm(const std::filesystem::path& path, int* width, int* height) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("read_pgm: cannot open " + path.string());
    std::string magic;
    is >> magic;
    if (magic != "P5") throw ValidationError("read_pgm: not a binary PGM: " + path.string());
    int w = 0, h = 0, maxval = 0;
    is >> w >> h >> maxval;
    if (!is || w < 1 || h < 1 || maxval != 255)
        throw ValidationError("read_pgm: unsupported header in " + path.string());
    is.get();  // single whitespace after maxval
    std::vector<double> pixels(static_cast<std::size_t>(w) * h);
    for (double& p : pixels) {
        const int c = is.get();
        if (c == EOF) throw ValidationError("read_pgm: truncated data in " + path.string());
        p = static_cast<double>(c) / 255.0;
    }
    if (width) *width = w;
    if (height) *height = h;
    return pixels;
}

NoiseSchedule ScheduleSpec::build_base() const {
    return build_linear(T, beta_min, beta_max);
}

std::optional<StrideSchedule> ScheduleSpec::build_stride_for(const NoiseSchedule& base) const {
    if (kind == "linear") return std::nullopt;
    if (kind != "stride") throw ValidationError("ScheduleSpec: unknown kind '" + kind + "'");
    if (stride_steps.empty())
        throw ValidationError("ScheduleSpec: kind 'stride' requires stride_steps");
    return StrideSchedule(base, stride_steps);
}

std::string schedule_spec_to_json(const ScheduleSpec& spec) {
    json j;
    j["T"] = spec.T;
    j["beta_min"] = spec.beta_min;
    j["beta_max"] = spec.beta_max;
    j["kind"] = spec.kind;
    if (spec.kind == "stride") j["stride_steps"] = spec.stride_steps;
    return j.dump(2) + "\n";
}

ScheduleSpec schedule_spec_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("schedule spec: invalid JSON: ") + e.what());
    }
    ScheduleSpec spec;
    try {
        spec.T = j.at("T").get<int>();
        spec.beta_min = j.at("beta_min").get<double>();
        spec.beta_max = j.at("beta_max").get<double>();
        spec.kind = j.value("kind", std::string("linear"));
        if (j.contains("stride_steps"))
            spec.stride_steps = j["stride_steps"].get<std::vector<int>>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("schedule spec: ") + e.what());
    }
    return spec;
}

ScheduleSpec load_schedule_spec(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open schedule spec: " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return schedule_spec_from_json(ss.str());
}

void save_schedule_spec(const std::filesystem::path& path, const ScheduleSpec& spec) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot write schedule spec: " + path.string());
    os << schedule_spec_to_json(spec);
}

std::string gmm_to_json(const GaussianMixture& gmm) {
    json j;
    j["weights"] = gmm.weights;
    j["means"] = gmm.means;
    j["variances"] = gmm.variances;
    return j.dump(2) + "\n";
}

GaussianMixture gmm_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("gmm spec: invalid JSON: ") + e.what());
    }
    GaussianMixture gmm;
    try {
        gmm.weights = j.at("weights").get<std::vector<double>>();
        gmm.means = j.at("means").get<std::vector<std::vector<double>>>();
        gmm.variances = j.at("variances").get<std::vector<double>>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("gmm spec: ") + e.what());
    }
    gmm.validate();
    return gmm;
}

GaussianMixture load_gmm(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open gmm spec: " + path.string());
    std::stringstream ss;
    ss << is.rdbuf();
    return gmm_from_json(ss.str());
}

void save_gmm(const std::filesystem::path& path, const GaussianMixture& gmm) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot write gmm spec: " + path.string());
    os << gmm_to_json(gmm);
}

}  // namespace bmk
