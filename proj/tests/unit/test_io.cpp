#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "boomerang/datasets.hpp"
#include "boomerang/errors.hpp"
#include "boomerang/io.hpp"

using namespace bmk;

namespace {

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(is), {});
}

}  // namespace

TEST_CASE("format_double renders round-trip decimals") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5e-8) == "-2.5e-08");
    CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("csv round trip and byte determinism") {
    const auto path = temp_file("bmk_test.csv");
    const std::vector<std::string> header{"a", "b"};
    const std::vector<std::vector<double>> rows{{1.5, -2.0}, {0.1, 1e-9}};
    write_csv(path, header, rows);
    const std::string bytes1 = slurp(path);
    write_csv(path, header, rows);
    CHECK(bytes1 == slurp(path));

    const CsvTable table = read_csv(path);
    CHECK(table.header == header);
    CHECK(table.rows == rows);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(write_csv(path, {}, rows), ValidationError);
    CHECK_THROWS_AS(write_csv(path, {"a"}, rows), ValidationError);
}

TEST_CASE("read_csv rejects malformed numbers") {
    const auto path = temp_file("bmk_bad.csv");
    {
        std::ofstream os(path);
        os << "a,b\n1.0,oops\n";
    }
    CHECK_THROWS_AS(read_csv(path), ValidationError);
    std::filesystem::remove(path);
}

TEST_CASE("pgm round trip with clamping") {
    const auto path = temp_file("bmk_test.pgm");
    std::vector<double> img(16 * 8);
    for (std::size_t i = 0; i < img.size(); ++i)
        img[i] = static_cast<double>(i) / (img.size() - 1);
    img[0] = -0.5;  // clamps to 0
    img[1] = 1.5;   // clamps to 1
    write_pgm(path, img, 16, 8);
    int w = 0, h = 0;
    const auto back = read_pgm(path, &w, &h);
    CHECK(w == 16);
    CHECK(h == 8);
    CHECK(back[0] == 0.0);
    CHECK(back[1] == 1.0);
    for (std::size_t i = 2; i < img.size(); ++i)
        CHECK(std::abs(back[i] - img[i]) <= 0.5 / 255.0 + 1e-12);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(write_pgm(path, img, 3, 3), ValidationError);
}

TEST_CASE("schedule spec json round trip") {
    ScheduleSpec spec;
    spec.T = 100;
    spec.beta_min = 1e-4;
    spec.beta_max = 0.02;
    const std::string text = schedule_spec_to_json(spec);
    const ScheduleSpec back = schedule_spec_from_json(text);
    CHECK(back.T == 100);
    CHECK(back.beta_min == 1e-4);
    CHECK(back.beta_max == 0.02);
    CHECK(back.kind == "linear");

    const NoiseSchedule sched = back.build_base();
    CHECK(!back.build_stride_for(sched).has_value());

    ScheduleSpec strided = spec;
    strided.kind = "stride";
    strided.stride_steps = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    const ScheduleSpec sback = schedule_spec_from_json(schedule_spec_to_json(strided));
    const auto stride = sback.build_stride_for(sched);
    REQUIRE(stride.has_value());
    CHECK(stride->n_steps() == 10);

    CHECK_THROWS_AS(schedule_spec_from_json("{"), ValidationError);
    CHECK_THROWS_AS(schedule_spec_from_json("{\"T\": 10}"), ValidationError);
    ScheduleSpec bad = spec;
    bad.kind = "cosine";
    CHECK_THROWS_AS(bad.build_stride_for(sched), ValidationError);
}

TEST_CASE("gmm json round trip") {
    const GaussianMixture g = gmm2_mixture();
    const auto path = temp_file("bmk_gmm.json");
    save_gmm(path, g);
    const GaussianMixture back = load_gmm(path);
    CHECK(back.weights == g.weights);
    CHECK(back.means == g.means);
    CHECK(back.variances == g.variances);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(gmm_from_json("{\"weights\":[2.0],\"means\":[[0]],\"variances\":[1]}"),
                    ValidationError);
    CHECK_THROWS_AS(load_gmm(temp_file("bmk_missing_gmm.json")), ValidationError);
}
