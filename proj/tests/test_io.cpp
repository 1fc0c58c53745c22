#include <doctest.h>

#include <labelkit/io.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace labelkit;

namespace {

// Fresh scratch directory per test case, removed on scope exit.
struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("labelkit_io_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("text files round trip and writes land atomically") {
    TempDir tmp;
    const fs::path target = tmp.path / "note.txt";
    const std::string content = "line one\nline two\nno trailing newline";

    write_text_file(target, content);
    CHECK(read_text_file(target) == content);

    // Overwrite must fully replace the previous content.
    write_text_file(target, "short");
    CHECK(read_text_file(target) == "short");

    // The temp sibling used for the atomic rename must not linger.
    std::size_t entries = 0;
    for (const auto& e : fs::directory_iterator(tmp.path)) {
        (void)e;
        ++entries;
    }
    CHECK(entries == 1);

    CHECK_THROWS_AS((void)read_text_file(tmp.path / "absent.txt"), std::runtime_error);
}

TEST_CASE("json files survive a save/load round trip") {
    TempDir tmp;
    const fs::path target = tmp.path / "blob.json";
    nlohmann::json j = {{"name", "disk"},
                        {"count", 42},
                        {"weights", {0.25, -1.5, 3.0}},
                        {"nested", {{"flag", true}}}};
    save_json(target, j);
    CHECK(load_json(target) == j);

    write_text_file(target, "{not json");
    CHECK_THROWS_AS((void)load_json(target), std::runtime_error);
}

TEST_CASE("points csv round trip is bit exact") {
    TempDir tmp;
    const fs::path target = tmp.path / "points.csv";

    std::mt19937_64 gen(321);
    std::uniform_real_distribution<double> dist(-1e6, 1e6);
    Eigen::MatrixXd points(37, 3);
    for (Eigen::Index r = 0; r < points.rows(); ++r)
        for (Eigen::Index c = 0; c < points.cols(); ++c)
            points(r, c) = dist(gen) * std::pow(10.0, (r % 13) - 6);
    // Values that commonly lose bits in careless formatting.
    points(0, 0) = 0.1;
    points(0, 1) = 1.0 / 3.0;
    points(0, 2) = -2.2250738585072014e-308;
    points(1, 0) = 1.7976931348623157e308;
    points(1, 1) = -0.0;
    points(1, 2) = 5e-324;

    write_points_csv(target, points);
    const Eigen::MatrixXd back = read_points_csv(target);
    REQUIRE(back.rows() == points.rows());
    REQUIRE(back.cols() == points.cols());
    for (Eigen::Index r = 0; r < points.rows(); ++r)
        for (Eigen::Index c = 0; c < points.cols(); ++c)
            CHECK(back(r, c) == points(r, c));

    const std::string text = read_text_file(target);
    CHECK(text.rfind("x0,x1,x2\n", 0) == 0);
}

TEST_CASE("points csv rejects malformed input") {
    TempDir tmp;
    const fs::path target = tmp.path / "bad.csv";

    write_text_file(target, "");
    CHECK_THROWS_AS((void)read_points_csv(target), std::runtime_error);

    write_text_file(target, "a,b\n1,2\n");
    CHECK_THROWS_AS((void)read_points_csv(target), std::runtime_error);

    write_text_file(target, "x0,x1\n1.0\n");
    CHECK_THROWS_AS((void)read_points_csv(target), std::runtime_error);

    write_text_file(target, "x0,x1\n1.0,banana\n");
    CHECK_THROWS_AS((void)read_points_csv(target), std::runtime_error);
}

TEST_CASE("membership csv round trips including empty lists") {
    TempDir tmp;
    const fs::path target = tmp.path / "membership.csv";

    const std::vector<std::vector<int>> per_point = {
        {0}, {}, {0, 1}, {2}, {}, {0, 1, 2},
    };
    write_membership_csv(target, per_point);
    CHECK(read_membership_csv(target) == per_point);

    const std::string text = read_text_file(target);
    CHECK(text == "point_index,label_ids\n0,0\n1,\n2,0;1\n3,2\n4,\n5,0;1;2\n");
}

TEST_CASE("membership csv rejects bad headers and broken indexing") {
    TempDir tmp;
    const fs::path target = tmp.path / "bad.csv";

    write_text_file(target, "index,labels\n0,\n");
    CHECK_THROWS_AS((void)read_membership_csv(target), std::runtime_error);

    // point_index must count up from zero without gaps.
    write_text_file(target, "point_index,label_ids\n0,\n2,1\n");
    CHECK_THROWS_AS((void)read_membership_csv(target), std::runtime_error);

    write_text_file(target, "point_index,label_ids\n0,zebra\n");
    CHECK_THROWS_AS((void)read_membership_csv(target), std::runtime_error);
}

TEST_CASE("membership_from_records inverts record member lists") {
    const std::vector<std::vector<int>> records = {{0, 2, 5}, {2, 3}, {5}};
    const std::vector<std::vector<int>> per_point = membership_from_records(records, 7);
    REQUIRE(per_point.size() == 7);
    CHECK(per_point[0] == std::vector<int>{0});
    CHECK(per_point[1].empty());
    CHECK(per_point[2] == std::vector<int>({0, 1}));
    CHECK(per_point[3] == std::vector<int>{1});
    CHECK(per_point[4].empty());
    CHECK(per_point[5] == std::vector<int>({0, 2}));
    CHECK(per_point[6].empty());

    CHECK_THROWS_AS((void)membership_from_records({{7}}, 7), std::out_of_range);
    CHECK_THROWS_AS((void)membership_from_records({{-1}}, 7), std::out_of_range);

    // Inversion composed with the csv writer matches a hand-written file.
    TempDir tmp;
    const fs::path target = tmp.path / "m.csv";
    write_membership_csv(target, per_point);
    CHECK(read_membership_csv(target) == per_point);
}
