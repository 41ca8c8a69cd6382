#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "dnls/io.hpp"

using namespace dnls;
namespace fs = std::filesystem;

namespace {
fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "dnls_io_tests";
    fs::create_directories(dir);
    return dir;
}
}  // namespace

TEST_CASE("snapshot round trip is bitwise exact") {
    const Grid1D grid = Grid1D::make(25.0, 64);
    FieldState state{3.25, grid, {}};
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    state.values.assign(2, std::vector<cplx>(grid.nx));
    for (auto& comp : state.values)
        for (cplx& v : comp) v = cplx{dist(rng), dist(rng)};

    const fs::path path = temp_dir() / "roundtrip.bin";
    write_snapshot(state, path.string());
    const FieldState back = read_snapshot(path.string());
    CHECK(back.t == state.t);
    CHECK(back.grid == state.grid);
    CHECK(back.values == state.values);
    fs::remove(path);
}

TEST_CASE("corrupted snapshots are rejected") {
    const fs::path path = temp_dir() / "bad.bin";
    std::ofstream(path, std::ios::binary) << "not a snapshot";
    CHECK_THROWS(read_snapshot(path.string()));
    fs::remove(path);
}

TEST_CASE("doubles survive the text format exactly") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> dist(-1e10, 1e10);
    for (int i = 0; i < 200; ++i) {
        const double v = dist(rng) * std::pow(10.0, i % 21 - 10);
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.1) == "0.10000000000000001");
}

TEST_CASE("fnv1a64 matches the reference vectors") {
    const fs::path path = temp_dir() / "hash.txt";
    std::ofstream(path, std::ios::binary) << "a";
    CHECK(fnv1a64_file(path.string()) == 0xaf63dc4c8601ec8cULL);
    std::ofstream(path, std::ios::binary) << "foobar";
    CHECK(fnv1a64_file(path.string()) == 0x85944171f73967e8ULL);
    fs::remove(path);
}

TEST_CASE("observables csv layout") {
    Observables a;
    a.t = 0.5;
    a.l2 = {1.0, 2.0};
    a.linf = {0.25, 0.5};
    a.w1inf = {0.75, 1.5};
    const fs::path path = temp_dir() / "obs.csv";
    write_observables_csv({a}, path.string());
    std::ifstream in(path);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "t,l2_1,linf_1,w1inf_1,l2_2,linf_2,w1inf_2");
    CHECK(row == "0.5,1,0.25,0.75,2,0.5,1.5");
    fs::remove(path);
}

TEST_CASE("manifest refresh lists every file with matching checksums") {
    const fs::path dir = temp_dir() / "run";
    fs::create_directories(dir);
    std::ofstream(dir / "a.txt") << "alpha";
    RunManifest manifest;
    manifest.run_id = "test";
    manifest.add_file(dir, "a.txt");
    write_manifest(manifest, dir);

    std::ofstream(dir / "b.txt") << "beta";  // added after the fact
    refresh_manifest(dir);
    std::ifstream in(dir / "manifest.json");
    const std::string text((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    CHECK(text.find("a.txt") != std::string::npos);
    CHECK(text.find("b.txt") != std::string::npos);
    CHECK(text.find("\"run_id\": \"test\"") != std::string::npos);
    fs::remove_all(dir);
}
