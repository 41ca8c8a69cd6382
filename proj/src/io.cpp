#include "dnls/io.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace dnls {

static_assert(std::endian::native == std::endian::little,
              "snapshot format assumes a little-endian host");

namespace {
constexpr char kMagic[4] = {'D', 'N', 'L', 'S'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderSize = 64;
}  // namespace

void write_snapshot(const FieldState& state, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write snapshot: " + path);
    char header[kHeaderSize] = {};
    std::memcpy(header, kMagic, 4);
    const std::uint32_t version = kVersion;
    const std::uint32_t n = state.n_components();
    const std::uint32_t nx = state.grid.nx;
    std::memcpy(header + 4, &version, 4);
    std::memcpy(header + 8, &n, 4);
    std::memcpy(header + 12, &nx, 4);
    std::memcpy(header + 16, &state.grid.length, 8);
    std::memcpy(header + 24, &state.t, 8);
    out.write(header, kHeaderSize);
    for (const auto& comp : state.values)
        out.write(reinterpret_cast<const char*>(comp.data()),
                  sizeof(cplx) * comp.size());
    if (!out) throw std::runtime_error("short write on snapshot: " + path);
}

FieldState read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open snapshot: " + path);
    char header[kHeaderSize];
    in.read(header, kHeaderSize);
    if (!in || std::memcmp(header, kMagic, 4) != 0)
        throw std::runtime_error("bad snapshot header: " + path);
    std::uint32_t version, n, nx;
    double length, t;
    std::memcpy(&version, header + 4, 4);
    std::memcpy(&n, header + 8, 4);
    std::memcpy(&nx, header + 12, 4);
    std::memcpy(&length, header + 16, 8);
    std::memcpy(&t, header + 24, 8);
    if (version != kVersion)
        throw std::runtime_error("unsupported snapshot version");
    FieldState state{t, Grid1D::make(length, static_cast<int>(nx)), {}};
    state.values.assign(n, std::vector<cplx>(nx));
    for (auto& comp : state.values) {
        in.read(reinterpret_cast<char*>(comp.data()), sizeof(cplx) * nx);
        if (!in) throw std::runtime_error("truncated snapshot: " + path);
    }
    return state;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_observables_csv(const std::vector<Observables>& samples,
                           const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write: " + path);
    const int n = samples.empty() ? 0 : static_cast<int>(samples[0].l2.size());
    out << "t";
    for (int j = 1; j <= n; ++j)
        out << ",l2_" << j << ",linf_" << j << ",w1inf_" << j;
    const bool has_j = !samples.empty() && !samples.back().j_l2.empty();
    if (has_j)
        for (int j = 1; j <= n; ++j) out << ",j_l2_" << j;
    out << "\n";
    for (const Observables& s : samples) {
        out << format_double(s.t);
        for (int j = 0; j < n; ++j)
            out << "," << format_double(s.l2[j]) << ","
                << format_double(s.linf[j]) << "," << format_double(s.w1inf[j]);
        if (has_j)
            for (int j = 0; j < n; ++j)
                out << ","
                    << (j < static_cast<int>(s.j_l2.size())
                            ? format_double(s.j_l2[j])
                            : std::string("nan"));
        out << "\n";
    }
}

std::uint64_t fnv1a64_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot hash: " + path);
    std::uint64_t hash = 14695981039346656037ULL;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize got = in.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            hash ^= static_cast<unsigned char>(buf[i]);
            hash *= 1099511628211ULL;
        }
        if (!in) break;
    }
    return hash;
}

void RunManifest::add_file(const std::filesystem::path& dir,
                           const std::string& name) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(
                      fnv1a64_file((dir / name).string())));
    files.emplace_back(name, buf);
}

void write_manifest(const RunManifest& manifest,
                    const std::filesystem::path& dir) {
    nlohmann::json j;
    j["run_id"] = manifest.run_id;
    j["config_hash"] = manifest.config_hash;
    j["code_version"] = manifest.code_version;
    j["started_at"] = manifest.started_at;
    j["finished_at"] = manifest.finished_at;
    j["files"] = nlohmann::json::array();
    for (const auto& [name, checksum] : manifest.files)
        j["files"].push_back({{"name", name}, {"checksum", checksum}});
    std::ofstream out(dir / "manifest.json");
    if (!out) throw std::runtime_error("cannot write manifest");
    out << j.dump(2) << "\n";
}

void refresh_manifest(const std::filesystem::path& dir) {
    const std::filesystem::path path = dir / "manifest.json";
    nlohmann::json j;
    {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("no manifest in " + dir.string());
        in >> j;
    }
    RunManifest manifest;
    manifest.run_id = j.value("run_id", std::string{});
    manifest.config_hash = j.value("config_hash", std::string{});
    manifest.code_version = j.value("code_version", std::string{});
    manifest.started_at = j.value("started_at", std::string{});
    manifest.finished_at = j.value("finished_at", std::string{});
    std::vector<std::string> names;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name != "manifest.json") names.push_back(name);
    }
    std::sort(names.begin(), names.end());
    for (const std::string& name : names) manifest.add_file(dir, name);
    write_manifest(manifest, dir);
}

}  // namespace dnls
