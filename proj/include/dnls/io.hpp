#pragma once

// Run artifacts: binary snapshots, CSV observables, profile tables and the
// per-run manifest.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "dnls/solver.hpp"

namespace dnls {

struct ProfileState;  // analysis.hpp

// Binary snapshot: 64-byte header (magic "DNLS", u32 version, u32 N,
// u32 Nx, f64 L, f64 t, zero padding), then N*Nx little-endian complex
// doubles, component-major.
void write_snapshot(const FieldState& state, const std::string& path);
FieldState read_snapshot(const std::string& path);

// Locale-independent full-precision formatting (17 significant digits).
std::string format_double(double v);

void write_observables_csv(const std::vector<Observables>& samples,
                           const std::string& path);

std::uint64_t fnv1a64_file(const std::string& path);

struct RunManifest {
    std::string run_id;
    std::string config_hash;
    std::string code_version;
    std::string started_at;
    std::string finished_at;
    std::vector<std::pair<std::string, std::string>> files;  // name, checksum

    void add_file(const std::filesystem::path& dir, const std::string& name);
};

// Written last; every artifact in the run directory must be listed first.
void write_manifest(const RunManifest& manifest,
                    const std::filesystem::path& dir);

// Rescans the run directory and rewrites the manifest so that every file
// (except the manifest itself) is listed with a current checksum. Used by
// stages that add artifacts to an existing run.
void refresh_manifest(const std::filesystem::path& dir);

}  // namespace dnls
