#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "stochhawkes/diagnostics.hpp"
#include "stochhawkes/infer.hpp"
#include "stochhawkes/simulate.hpp"
#include "stochhawkes/types.hpp"

namespace stochhawkes::io {

/// Bad configuration: unknown, missing or malformed key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& message)
        : std::runtime_error(message), key_(std::move(key)) {}
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

using Config = std::map<std::string, std::string>;

/// Flat `key = value` text; `#` starts a comment. Keys are normalized ('-' becomes '_').
Config parse_config(std::string_view text, const std::string& origin = "config");
Config read_config(const std::filesystem::path& path);

std::string normalize_key(std::string_view key);

/// Shortest round-tripping decimal form.
std::string format_double(double v);
double parse_double(std::string_view text, const std::string& key);
std::uint64_t parse_uint(std::string_view text, const std::string& key);
bool parse_bool(std::string_view text, const std::string& key);

std::uint64_t fnv1a(std::string_view text);

// Event file: header `t`, one time per row.
void write_events(const std::filesystem::path& path, const EventSequence& events);
std::vector<double> read_event_times(const std::filesystem::path& path);

// Contagion file: header `t,y`.
void write_contagion(const std::filesystem::path& path, const EventSequence& events, std::span<const double> y);
struct ContagionFile {
    std::vector<double> times;
    std::vector<double> levels;
};
ContagionFile read_contagion(const std::filesystem::path& path);

// Intensity trace: header `t,lambda`.
void write_trace(const std::filesystem::path& path, std::span<const IntensitySample> trace);

// Chain file: `iter,a,lambda0,delta,<law params>,loglik`.
void write_chain(const std::filesystem::path& path, const Chain& chain);
/// Reads a chain file back (latent variables are not stored there).
Chain read_chain(const std::filesystem::path& path, SdeKind kind);

/// Latent sidecar: `iter,event,y,parent` rows; parent 0 marks an immigrant, j the j-th event.
void write_latent(const std::filesystem::path& path, const Chain& chain);

void write_summary(const std::filesystem::path& path, std::span<const ParameterSummary> summary);
void write_acceptance(const std::filesystem::path& path, const std::map<std::string, double>& rates);

/// Keys written by write_manifest that are not configuration.
bool is_reserved_manifest_key(std::string_view key);

/// Hash of the resolved configuration, stable across key order.
std::uint64_t config_hash(const Config& resolved);

/// key=value manifest: version, command, seed, config_hash, then every resolved key.
void write_manifest(const std::filesystem::path& path, std::string_view command, std::uint64_t seed,
                    const Config& resolved);

}  // namespace stochhawkes::io
