#include "stochhawkes/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace stochhawkes::io {

namespace {

constexpr std::string_view kVersion = "0.1.0";

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    }
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::invalid_argument("cannot open " + path.string());
    }
    return in;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        fields.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

double parse_field(std::string_view text, const std::filesystem::path& path, std::size_t line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw std::invalid_argument(path.string() + ":" + std::to_string(line) + ": not a number: '" +
                                    std::string(text) + "'");
    }
    return v;
}

/// Reads a CSV with the given header; returns numeric rows.
std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path,
                                                  const std::vector<std::string>& header) {
    auto in = open_in(path);
    std::string line;
    std::size_t number = 0;
    bool seen_header = false;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        if (!seen_header) {
            std::vector<std::string> got(fields.begin(), fields.end());
            if (got != header) {
                std::string expected;
                for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
                throw std::invalid_argument(path.string() + ": expected header '" + expected + "'");
            }
            seen_header = true;
            continue;
        }
        if (fields.size() != header.size()) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(number) + ": expected " +
                                        std::to_string(header.size()) + " fields");
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (auto f : fields) row.push_back(parse_field(f, path, number));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace

std::string normalize_key(std::string_view key) {
    std::string out(trim(key));
    std::replace(out.begin(), out.end(), '-', '_');
    return out;
}

Config parse_config(std::string_view text, const std::string& origin) {
    Config config;
    std::size_t number = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        const auto body = trim(std::string_view(line).substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            const auto key = normalize_key(body);
            throw ConfigError(key, origin + ":" + std::to_string(number) + ": expected key=value for '" + key + "'");
        }
        const auto key = normalize_key(body.substr(0, eq));
        if (key.empty()) {
            throw ConfigError(key, origin + ":" + std::to_string(number) + ": empty key");
        }
        config[key] = std::string(trim(body.substr(eq + 1)));
    }
    return config;
}

Config read_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("config", "cannot read config file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.string());
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

double parse_double(std::string_view text, const std::string& key) {
    text = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError(key, "value of '" + key + "' is not a number: '" + std::string(text) + "'");
    }
    return v;
}

std::uint64_t parse_uint(std::string_view text, const std::string& key) {
    text = trim(text);
    // Accept scientific shorthand such as 1e4.
    if (text.find_first_of("eE.") != std::string_view::npos) {
        const double v = parse_double(text, key);
        if (!(v >= 0.0) || v != std::floor(v) || v > 1.8e19) {
            throw ConfigError(key, "value of '" + key + "' is not a non-negative integer");
        }
        return static_cast<std::uint64_t>(v);
    }
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError(key, "value of '" + key + "' is not a non-negative integer: '" + std::string(text) + "'");
    }
    return v;
}

bool parse_bool(std::string_view text, const std::string& key) {
    const auto t = trim(text);
    if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
    if (t == "0" || t == "false" || t == "no" || t == "off") return false;
    throw ConfigError(key, "value of '" + key + "' is not a boolean: '" + std::string(t) + "'");
}

std::uint64_t fnv1a(std::string_view text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

void write_events(const std::filesystem::path& path, const EventSequence& events) {
    auto out = open_out(path);
    out << "t\n";
    for (double t : events.times()) out << format_double(t) << '\n';
}

std::vector<double> read_event_times(const std::filesystem::path& path) {
    const auto rows = read_numeric_csv(path, {"t"});
    std::vector<double> times;
    times.reserve(rows.size());
    for (const auto& r : rows) times.push_back(r[0]);
    return times;
}

void write_contagion(const std::filesystem::path& path, const EventSequence& events, std::span<const double> y) {
    check_aligned(events, y);
    auto out = open_out(path);
    out << "t,y\n";
    for (std::size_t i = 0; i < y.size(); ++i) out << format_double(events[i]) << ',' << format_double(y[i]) << '\n';
}

ContagionFile read_contagion(const std::filesystem::path& path) {
    ContagionFile file;
    for (const auto& r : read_numeric_csv(path, {"t", "y"})) {
        file.times.push_back(r[0]);
        file.levels.push_back(r[1]);
    }
    return file;
}

void write_trace(const std::filesystem::path& path, std::span<const IntensitySample> trace) {
    auto out = open_out(path);
    out << "t,lambda\n";
    for (const auto& s : trace) out << format_double(s.t) << ',' << format_double(s.lambda) << '\n';
}

void write_chain(const std::filesystem::path& path, const Chain& chain) {
    auto out = open_out(path);
    out << "iter";
    for (const auto& name : chain.parameter_names()) out << ',' << name;
    out << ",loglik\n";
    for (std::size_t r = 0; r < chain.states.size(); ++r) {
        out << chain.iterations[r];
        for (double v : parameter_values(chain.states[r])) out << ',' << format_double(v);
        out << ',' << format_double(chain.log_likelihood[r]) << '\n';
    }
}

Chain read_chain(const std::filesystem::path& path, SdeKind kind) {
    std::vector<std::string> header{"iter"};
    for (const auto& name : parameter_names(kind)) header.push_back(name);
    header.push_back("loglik");
    Chain chain;
    chain.kind = kind;
    for (const auto& r : read_numeric_csv(path, header)) {
        ChainState s;
        s.params = {r[1], r[2], r[3]};
        switch (kind) {
            case SdeKind::constant: s.spec = SdeSpec::constant(r[4]); break;
            case SdeKind::iid_gamma: s.spec = SdeSpec::iid_gamma(r[4], r[5]); break;
            case SdeKind::gbm: s.spec = SdeSpec::gbm(r[4], r[5], 1.0); break;
            case SdeKind::exp_langevin: s.spec = SdeSpec::exp_langevin(r[4], r[5], r[6], 1.0); break;
        }
        chain.iterations.push_back(static_cast<std::size_t>(r[0]));
        chain.states.push_back(std::move(s));
        chain.log_likelihood.push_back(r.back());
    }
    return chain;
}

void write_latent(const std::filesystem::path& path, const Chain& chain) {
    auto out = open_out(path);
    out << "iter,event,y,parent\n";
    for (std::size_t r = 0; r < chain.states.size(); ++r) {
        const auto& s = chain.states[r];
        for (std::size_t i = 0; i < s.y.size(); ++i) {
            out << chain.iterations[r] << ',' << i + 1 << ',' << format_double(s.y[i]) << ','
                << (i < s.z.size() ? s.z.parent[i] : 0) << '\n';
        }
    }
}

void write_summary(const std::filesystem::path& path, std::span<const ParameterSummary> summary) {
    auto out = open_out(path);
    out << "parameter,mean,median,q05,q95,sd,ess,rhat\n";
    for (const auto& s : summary) {
        out << s.name << ',' << format_double(s.mean) << ',' << format_double(s.median) << ','
            << format_double(s.q05) << ',' << format_double(s.q95) << ',' << format_double(s.sd) << ','
            << format_double(s.ess) << ',' << format_double(s.rhat) << '\n';
    }
}

void write_acceptance(const std::filesystem::path& path, const std::map<std::string, double>& rates) {
    auto out = open_out(path);
    out << "block,rate\n";
    for (const auto& [block, rate] : rates) out << block << ',' << format_double(rate) << '\n';
}

bool is_reserved_manifest_key(std::string_view key) {
    return key == "version" || key == "command" || key == "config_hash";
}

std::uint64_t config_hash(const Config& resolved) {
    std::string canonical;
    for (const auto& [k, v] : resolved) {  // std::map iterates in key order
        if (is_reserved_manifest_key(k) || k == "out" || k == "threads") continue;  // execution-only settings
        canonical += k + "=" + v + "\n";
    }
    return fnv1a(canonical);
}

void write_manifest(const std::filesystem::path& path, std::string_view command, std::uint64_t seed,
                    const Config& resolved) {
    Config all = resolved;
    all["seed"] = std::to_string(seed);
    auto out = open_out(path);
    char hash[17];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(config_hash(all)));
    out << "version=" << kVersion << '\n' << "command=" << command << '\n' << "config_hash=" << hash << '\n';
    for (const auto& [k, v] : all) out << k << '=' << v << '\n';
}

}  // namespace stochhawkes::io
