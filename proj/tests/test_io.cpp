#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "stochhawkes/io.hpp"

using namespace stochhawkes;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("stochhawkes_io_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST(Config, ParsesKeysAndComments) {
    const auto c = io::parse_config("# header\nlambda-0 = 2.5  # trailing\n\nmodel=gbm\n");
    EXPECT_EQ(c.at("lambda_0"), "2.5");
    EXPECT_EQ(c.at("model"), "gbm");
    EXPECT_EQ(c.size(), 2u);
}

TEST(Config, MalformedLineNamesKey) {
    try {
        io::parse_config("a = 1\ndelta\n");
        FAIL() << "expected ConfigError";
    } catch (const io::ConfigError& e) {
        EXPECT_EQ(e.key(), "delta");
    }
}

TEST(Config, NumberParsing) {
    EXPECT_EQ(io::parse_uint("1e4", "n"), 10000u);
    EXPECT_EQ(io::parse_uint("17", "n"), 17u);
    EXPECT_THROW(io::parse_uint("1.5", "n"), io::ConfigError);
    EXPECT_THROW(io::parse_uint("-3", "n"), io::ConfigError);
    EXPECT_DOUBLE_EQ(io::parse_double(" 0.25 ", "x"), 0.25);
    EXPECT_THROW(io::parse_double("abc", "x"), io::ConfigError);
    EXPECT_TRUE(io::parse_bool("yes", "b"));
    EXPECT_FALSE(io::parse_bool("0", "b"));
    EXPECT_THROW(io::parse_bool("maybe", "b"), io::ConfigError);
}

TEST(Format, RoundTripsDoubles) {
    for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678901234567}) {
        EXPECT_EQ(io::parse_double(io::format_double(v), "v"), v);
    }
}

TEST(Files, EventsRoundTrip) {
    const auto dir = scratch_dir("events");
    const EventSequence ev({0.1, 0.25, 1.0 / 3.0}, 2.0);
    io::write_events(dir / "events.csv", ev);
    const auto times = io::read_event_times(dir / "events.csv");
    EXPECT_TRUE(std::equal(times.begin(), times.end(), ev.times().begin(), ev.times().end()));
}

TEST(Files, BadHeaderAndFields) {
    const auto dir = scratch_dir("bad");
    std::ofstream(dir / "a.csv") << "time\n1.0\n";
    EXPECT_THROW(io::read_event_times(dir / "a.csv"), std::invalid_argument);
    std::ofstream(dir / "b.csv") << "t\n1.0\nx\n";
    EXPECT_THROW(io::read_event_times(dir / "b.csv"), std::invalid_argument);
    EXPECT_THROW(io::read_event_times(dir / "missing.csv"), std::invalid_argument);
}

TEST(Files, ChainRoundTrip) {
    const auto dir = scratch_dir("chain");
    Chain chain;
    chain.kind = SdeKind::exp_langevin;
    chain.iterations = {1, 2};
    chain.states.push_back({{1.0, 2.0, 3.0}, SdeSpec::exp_langevin(0.5, 0.1, 0.2, 1.0), {}, {}});
    chain.states.push_back({{1.5, 2.5, 3.5}, SdeSpec::exp_langevin(0.6, -0.1, 0.3, 1.0), {}, {}});
    chain.log_likelihood = {-10.0, -9.5};
    io::write_chain(dir / "chain.csv", chain);
    const auto back = io::read_chain(dir / "chain.csv", SdeKind::exp_langevin);
    ASSERT_EQ(back.states.size(), 2u);
    EXPECT_EQ(back.parameter("k"), chain.parameter("k"));
    EXPECT_EQ(back.parameter("delta"), chain.parameter("delta"));
    EXPECT_EQ(back.log_likelihood, chain.log_likelihood);
    EXPECT_THROW(io::read_chain(dir / "chain.csv", SdeKind::gbm), std::invalid_argument);
}

TEST(Manifest, HashIgnoresKeyOrderAndReservedKeys) {
    io::Config a{{"x", "1"}, {"y", "2"}};
    io::Config b{{"y", "2"}, {"x", "1"}, {"version", "9"}};
    EXPECT_EQ(io::config_hash(a), io::config_hash(b));
    a["x"] = "3";
    EXPECT_NE(io::config_hash(a), io::config_hash(b));
}

TEST(Manifest, ReadsBackAsConfig) {
    const auto dir = scratch_dir("manifest");
    io::write_manifest(dir / "manifest.txt", "simulate", 42, {{"a", "1.5"}, {"horizon", "10"}});
    const auto c = io::read_config(dir / "manifest.txt");
    EXPECT_EQ(c.at("seed"), "42");
    EXPECT_EQ(c.at("horizon"), "10");
    EXPECT_EQ(c.at("command"), "simulate");
    EXPECT_EQ(c.at("config_hash").size(), 16u);
}
