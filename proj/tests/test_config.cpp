#include <gtest/gtest.h>

#include "sheq/config.hpp"

using namespace sheq;

TEST(Config, DefaultsFromEmptyObject) {
    const auto c = parse_config_text("{}");
    EXPECT_EQ(c.dim, 1);
    EXPECT_EQ(c.modes, 16);
    ASSERT_EQ(c.probes.size(), 1u);
    EXPECT_EQ(c.probes[0].t, c.horizon);
    EXPECT_NEAR(c.probes[0].x[0], std::numbers::pi / 2, 1e-15);
}

TEST(Config, UnknownKeysRejected) {
    EXPECT_THROW(parse_config_text(R"({"modez": 8})"), ConfigError);
    EXPECT_THROW(parse_config_text(R"({"drift": {"kind": "cubic", "lamda": 0.1}})"), ConfigError);
    EXPECT_THROW(parse_config_text(R"({"noise": {"kind": "identity", "extra": 1}})"), ConfigError);
}

TEST(Config, ValueChecks) {
    EXPECT_THROW(parse_config_text(R"({"gamma": 2.5})"), ConfigError);
    EXPECT_THROW(parse_config_text(R"({"gamma": 2.0})"), ConfigError);
    EXPECT_THROW(parse_config_text(R"({"paths": 0})"), ConfigError);
    EXPECT_THROW(parse_config_text(R"({"dim": 2})"), ConfigError);  // identity noise in d = 2
    EXPECT_THROW(parse_config_text(R"({"drift": {"beta": 0.1}})"), ConfigError);
    EXPECT_THROW(parse_config_text(R"({"drift": {"variant": "yosida"}})"), ConfigError);
    EXPECT_THROW(parse_config_text(R"({"drift": {"kind": "linear", "slope": -1}})"), ConfigError);
    EXPECT_THROW(parse_config_text(R"({"probes": [{"t": 0.3, "x": [1.0]}], "steps": 4})"), ConfigError);
    EXPECT_THROW(parse_config_text(R"({"probes": [{"t": 1.0, "x": [4.0]}]})"), ConfigError);
    EXPECT_THROW(parse_config_text(R"({"drift": {"kind": "polynomial", "coefficients": [0, -1]}})"), ConfigError);
    EXPECT_THROW(parse_config_text("{not json"), ConfigError);
    EXPECT_THROW(parse_config_text(R"({"modes": "many"})"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, MollifiedVariantNeedsBothParameters) {
    EXPECT_NO_THROW(parse_config_text(R"({"drift": {"variant": "mollified", "lambda": 0.1, "beta": 0.2}})"));
    EXPECT_THROW(parse_config_text(R"({"drift": {"variant": "mollified", "lambda": 0.1}})"), ConfigError);
    const auto c = parse_config_text(R"({"drift": {"variant": "yosida", "lambda": 0.1}})");
    EXPECT_EQ(c.drift_evaluator().variant(), DriftVariant::yosida);
}

TEST(Config, RoundTripThroughJson) {
    const auto c = parse_config_text(R"({
        "dim": 2, "modes": 6, "horizon": 0.5, "steps": 10, "seed": 99,
        "noise": {"kind": "smoothed", "m_q": 1.5},
        "drift": {"kind": "cubic_sine", "lipschitz_linear": -0.5},
        "initial": {"kind": "bump", "amplitude": 2},
        "probes": [{"t": 0.25, "x": [1.0, 2.0]}],
        "density": {"eps": [0.1, 0.01]}
    })");
    const auto again = parse_config(to_json(c));
    EXPECT_TRUE(again == c);
    EXPECT_EQ(to_json(again).dump(), to_json(c).dump());
}

TEST(Config, NormalizationAddsLipschitzConstant) {
    const auto c = parse_config_text(R"({"eta": 0.25, "drift": {"kind": "cubic_sine", "lipschitz_linear": -2}})");
    EXPECT_EQ(c.normalized_form().second, 3.25);
    EXPECT_EQ(c.raw_form().second, 0.25);
    EXPECT_EQ(c.solver_config().eta, 3.25);
}
