// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "pnc/config.hpp"

using namespace pnc;

TEST_CASE("defaults describe the 3 MHz 2x2 PedB link") {
    const SimConfig c;
    CHECK_NOTHROW(c.validate());
    CHECK(c.nc == 256);
    CHECK(c.n_used == 180);
    CHECK(c.fd_hz == doctest::Approx(9.2593).epsilon(1e-4));
    CHECK(c.ts_s == doctest::Approx(1.0 / 3.84e6));
    CHECK(c.m_anchors == 50);
    CHECK(c.channel_length == 15);
    CHECK(c.max_iter == 5);
    const PnParams p = c.pn_params();
    CHECK(p.nc == 256);
    CHECK(p.beta_hz == 25.0);
}

TEST_CASE("JSON round trip is lossless") {
    SimConfig c;
    c.beta_hz = 137.5;
    c.snr_db = 17.25;
    c.seed = 0xfedcba9876543210ULL;
    c.pn_formula = PnFormula::PrintedNt;
    c.noise_source = NoiseSource::GuardBand;
    c.freeze_channel = true;
    const SimConfig back = parse_config(dump_config(c));
    CHECK(dump_config(back) == dump_config(c));
    CHECK(back.seed == c.seed);
    CHECK(back.pn_formula == PnFormula::PrintedNt);
    CHECK(back.noise_source == NoiseSource::GuardBand);
}

TEST_CASE("partial JSON overrides only the given keys") {
    const SimConfig c = parse_config(R"({"beta_hz": 100, "max_iter": 3})");
    CHECK(c.beta_hz == 100.0);
    CHECK(c.max_iter == 3);
    CHECK(c.nc == 256);
}

TEST_CASE("invalid configurations are rejected") {
    CHECK_THROWS_AS(parse_config("{"), ConfigError);
    CHECK_THROWS_AS(parse_config("[1, 2]"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"bogus": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"nc": "many"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"pn_formula": "other"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"noise_source": "other"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"nt": 2, "nr": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"n_used": 181})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"beta_hz": -1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"max_iter": 0})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"m_anchors": 1})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"pdp_delays_us": [0, 1], "pdp_powers_db": [0]})"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/cfg.json"), ConfigError);
}

TEST_CASE("load_config reads a file") {
    const auto path = std::filesystem::temp_directory_path() / "pnc_cfg_test.json";
    {
        std::ofstream out(path);
        out << R"({"snr_db": 12.5, "noise_source": "guard_band"})";
    }
    const SimConfig c = load_config(path);
    CHECK(c.snr_db == 12.5);
    CHECK(c.noise_source == NoiseSource::GuardBand);
    std::filesystem::remove(path);
}

TEST_CASE("config hash tracks every field") {
    const SimConfig a;
    SimConfig b;
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16u);
    b.snr_db = 30.5;
    CHECK(config_hash(a) != config_hash(b));
    b = SimConfig{};
    b.pdp_powers_db[5] = -24.0;
    CHECK(config_hash(a) != config_hash(b));
}
