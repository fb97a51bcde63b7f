// SPDX-License-Identifier: Apache-2.0

#include "pnc/config.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <set>

#include "json.hpp"

namespace pnc {

using nlohmann::json;

std::string_view to_string(NoiseSource s) {
    return s == NoiseSource::Analytic ? "analytic" : "guard_band";
}

void SimConfig::validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("config: " + what); };
    if (nc < 8) fail("nc must be >= 8");
    if (n_used < 12 || n_used % 2 != 0 || n_used >= nc) fail("n_used must be even and < nc");
    if (no < 12) fail("no must be >= 12");
    if (nt < 1 || nt > 2) fail("nt must be 1 or 2");
    if (nr < 1) fail("nr must be >= 1");
    if (nr < nt) fail("nr must be >= nt for per-tone detection");
    if (!(beta_hz >= 0.0)) fail("beta_hz must be >= 0");
    if (!(ts_s > 0.0) || !(to_s > 0.0)) fail("ts_s and to_s must be positive");
    if (!(fd_hz >= 0.0)) fail("fd_hz must be >= 0");
    if (m_anchors < 2 || m_anchors > nc) fail("m_anchors must be in [2, nc]");
    if (channel_length < 1 || channel_length > nc) fail("channel_length must be in [1, nc]");
    if (static_cast<long>(channel_length) * nt > nc) fail("channel_length * nt must not exceed nc");
    if (max_iter < 1) fail("max_iter must be >= 1");
    if (!(ide_tolerance >= 0.0)) fail("ide_tolerance must be >= 0");
    if (pdp_delays_us.empty() || pdp_delays_us.size() != pdp_powers_db.size()) {
        fail("pdp_delays_us and pdp_powers_db must be non-empty and equal length");
    }
}

void to_json(json& j, const SimConfig& c) {
    j = json{{"nc", c.nc},
             {"n_used", c.n_used},
             {"no", c.no},
             {"nt", c.nt},
             {"nr", c.nr},
             {"beta_hz", c.beta_hz},
             {"snr_db", c.snr_db},
             {"fd_hz", c.fd_hz},
             {"ts_s", c.ts_s},
             {"to_s", c.to_s},
             {"m_anchors", c.m_anchors},
             {"channel_length", c.channel_length},
             {"max_iter", c.max_iter},
             {"ide_tolerance", c.ide_tolerance},
             {"seed", c.seed},
             {"pilot_seed", c.pilot_seed},
             {"pn_formula", std::string(to_string(c.pn_formula))},
             {"noise_source", std::string(to_string(c.noise_source))},
             {"freeze_channel", c.freeze_channel},
             {"pdp_delays_us", c.pdp_delays_us},
             {"pdp_powers_db", c.pdp_powers_db}};
}

void from_json(const json& j, SimConfig& c) {
    if (!j.is_object()) {
        throw ConfigError("config: expected a JSON object");
    }
    static const std::set<std::string> known{
        "nc", "n_used", "no", "nt", "nr", "beta_hz", "snr_db", "fd_hz", "ts_s", "to_s",
        "m_anchors", "channel_length", "max_iter", "ide_tolerance", "seed", "pilot_seed",
        "pn_formula", "noise_source", "freeze_channel", "pdp_delays_us", "pdp_powers_db"};
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            throw ConfigError("config: unknown key '" + key + "'");
        }
    }
    try {
        auto get = [&](const char* key, auto& field) {
            if (j.contains(key)) j.at(key).get_to(field);
        };
        get("nc", c.nc);
        get("n_used", c.n_used);
        get("no", c.no);
        get("nt", c.nt);
        get("nr", c.nr);
        get("beta_hz", c.beta_hz);
        get("snr_db", c.snr_db);
        get("fd_hz", c.fd_hz);
        get("ts_s", c.ts_s);
        get("to_s", c.to_s);
        get("m_anchors", c.m_anchors);
        get("channel_length", c.channel_length);
        get("max_iter", c.max_iter);
        get("ide_tolerance", c.ide_tolerance);
        get("seed", c.seed);
        get("pilot_seed", c.pilot_seed);
        get("freeze_channel", c.freeze_channel);
        get("pdp_delays_us", c.pdp_delays_us);
        get("pdp_powers_db", c.pdp_powers_db);
        if (j.contains("pn_formula")) {
            c.pn_formula = pn_formula_from_string(j.at("pn_formula").get<std::string>());
        }
        if (j.contains("noise_source")) {
            const auto s = j.at("noise_source").get<std::string>();
            if (s == "analytic") c.noise_source = NoiseSource::Analytic;
            else if (s == "guard_band") c.noise_source = NoiseSource::GuardBand;
            else throw ConfigError("config: unknown noise_source '" + s + "'");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

std::string dump_config(const SimConfig& c) {
    return json(c).dump();
}

SimConfig parse_config(std::string_view text, SimConfig base) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    from_json(j, base);
    base.validate();
    return base;
}

SimConfig load_config(const std::filesystem::path& path, SimConfig base) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open " + path.string());
    }
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text, std::move(base));
}

std::string config_hash(const SimConfig& c) {
    const std::string text = dump_config(c);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace pnc
