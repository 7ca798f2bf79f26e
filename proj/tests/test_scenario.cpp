#include <doctest.h>

#include <filesystem>
#include <set>

#include "spskit/error.hpp"
#include "spskit/io.hpp"
#include "spskit/scenario.hpp"

using namespace spskit;
using scenario::Config;

TEST_CASE("registry keys are unique and sectioned")
{
    std::set<std::string> seen;
    for (const auto& k : scenario::registry()) {
        CHECK(seen.insert(k.key).second);
        CHECK(k.key.find('.') != std::string::npos);
        CHECK_FALSE(k.note.empty());
    }
}

TEST_CASE("defaults build every model")
{
    const Config c = Config::defaults();
    CHECK(scenario::cavity_from(c).radius_of_curvature_um == 2.7);
    CHECK(scenario::emitter_from(c).free_lifetime_ps == 897.0);
    CHECK(scenario::coating_from(c).layers.size() == 18);
    const auto q = scenario::qkd_from(c);
    CHECK(q.sps.mu == doctest::Approx(0.513));
    CHECK(q.detector.eta == doctest::Approx(0.045));
    CHECK_FALSE(c.get_optional_double("fab.calibration_nm_per_unit").has_value());
}

TEST_CASE("INI and JSON load the same values")
{
    const Config ini = Config::parse_ini("[cavity]\nq = 5\nradius_of_curvature_um = 3.0\n[qkd]\nchannel = freespace\n");
    const Config json =
        Config::parse_json(R"({"cavity": {"q": 5, "radius_of_curvature_um": 3.0}, "qkd": {"channel": "freespace"}})");
    CHECK(ini.get_int("cavity.q") == 5);
    CHECK(json.get_int("cavity.q") == 5);
    CHECK(ini.get_double("cavity.radius_of_curvature_um") == json.get_double("cavity.radius_of_curvature_um"));
    CHECK(scenario::channel_from(ini).kind == qkd::ChannelKind::freespace);
}

TEST_CASE("unknown keys and malformed values are rejected")
{
    CHECK_THROWS_AS(Config::parse_ini("[cavity]\nradius = 3\n"), ValidationError);
    CHECK_THROWS_AS(Config::parse_ini("[nosuch]\nq = 3\n"), ValidationError);
    CHECK_THROWS_AS(Config::parse_json(R"({"cavity": {"qq": 5}})"), ValidationError);
    CHECK_THROWS_AS(Config::parse_json("[1, 2]"), ValidationError);
    Config c = Config::defaults();
    CHECK_THROWS_AS(c.apply_override("cavity.q"), ValidationError);
    CHECK_THROWS_AS(c.apply_override("cavity.nothing=1"), ValidationError);
    c.set("cavity.q", "eight");
    CHECK_THROWS_AS(c.get_int("cavity.q"), ValidationError);
    c.set("cavity.q", "8");
    c.set("qkd.channel", "satellite");
    CHECK_THROWS_AS(scenario::channel_from(c), ValidationError);
    CHECK_THROWS_AS(Config::load("/nonexistent/spskit.ini"), ValidationError);
}

TEST_CASE("overrides win and change the digest")
{
    Config c = Config::parse_ini("[cavity]\nq = 5\n");
    const std::string before = c.digest();
    c.apply_override("cavity.q=7");
    CHECK(c.get_int("cavity.q") == 7);
    CHECK(c.digest() != before);
    c.apply_override("cavity.q = 5");
    CHECK(c.digest() == before);
    CHECK(c.digest() == io::sha256_hex(c.canonical()));
    CHECK(Config::defaults().digest() == Config::defaults().digest());
}

TEST_CASE("calibrated divergence reproduces the calibration point")
{
    Config c = Config::defaults();
    c.set("qkd.channel", "freespace");
    c.set("qkd.divergence_model", "calibrated");
    const auto channel = scenario::channel_from(c);
    CHECK(qkd::channel_loss_db(channel.at(630.0)) == doctest::Approx(8.82).epsilon(1e-6));
}
