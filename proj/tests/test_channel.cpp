#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "otfs/channel.hpp"

using namespace otfs;

namespace {

OtfsParams table1(int M = 512, int N = 128) {
    return OtfsParams::make(M, N, 15e3, 4e9, 20, 16.0);
}

double kmh(double v) { return v / 3.6; }

} // namespace

TEST_CASE("params invariants are enforced") {
    CHECK(table1().slot_duration * table1().subcarrier_spacing == 1.0);
    CHECK_THROWS_AS((void)OtfsParams::make(512, 128, 15e3, 4e9, 1, 16.0), std::invalid_argument);
    CHECK_THROWS_AS((void)OtfsParams::make(512, 128, 15e3, 4e9, 600, 16.0), std::invalid_argument);
    CHECK_THROWS_AS((void)OtfsParams::make(512, 128, 15e3, 4e9, 20, 0.5), std::invalid_argument);
    CHECK_THROWS_AS((void)OtfsParams::make(512, 128, 15e3, 4e9, 20, 64.0), std::invalid_argument);
    CHECK_THROWS_AS((void)OtfsParams::make(2048, 512, 15e3, 4e9, 20, 16.0), std::invalid_argument);
}

TEST_CASE("doppler bounds reproduce the 1.85 kHz / 15.8 reference point") {
    const OtfsParams p = table1();
    const DopplerBounds b = doppler_bounds(kmh(500), p);
    CHECK(b.nu_max == doctest::Approx(1853.0).epsilon(0.005)); // about 1.85 kHz
    CHECK(b.k_max == doctest::Approx(15.8).epsilon(0.005));

    const DopplerBounds zero = doppler_bounds(0.0, p);
    CHECK(zero.nu_max == 0.0);
    CHECK(zero.k_max == 0.0);
}

TEST_CASE("drawn channels have unit mean energy and distinct delays") {
    const OtfsParams p = table1();
    double energy = 0;
    const int seeds = 10000;
    for (int s = 0; s < seeds; ++s) {
        const ChannelRealization ch = draw_channel(p, 4, kmh(500), 42 + s);
        REQUIRE(ch.paths.size() == 4);
        std::set<int> delays;
        double e = 0;
        for (const PathParams& path : ch.paths) {
            delays.insert(path.delay_index);
            e += std::norm(path.beta);
            CHECK(path.delay_index >= 1);
            CHECK(path.delay_index <= 20);
            CHECK(std::abs(path.doppler_index) <= 15);
        }
        CHECK(delays.size() == 4);
        energy += e;
    }
    energy /= seeds;
    CHECK(energy > 0.97);
    CHECK(energy < 1.03);
}

TEST_CASE("static channels carry no Doppler and no squint ratio") {
    const OtfsParams p = table1();
    const ChannelRealization ch = draw_channel(p, 4, 0.0, 7);
    for (const PathParams& path : ch.paths) {
        CHECK(path.doppler_index == 0.0);
        CHECK(!path.has_doppler);
        CHECK(path.inv_p() == 0.0);
        CHECK_THROWS_AS((void)path.p(), std::domain_error);
    }
}

TEST_CASE("same seed reproduces the realization bit for bit") {
    const OtfsParams p = table1();
    const ChannelRealization a = draw_channel(p, 4, kmh(360), 99);
    const ChannelRealization b = draw_channel(p, 4, kmh(360), 99);
    REQUIRE(a.paths.size() == b.paths.size());
    for (size_t i = 0; i < a.paths.size(); ++i) {
        CHECK(a.paths[i].beta == b.paths[i].beta);
        CHECK(a.paths[i].delay_index == b.paths[i].delay_index);
        CHECK(a.paths[i].doppler_index == b.paths[i].doppler_index);
    }
}

TEST_CASE("generated moving paths satisfy the squint-ratio bound") {
    const OtfsParams p = table1();
    for (int s = 0; s < 50; ++s) {
        const ChannelRealization ch = draw_channel(p, 4, kmh(500), 1000 + s);
        for (const PathParams& path : ch.paths) {
            CHECK(path.beta_prime ==
                  path.beta * cd(std::cos(2 * M_PI * path.tau * path.nu),
                                 std::sin(2 * M_PI * path.tau * path.nu)));
            if (path.has_doppler) {
                CHECK(std::abs(path.p()) > 1e6);
                CHECK(std::abs(path.p()) > p.grid_size());
            }
        }
    }
}

TEST_CASE("continuous-Doppler mode draws real-valued indices inside the cap") {
    const OtfsParams p = table1();
    const DopplerBounds b = doppler_bounds(kmh(500), p);
    bool fractional_seen = false;
    for (int s = 0; s < 20; ++s) {
        const ChannelRealization ch =
            draw_channel(p, 4, kmh(500), 2000 + s, DopplerGrid::Continuous);
        for (const PathParams& path : ch.paths) {
            CHECK(std::abs(path.doppler_index) <= b.k_max);
            if (path.doppler_index != std::floor(path.doppler_index)) fractional_seen = true;
        }
    }
    CHECK(fractional_seen);
}

TEST_CASE("cosine mode projects the Doppler cap isotropically") {
    const OtfsParams p = table1();
    const DopplerBounds b = doppler_bounds(kmh(500), p);
    double sum_sq = 0;
    long count = 0;
    bool fractional_seen = false;
    for (int s = 0; s < 500; ++s) {
        const ChannelRealization ch = draw_channel(p, 4, kmh(500), 3000 + s, DopplerGrid::Cosine);
        for (const PathParams& path : ch.paths) {
            CHECK(std::abs(path.doppler_index) <= b.k_max);
            sum_sq += path.doppler_index * path.doppler_index;
            ++count;
            if (path.doppler_index != std::floor(path.doppler_index)) fractional_seen = true;
        }
    }
    CHECK(fractional_seen);
    // E[k^2] = k_max^2 / 2 under the cosine projection
    CHECK(sum_sq / count == doctest::Approx(b.k_max * b.k_max / 2.0).epsilon(0.1));
}

TEST_CASE("draw_channel rejects impossible requests") {
    const OtfsParams p = table1();
    CHECK_THROWS_AS((void)draw_channel(p, 21, kmh(500), 1), std::invalid_argument);
    CHECK_THROWS_AS((void)draw_channel(p, 0, kmh(500), 1), std::invalid_argument);
    // speed whose Doppler exceeds the configured cap
    CHECK_THROWS_AS((void)draw_channel(p, 4, kmh(520), 1), std::invalid_argument);
}

TEST_CASE("tf_response special values and constant modulus") {
    const OtfsParams p = table1();
    const PathParams moving = PathParams::make(p, cd(0.8, -0.6), 5, 3.0);
    CHECK(std::abs(tf_response(moving, 0.0, 0.0) - moving.beta) < 1e-15);
    for (double t : {0.0, 1e-4, 3e-3})
        for (double f : {-2e6, 0.0, 7.7e6})
            CHECK(std::abs(std::abs(tf_response(moving, t, f)) - std::abs(moving.beta)) < 1e-12);

    const PathParams still = PathParams::make(p, cd(0.5, 0.1), 2, 0.0);
    const double f = 3 * p.subcarrier_spacing;
    const cd a = tf_response(still, 0.0, f);
    const cd b = tf_response(still, 5e-3, f);
    CHECK(std::abs(a - b) < 1e-12); // time-invariant without Doppler
    const double want = -2.0 * M_PI * f * still.tau;
    CHECK(std::abs(a - still.beta * cd(std::cos(want), std::sin(want))) < 1e-12);
}

TEST_CASE("dd_response is a constant-modulus waveform, not an impulse") {
    const OtfsParams p = table1();
    const PathParams path = PathParams::make(p, cd(0.8, -0.6), 5, 3.0);
    const double scale = std::abs(path.beta) * std::abs(path.p());
    CHECK(std::abs(dd_response(path, path.tau, path.nu) - path.beta * std::abs(path.p())) <
          scale * 1e-12);
    for (double dt : {-3e-6, 1e-6, 9e-6})
        for (double dn : {-40.0, 15.0, 200.0})
            CHECK(std::abs(std::abs(dd_response(path, path.tau + dt, path.nu + dn)) - scale) <
                  scale * 1e-12);

    const PathParams still = PathParams::make(p, cd(0.5, 0.1), 2, 0.0);
    CHECK_THROWS_AS((void)dd_response(still, still.tau, 0.0), std::domain_error);
}

TEST_CASE("path validation guards the grid bounds") {
    const OtfsParams p = table1();
    CHECK_THROWS_AS((void)PathParams::make(p, cd(1, 0), 0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)PathParams::make(p, cd(1, 0), 21, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)PathParams::make(p, cd(1, 0), 5, 17.0), std::invalid_argument);
}

TEST_CASE("channel serialization round trips") {
    const OtfsParams p = table1();
    const ChannelRealization ch = draw_channel(p, 4, kmh(500), 31337);
    std::stringstream ss;
    write_channel(ss, ch);
    const ChannelRealization back = read_channel(ss, p);
    CHECK(back.seed == ch.seed);
    REQUIRE(back.paths.size() == ch.paths.size());
    for (size_t i = 0; i < ch.paths.size(); ++i) {
        CHECK(back.paths[i].beta == ch.paths[i].beta);
        CHECK(back.paths[i].delay_index == ch.paths[i].delay_index);
        CHECK(back.paths[i].doppler_index == ch.paths[i].doppler_index);
    }
}
