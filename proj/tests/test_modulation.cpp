#include <doctest.h>

#include <random>

#include "mcmimo/error.hpp"
#include "mcmimo/modulation.hpp"

using namespace mcmimo;

namespace {

SchemeConfig make_cfg(Scheme s, Mapping m = Mapping::natural) {
    SchemeConfig cfg;
    cfg.scheme = s;
    const bool siso = s == Scheme::siso_bcsk || s == Scheme::siso_dmosk;
    cfg.n_tx = siso ? 1 : 8;
    cfg.n_rx = cfg.n_tx;
    cfg.t_b = 0.25;
    cfg.m_tx = 300.0;
    cfg.mapping = m;
    cfg.beta = 0;
    return cfg;
}

} // namespace

TEST_CASE("normalization table at n = 8, t_b = 0.25, M = 300") {
    struct Row {
        Scheme scheme;
        double t_s, emission;
        int bits, beta;
    };
    const Row rows[] = {
        {Scheme::siso_bcsk, 0.25, 300.0, 1, 1},
        {Scheme::siso_dmosk, 0.50, 300.0, 2, 2},
        {Scheme::rc_bcsk, 0.25, 37.5, 1, 1},
        {Scheme::smux_bcsk, 2.00, 300.0, 8, 1},
        {Scheme::mssk, 0.75, 450.0, 3, 1},
        {Scheme::qmssk, 1.50, 450.0, 6, 2},
        {Scheme::msm, 1.00, 600.0, 4, 2},
    };
    for (const Row& r : rows) {
        CAPTURE(scheme_name(r.scheme));
        const DerivedParams d = derive_params(make_cfg(r.scheme));
        CHECK(d.t_s == doctest::Approx(r.t_s));
        CHECK(d.emission == doctest::Approx(r.emission));
        CHECK(d.bits_per_symbol == r.bits);
        CHECK(d.beta == r.beta);
        // rate normalization: bits per symbol over t_s is the bit rate 1/t_b
        CHECK(d.bits_per_symbol / d.t_s == doctest::Approx(1.0 / 0.25));
    }
}

TEST_CASE("index maps") {
    const auto nat = natural_codes(8);
    CHECK(nat[3] == 0b011);  // antenna 4
    const auto gray = gray_codes(8);
    const std::uint32_t expect[] = {0b000, 0b001, 0b011, 0b010, 0b110, 0b111, 0b101, 0b100};
    for (int i = 0; i < 8; ++i) CHECK(gray[i] == expect[i]);
    // single-bit adjacency around the circle, including the wrap pair
    for (int i = 0; i < 8; ++i) CHECK(hamming(gray[i], gray[(i + 1) % 8]) == 1);
    CHECK(hamming(gray[0], gray[7]) == 1);
    CHECK_THROWS_AS(gray_codes(6), Error);
    const auto inv = inverse_codes(gray);
    for (int i = 0; i < 8; ++i) CHECK(inv[gray[i]] == i);
}

TEST_CASE("schedule construction per scheme") {
    SUBCASE("space shift keying activates exactly the mapped antenna") {
        const std::uint8_t bits[] = {0, 1, 0};
        const auto sch = modulate(make_cfg(Scheme::mssk), bits, 1);
        REQUIRE(sch.intervals[0].size() == 1);
        CHECK(sch.intervals[0][0].tx == 2);  // 010 -> index 3, 0-based 2
        CHECK(sch.intervals[0][0].count == 450);
    }
    SUBCASE("repetition splits the budget over all antennas") {
        const std::uint8_t bits[] = {1};
        const auto sch = modulate(make_cfg(Scheme::rc_bcsk), bits, 1);
        REQUIRE(sch.intervals[0].size() == 8);
        for (const auto& e : sch.intervals[0]) CHECK(e.count == 38);  // round(37.5)
        const std::uint8_t zero[] = {0};
        CHECK(modulate(make_cfg(Scheme::rc_bcsk), zero, 1).intervals[0].empty());
    }
    SUBCASE("spatial modulation selects type by the leading bit") {
        const std::uint8_t bits[] = {1, 0, 1, 0};
        const auto sch = modulate(make_cfg(Scheme::msm, Mapping::gray), bits, 1);
        REQUIRE(sch.intervals[0].size() == 1);
        CHECK(sch.intervals[0][0].type == type_b);
        CHECK(sch.intervals[0][0].tx == 3);  // gray code 010 -> index 4, 0-based 3
        CHECK(sch.intervals[0][0].count == 600);
    }
    SUBCASE("quadrature keying drives both molecule types") {
        const std::uint8_t bits[] = {0, 0, 0, 1, 1, 1};
        const auto sch = modulate(make_cfg(Scheme::qmssk), bits, 1);
        REQUIRE(sch.intervals[0].size() == 2);
        CHECK(sch.intervals[0][0].type == type_a);
        CHECK(sch.intervals[0][0].tx == 0);
        CHECK(sch.intervals[0][1].type == type_b);
        CHECK(sch.intervals[0][1].tx == 7);
    }
    SUBCASE("non-binary input is rejected") {
        const std::uint8_t bits[] = {0, 2, 0};
        CHECK_THROWS_AS(modulate(make_cfg(Scheme::mssk), bits, 1), Error);
    }
    SUBCASE("short input is zero-padded and recorded") {
        const std::uint8_t bits[] = {1};
        const auto sch = modulate(make_cfg(Scheme::mssk), bits, 1);
        CHECK(sch.n_padding_bits == 2);
        CHECK(sch.intervals[0][0].tx == 4);  // 100
    }
}

TEST_CASE("noiseless round-trip recovers the input bits") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> bit(0, 1);
    for (Scheme s : {Scheme::siso_bcsk, Scheme::siso_dmosk, Scheme::rc_bcsk, Scheme::smux_bcsk,
                     Scheme::mssk, Scheme::qmssk, Scheme::msm}) {
        for (Mapping m : {Mapping::natural, Mapping::gray}) {
            const SchemeConfig cfg = make_cfg(s, m);
            const DerivedParams d = derive_params(cfg);
            const int n_symbols = 64;
            std::vector<std::uint8_t> bits(static_cast<std::size_t>(n_symbols) * d.bits_per_symbol);
            for (auto& b : bits) b = static_cast<std::uint8_t>(bit(rng));
            const auto sch = modulate(cfg, bits, n_symbols);
            CHECK(demodulate_schedule(cfg, sch) == bits);
        }
    }
}

TEST_CASE("every scheme spends M/2 molecules per information bit") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> bit(0, 1);
    for (Scheme s : {Scheme::siso_bcsk, Scheme::siso_dmosk, Scheme::rc_bcsk, Scheme::smux_bcsk,
                     Scheme::mssk, Scheme::qmssk, Scheme::msm}) {
        CAPTURE(scheme_name(s));
        const SchemeConfig cfg = make_cfg(s);
        const DerivedParams d = derive_params(cfg);
        const std::size_t total_bits = 100'000;
        const int n_symbols = static_cast<int>(total_bits / d.bits_per_symbol);
        std::vector<std::uint8_t> bits(static_cast<std::size_t>(n_symbols) * d.bits_per_symbol);
        for (auto& b : bits) b = static_cast<std::uint8_t>(bit(rng));
        const auto sch = modulate(cfg, bits, n_symbols);
        const double per_bit = static_cast<double>(sch.total_molecules()) / bits.size();
        CHECK(per_bit == doctest::Approx(150.0).epsilon(0.015));
    }
}

TEST_CASE("index schemes require a power-of-two array") {
    SchemeConfig cfg = make_cfg(Scheme::mssk);
    cfg.n_tx = cfg.n_rx = 6;
    CHECK_THROWS_AS(derive_params(cfg), Error);
}
