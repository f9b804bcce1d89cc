// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 HiWave Project Contributors

// Reference coefficients were computed once with PyWavelets 1.8
// (pywt.dwt2 with mode="symmetric" and mode="periodization") and frozen here.

#include <chrono>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "hiwave/errors.hpp"
#include "hiwave/wavelet.hpp"
#include "support/helpers.hpp"

using namespace hiwave;

namespace {

const std::vector<float> kInput4x5 = {
    0.0f,        0.7442176938056946f,   1.1854497194290161f,   1.163209319114685f,  0.7349881529808044f,
    0.14921677112579346f, -0.27157577872276306f, -0.28245261311531067f, 0.1687333583831787f, 0.9168139100074768f,
    1.6569865942001343f,  2.088168144226074f,    2.054598808288574f,    1.6190983057022095f, 1.0335208177566528f,
    0.6203042268753052f,  0.6208222508430481f,   1.0818629264831543f,   1.8336230516433716f, 2.5695698261260986f};

const std::vector<float> kInput6x8 = {
    2.040919065475464f,    -2.5556650161743164f,  0.4180988371372223f,   -0.5677695870399475f,
    -0.4526492953300476f,  -0.21559716761112213f, -2.019986152648926f,   -0.2319323718547821f,
    -0.8652130961418152f,  3.3229994773864746f,   0.22578661143779755f,  -0.3526307940483093f,
    -0.28128743171691895f, -0.6680463552474976f,  -1.0551505088806152f,  -0.39080098271369934f,
    0.4819453954696655f,   -0.23855361342430115f, 0.9577587246894836f,   -0.19980213046073914f,
    0.02425956539809704f,  1.5458208322525024f,   0.545105516910553f,    -0.5052287578582764f,
    -0.18283897638320923f, 0.5405251383781433f,   1.935088038444519f,    -0.2696203291416168f,
    -0.24355867505073547f, 1.0023136138916016f,   -0.8864599466323853f,  -0.2917202413082123f,
    0.8825389742851257f,   0.5803500413894653f,   0.09151670336723328f,  0.6701043844223022f,
    -2.82816219329834f,    1.0213068723678589f,   -0.9596447348594666f,  -1.6686198711395264f,
    0.27644574642181396f,  0.7005448937416077f,   -0.44476744532585144f, -1.0764058828353882f,
    0.026124833151698112f, -0.05274730920791626f, 1.4055981636047363f,   0.7474079728126526f};


void check_close(const Field& band, const std::vector<double>& expected, double tol) {
    for (std::size_t i = 0; i < expected.size(); ++i) CHECK(std::abs(band.values()[i] - expected[i]) < tol);
}

}  // namespace

TEST_CASE("haar matches PyWavelets on a 4x5 input") {
    const Field x(Shape{1, 4, 5}, kInput4x5);
    // Haar has no boundary overlap, so both boundary modes agree.
    for (auto b : {Boundary::symmetric, Boundary::periodization}) {
        const auto bands = dwt2(x, WaveletFilter::haar(), b);
        REQUIRE(bands.low.height() == 2);
        REQUIRE(bands.low.width() == 3);
        check_close(bands.low, {0.3109293, 1.1174699, 1.6518021, 2.4931406, 3.2945915, 3.6030906}, 1e-6);
        check_close(bands.horizontal, {0.4332884, 1.2311891, -0.1818258, 1.2520141, 0.3791056, -1.536049}, 1e-6);
        check_close(bands.vertical, {-0.1617126, -0.2144728, 0.0, -0.2158498, -0.1581298, 0.0}, 1e-6);
        check_close(bands.diagonal, {-0.5825051, 0.2367132, 0.0, -0.2153318, 0.5936303, 0.0}, 1e-6);
    }
}

TEST_CASE("sym4 symmetric mode matches PyWavelets on a 4x5 input") {
    const Field x(Shape{1, 4, 5}, kInput4x5);
    const auto bands = dwt2(x, WaveletFilter::sym4(), Boundary::symmetric);
    REQUIRE(bands.low.height() == 5);
    REQUIRE(bands.low.width() == 6);
    check_close(bands.low, {1.0271627, 0.8710147, 1.3008751, 1.5040727, 1.413002, 1.0271627}, 1e-6);
    check_close(bands.horizontal, {-1.9290645, -1.7411327, -1.5848828, 1.0918962, -0.6099453, -1.9290645}, 1e-6);
    check_close(bands.vertical, {-0.0262672, 0.0710867, -0.0474162, 0.0096376, -0.007041, -0.0262672}, 1e-6);
    check_close(bands.diagonal, {0.2844651, -0.340551, 0.3343047, 0.0284526, -0.3066714, 0.2844651}, 1e-6);
}

TEST_CASE("sym4 periodization matches PyWavelets (odd width)") {
    const Field x(Shape{1, 4, 5}, kInput4x5);
    const auto bands = dwt2(x, WaveletFilter::sym4(), Boundary::periodization);
    REQUIRE(bands.low.height() == 2);
    REQUIRE(bands.low.width() == 3);
    check_close(bands.low, {1.18899, 1.4143943, 1.4637927, 1.8633671, 3.6394566, 2.9010233}, 1e-6);
    check_close(bands.horizontal, {-0.2399442, 0.4996106, 1.3463951, -2.4462937, -0.6196401, -0.1178501}, 1e-6);
    check_close(bands.vertical, {0.1258741, 0.014962, -0.0795133, 0.9890247, -0.1475759, -0.1526067}, 1e-6);
    check_close(bands.diagonal, {-0.0346106, 0.2141791, -0.3439609, 0.4948201, 0.1496978, -0.4476189}, 1e-6);
}

TEST_CASE("sym4 periodization matches PyWavelets (even 6x8)") {
    const Field x(Shape{1, 6, 8}, kInput6x8);
    const auto bands = dwt2(x, WaveletFilter::sym4(), Boundary::periodization);
    REQUIRE(bands.low.height() == 3);
    REQUIRE(bands.low.width() == 4);
    check_close(bands.low,
                {1.8639466, -0.3049174, -0.469622, -0.9320483, 1.7478685, -0.1993808, 0.6599277, -1.2934317, -0.1117054,
                 -1.3050919, -0.4708918, 0.7841968},
                1e-5);
    check_close(bands.horizontal,
                {1.792495, -0.6107238, 1.4198748, 0.0657916, 1.3829297, -0.2597262, -1.6872214, -0.8523322, -0.4671744,
                 0.5428871, 0.7763392, 1.0495969},
                1e-5);
    check_close(bands.vertical,
                {0.2291385, 0.091879, -0.3629589, 0.8604145, -0.619515, -1.2055705, 1.7938062, 1.0892833, -1.3135754,
                 -0.2855478, 0.3191909, 0.2808377},
                1e-5);
    check_close(bands.diagonal,
                {2.5625115, 1.9334719, -0.3543705, -1.7608982, 1.2582995, 1.0409967, -0.1703282, 0.4193558, 0.9695763,
                 -1.1193381, -2.1936067, -0.1610006},
                1e-5);
}

TEST_CASE("filter banks are orthonormal") {
    for (const auto* f : {&WaveletFilter::haar(), &WaveletFilter::sym4()}) {
        double lo2 = 0.0, hi2 = 0.0, cross = 0.0, sum = 0.0;
        for (std::size_t i = 0; i < f->length(); ++i) {
            lo2 += f->dec_lo[i] * f->dec_lo[i];
            hi2 += f->dec_hi[i] * f->dec_hi[i];
            cross += f->dec_lo[i] * f->dec_hi[i];
            sum += f->dec_lo[i];
        }
        CHECK(lo2 == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(hi2 == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(cross) < 1e-12);
        CHECK(sum == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    }
    CHECK(WaveletFilter::by_name("sym4").length() == 8);
    CHECK_THROWS_AS(WaveletFilter::by_name("db2"), ConfigError);
}

TEST_CASE("perfect reconstruction at every size 2..40, both filters, both boundaries") {
    for (auto b : {Boundary::periodization, Boundary::symmetric}) {
        for (const auto* f : {&WaveletFilter::haar(), &WaveletFilter::sym4()}) {
            for (std::size_t n = 2; n <= 40; ++n) {
                const Field x = testing::random_field(Shape{2, n, n + 1}, 100 + n);
                const Field r = idwt2(dwt2(x, *f, b), *f);
                REQUIRE(r.shape() == x.shape());
                CHECK(max_abs_diff(r, x) < 1e-5f);
            }
        }
    }
}

TEST_CASE("periodization band size is ceil(n/2)") {
    for (std::size_t n : {2u, 3u, 7u, 8u, 65u}) {
        const auto bands = dwt2(testing::random_field(Shape{1, n, n}, n), WaveletFilter::sym4());
        CHECK(bands.low.height() == (n + 1) / 2);
        CHECK(bands.diagonal.width() == (n + 1) / 2);
    }
}

TEST_CASE("haar preserves energy on even sizes") {
    const Field x = testing::random_field(Shape{3, 16, 10}, 5);
    const auto bands = dwt2(x, WaveletFilter::haar());
    auto energy = [](const Field& f) {
        double e = 0.0;
        for (float v : f.values()) e += static_cast<double>(v) * v;
        return e;
    };
    const double in = energy(x);
    const double out = energy(bands.low) + energy(bands.horizontal) + energy(bands.vertical) + energy(bands.diagonal);
    CHECK(out == doctest::Approx(in).epsilon(1e-5));
}

TEST_CASE("sym4 periodization is orthogonal on even sizes") {
    const Field x = testing::random_field(Shape{1, 12, 20}, 6);
    const auto bands = dwt2(x, WaveletFilter::sym4());
    double e_in = 0.0, e_out = 0.0;
    for (float v : x.values()) e_in += static_cast<double>(v) * v;
    for (const Field* b : {&bands.low, &bands.horizontal, &bands.vertical, &bands.diagonal}) {
        for (float v : b->values()) e_out += static_cast<double>(v) * v;
    }
    CHECK(e_out == doctest::Approx(e_in).epsilon(1e-5));
}

TEST_CASE("constant field has no detail energy") {
    const Field x(Shape{1, 16, 16}, 0.7f);
    for (const auto* f : {&WaveletFilter::haar(), &WaveletFilter::sym4()}) {
        const auto bands = dwt2(x, *f);
        for (const Field* d : {&bands.horizontal, &bands.vertical, &bands.diagonal}) {
            for (float v : d->values()) CHECK(std::abs(v) < 1e-6f);
        }
        for (float v : bands.low.values()) CHECK(v == doctest::Approx(1.4f).epsilon(1e-6));
    }
}

TEST_CASE("horizontal band captures variation along height") {
    Field x(Shape{1, 8, 8});
    for (std::size_t y = 0; y < 8; ++y) {
        for (std::size_t xx = 0; xx < 8; ++xx) x.at(0, y, xx) = (y % 2 == 0) ? 1.0f : -1.0f;
    }
    const auto bands = dwt2(x, WaveletFilter::haar());
    for (float v : bands.vertical.values()) CHECK(std::abs(v) < 1e-6f);
    for (float v : bands.horizontal.values()) CHECK(std::abs(v) == doctest::Approx(2.0f));
}

TEST_CASE("dwt2 rejects fields below 2x2") {
    CHECK_THROWS_AS(dwt2(Field(Shape{1, 1, 8}), WaveletFilter::haar()), ShapeError);
    CHECK_THROWS_AS(dwt2(Field(Shape{1, 8, 1}), WaveletFilter::sym4()), ShapeError);
}

TEST_CASE("idwt2 rejects inconsistent bands") {
    auto bands = dwt2(testing::random_field(Shape{1, 8, 8}, 1), WaveletFilter::sym4());
    bands.diagonal = Field(Shape{1, 3, 4});
    CHECK_THROWS_AS(idwt2(bands, WaveletFilter::sym4()), ShapeError);
}

TEST_CASE("serial and parallel dispatch agree bitwise") {
    const Field x = testing::random_field(Shape{3, 33, 18}, 8);
    for (auto b : {Boundary::periodization, Boundary::symmetric}) {
        const auto s = dwt2(x, WaveletFilter::sym4(), b, kernels::Exec::serial);
        const auto p = dwt2(x, WaveletFilter::sym4(), b, kernels::Exec::parallel);
        CHECK(s.low == p.low);
        CHECK(s.diagonal == p.diagonal);
        CHECK(idwt2(s, WaveletFilter::sym4(), kernels::Exec::serial) == idwt2(p, WaveletFilter::sym4()));
    }
}

TEST_CASE("multilevel round trip") {
    const Field x = testing::random_field(Shape{1, 40, 24}, 9);
    auto levels = dwt2_multilevel(x, WaveletFilter::sym4(), 3);
    CHECK(levels.size() == 3);
    CHECK(levels[2].low.height() == 5);
    CHECK(max_abs_diff(idwt2_multilevel(std::move(levels), WaveletFilter::sym4()), x) < 1e-5f);
}

TEST_CASE("boundary names") {
    CHECK(boundary_from_string("symmetric") == Boundary::symmetric);
    CHECK(to_string(Boundary::periodization) == "periodization");
    CHECK_THROWS_AS(boundary_from_string("zero"), ConfigError);
}
