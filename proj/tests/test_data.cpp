#include "orient/data.hpp"
#include "orient/error.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace orient;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("orient_test_" + name);
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

SynthSpec small_spec() {
    SynthSpec s;
    s.image_side = 16;
    s.count = 50;
    s.seed = 9;
    return s;
}

}  // namespace

TEST_CASE("generation is deterministic in the seed") {
    SynthSpec s = small_spec();
    s.noise_std = 0.0;
    const auto a = generate_synthetic(s);
    const auto b = generate_synthetic(s);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.samples[i].features == b.samples[i].features);
        CHECK(a.samples[i].angle == b.samples[i].angle);
    }
    s.noise_std = 0.1;
    const auto c = generate_synthetic(s);
    const auto d = generate_synthetic(s);
    CHECK(c.samples[7].features == d.samples[7].features);
    s.seed = 10;
    CHECK(generate_synthetic(s).samples[0].angle != c.samples[0].angle);
}

TEST_CASE("rendered shapes are front/back distinguishable") {
    for (SynthShape shape : {SynthShape::wedge, SynthShape::ellipse_with_notch}) {
        const auto up = render_shape(shape, 32, canonicalize(0));
        const auto down = render_shape(shape, 32, canonicalize(180));
        std::size_t differ = 0;
        for (std::size_t i = 0; i < up.size(); ++i) {
            CHECK(up[i] >= 0.0);
            CHECK(up[i] <= 1.0);
            differ += std::fabs(up[i] - down[i]) > 1e-12 ? 1 : 0;
        }
        CHECK(differ > up.size() / 20);
    }
}

TEST_CASE("wedge apex points along the stated convention") {
    // theta = 0 points at the top edge: the upper half carries the apex, so less mass
    const auto img = render_shape(SynthShape::wedge, 32, canonicalize(0));
    double top = 0.0, bottom = 0.0;
    for (std::size_t r = 0; r < 32; ++r) {
        for (std::size_t c = 0; c < 32; ++c) (r < 16 ? top : bottom) += img[r * 32 + c];
    }
    CHECK(top < bottom);
    // theta = 90 points right
    const auto right = render_shape(SynthShape::wedge, 32, canonicalize(90));
    double left_mass = 0.0, right_mass = 0.0;
    for (std::size_t r = 0; r < 32; ++r) {
        for (std::size_t c = 0; c < 32; ++c) (c < 16 ? left_mass : right_mass) += right[r * 32 + c];
    }
    CHECK(right_mass < left_mass);
}

TEST_CASE("stratified angles cover each bin once") {
    SynthSpec s = small_spec();
    s.count = 360;
    s.stratified = true;
    const auto d = generate_synthetic(s);
    std::vector<int> bins(360, 0);
    for (const auto& smp : d.samples) ++bins[static_cast<int>(smp.angle.degrees())];
    for (int b : bins) CHECK(b == 1);
}

TEST_CASE("random angles pass a chi-squared uniformity check") {
    SynthSpec s;
    s.image_side = 8;
    s.count = 3600;
    s.seed = 77;
    const auto d = generate_synthetic(s);
    std::vector<double> bins(36, 0.0);
    for (const auto& smp : d.samples) bins[static_cast<int>(smp.angle.degrees() / 10.0)] += 1.0;
    double chi2 = 0.0;
    for (double b : bins) chi2 += (b - 100.0) * (b - 100.0) / 100.0;
    // chi-squared, 35 degrees of freedom, upper 0.001 critical value
    CHECK(chi2 < 66.62);
}

TEST_CASE("mean subtraction zeroes every feature") {
    const auto d = generate_synthetic(small_spec());
    for (std::size_t i = 0; i < d.dim; ++i) {
        double m = 0.0;
        for (const auto& smp : d.samples) m += smp.features[i];
        CHECK(std::fabs(m / d.size()) < 1e-9);
    }
}

TEST_CASE("mirror maps angles and is an involution") {
    Dataset d;
    d.dim = 4;
    d.samples.push_back({{1, 2, 3, 4}, canonicalize(90)});
    d.samples.push_back({{5, 6, 7, 8}, canonicalize(0)});
    const auto m = mirror_augment(d);
    REQUIRE(m.size() == 4);
    CHECK(m.samples[2].angle.degrees() == 270.0);
    CHECK(m.samples[2].features == std::vector<double>{2, 1, 4, 3});
    CHECK(m.samples[3].angle.degrees() == 0.0);
    const auto twice = mirror(mirror(d));
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(twice.samples[i].features == d.samples[i].features);
        CHECK(twice.samples[i].angle == d.samples[i].angle);
    }
    Dataset bad;
    bad.dim = 5;
    bad.samples.push_back({{1, 2, 3, 4, 5}, canonicalize(0)});
    CHECK_THROWS_AS(mirror_augment(bad), Error);
}

TEST_CASE("mirrored render equals the render at 360 - theta") {
    for (double t : {0.0, 30.0, 90.0, 200.0, 333.0}) {
        Dataset d;
        d.dim = 32 * 32;
        d.samples.push_back({render_shape(SynthShape::wedge, 32, canonicalize(t)), canonicalize(t)});
        const auto m = mirror(d);
        const auto direct = render_shape(SynthShape::wedge, 32, canonicalize(360.0 - t));
        std::size_t differ = 0;
        for (std::size_t i = 0; i < direct.size(); ++i) differ += std::fabs(direct[i] - m.samples[0].features[i]) > 0.07 ? 1 : 0;
        // supersampling is not symmetric about pixel centres, allow a few edge pixels
        CHECK(differ <= 8);
    }
}

TEST_CASE("save/load round trip") {
    const auto d = generate_synthetic(small_spec());
    const auto p = temp_file("roundtrip.csv");
    save_dataset(d, p);
    const auto back = load_dataset(p);
    REQUIRE(back.size() == d.size());
    CHECK(back.dim == d.dim);
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(std::fabs(back.samples[i].angle.degrees() - d.samples[i].angle.degrees()) < 1e-9);
        for (std::size_t j = 0; j < d.dim; ++j) CHECK(back.samples[i].features[j] == d.samples[i].features[j]);
    }
    std::filesystem::remove(p);
}

TEST_CASE("load errors") {
    const auto p = temp_file("bad.csv");
    write_file(p, "");
    try {
        load_dataset(p);
        FAIL("expected empty-dataset");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::empty_dataset);
    }

    std::string text = "# orient-dataset v1 features=16\n10";
    for (int i = 0; i < 16; ++i) text += ",0.5";
    text += "\n20";
    for (int i = 0; i < 15; ++i) text += ",0.5";
    text += "\n";
    write_file(p, text);
    try {
        load_dataset(p);
        FAIL("expected format error");
    } catch (const ParseError& e) {
        CHECK(e.kind() == ErrorKind::format_error);
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }

    write_file(p, "# orient-dataset v1 features=2\n10,0.5,abc\n");
    try {
        load_dataset(p);
        FAIL("expected parse error");
    } catch (const ParseError& e) {
        CHECK(e.kind() == ErrorKind::parse_error);
        CHECK(e.line() == 2);
    }

    write_file(p, "angle,f0\n10,0.5\n");
    CHECK_THROWS_AS(load_dataset(p), Error);
    std::filesystem::remove(p);
    try {
        load_dataset(temp_file("does_not_exist.csv"));
        FAIL("expected io error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::io_error);
    }
}

TEST_CASE("synth spec validation") {
    SynthSpec s;
    s.image_side = 4;
    CHECK_THROWS_AS(generate_synthetic(s), Error);
    s = SynthSpec{};
    s.count = 0;
    CHECK_THROWS_AS(generate_synthetic(s), Error);
    CHECK(parse_synth_shape("ellipse_with_notch") == SynthShape::ellipse_with_notch);
    CHECK_THROWS_AS(parse_synth_shape("circle"), Error);
}
