#include "orient/error.hpp"
#include "orient/metrics.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace orient;

namespace {

std::vector<Angle> angles(std::initializer_list<double> ds) {
    std::vector<Angle> out;
    for (double d : ds) out.push_back(canonicalize(d));
    return out;
}

}  // namespace

TEST_CASE("identity predictions") {
    const auto a = angles({1, 50, 200, 359});
    const auto r = evaluate(a, a);
    CHECK(r.mean_ae == 0.0);
    CHECK(r.median_ae == 0.0);
    CHECK(r.acc_22_5 == 1.0);
    CHECK(r.acc_45 == 1.0);
    CHECK(r.count == 4);
}

TEST_CASE("hand-built error multiset") {
    const auto r = evaluate(angles({10, 30, 50}), angles({0, 0, 0}));
    CHECK(r.mean_ae == 30.0);
    CHECK(r.median_ae == 30.0);
    CHECK(r.acc_22_5 == 1.0 / 3.0);
    CHECK(r.acc_45 == 2.0 / 3.0);
}

TEST_CASE("wraparound and boundaries") {
    CHECK(evaluate(angles({350}), angles({10})).mean_ae == doctest::Approx(20.0));
    const auto r = evaluate(angles({22.5, 45}), angles({0, 0}));
    CHECK(r.acc_22_5 == 0.5);
    CHECK(r.acc_45 == 1.0);
    CHECK(r.median_ae == doctest::Approx(33.75));
    CHECK(evaluate(angles({180, 0}), angles({0, 180})).mean_ae == 180.0);
}

TEST_CASE("input validation") {
    CHECK_THROWS_AS(evaluate(angles({}), angles({})), Error);
    CHECK_THROWS_AS(evaluate(angles({1}), angles({1, 2})), Error);
}

TEST_CASE("rotation invariance and accuracy ordering") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(0, 360);
    for (int t = 0; t < 50; ++t) {
        std::vector<Angle> p, g, pr, gr;
        const double rot = u(rng);
        for (int i = 0; i < 31; ++i) {
            const double a = u(rng), b = u(rng);
            p.push_back(canonicalize(a));
            g.push_back(canonicalize(b));
            pr.push_back(canonicalize(a + rot));
            gr.push_back(canonicalize(b + rot));
        }
        const auto r1 = evaluate(p, g);
        const auto r2 = evaluate(pr, gr);
        CHECK(r1.mean_ae == doctest::Approx(r2.mean_ae).epsilon(1e-9));
        CHECK(r1.median_ae == doctest::Approx(r2.median_ae).epsilon(1e-9));
        CHECK(r1.acc_22_5 <= r1.acc_45);
        CHECK(r1.mean_ae <= 180.0);
        // inflating every error cannot raise accuracy
        auto errs = angular_errors(p, g);
        for (double& e : errs) e = std::min(180.0, e + 5.0);
        const auto worse = evaluate_errors(errs);
        CHECK(worse.acc_22_5 <= r1.acc_22_5);
        CHECK(worse.acc_45 <= r1.acc_45);
    }
}

TEST_CASE("serialization") {
    const auto r = evaluate(angles({10, 30, 50}), angles({0, 0, 0}));
    const auto kv = to_key_value(r);
    CHECK(kv.find("mean_ae = 30\n") != std::string::npos);
    CHECK(kv.find("count = 3\n") != std::string::npos);
    const auto j = to_json(r);
    CHECK(j["median_ae"] == 30.0);
    CHECK(j["count"] == 3);
}
