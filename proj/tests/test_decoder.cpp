#include "oracles.hpp"
#include "orient/decoder.hpp"
#include "orient/error.hpp"

#include <doctest.h>

#include <omp.h>

#include <random>

using namespace orient;

namespace {

VoteSet random_votes(std::mt19937_64& rng, const DiscretizationScheme& s) {
    std::gamma_distribution<double> gamma(0.3, 1.0);  // Dirichlet(0.3) per task
    SoftmaxVotes sv{s.n_tasks(), s.n_classes(), std::vector<double>(s.size())};
    for (std::size_t m = 0; m < s.n_tasks(); ++m) {
        double total = 0.0;
        for (std::size_t k = 0; k < s.n_classes(); ++k) total += sv.probs[m * s.n_classes() + k] = gamma(rng) + 1e-12;
        for (std::size_t k = 0; k < s.n_classes(); ++k) sv.probs[m * s.n_classes() + k] /= total;
    }
    return votes_from_softmax(sv, s);
}

MeanShiftConfig config_with(double nu) {
    MeanShiftConfig c;
    c.nu = nu;
    return c;
}

}  // namespace

TEST_CASE("decode_atan2") {
    CHECK(decode_atan2({1, 0}).degrees() == 0.0);
    CHECK(decode_atan2({-0.3, -0.3}).degrees() == doctest::Approx(225.0));
    CHECK(decode_atan2({0.0001, 0.9999}).degrees() == doctest::Approx(89.99426985).epsilon(1e-10));
    try {
        decode_atan2({0, 0});
        FAIL("expected degenerate-prediction");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::degenerate_prediction);
    }
}

TEST_CASE("density_at examples") {
    const VoteSet single{{30.0}, {1.0}};
    CHECK(density_at(canonicalize(30), single, Concentration(1.0)) == doctest::Approx(0.3417104887).epsilon(1e-9));

    const VoteSet two{{0.0, 180.0}, {0.5, 0.5}};
    // 2 * 0.5 * k_1(90) = 1 / (2 pi I0(1))
    CHECK(density_at(canonicalize(90), two, Concentration(1.0)) ==
          doctest::Approx(1.0 / (2.0 * oracle::kPi * oracle::i0_power_series(1.0))).epsilon(1e-10));
    CHECK(density_at(canonicalize(90), two, Concentration(1.0)) == doctest::Approx(0.1257082636).epsilon(1e-9));

    // nu = 0 collapses to M / (2 pi)
    std::mt19937_64 rng(2);
    const auto s = build_scheme(8, 3);
    const auto votes = random_votes(rng, s);
    for (double t = 0; t < 360; t += 17.0) {
        CHECK(density_at(canonicalize(t), votes, Concentration(0.0)) == doctest::Approx(3.0 / (2.0 * oracle::kPi)));
    }
}

TEST_CASE("density_at is periodic and matches the direct sum") {
    std::mt19937_64 rng(4);
    const auto s = build_scheme(8, 9);
    const auto votes = random_votes(rng, s);
    const VonMisesKernel k(Concentration(4.0));
    for (double t = 0.3; t < 360; t += 11.1) {
        CHECK(density_at(t, votes, k) == doctest::Approx(density_at(t + 360.0, votes, k)).epsilon(1e-12));
        double direct = 0.0;
        for (std::size_t i = 0; i < votes.size(); ++i) {
            direct += votes.probabilities[i] * oracle::von_mises(t - votes.orientations[i], 4.0);
        }
        CHECK(density_at(t, votes, k) == doctest::Approx(direct).epsilon(1e-9));
    }
}

TEST_CASE("decode_meanshift examples") {
    CHECK(decode_meanshift({{30.0}, {1.0}}).degrees() == doctest::Approx(30.0).epsilon(1e-9));
    MeanShiftConfig c1 = config_with(1.0);
    c1.tolerance = 1e-6;
    CHECK(decode_meanshift({{0.0, 90.0}, {0.5, 0.5}}, c1).degrees() == doctest::Approx(45.0).epsilon(1e-6));
    const Angle a = decode_meanshift({{0.0, 180.0}, {0.9, 0.1}}, config_with(5.0));
    CHECK(angular_distance(a, canonicalize(0)) < 1e-6);
}

TEST_CASE("decode_meanshift error paths") {
    try {
        decode_meanshift({{0.0, 90.0}, {0.0, 0.0}});
        FAIL("expected empty-votes");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::empty_votes);
    }
    CHECK_THROWS_AS(decode_meanshift({{0.0, 90.0}, {0.5}}), Error);
    CHECK_THROWS_AS(decode_meanshift({{0.0}, {-0.5}}), Error);
    MeanShiftConfig bad;
    bad.tolerance = 0.0;
    CHECK_THROWS_AS(decode_meanshift({{0.0}, {1.0}}, bad), Error);

    // one iteration cannot converge when the start is far from the mode
    MeanShiftConfig tight = config_with(1.0);
    tight.max_iterations = 1;
    try {
        decode_meanshift({{0.0, 90.0}, {0.5, 0.5}}, tight);
        FAIL("expected convergence failure");
    } catch (const ConvergenceFailure& e) {
        CHECK(e.kind() == ErrorKind::convergence_failure);
        CHECK(e.best_density() > 0.0);
        CHECK(e.best_degrees() >= 0.0);
    }
}

TEST_CASE("mean-shift ascends from every start") {
    std::mt19937_64 rng(8);
    const auto s = build_scheme(8, 9);
    for (double nu : {1.0, 4.0, 8.0}) {
        for (int t = 0; t < 10; ++t) {
            const auto votes = random_votes(rng, s);
            const VonMisesKernel k{Concentration(nu)};
            for (const auto& c : meanshift_modes(votes, config_with(nu))) {
                CHECK(c.converged);
                CHECK(c.density >= density_at(c.start, votes, k) - 1e-15);
            }
        }
    }
}

TEST_CASE("decode_meanshift matches a 0.01-degree grid argmax") {
    std::mt19937_64 rng(12);
    const auto s = build_scheme(8, 9);
    for (double nu : {1.0, 2.0, 4.0, 8.0}) {
        const oracle::TabulatedGrid grid(nu, 0.01);
        for (int t = 0; t < 10; ++t) {
            const auto votes = random_votes(rng, s);
            const auto best = grid.argmax(votes.orientations, votes.probabilities);
            const Angle got = decode_meanshift(votes, config_with(nu));
            CHECK(angular_distance(got, canonicalize(best.angle)) <= 0.05);
            CHECK(density_at(got, votes, Concentration(nu)) >= best.density - 1e-9);
        }
    }
}

TEST_CASE("tabulated and direct grid oracles agree") {
    std::mt19937_64 rng(13);
    const auto s = build_scheme(4, 3);
    const auto votes = random_votes(rng, s);
    const auto a = oracle::TabulatedGrid(2.0, 0.5).argmax(votes.orientations, votes.probabilities);
    const auto b = oracle::grid_argmax_direct(votes.orientations, votes.probabilities, 2.0, 0.5);
    CHECK(a.angle == b.angle);
    CHECK(a.density == doctest::Approx(b.density).epsilon(1e-12));
}

TEST_CASE("decode_meanshift is rotation equivariant") {
    std::mt19937_64 rng(14);
    const auto s = build_scheme(8, 9);
    for (int t = 0; t < 10; ++t) {
        const auto votes = random_votes(rng, s);
        const Angle base = decode_meanshift(votes);
        for (double delta : {13.0, 90.0, 201.0}) {
            VoteSet rotated = votes;
            for (double& o : rotated.orientations) o = canonicalize(o + delta).degrees();
            const Angle got = decode_meanshift(rotated);
            CHECK(angular_distance(got, canonicalize(base.degrees() + delta)) < 1e-4);
        }
    }
}

TEST_CASE("equal-density modes resolve to the smallest angle") {
    // symmetric pair of sharp peaks at 100 and 260
    const VoteSet votes{{100.0, 260.0}, {1.0, 1.0}};
    const Angle a = decode_meanshift(votes, config_with(50.0));
    CHECK(a.degrees() == doctest::Approx(100.0).epsilon(1e-6));
    std::vector<ModeCandidate> cands{{0, 200.0, 1.0, 3, true}, {0, 20.0, 1.0, 3, true}, {0, 30.0, 0.5, 3, true}};
    CHECK(select_mode(cands).degrees() == 20.0);
}

TEST_CASE("votes_from_softmax layout") {
    const auto a = votes_from_softmax({1, 2, {0.5, 0.5}}, build_scheme(2, 1));
    CHECK(a.orientations == std::vector<double>{0, 180});
    CHECK(a.probabilities == std::vector<double>{0.5, 0.5});

    const auto s43 = build_scheme(4, 3);
    const auto b = votes_from_softmax({3, 4, std::vector<double>(12, 0.25)}, s43);
    CHECK(b.orientations == std::vector<double>{0, 90, 180, 270, 30, 120, 210, 300, 60, 150, 240, 330});
    double total = 0.0;
    for (double p : b.probabilities) total += p;
    CHECK(total == doctest::Approx(3.0));

    const auto c = votes_from_softmax({2, 2, {1, 0, 0, 1}}, build_scheme(2, 2));
    CHECK(c.orientations == std::vector<double>{0, 180, 90, 270});
    CHECK(c.probabilities == std::vector<double>{1, 0, 0, 1});

    try {
        votes_from_softmax({1, 2, {0.5, 0.5}}, build_scheme(2, 2));
        FAIL("expected invalid-config");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::invalid_config);
    }
}

TEST_CASE("one-hot roundtrip error stays inside the lattice cell") {
    const auto s = build_scheme(8, 9);
    double worst = 0.0;
    for (int t = 0; t < 360; ++t) {
        const Angle theta = canonicalize(t);
        const Angle got = decode_meanshift(votes_from_label(assign_labels(theta, s), s));
        worst = std::max(worst, angular_distance(got, theta));
    }
    // cells are 5 degrees wide, so integer angles are at most 2 degrees from the decoded centre
    CHECK(worst <= 2.0 + 1e-6);
}

TEST_CASE("parallel mean-shift equals the serial reference bit for bit") {
    std::mt19937_64 rng(15);
    const auto s = build_scheme(8, 9);
    const int saved = omp_get_max_threads();
    omp_set_num_threads(4);
    for (int t = 0; t < 20; ++t) {
        const auto votes = random_votes(rng, s);
        const auto par = meanshift_modes(votes, {});
        const auto ser = reference::meanshift_modes_serial(votes, {});
        REQUIRE(par.size() == ser.size());
        for (std::size_t i = 0; i < par.size(); ++i) {
            CHECK(par[i].mode == ser[i].mode);
            CHECK(par[i].density == ser[i].density);
            CHECK(par[i].iterations == ser[i].iterations);
        }
        CHECK(decode_meanshift(votes) == reference::decode_meanshift_serial(votes));
    }
    omp_set_num_threads(saved);
}
