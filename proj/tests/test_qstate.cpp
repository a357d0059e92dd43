#include <doctest.h>

#include <cmath>
#include <complex>
#include <map>

#include "revoq/errors.hpp"
#include "revoq/qstate.hpp"
#include "revoq/stats.hpp"
#include "test_util.hpp"

using namespace revoq;
using std::complex;

namespace {

constexpr double kSqrt2Inv = 0.7071067811865476;

DenseState random_subset_state(int width, int size, SplitRng& rng) {
    return subset_to_dense(SubsetState(width, rng.distinct_sorted(uint64_t{1} << width, size)));
}

}  // namespace

TEST_SUITE("qstate") {
    TEST_CASE("subset_to_dense basics") {
        const DenseState single = subset_to_dense(SubsetState(1, {0}));
        CHECK(single.amp(0).real() == doctest::Approx(1.0));
        CHECK(single.amp(1).real() == doctest::Approx(0.0));

        const DenseState uniform = subset_to_dense(SubsetState(1, {0, 1}));
        CHECK(uniform.amp(0).real() == doctest::Approx(kSqrt2Inv));
        CHECK(uniform.amp(1).real() == doctest::Approx(kSqrt2Inv));

        const DenseState three = subset_to_dense(SubsetState(3, {1, 2, 5}));
        const double w = 1.0 / std::sqrt(3.0);
        for (int64_t i = 0; i < 8; ++i) {
            const double expect = (i == 1 || i == 2 || i == 5) ? w : 0.0;
            CHECK(three.amp(i).real() == doctest::Approx(expect));
        }
        CHECK(three.is_normalized());
    }

    TEST_CASE("subset state invariants enforced") {
        CHECK_THROWS_AS(SubsetState(2, {}), BadParameter);
        CHECK_THROWS_AS(SubsetState(2, {1, 1}), BadParameter);
        CHECK_THROWS_AS(SubsetState(2, {2, 1}), BadParameter);
        CHECK_THROWS_AS(SubsetState(2, {4}), BadParameter);
    }

    TEST_CASE("tuple_to_dense enumerates orderings") {
        const DenseState k1 = tuple_to_dense(TupleState(1, {0}));
        CHECK(k1.amp(0).real() == doctest::Approx(1.0));

        // (|01> + |10>)/sqrt(2)
        const DenseState k2 = tuple_to_dense(TupleState(1, {0, 1}));
        CHECK(k2.amp(0b01).real() == doctest::Approx(kSqrt2Inv));
        CHECK(k2.amp(0b10).real() == doctest::Approx(kSqrt2Inv));
        CHECK(k2.amp(0).real() == doctest::Approx(0.0));

        // Three distinct 3-bit strings: 3! orderings, each 1/sqrt(6).
        const DenseState k3 = tuple_to_dense(TupleState(3, {1, 2, 4}));
        int nonzero = 0;
        for (int64_t i = 0; i < k3.dim(); ++i) {
            if (std::abs(k3.amp(i)) > 1e-12) {
                ++nonzero;
                CHECK(std::abs(k3.amp(i)) == doctest::Approx(1.0 / std::sqrt(6.0)));
            }
        }
        CHECK(nonzero == 6);
        CHECK(k3.is_normalized());

        CHECK_THROWS_AS(TupleState(3, {1, 1, 4}), BadParameter);
        CHECK_THROWS_AS(tuple_to_dense(TupleState(6, {1, 2, 3, 4})), DimensionTooLarge);
    }

    TEST_CASE("tensor_power") {
        const DenseState zero = DenseState::basis(2, 0);
        CHECK(project_accept_prob(tensor_power(zero, 1), zero) == doctest::Approx(1.0));

        const DenseState plus = subset_to_dense(SubsetState(1, {0, 1}));
        const DenseState plus2 = tensor_power(plus, 2);
        for (int64_t i = 0; i < 4; ++i) CHECK(plus2.amp(i).real() == doctest::Approx(0.5));

        // Kronecker by hand: subset {1,2} of n=2, k=2.
        const DenseState s = subset_to_dense(SubsetState(2, {1, 2}));
        const DenseState s2 = tensor_power(s, 2);
        std::map<int64_t, double> expect;
        for (int64_t a : {1, 2}) {
            for (int64_t b : {1, 2}) expect[(a << 2) | b] = 0.5;
        }
        for (int64_t i = 0; i < 16; ++i) {
            CHECK(s2.amp(i).real() == doctest::Approx(expect.count(i) ? expect[i] : 0.0));
        }
        CHECK_THROWS_AS(tensor_power(plus2, 11), DimensionTooLarge);
    }

    TEST_CASE("project_accept_prob") {
        SplitRng rng(5);
        const DenseState a = random_subset_state(3, 4, rng);
        CHECK(project_accept_prob(a, a) == doctest::Approx(1.0));
        CHECK(project_accept_prob(DenseState::basis(4, 1), DenseState::basis(4, 2)) ==
              doctest::Approx(0.0));

        const DenseState s01 = subset_to_dense(SubsetState(2, {0, 1}));
        const DenseState s12 = subset_to_dense(SubsetState(2, {1, 2}));
        CHECK(project_accept_prob(s01, s12) == doctest::Approx(0.25));

        CHECK_THROWS_AS(project_accept_prob(s01, DenseState::basis(8, 0)), DimensionMismatch);
    }

    TEST_CASE("global phase invariance") {
        SplitRng rng(17);
        for (int i = 0; i < 20; ++i) {
            const DenseState a = random_subset_state(4, 3, rng);
            const double theta = rng.next_double() * 2 * M_PI;
            Amplitudes rotated = a.amplitudes() * std::polar(1.0, theta);
            const DenseState b{Amplitudes(rotated)};
            CHECK(project_accept_prob(a, b) == doctest::Approx(1.0).epsilon(1e-9));
        }
    }

    TEST_CASE("project_and_collapse outcomes") {
        SplitRng rng(11);
        const DenseState s01 = subset_to_dense(SubsetState(2, {0, 1}));
        const DenseState s12 = subset_to_dense(SubsetState(2, {1, 2}));

        int accepts = 0;
        const int trials = 4000;
        for (int i = 0; i < trials; ++i) {
            auto [outcome, post] = project_and_collapse(s01, s12, rng);
            CHECK(post.is_normalized(1e-9));
            if (outcome == MeasureOutcome::kAccept) {
                ++accepts;
                CHECK(project_accept_prob(post, s12) == doctest::Approx(1.0));
            } else {
                CHECK(std::abs(s12.amplitudes().dot(post.amplitudes())) <= 1e-9);
            }
        }
        CHECK(binomial_consistent(accepts, trials, 0.25));

        // Seeded determinism.
        SplitRng r1(3), r2(3);
        auto [o1, p1] = project_and_collapse(s01, s12, r1);
        auto [o2, p2] = project_and_collapse(s01, s12, r2);
        CHECK(o1 == o2);
        CHECK(project_accept_prob(p1, p2) == doctest::Approx(1.0));
    }

    TEST_CASE("measure_computational") {
        SplitRng rng(23);
        CHECK(measure_computational(DenseState::basis(8, 5), rng) == 5);

        const DenseState s = subset_to_dense(SubsetState(2, {1, 2}));
        uint64_t ones = 0;
        const uint64_t trials = 10000;
        for (uint64_t i = 0; i < trials; ++i) {
            const uint64_t v = measure_computational(s, rng);
            REQUIRE((v == 1 || v == 2));
            ones += v == 1 ? 1 : 0;
        }
        CHECK(binomial_consistent(ones, trials, 0.5));

        // Register-wise measurement of copies stays inside the support.
        const SubsetState subset(3, {0, 3, 6});
        for (int i = 0; i < 100; ++i) {
            for (uint64_t v : measure_subset_copies(subset, 3, rng)) CHECK(subset.contains(v));
        }
    }

    TEST_CASE("measure_register collapses one register") {
        SplitRng rng(29);
        const DenseState s = subset_to_dense(SubsetState(2, {1, 2}));
        const DenseState two = tensor_power(s, 2);
        auto [outcome, post] = measure_register(two, 2, 2, 0, rng);
        CHECK((outcome == 1 || outcome == 2));
        CHECK(post.is_normalized());
        // Remaining register is untouched: projecting onto |outcome> (x) |s>
        // succeeds with certainty.
        const DenseState expected = tensor(DenseState::basis(4, outcome), s);
        CHECK(project_accept_prob(post, expected) == doctest::Approx(1.0));
    }

    TEST_CASE("avg_subset_density closed forms") {
        const DensityMatrix plus = avg_subset_density(1, 2, 1);
        CHECK(plus.matrix()(0, 0).real() == doctest::Approx(0.5));
        CHECK(plus.matrix()(0, 1).real() == doctest::Approx(0.5));

        const DensityMatrix mix = avg_subset_density(2, 1, 1);
        for (int64_t i = 0; i < 4; ++i) {
            for (int64_t j = 0; j < 4; ++j) {
                CHECK(mix.matrix()(i, j).real() == doctest::Approx(i == j ? 0.25 : 0.0));
            }
        }

        // n=2, s=2: enumerate the six subsets by hand.
        Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(4, 4);
        const std::vector<std::vector<uint64_t>> subsets = {{0, 1}, {0, 2}, {0, 3},
                                                            {1, 2}, {1, 3}, {2, 3}};
        for (const auto& sub : subsets) {
            const auto v = subset_to_dense(SubsetState(2, sub)).amplitudes();
            expect += v * v.adjoint() / 6.0;
        }
        const DensityMatrix got = avg_subset_density(2, 2, 1);
        CHECK((got.matrix() - expect).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(got.is_valid());

        // Fixture agreement.
        const auto fx = testutil::load_fixtures();
        const auto& mat = fx["qstate"]["avg_subset_n2_s2_k1"];
        for (int64_t r = 0; r < 4; ++r) {
            for (int64_t c = 0; c < 4; ++c) {
                CHECK(got.matrix()(r, c).real() ==
                      doctest::Approx(mat[r][c][0].get<double>()).epsilon(1e-12));
            }
        }
    }

    TEST_CASE("avg_tuple_density closed forms") {
        const DensityMatrix half = avg_tuple_density(1, 1);
        CHECK(half.matrix()(0, 0).real() == doctest::Approx(0.5));
        CHECK(half.matrix()(1, 1).real() == doctest::Approx(0.5));
        CHECK(std::abs(half.matrix()(0, 1)) <= 1e-12);

        // n=2, k=2: average of the six symmetrized two-element states.
        Eigen::MatrixXcd expect = Eigen::MatrixXcd::Zero(16, 16);
        const std::vector<std::vector<uint64_t>> pairs = {{0, 1}, {0, 2}, {0, 3},
                                                          {1, 2}, {1, 3}, {2, 3}};
        for (const auto& pr : pairs) {
            const auto v = tuple_to_dense(TupleState(2, pr)).amplitudes();
            expect += v * v.adjoint() / 6.0;
        }
        const DensityMatrix got = avg_tuple_density(2, 2);
        CHECK((got.matrix() - expect).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(got.is_valid());

        // k=1 coincides with the subset average at s=1.
        const DensityMatrix a = avg_tuple_density(2, 1);
        const DensityMatrix b = avg_subset_density(2, 1, 1);
        CHECK((a.matrix() - b.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
    }

    TEST_CASE("density budget errors") {
        // Exact enumeration infeasible without a sample count.
        CHECK_THROWS_AS(avg_subset_density(5, 16, 1), BudgetExceeded);
        SplitRng rng(31);
        const DensityMatrix mc = avg_subset_density(5, 16, 1, std::nullopt, 200, &rng);
        CHECK(mc.dim() == 32);
    }

    TEST_CASE("monte carlo average converges to exact") {
        SplitRng rng(37);
        const DensityMatrix exact = avg_subset_density(3, 4, 1);
        for (int64_t samples : {400, 1600}) {
            SplitRng mc_rng = rng.split(samples);
            // Force the Monte-Carlo path through a tiny work budget by
            // sampling directly here.
            Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(8, 8);
            for (int64_t i = 0; i < samples; ++i) {
                acc += DensityMatrix::pure(random_subset_state(3, 4, mc_rng)).matrix();
            }
            acc /= static_cast<double>(samples);
            const double frob = (acc - exact.matrix()).norm();
            CHECK(frob <= 5.0 / std::sqrt(static_cast<double>(samples)));
        }
    }

    TEST_CASE("trace_distance") {
        const DensityMatrix zero = DensityMatrix::pure(DenseState::basis(2, 0));
        const DensityMatrix one = DensityMatrix::pure(DenseState::basis(2, 1));
        const DensityMatrix plus = DensityMatrix::pure(subset_to_dense(SubsetState(1, {0, 1})));

        CHECK(trace_distance(zero, zero) == doctest::Approx(0.0));
        CHECK(trace_distance(zero, one) == doctest::Approx(1.0));
        CHECK(trace_distance(zero, plus) == doctest::Approx(kSqrt2Inv));
        CHECK(trace_distance(zero, plus) == doctest::Approx(trace_distance(plus, zero)));

        const auto fx = testutil::load_fixtures();
        CHECK(trace_distance(zero, plus) ==
              doctest::Approx(fx["qstate"]["td_zero_vs_plus"].get<double>()));
    }

    TEST_CASE("pure-state trace distance formula") {
        SplitRng rng(41);
        int checked = 0;
        while (checked < 25) {
            const auto sa = rng.distinct_sorted(8, 1 + rng.below(8));
            const auto sb = rng.distinct_sorted(8, 1 + rng.below(8));
            if (sa == sb) continue;  // sqrt is ill-conditioned at overlap 1
            ++checked;
            const DenseState a = subset_to_dense(SubsetState(3, sa));
            const DenseState b = subset_to_dense(SubsetState(3, sb));
            const double overlap = project_accept_prob(a, b);
            const double direct = trace_distance(DensityMatrix::pure(a), DensityMatrix::pure(b));
            CHECK(direct == doctest::Approx(std::sqrt(1.0 - overlap)).epsilon(1e-9));
        }
        // Identical states: the distance itself is zero to working precision.
        const DenseState a = random_subset_state(3, 5, rng);
        CHECK(trace_distance(DensityMatrix::pure(a), DensityMatrix::pure(a)) <= 1e-12);
    }

    TEST_CASE("lemma trace distances match the closed-form oracle") {
        // k = 1 over the full 3-bit domain: the averaged densities have the
        // aI + bJ structure whose spectrum is known exactly.
        const auto fx = testutil::load_fixtures();
        const DensityMatrix tuple_avg = avg_tuple_density(3, 1);
        for (uint64_t s : {uint64_t{2}, uint64_t{4}, uint64_t{8}}) {
            const DensityMatrix subset_avg = avg_subset_density(3, static_cast<int>(s), 1);
            const double td = trace_distance(subset_avg, tuple_avg);
            const double oracle = fx["qstate"]["lemma_td_n3_t8_k1"][std::to_string(s)].get<double>();
            CHECK(td == doctest::Approx(oracle).epsilon(1e-9));
            CHECK(td >= 0.0);
            CHECK(td <= 1.0);
        }
    }

    TEST_CASE("state json serialization") {
        const DenseState s = subset_to_dense(SubsetState(2, {1, 3}));
        const std::string j = s.to_json();
        CHECK(j.find("[1,") != std::string::npos);
        CHECK(j.find("[3,") != std::string::npos);
        CHECK(j.find("[0,") == std::string::npos);
    }
}
