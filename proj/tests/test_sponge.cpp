#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "revoq/errors.hpp"
#include "revoq/sponge.hpp"
#include "test_util.hpp"

using namespace revoq;

TEST_SUITE("sponge") {
    TEST_CASE("identity block function hashes to the input") {
        const SpongeParams p(3, 3, 0);
        const ExplicitPerm id = ExplicitPerm::identity(6);
        for (uint64_t iv = 0; iv < 8; ++iv) {
            for (uint64_t x = 0; x < 8; ++x) CHECK(sponge_hash(id, iv, x, p) == x);
        }
    }

    TEST_CASE("bit reversal truth table matches the fixture") {
        const auto fx = testutil::load_fixtures();
        const SpongeParams p(2, 2, 0);
        std::vector<uint32_t> table(16);
        for (uint32_t v = 0; v < 16; ++v) {
            uint32_t rev = 0;
            for (int b = 0; b < 4; ++b) rev |= ((v >> b) & 1u) << (3 - b);
            table[v] = rev;
        }
        const ExplicitPerm reversal(4, table);
        for (uint64_t iv = 0; iv < 4; ++iv) {
            for (uint64_t x = 0; x < 4; ++x) {
                CHECK(sponge_hash(reversal, iv, x, p) ==
                      fx["sponge"]["bit_reversal_r2_c2"][iv][x].get<uint64_t>());
            }
        }
    }

    TEST_CASE("truncation collisions match the sampling analytic") {
        // r = 8, c = 2: hashing the whole domain truncates 256 distinct
        // blocks; pairs collide with probability (2^c - 1) / (2^{r+c} - 1).
        const SpongeParams p(8, 2, 0);
        SplitRng rng(1);
        const int samples = 40;
        const double pair_prob = 3.0 / 1023.0;
        const double expect = 255.0 * 256.0 / 2.0 * pair_prob;
        double mean = 0.0, sq = 0.0;
        for (int i = 0; i < samples; ++i) {
            SplitRng trng = rng.split(i);
            const ExplicitPerm phi = sample_random_perm(10, trng);
            const uint64_t iv = trng.bits(2);
            std::map<uint64_t, uint64_t> buckets;
            for (uint64_t x = 0; x < 256; ++x) buckets[sponge_hash(phi, iv, x, p)]++;
            double pairs = 0;
            for (const auto& [h, c] : buckets) pairs += static_cast<double>(c) * (c - 1) / 2.0;
            mean += pairs;
            sq += pairs * pairs;
        }
        mean /= samples;
        const double sd = std::sqrt(std::max(sq / samples - mean * mean, 1e-9));
        CHECK(std::abs(mean - expect) <= 3.0 * sd / std::sqrt(static_cast<double>(samples)) + 1.0);
    }

    TEST_CASE("build_table basics") {
        SplitRng rng(2);
        const SpongeParams full(3, 3, 8);
        const ExplicitPerm phi = sample_random_perm(6, rng);
        const HashTable t = build_table(phi, full, rng);
        std::set<uint64_t> inputs(t.inputs.begin(), t.inputs.end());
        CHECK(inputs.size() == 8);  // whole domain, all distinct
        for (size_t i = 0; i < t.inputs.size(); ++i) {
            CHECK(t.hashes[i] == sponge_hash(phi, t.iv, t.inputs[i], full));
        }

        const SpongeParams empty(3, 3, 0);
        CHECK(build_table(phi, empty, rng).inputs.empty());
    }

    TEST_CASE("valid oracle agrees with range enumeration") {
        SplitRng rng(3);
        // Explicit backend: precomputed image.
        const SpongeParams p(3, 3, 0);
        auto phi = std::make_shared<ExplicitPerm>(sample_random_perm(6, rng));
        const uint64_t iv = rng.bits(3);
        ValidOracle valid(phi, iv, p);
        const auto range = sponge_range(*phi, iv, p);
        for (uint64_t h = 0; h < 8; ++h) CHECK(valid.query(h) == range[h]);
        CHECK(valid.queries() == 8);

        // Keyed backend: fiber walk through the inverse permutation.
        const SpongeParams keyed(3, 3, 0, PermBackend::kKeyed);
        auto f = std::make_shared<FeistelPerm>(PermKey::sample(6, rng));
        ValidOracle fiber(f, iv, keyed);
        const auto keyed_range = sponge_range(*f, iv, keyed);
        for (uint64_t h = 0; h < 8; ++h) CHECK(fiber.query(h) == keyed_range[h]);
    }

    TEST_CASE("table hashes always validate, identity validates everything") {
        SplitRng rng(4);
        const SpongeParams p(4, 3, 10);
        auto phi = std::make_shared<ExplicitPerm>(sample_random_perm(7, rng));
        const HashTable t = build_table(*phi, p, rng);
        ValidOracle valid(phi, t.iv, p);
        for (uint64_t h : t.hashes) CHECK(valid.query(h));

        auto id = std::make_shared<ExplicitPerm>(ExplicitPerm::identity(7));
        ValidOracle all(id, 0, p);
        for (uint64_t h = 0; h < 16; ++h) CHECK(all.query(h));
    }

    TEST_CASE("zero-query guess matches the exact fresh fraction") {
        const SpongeParams p(4, 4, 6);
        SplitRng rng(5);
        const AttackReport report =
            run_attack(p, SpongeStrategy::kRandomGuess, 0, 4000, rng);
        CHECK(report.mean_inverse_queries == 0.0);
        CHECK(report.mean_valid_queries == 0.0);
        CHECK(binomial_consistent(report.estimate.wins, report.estimate.trials,
                                  report.mean_fresh_fraction));
    }

    TEST_CASE("full table leaves nothing to find") {
        const SpongeParams p(4, 3, 16);  // table covers the whole rate domain
        SplitRng rng(6);
        for (SpongeStrategy s : {SpongeStrategy::kRandomGuess, SpongeStrategy::kInverseProbe,
                                 SpongeStrategy::kTableExtend}) {
            SplitRng srng = rng.split(static_cast<uint64_t>(s));
            const AttackReport report = run_attack(p, s, 16, 500, srng);
            CHECK(report.estimate.wins == 0);
        }
    }

    TEST_CASE("attack queries never exceed the budget") {
        const SpongeParams p(5, 4, 8);
        SplitRng rng(7);
        for (uint64_t budget : {uint64_t{0}, uint64_t{3}, uint64_t{17}}) {
            const AttackReport probe =
                run_attack(p, SpongeStrategy::kInverseProbe, budget, 300, rng);
            CHECK(probe.mean_inverse_queries <= static_cast<double>(budget));
            const AttackReport extend =
                run_attack(p, SpongeStrategy::kTableExtend, budget, 300, rng);
            CHECK(extend.mean_valid_queries <= static_cast<double>(budget));
        }
    }

    TEST_CASE("probing strategies improve with budget and stay under the bound") {
        const SpongeParams p(6, 6, 32);
        SplitRng rng(8);
        double prev = -1.0;
        for (uint64_t budget : {uint64_t{4}, uint64_t{64}, uint64_t{1024}}) {
            SplitRng srng = rng.split(budget);
            const AttackReport report =
                run_attack(p, SpongeStrategy::kInverseProbe, budget, 800, srng);
            CHECK(report.estimate.p_hat + 0.05 >= prev);  // loose monotone trend
            CHECK(report.estimate.p_hat <= report.bound + 1e-12);
            prev = report.estimate.p_hat;
        }
    }

    TEST_CASE("bound_eval structure") {
        const auto fx = testutil::load_fixtures();
        const SpongeParams fixture_params(6, 6, 32);
        for (const auto& row : fx["sponge"]["bound_r6_c6_S32"]) {
            CHECK(bound_eval(fixture_params, row[0].get<uint64_t>()) ==
                  doctest::Approx(row[1].get<double>()));
        }

        // A full table kills the fresh terms: only the T^3 terms remain.
        const SpongeParams full(6, 6, 64);
        const double t3 = 8.0 * 8.0 * 8.0;
        CHECK(bound_eval(full, 8) ==
              doctest::Approx(t3 / (4096.0 - 64.0) + t3 / 64.0));
        // Zero queries leave only the static fresh-fraction term.
        const SpongeParams some(6, 6, 48);
        CHECK(bound_eval(some, 0) == doctest::Approx(std::sqrt(16.0 / 64.0)));
        // Monotone in T.
        double prev = -1.0;
        for (uint64_t t = 0; t < 200; t += 7) {
            const double b = bound_eval(some, t);
            CHECK(b >= prev);
            prev = b;
        }
        // The scale flag multiplies through.
        CHECK(bound_eval(some, 5, 2.5) == doctest::Approx(2.5 * bound_eval(some, 5)));
    }

    TEST_CASE("classical unforgeability baselines") {
        SplitRng rng(9);
        // Zero-query guess: exact counting formula.
        const ClassicalUnforgeParams base(8, 64, 2);
        const SuccessEstimate guess = run_classical_unforgeability(
            base, ClassicalStrategy::kRandomGuess, 0, 4000, rng);
        CHECK(binomial_consistent(guess.wins, guess.trials, 62.0 / 254.0));

        // Pigeonhole: k = s can never produce a fresh element.
        const ClassicalUnforgeParams pigeon(4, 8, 8);
        const SuccessEstimate zero = run_classical_unforgeability(
            pigeon, ClassicalStrategy::kRandomGuess, 0, 2000, rng);
        CHECK(zero.wins == 0);

        // A full scan always wins when something fresh exists.
        const ClassicalUnforgeParams scan_params(6, 8, 2);
        const SuccessEstimate scan = run_classical_unforgeability(
            scan_params, ClassicalStrategy::kScan, 64, 500, rng);
        CHECK(scan.wins == scan.trials);
    }

    TEST_CASE("allow-forward mode wins immediately") {
        const SpongeParams p(4, 4, 4);
        SplitRng rng(10);
        const AttackReport report =
            run_attack(p, SpongeStrategy::kRandomGuess, 0, 200, rng, true);
        CHECK(report.estimate.wins == report.estimate.trials);
    }

    TEST_CASE("params validation") {
        CHECK_THROWS_AS(SpongeParams(0, 4, 0), BadParameter);
        CHECK_THROWS_AS(SpongeParams(12, 12, 0), DimensionTooLarge);
        CHECK(SpongeParams(12, 12, 0, PermBackend::kKeyed).block_bits() == 24);
        CHECK_THROWS_AS(SpongeParams(4, 4, 17), BadParameter);
    }
}
