#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "patcorp/errors.hpp"
#include "patcorp/trainprep.hpp"

using namespace patcorp;

namespace {
const MlmVocabInfo kVocab{1000};

std::vector<std::uint32_t> plain_ids(std::size_t n, std::uint64_t seed = 9) {
    std::mt19937_64 rng(seed);
    std::vector<std::uint32_t> ids(n);
    for (auto& id : ids) id = kNumSpecials + static_cast<std::uint32_t>(rng() % 900);
    return ids;
}
}  // namespace

TEST_CASE("mask_sequence: rate boundaries") {
    const auto ids = plain_ids(200);
    auto zero = mask_sequence(ids, 0.0, kVocab, 1);
    for (auto l : zero.labels) CHECK(l == kIgnoreLabel);
    CHECK(zero.input_ids == ids);

    auto one = mask_sequence(ids, 1.0, kVocab, 1);
    for (std::size_t i = 0; i < ids.size(); ++i) CHECK(one.labels[i] == ids[i]);

    CHECK_THROWS_AS(mask_sequence(ids, 1.5, kVocab, 1), DomainError);
    CHECK_THROWS_AS(mask_sequence(ids, -0.1, kVocab, 1), DomainError);
}

TEST_CASE("mask_sequence: empirical rate over 1e6 maskable positions") {
    std::uint64_t supervised = 0, total = 0;
    for (int batch = 0; batch < 1000; ++batch) {
        const auto ids = plain_ids(1000, batch);
        auto ex = mask_sequence(ids, 0.30, kVocab, 777 + batch);
        for (auto l : ex.labels) supervised += l != kIgnoreLabel ? 1 : 0;
        total += ids.size();
    }
    const double rate = static_cast<double>(supervised) / static_cast<double>(total);
    CHECK(rate >= 0.297);
    CHECK(rate <= 0.303);
}

TEST_CASE("mask_sequence: specials are never corrupted") {
    std::vector<std::uint32_t> ids = pack_or_truncate(plain_ids(50), 64, true);
    for (int seed = 0; seed < 300; ++seed) {
        auto ex = mask_sequence(ids, 0.5, kVocab, seed);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (ids[i] < kNumSpecials) {
                CHECK(ex.input_ids[i] == ids[i]);
                CHECK(ex.labels[i] == kIgnoreLabel);
            }
        }
    }
}

TEST_CASE("mask_sequence: label consistency and corruption mix") {
    const auto ids = plain_ids(20000);
    auto ex = mask_sequence(ids, 0.30, kVocab, 99);
    std::uint64_t masked = 0, kept = 0, randomized = 0, supervised = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ex.labels[i] == kIgnoreLabel) {
            CHECK(ex.input_ids[i] == ids[i]);  // untouched position
            continue;
        }
        ++supervised;
        CHECK(ex.labels[i] == ids[i]);  // label holds the original id
        if (ex.input_ids[i] == kMaskId) ++masked;
        else if (ex.input_ids[i] == ids[i]) ++kept;
        else ++randomized;
    }
    const double m = static_cast<double>(masked) / supervised;
    const double k = static_cast<double>(kept) / supervised;
    const double r = static_cast<double>(randomized) / supervised;
    CHECK(m == doctest::Approx(0.8).epsilon(0.05));
    // randomized may coincide with the original id, shifting a sliver to kept
    CHECK(k == doctest::Approx(0.1).epsilon(0.2));
    CHECK(r == doctest::Approx(0.1).epsilon(0.2));
    // random replacements are never specials
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ex.labels[i] != kIgnoreLabel) CHECK(ex.input_ids[i] >= kNumSpecials);
    }
}

TEST_CASE("mask_sequence: all-mask strategy") {
    const auto ids = plain_ids(5000);
    auto ex = mask_sequence(ids, 0.30, kVocab, 5, CorruptionStrategy::kAllMask);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ex.labels[i] != kIgnoreLabel) CHECK(ex.input_ids[i] == kMaskId);
    }
}

TEST_CASE("mask_sequence: seeded determinism") {
    const auto ids = plain_ids(500);
    auto a = mask_sequence(ids, 0.3, kVocab, 12345);
    auto b = mask_sequence(ids, 0.3, kVocab, 12345);
    CHECK(a.input_ids == b.input_ids);
    CHECK(a.labels == b.labels);
    auto c = mask_sequence(ids, 0.3, kVocab, 12346);
    CHECK(a.input_ids != c.input_ids);
}

TEST_CASE("pack_or_truncate: arithmetic cases") {
    auto padded = pack_or_truncate(plain_ids(10), 1024, true);
    REQUIRE(padded.size() == 1024);
    CHECK(padded[0] == kClsId);
    CHECK(padded[11] == kSepId);
    for (std::size_t i = 12; i < 1024; ++i) CHECK(padded[i] == kPadId);

    auto truncated = pack_or_truncate(plain_ids(2000), 1024, false);
    REQUIRE(truncated.size() == 1024);
    CHECK(truncated[0] == kClsId);
    CHECK(truncated[1023] == kSepId);

    CHECK_THROWS_AS(pack_or_truncate(plain_ids(5), 2, false), DomainError);
}

TEST_CASE("pack_or_truncate: structural scan over random bodies") {
    std::mt19937_64 rng(55);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t body = rng() % 3000;
        const std::size_t max_len = 3 + rng() % 2048;
        const bool pad = rng() % 2 == 0;
        auto out = pack_or_truncate(plain_ids(body, trial), max_len, pad);
        CHECK(out.size() <= max_len);
        if (pad) CHECK(out.size() == max_len);
        CHECK(out[0] == kClsId);
        std::size_t seps = 0, sep_pos = 0;
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (out[i] == kSepId) {
                ++seps;
                sep_pos = i;
            }
        }
        CHECK(seps == 1);
        for (std::size_t i = sep_pos + 1; i < out.size(); ++i) CHECK(out[i] == kPadId);
    }
}

TEST_CASE("lr schedule: pinned endpoint values for the base preset") {
    PresetConfig p = preset("modernbert-base-pt");
    LrSchedule sched = p.schedule_for(10000);
    CHECK(lr_at_step(sched, 0) == 0.0);
    CHECK(lr_at_step(sched, 600) == 3e-4);   // 6% of 10000
    CHECK(lr_at_step(sched, 10000) == 6e-6); // 2% of peak, exactly
    CHECK_THROWS_AS(lr_at_step(sched, 10001), DomainError);
}

TEST_CASE("lr schedule: continuity bound at the warmup boundary") {
    LrSchedule sched = LrSchedule::make(3e-4, 10000);
    const double t = 10000.0;
    const double bound = sched.peak / (0.06 * t) + sched.peak * 0.98 / (0.94 * t);
    for (std::uint64_t s = 1; s <= 10000; ++s) {
        CHECK(std::abs(lr_at_step(sched, s) - lr_at_step(sched, s - 1)) <= bound + 1e-18);
    }
}

TEST_CASE("lr schedule: piecewise linearity and monotone decay") {
    LrSchedule sched = LrSchedule::make(3e-4, 5000);
    double prev = lr_at_step(sched, 300);  // warmup end
    CHECK(prev == 3e-4);
    for (std::uint64_t s = 301; s <= 5000; ++s) {
        const double cur = lr_at_step(sched, s);
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("trapezoidal shape: warmup, plateau, decay") {
    LrSchedule sched = LrSchedule::make(2e-4, 10000, ScheduleShape::kTrapezoidal);
    CHECK(lr_at_step(sched, 0) == 0.0);
    CHECK(lr_at_step(sched, 600) == 2e-4);
    CHECK(lr_at_step(sched, 3000) == 2e-4);  // plateau (70% of steps)
    CHECK(lr_at_step(sched, 7600) == 2e-4);  // still plateau
    CHECK(lr_at_step(sched, 9000) < 2e-4);
    CHECK(lr_at_step(sched, 10000) == sched.end_lr);
    CHECK(sched.end_lr == 4e-6);
}

TEST_CASE("presets: pinned hyperparameter rows") {
    PresetConfig pt = preset("modernbert-base-pt");
    CHECK(pt.peak_lr == 3e-4);
    CHECK(pt.optimizer == "StableAdamW");
    CHECK(pt.beta1 == 0.90);
    CHECK(pt.beta2 == 0.98);
    CHECK(pt.epsilon == 1e-06);
    CHECK(pt.warmup_frac == 0.06);
    CHECK(pt.max_seq_len == 1024);

    PresetConfig vx = preset("modernbert-base-vx");
    CHECK(vx.peak_lr == 3e-4);

    PresetConfig large = preset("mosaicbert-large");
    CHECK(large.peak_lr == 2e-4);
    CHECK(large.max_seq_len == 8192);
    CHECK(large.schedule == ScheduleShape::kTrapezoidal);

    for (const auto& name : preset_names()) {
        CHECK(preset(name).mask_rate == 0.30);
        CHECK(preset(name).global_batch == 4096);
        CHECK(preset(name).micro_batch == 128);
    }
}

TEST_CASE("presets: unknown name lists the valid ones") {
    try {
        preset("nope");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("modernbert-base-pt") != std::string::npos);
        CHECK(msg.find("mosaicbert-large") != std::string::npos);
    }
}

TEST_CASE("preset validation rejects out-of-range edits") {
    PresetConfig p = preset("modernbert-base-pt");
    p.mask_rate = 1.5;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = preset("modernbert-base-pt");
    p.micro_batch = 100;  // does not divide 4096
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("batch geometry: 4096 = 128 x accumulation x workers for divisor counts") {
    for (std::uint32_t workers : {1u, 2u, 4u, 8u, 16u, 32u}) {
        CHECK(batch_geometry_ok(4096, 128, workers));
    }
    CHECK(!batch_geometry_ok(4096, 128, 3));
    CHECK(!batch_geometry_ok(4096, 128, 64));  // accumulation would be < 1
    CHECK(!batch_geometry_ok(4096, 0, 1));
}
