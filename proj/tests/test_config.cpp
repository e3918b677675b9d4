#include <catch2/catch_amalgamated.hpp>

#include "forkgame/config.hpp"

using namespace forkgame;

namespace {

const char* kSample = R"(# sample instance
lambda              = 0.5,0.3,0.2
rounds              = 6
timelock            = 3
block_reward_btc    = 6.25
txs_per_block       = 1500
avg_tx_fee_sat      = 10000
txs1_fee_sat        = 15010000
txs2_fee_sat        = 15240000
p2_slot_fee_sat     = 20000
penalty_sat         = 320000001
p1_creator          = 0
strict_distribution = false
)";

}  // namespace

TEST_CASE("parameter file round trip") {
    GameParams p = parse_params_text(kSample);
    CHECK(p.n == 3);
    CHECK(p.lambda == std::vector<double>{0.5, 0.3, 0.2});
    CHECK(p.rounds_R == 6);
    CHECK(p.timelock_T == 3);
    CHECK(p.base_reward_B == 625'000'000);
    CHECK(p.txs_per_block_m == 1500);
    CHECK(p.avg_tx_fee == 10'000);
    CHECK(p.f1 == 15'010'000);
    CHECK(p.f2 == 15'240'000);
    CHECK(p.c_p1 == 1);
    CHECK(p.f_bar_p1 == 10'000);  // defaults to the revocation premium
    CHECK(p.f_bar_p2 == 20'000);
    CHECK(p.penalty_P == 320'000'001);
    REQUIRE(p.p1_creator.has_value());
    CHECK(*p.p1_creator == 0);
    CHECK_FALSE(p.strict_distribution);
    CHECK_FALSE(has_errors(validate_params(p)));
}

TEST_CASE("bundled reference instance parses and validates strictly") {
    GameParams p = load_params_file(std::string(FORKGAME_DATA_DIR) + "/paper2022.params");
    CHECK(p.n == 19);
    CHECK(p.strict_distribution);
    CHECK(p.lambda[0] == Catch::Approx(0.22281).margin(0.0001));
    CHECK_FALSE(has_errors(validate_params(p)));
    CHECK(p.f() == 15'000'000);
}

TEST_CASE("config rejections") {
    CHECK_THROWS_AS(parse_params_text("lambda = 0.5,0.5"), ParseError);  // missing keys
    CHECK_THROWS_AS(parse_params_text("nonsense\n"), ParseError);
    std::string both = kSample;
    both += "block_reward_sat = 1\n";
    CHECK_THROWS_AS(parse_params_text(both), ParseError);  // _sat and _btc together
    std::string unknown = kSample;
    unknown += "surprise = 1\n";
    CHECK_THROWS_AS(parse_params_text(unknown), ParseError);
    std::string dup = kSample;
    dup += "rounds = 7\n";
    CHECK_THROWS_AS(parse_params_text(dup), ParseError);
    CHECK_THROWS_AS(load_params_file("/nonexistent.params"), ParseError);
}
