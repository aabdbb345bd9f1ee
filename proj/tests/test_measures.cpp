#include <doctest.h>

#include <cmath>

#include "rgw/errors.hpp"
#include "rgw/law_json.hpp"
#include "rgw/measures.hpp"

using namespace rgw;
using doctest::Approx;

TEST_CASE("relative entropy") {
    ProbVector nu({1, 2}, {0.5, 0.5});
    CHECK(relative_entropy(nu, nu).value() == 0.0);
    double expected = std::log(2.0 / 3.0) / 3.0 + 2.0 * std::log(4.0 / 3.0) / 3.0;
    CHECK(std::abs(relative_entropy(ProbVector({1, 2}, {1.0 / 3.0, 2.0 / 3.0}), nu).value() - 0.0566333) < 1e-6);
    CHECK(relative_entropy(ProbVector({1, 2}, {1.0 / 3.0, 2.0 / 3.0}), nu).value() == Approx(expected).epsilon(1e-14));
    CHECK(relative_entropy(ProbVector({1, 2}, {0.5, 0.5}), ProbVector({1, 2}, {1.0, 0.0})).is_plus_infinity());
    OffspringLaw law({1, 2}, {0.5, 0.5});
    CHECK(relative_entropy(ProbVector({1, 2}, {0.2, 0.8}), law).value() == Approx(0.2 * std::log(0.4) + 0.8 * std::log(1.6)));
}

TEST_CASE("pairing with log weights") {
    CHECK(pair(ProbVector::dirac({1, 2}, 1), LogWeights::log_of_atoms({1, 2})).value() == 0.0);
    CHECK(std::abs(pair(ProbVector({1, 2}, {0.2, 0.8}), LogWeights::log_of_atoms({1, 2})).value() - 0.8 * std::log(2.0)) < 1e-9);
    CHECK(std::abs(0.8 * std::log(2.0) - 0.5545177) < 1e-7);
    CHECK(pair(ProbVector({0, 1, 2}, {0.1, 0.4, 0.5}), LogWeights::log_of_atoms({0, 1, 2})).is_minus_infinity());
    // 0 * (-inf) = 0
    CHECK(pair(ProbVector({0, 2}, {0.0, 1.0}), LogWeights::log_of_atoms({0, 2})).value() == Approx(std::log(2.0)));
}

TEST_CASE("size bias, mean, mix, distance") {
    ProbVector sb = size_bias(OffspringLaw({1, 2}, {0.5, 0.5}));
    CHECK(sb[0] == Approx(1.0 / 3.0));
    CHECK(sb[1] == Approx(2.0 / 3.0));
    CHECK(size_bias(OffspringLaw({3}, {1.0}))[0] == 1.0);
    ProbVector z = size_bias(OffspringLaw({0, 2}, {0.5, 0.5}));
    CHECK(z.mass_at(0) == 0.0);
    CHECK(z.mass_at(2) == 1.0);

    CHECK(OffspringLaw({1, 2}, {0.5, 0.5}).mean() == 1.5);
    CHECK(OffspringLaw({3}, {1.0}).mean() == 3.0);
    CHECK(OffspringLaw({0, 2}, {0.6, 0.4}).mean() == Approx(0.8));

    ProbVector rho({1, 2}, {0.2, 0.8});
    ProbVector nu({1, 2}, {0.5, 0.5});
    CHECK(mix(0.0, rho, nu) == nu);
    CHECK(mix(1.0, rho, nu) == rho);
    ProbVector m = mix(1.0 / 3.0, rho, nu);
    CHECK(m[0] == Approx(0.4));
    CHECK(m[1] == Approx(0.6));

    CHECK(linf_distance(rho, rho) == 0.0);
    CHECK(linf_distance(ProbVector::dirac({1, 2}, 1), ProbVector::dirac({1, 2}, 2)) == 1.0);
    CHECK(linf_distance(rho, nu) == Approx(0.3));
}

TEST_CASE("contracts") {
    CHECK_THROWS_AS(ProbVector({2, 1}, {0.5, 0.5}), ContractError);
    CHECK_THROWS_AS(ProbVector({1, 2}, {0.6, 0.5}), ContractError);
    CHECK_THROWS_AS(ProbVector({1, 2}, {-0.1, 1.1}), ContractError);
    CHECK_THROWS_AS(OffspringLaw({1, 2}, {0.5}), ContractError);
    CHECK_THROWS_AS(OffspringLaw({-1, 2}, {0.5, 0.5}), ContractError);
    CHECK(OffspringLaw({1}, {1.0}).positive_part_is_singleton());
    CHECK_FALSE(OffspringLaw({1, 2}, {0.5, 0.5}).positive_part_is_singleton());
}

TEST_CASE("align and support union") {
    ProbVector r({2}, {1.0});
    ProbVector a = align(r, {1, 2, 3});
    CHECK(a.mass_at(1) == 0.0);
    CHECK(a.mass_at(2) == 1.0);
    CHECK(support_union({1, 3}, {2, 3}) == Support{1, 2, 3});
    CHECK_THROWS_AS(align(ProbVector({1, 2}, {0.5, 0.5}), {2, 3}), ContractError);
}

TEST_CASE("law JSON") {
    OffspringLaw law = law_from_json(nlohmann::json::parse(R"({"support":[1,2],"probs":["1/3","2/3"]})"));
    CHECK(law[0] == 1.0 / 3.0);
    CHECK(parse_real("1/3") == 1.0 / 3.0);
    CHECK(parse_real("0.25") == 0.25);
    CHECK_THROWS_AS(parse_real("1/0"), ContractError);
    CHECK_THROWS_AS(parse_real("abc"), ContractError);
    CHECK_THROWS(law_from_json(nlohmann::json::parse(R"({"support":[1,2],"probs":[0.5,0.5],"extra":1})")));
    CHECK_THROWS(law_from_json(nlohmann::json::parse(R"({"support":[2,1],"probs":[0.5,0.5]})")));
    nlohmann::json back = to_json(law);
    CHECK(law_from_json(back).support() == law.support());
}
