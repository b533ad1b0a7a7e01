#include <gtest/gtest.h>

#include <cmath>

#include "cyber/core/errors.hpp"
#include "cyber/game/security.hpp"

using namespace cyber;
using namespace cyber::game;

namespace {

AgentSpec basic_agent()
{
    AgentSpec a;
    a.initial_wealth = 5.0;
    a.utility = ExponentialUtility{1.0};
    a.loss = 2.0;
    a.cost = Curve::polynomial({0.5});
    a.attack = Curve::linear(1.0, -1.0);
    return a;
}

}  // namespace

TEST(Game, InfectionProbabilityExample)
{
    const auto g = GameSpec::symmetric_pair(basic_agent(), 0.5);
    EXPECT_NEAR(infection_probability(0, {0.8, 0.6}, g), 0.36, 1e-15);
    EXPECT_THROW(infection_probability(0, {1.2, 0.0}, g), ValidationError);
}

TEST(Game, NoThreatNoInfection)
{
    auto a = basic_agent();
    a.attack = Curve::zero();
    const auto g = GameSpec::symmetric_pair(a, 0.9);
    EXPECT_EQ(infection_probability(1, {0.1, 0.3}, g), 0.0);
}

TEST(Game, ExpectedUtilityExample)
{
    const auto g = GameSpec::symmetric_pair(basic_agent(), 0.5);
    const double expected = -(0.64 * std::exp(-4.5) + 0.36 * std::exp(-2.5));
    EXPECT_NEAR(expected_utility(0, {0.8, 0.6}, g, false), expected, 1e-14);
}

TEST(Game, ZeroProbabilityInsuredEqualsUninsured)
{
    auto a = basic_agent();
    a.attack = Curve::zero();
    const auto g = GameSpec::symmetric_pair(a, 0.5);
    const double u = -std::exp(-4.5);
    EXPECT_NEAR(expected_utility(0, {0.3, 0.3}, g, true), u, 1e-15);
    EXPECT_NEAR(expected_utility(0, {0.3, 0.3}, g, false), u, 1e-15);
}

TEST(Game, LogUtilityDomainError)
{
    auto a = basic_agent();
    a.utility = ShiftedLogUtility{0.0};
    a.loss = 10.0;
    const auto g = GameSpec::symmetric_pair(a, 0.5);
    EXPECT_THROW(expected_utility(0, {0.0, 0.0}, g, false), ModelError);
}

TEST(Game, FreeProtectionIsFull)
{
    auto a = basic_agent();
    a.cost = Curve::zero();
    const auto g = GameSpec::symmetric_pair(a, 0.5);
    EXPECT_DOUBLE_EQ(best_response(0, {0.0, 0.4}, g, false), 1.0);
}

TEST(Game, ProhibitiveCostIsZeroEffort)
{
    auto a = basic_agent();
    a.utility = LinearUtility{};
    a.cost = Curve::linear(0.0, 10.0);
    const auto g = GameSpec::symmetric_pair(a, 0.5);
    EXPECT_DOUBLE_EQ(best_response(0, {0.0, 0.4}, g, false), 0.0);
}

TEST(Game, SingleAgentConvergesInOneRound)
{
    auto a = basic_agent();
    a.cost = Curve::polynomial({0.0, 0.0, 1.0});
    GameSpec g;
    g.agents = {a};
    g.contagion = {{0.0}};
    const auto r = nash_iterate(g, false, {0.0});
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.rounds, 1);
    EXPECT_DOUBLE_EQ(r.profile[0], best_response(0, {0.0}, g, false));
    EXPECT_DOUBLE_EQ(social_welfare(r.profile, g, false), expected_utility(0, r.profile, g, false));
}

TEST(Game, NoThreatFixedPointIsZero)
{
    auto a = basic_agent();
    a.attack = Curve::zero();
    a.cost = Curve::linear(0.0, 1.0);
    const auto r = nash_iterate(GameSpec::symmetric_pair(a, 0.5), false, {0.7, 0.2});
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.profile[0], 0.0);
    EXPECT_EQ(r.profile[1], 0.0);
}

TEST(Game, ValidationRejectsBadInputs)
{
    auto a = basic_agent();
    auto g = GameSpec::symmetric_pair(a, 0.5);
    g.contagion[0][0] = 0.2;
    EXPECT_THROW(validate(g), ValidationError);
    a.attack = Curve::linear(0.2, 0.5);
    EXPECT_THROW(validate(GameSpec::symmetric_pair(a, 0.5)), ValidationError);
    a = basic_agent();
    a.cost = Curve::polynomial({0.0, 1.0, -1.0});
    EXPECT_THROW(validate(GameSpec::symmetric_pair(a, 0.5)), ValidationError);
}

TEST(Game, ReportJsonHasFields)
{
    auto a = basic_agent();
    a.cost = Curve::polynomial({0.0, 0.0, 2.0});
    const auto g = GameSpec::symmetric_pair(a, 0.5);
    const auto js = report_json(nash_iterate(g, true, {0.0, 0.0}), g, true);
    for (const char* key : {"profile", "welfare", "converged", "rounds"})
        EXPECT_NE(js.find(key), std::string::npos) << key;
}
