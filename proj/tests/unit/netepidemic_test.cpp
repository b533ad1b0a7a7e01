#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "cyber/core/errors.hpp"
#include "cyber/core/stats.hpp"
#include "cyber/netepidemic/closure.hpp"
#include "cyber/netepidemic/graph.hpp"
#include "cyber/netepidemic/losses.hpp"
#include "cyber/netepidemic/master.hpp"
#include "cyber/netepidemic/nonmarkov.hpp"
#include "cyber/netepidemic/population.hpp"
#include "cyber/netepidemic/spread.hpp"

using namespace cyber;
using namespace cyber::netepidemic;
using severity::Distribution;

TEST(Graph, ErdosRenyiExtremes)
{
    EXPECT_EQ(generate_er(10, 0.0, SeedStream(1)).edge_count(), 0u);
    EXPECT_EQ(generate_er(8, 1.0, SeedStream(1)).edge_count(), 28u);
    EXPECT_THROW(generate_er(5, 1.5, SeedStream(1)), ValidationError);
}

TEST(Graph, ErdosRenyiMeanDegree)
{
    double acc = 0.0;
    const int graphs = 1000;
    for (int k = 0; k < graphs; ++k) acc += 2.0 * generate_er(200, 0.05, SeedStream(2).child(k)).edge_count() / 200.0;
    EXPECT_NEAR(acc / graphs, 9.95, 0.1);
}

TEST(Graph, BarabasiAlbertEdgeCount)
{
    const auto g = generate_ba(100, 3, SeedStream(3));
    EXPECT_EQ(g.edge_count(), 6u + 3u * 96u);
    EXPECT_TRUE(g.connected());
    EXPECT_THROW(generate_ba(3, 3, SeedStream(3)), ValidationError);
}

TEST(Graph, NamedTopologies)
{
    const auto s = star(8);
    EXPECT_EQ(s.edge_count(), 7u);
    EXPECT_EQ(s.degree(0), 7u);
    EXPECT_EQ(complete(8).edge_count(), 28u);
    EXPECT_TRUE(tree(2, 2).is_tree());
    EXPECT_FALSE(triangle_pendant().is_tree());
}

TEST(Graph, EdgeListRoundTrip)
{
    const auto g = generate_er(12, 0.3, SeedStream(4));
    std::stringstream io;
    write_edge_list(g, io);
    EXPECT_EQ(read_edge_list(io).edges(), g.edges());
}

TEST(Gillespie, IsolatedRecoveryTime)
{
    const Graph g(1);
    std::vector<double> t(100000);
    for (std::size_t r = 0; r < t.size(); ++r) {
        const auto run = gillespie_spread(g, {0.0, 2.0, {}, Model::SIS}, seeded_state(1, {0}), 50.0, SeedStream(5).child(r));
        ASSERT_EQ(run.events.size(), 1u);
        t[r] = run.events[0].time;
    }
    EXPECT_NEAR(stats::mean(t), 0.5, 3.0 * stats::standard_error(t));
}

TEST(Gillespie, AbsorbingStateHasEmptyLog)
{
    const SpreadState all_r(4, Compartment::R);
    EXPECT_TRUE(gillespie_spread(path(4), {1.0, 1.0, {}, Model::SIR}, all_r, 10.0, SeedStream(6)).events.empty());
}

TEST(Master, SingleNodeDecay)
{
    const auto m = exact_master(Graph(1), {1.0, 1.0, {}, Model::SIS}, seeded_state(1, {0}), {1.0});
    EXPECT_NEAR(m.infected[0][0], std::exp(-1.0), 1e-6);
}

TEST(Master, MassConserved)
{
    const auto m = exact_master(complete(5), {1.3, 0.8, {0.1}, Model::SIS}, seeded_state(5, {0}), {0.5, 1.0, 3.0});
    for (double mass : m.mass) EXPECT_NEAR(mass, 1.0, 1e-12);
}

TEST(Master, StateCapEnforced)
{
    EXPECT_THROW(exact_master(path(kMasterMaxSir + 1), {1.0, 1.0, {}, Model::SIR},
                              seeded_state(kMasterMaxSir + 1, {0}), {1.0}),
                 ModelError);
}

TEST(Closure, NimfaThreshold)
{
    const auto g = complete(5);
    const auto at = nimfa_threshold(g, {0.25, 1.0, {}, Model::SIS});
    EXPECT_NEAR(at.spectral_radius, 4.0, 1e-8);
    EXPECT_EQ(at.regime, Criticality::Supercritical);
    EXPECT_EQ(nimfa_threshold(g, {0.24, 1.0, {}, Model::SIS}).regime, Criticality::Subcritical);
    EXPECT_EQ(nimfa_threshold(Graph(4), {100.0, 1.0, {}, Model::SIS}).regime, Criticality::Subcritical);
}

TEST(Closure, PairModelExactOnTrees)
{
    std::vector<double> times{0.0, 0.5, 1.0, 2.0, 4.0};
    EXPECT_LT(pair_closure_sir_tree_check(star(4), {1.0, 1.0, {}, Model::SIR}, seeded_state(4, {0}), times), 1e-5);
    EXPECT_LT(pair_closure_sir_tree_check(path(5), {1.0, 1.0, {}, Model::SIR}, seeded_state(5, {0}), times), 1e-5);
    try {
        pair_closure_sir_tree_check(complete(3), {1.0, 1.0, {}, Model::SIR}, seeded_state(3, {0}), times);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("non-tree input"), std::string::npos);
    }
}

TEST(Closure, SplitOrderTwoIsSisOnly)
{
    EXPECT_THROW(validate(ClosureSpec{ClosureScheme::SplitHilbert, 2}, Model::SIR), ValidationError);
}

TEST(NonMarkov, DeterministicRecoveryClock)
{
    NonMarkovSpec s;
    s.recovery = {Distribution::degenerate(1.5)};
    s.internal = {Distribution::exponential(1.0)};
    const auto run = simulate_nonmarkov(Graph(1), s, seeded_state(1, {0}), 5.0, SeedStream(7));
    ASSERT_EQ(run.events.size(), 1u);
    EXPECT_DOUBLE_EQ(run.events[0].time, 1.5);
}

TEST(NonMarkov, WrongDistributionCountRejected)
{
    NonMarkovSpec s;
    s.recovery = {Distribution::exponential(1.0), Distribution::exponential(1.0)};
    s.internal = {Distribution::exponential(1.0)};
    EXPECT_THROW(validate(s, 3), ValidationError);
}

TEST(Population, DiseaseFreeIsConstant)
{
    const auto t = integrate_population_sir({100.0, 0.5, 1.0, 100.0, 0.0, 0.0}, {0.0, 1.0, 10.0});
    for (std::size_t k = 0; k < t.times.size(); ++k) {
        EXPECT_EQ(t.s[k], 100.0);
        EXPECT_EQ(t.i[k], 0.0);
    }
}

TEST(Population, ZeroInfectedHazardNeverInfects)
{
    const PortfolioHazard h(constant_infected(0.0, 5.0), 2.0);
    for (double t : h.sample_infection_times(1000, SeedStream(8))) EXPECT_TRUE(std::isinf(t));
}

TEST(Population, CompartmentsMustSum)
{
    EXPECT_THROW(validate(PopulationSIR{100.0, 0.1, 1.0, 50.0, 10.0, 0.0}), ValidationError);
}

TEST(Losses, NeverInfectedNodeHasNoLoss)
{
    SpreadRun run;
    run.init = seeded_state(2, {0});
    run.horizon = 10.0;
    const auto rec = loss_indicator(run, {1.0, 5.0}, {Distribution::lognormal(0.0, 1.0)}, SeedStream(9));
    for (const auto& r : rec)
        if (r.firm == 1) EXPECT_EQ(r.amount, 0.0);
        else EXPECT_GT(r.amount, 0.0);
    EXPECT_THROW(loss_indicator(run, {11.0}, {Distribution::lognormal(0.0, 1.0)}, SeedStream(9)), ValidationError);
}

TEST(Losses, InfectedNodeLognormalMean)
{
    SpreadRun run;
    run.init = seeded_state(1, {0});
    run.horizon = 1.0;
    std::vector<double> t(100000);
    for (std::size_t j = 0; j < t.size(); ++j) t[j] = 0.5;
    const auto rec = loss_indicator(run, t, {Distribution::lognormal(0.0, 1.0)}, SeedStream(10));
    std::vector<double> a;
    for (const auto& r : rec) a.push_back(r.amount);
    EXPECT_NEAR(stats::mean(a), std::exp(0.5), 3.0 * stats::standard_error(a));
}

TEST(Losses, RecoveryCostMatchesEpisodeLength)
{
    const Graph g(1);
    std::vector<double> cost;
    for (std::size_t r = 0; r < 100000; ++r) {
        const auto run = gillespie_spread(g, {0.0, 2.0, {}, Model::SIS}, seeded_state(1, {0}), 100.0, SeedStream(11).child(r));
        for (const auto& e :
             loss_recovery_cost(run, CostCurve::zero(), CostCurve::linear(1.0), {1.0, 1.0, 1.0}, SeedStream(12).child(r)))
            cost.push_back(e.amount);
    }
    EXPECT_NEAR(stats::mean(cost), 0.5, 3.0 * stats::standard_error(cost));
}

TEST(Losses, DataLossBetaSymmetry)
{
    std::vector<double> cost;
    for (std::size_t r = 0; r < 20000; ++r) {
        const auto run = gillespie_spread(Graph(1), {0.0, 1.0, {}, Model::SIS}, seeded_state(1, {0}), 100.0,
                                          SeedStream(13).child(r));
        for (const auto& e : loss_recovery_cost(run, CostCurve::linear(2.0), CostCurve::zero(), {2.0, 2.0, 100.0},
                                                SeedStream(14).child(r)))
            cost.push_back(e.amount);
    }
    EXPECT_NEAR(stats::mean(cost), 100.0, 3.0 * stats::standard_error(cost));
}

TEST(Losses, RecoveryWithoutInfectionIsMalformed)
{
    SpreadRun run;
    run.init = seeded_state(1, {});
    run.horizon = 1.0;
    run.events.push_back({0.5, 0, Compartment::I, Compartment::S, Cause::Recovery});
    EXPECT_THROW(infection_episodes(run), ValidationError);
}
