#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "config.hpp"
#include "cyber/core/parallel.hpp"
#include "cyber/core/stats.hpp"
#include "cyber/netepidemic/closure.hpp"
#include "cyber/netepidemic/master.hpp"
#include "cyber/netepidemic/nonmarkov.hpp"
#include "cyber/netepidemic/population.hpp"
#include "cyber/pricing/premium.hpp"
#include "cyber/pricing/systemic.hpp"

namespace cyber::cli {

namespace {

namespace ne = netepidemic;

std::size_t positive_count(const Node& n, const std::string& key, std::size_t fallback)
{
    const std::size_t v = n.count(key, fallback);
    if (v == 0) n.at(key).fail("must be positive");
    return v;
}

double positive_number(const Node& n, const std::string& key)
{
    const double v = n.at(key).number();
    if (!(v > 0.0)) n.at(key).fail("must be positive");
    return v;
}

std::vector<double> time_grid(const Node& n)
{
    auto t = n.numbers();
    if (t.empty()) n.fail("time grid must be nonempty");
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < 0.0) n.index(k).fail("times must be nonnegative");
        if (k > 0 && t[k] <= t[k - 1]) n.index(k).fail("times must be increasing");
    }
    return t;
}

json sample_summary(const std::vector<double>& v)
{
    json s;
    s["replications"] = v.size();
    s["mean"] = stats::mean(v);
    if (v.size() >= 2) {
        s["variance"] = stats::variance(v);
        s["standard_error"] = stats::standard_error(v);
    }
    return s;
}

// frequency-sim -------------------------------------------------------------

Runner plan_frequency(const Node& root)
{
    const auto arrivals = parse_arrivals(root.at("arrivals"));
    const double horizon = positive_number(root, "horizon");
    const std::size_t reps = positive_count(root, "replications", 1000);
    if (std::holds_alternative<aggregation::SharedFactorArrivals>(arrivals))
        root.at("arrivals").fail("shared-factor arrivals need a portfolio");
    return [=](const SeedStream& seed, Output& out) {
        std::vector<std::vector<std::vector<double>>> runs(reps);
        parallel_for(reps, [&](std::size_t r) {
            const SeedStream s = seed.child(r);
            if (const auto* p = std::get_if<aggregation::PoissonArrivals>(&arrivals)) {
                runs[r] = {frequency::simulate_poisson(p->intensity, horizon, s)};
            } else if (const auto* c = std::get_if<aggregation::CoxArrivals>(&arrivals)) {
                auto model = c->model;
                if (c->multiplier != 1.0)
                    model.link = frequency::CustomLink([link = c->model.link, m = c->multiplier](
                                                           const std::vector<double>& x) { return m * frequency::apply_link(link, x); });
                runs[r] = {frequency::simulate_cox(model, horizon, s).arrivals};
            } else {
                runs[r] = frequency::simulate_hawkes(std::get<aggregation::HawkesArrivals>(arrivals).spec, horizon, s);
            }
        });
        std::ostringstream csv;
        csv << "replication,stream,index,time\n";
        std::vector<double> counts(reps);
        for (std::size_t r = 0; r < reps; ++r)
            for (std::size_t s = 0; s < runs[r].size(); ++s) {
                counts[r] += static_cast<double>(runs[r][s].size());
                for (std::size_t k = 0; k < runs[r][s].size(); ++k)
                    csv << r << ',' << s << ',' << k << ',' << csv_number(runs[r][s][k]) << '\n';
            }
        out.results_csv = csv.str();
        out.summary["counts"] = sample_summary(counts);
        out.summary["horizon"] = horizon;
        if (const auto* p = std::get_if<aggregation::PoissonArrivals>(&arrivals))
            out.summary["expected_count"] = frequency::expected_count(p->intensity, 0.0, horizon);
        if (const auto* h = std::get_if<aggregation::HawkesArrivals>(&arrivals)) {
            out.summary["branching_radius"] = frequency::branching_radius(h->spec);
            out.summary["observed_rate"] = stats::mean(counts) / horizon;
        }
    };
}

// collective-sim ------------------------------------------------------------

aggregation::CollectiveModel parse_collective(const Node& root)
{
    aggregation::CollectiveModel m{parse_arrivals(root.at("frequency")), parse_distribution(root.at("severity")), {}};
    if (const auto c = root.find("coupling")) {
        aggregation::Coupling coupling;
        coupling.theta = c->at("theta").number();
        if (const auto u = c->find("unit_claim")) coupling.unit_claim = parse_distribution(*u);
        m.coupling = coupling;
        c->at("theta").guard([&] { aggregation::validate(m); });
    }
    root.guard([&] { aggregation::validate(m); });
    return m;
}

Runner plan_collective(const Node& root)
{
    const auto model = parse_collective(root);
    const double horizon = root.number("horizon", 1.0);
    if (!(horizon > 0.0)) root.at("horizon").fail("must be positive");
    const std::size_t reps = positive_count(root, "replications", 1000);
    return [=](const SeedStream& seed, Output& out) {
        auto sample = aggregation::simulate_total(model, horizon, reps, seed);
        std::ostringstream csv;
        aggregation::write_csv(sample, csv);
        out.results_csv = csv.str();
        out.summary["totals"] = sample_summary(sample.values);
        out.summary["horizon"] = horizon;
        if (const auto* p = std::get_if<aggregation::PoissonArrivals>(&model.frequency); p && !model.coupling) {
            const double n = frequency::expected_count(p->intensity, 0.0, horizon);
            const auto w = aggregation::wald_moments(n, n, model.severity.mean(), model.severity.variance());
            out.summary["wald"] = {{"mean", w.mean}, {"variance", w.variance}};
        }
    };
}

// epidemic-sim --------------------------------------------------------------

ne::SpreadState parse_initial(const Node& root, std::size_t n)
{
    const auto infected = root.at("infected").counts();
    return root.at("infected").guard([&] {
        for (auto i : infected) require(i < n, "infected node index out of range");
        return ne::seeded_state(n, infected);
    });
}

ne::NonMarkovSpec parse_nonmarkov(const Node& n, std::size_t nodes)
{
    ne::NonMarkovSpec s;
    const std::string model = n.string("model", "SIS");
    if (model == "SIR")
        s.model = ne::Model::SIR;
    else if (model != "SIS")
        n.at("model").fail("unknown model '" + model + "' (allowed: SIS, SIR)");
    s.recovery = {parse_distribution(n.at("recovery"))};
    s.internal = {parse_distribution(n.at("internal"))};
    if (const auto e = n.find("external")) s.external = {parse_distribution(*e)};
    if (const auto d = n.find("dependence")) {
        const std::string c = d->at("copula").string();
        if (c == "gumbel")
            s.dependence = ne::InternalDependence::Gumbel;
        else if (c == "clayton")
            s.dependence = ne::InternalDependence::Clayton;
        else if (c != "independence")
            d->at("copula").fail("unknown copula '" + c + "' (allowed: independence, gumbel, clayton)");
        s.theta = d->number("theta", 1.0);
        if (d->has("theta")) d->at("theta").guard([&] { ne::validate(s, nodes); });
    }
    n.guard([&] { ne::validate(s, nodes); });
    return s;
}

Runner plan_epidemic(const Node& root)
{
    const auto g = parse_graph(root.at("graph"));
    const auto init = parse_initial(root, g.node_count());
    const double horizon = positive_number(root, "horizon");
    const auto times = time_grid(root.at("times"));
    if (times.back() > horizon) root.at("times").fail("times must not exceed the horizon");
    const std::size_t reps = positive_count(root, "replications", 10000);
    const std::string engine = root.string("engine", "markov");
    const bool exact = root.boolean("exact", false);
    std::optional<ne::SpreadParams> params;
    std::optional<ne::NonMarkovSpec> nm;
    if (engine == "markov") {
        params = parse_spread(root.at("spread"));
        root.at("spread").guard([&] { ne::validate(*params, g.node_count()); });
        if (exact) {
            const std::size_t cap = params->model == ne::Model::SIS ? ne::kMasterMaxSis : ne::kMasterMaxSir;
            if (g.node_count() > cap) root.at("exact").fail("state-space cap exceeded");
        }
    } else if (engine == "nonmarkov") {
        nm = parse_nonmarkov(root.at("nonmarkov"), g.node_count());
        if (exact) root.at("exact").fail("exact marginals need the markov engine");
    } else {
        root.at("engine").fail("unknown engine '" + engine + "' (allowed: markov, nonmarkov)");
    }
    return [=](const SeedStream& seed, Output& out) {
        const std::size_t n = g.node_count();
        ne::MarginalEstimate est;
        if (params) {
            est = ne::estimate_marginals(g, *params, init, times, reps, seed);
        } else {
            std::vector<std::vector<ne::SpreadState>> states(reps);
            parallel_for(reps, [&](std::size_t r) {
                states[r] = ne::states_at(ne::simulate_nonmarkov(g, *nm, init, horizon, seed.child(r)), times);
            });
            est.times = times;
            est.replications = reps;
            est.infected.assign(times.size(), std::vector<double>(n, 0.0));
            est.susceptible = est.recovered = est.infected;
            for (std::size_t t = 0; t < times.size(); ++t)
                for (std::size_t i = 0; i < n; ++i) {
                    std::size_t c[3] = {0, 0, 0};
                    for (std::size_t r = 0; r < reps; ++r) ++c[static_cast<int>(states[r][t][i])];
                    est.susceptible[t][i] = static_cast<double>(c[0]) / static_cast<double>(reps);
                    est.infected[t][i] = static_cast<double>(c[1]) / static_cast<double>(reps);
                    est.recovered[t][i] = static_cast<double>(c[2]) / static_cast<double>(reps);
                }
        }
        std::optional<ne::MasterSolution> master;
        if (exact) master = ne::exact_master(g, *params, init, times);
        std::ostringstream csv;
        csv << "time,node,infected,susceptible,recovered,standard_error" << (exact ? ",exact_infected" : "") << '\n';
        double worst_z = 0.0;
        for (std::size_t t = 0; t < times.size(); ++t)
            for (std::size_t i = 0; i < n; ++i) {
                const double p = est.infected[t][i];
                const double se = est.standard_error(p);
                csv << csv_number(times[t]) << ',' << i << ',' << csv_number(p) << ','
                    << csv_number(est.susceptible[t][i]) << ',' << csv_number(est.recovered[t][i]) << ','
                    << csv_number(se);
                if (master) {
                    const double e = master->infected[t][i];
                    csv << ',' << csv_number(e);
                    const double sd = std::sqrt(std::max(e * (1.0 - e), 1e-300) / static_cast<double>(reps));
                    worst_z = std::max(worst_z, std::abs(p - e) / sd);
                }
                csv << '\n';
            }
        out.results_csv = csv.str();
        out.summary["nodes"] = n;
        out.summary["edges"] = g.edge_count();
        out.summary["replications"] = reps;
        out.summary["engine"] = engine;
        if (master) out.summary["max_standardized_deviation"] = worst_z;
        std::ostringstream events;
        if (params)
            ne::write_event_csv(ne::gillespie_spread(g, *params, init, horizon, seed.child(0)), events);
        else
            ne::write_event_csv(ne::simulate_nonmarkov(g, *nm, init, horizon, seed.child(0)), events);
        out.extra_files["events.csv"] = events.str();
    };
}

// closure-compare -----------------------------------------------------------

std::string column_name(const ne::ClosureSpec& s)
{
    std::string base;
    switch (s.scheme) {
    case ne::ClosureScheme::Nimfa: base = "nimfa"; break;
    case ne::ClosureScheme::SplitIndependent: base = "independent"; break;
    case ne::ClosureScheme::SplitHilbert: base = "hilbert"; break;
    case ne::ClosureScheme::KirkwoodPair: base = "kirkwood"; break;
    }
    if (s.order == 2 && (s.scheme == ne::ClosureScheme::SplitIndependent || s.scheme == ne::ClosureScheme::SplitHilbert))
        base += "_2";
    return base;
}

Runner plan_closure(const Node& root)
{
    const auto g = parse_graph(root.at("graph"));
    const auto params = parse_spread(root.at("spread"));
    root.at("spread").guard([&] { ne::validate(params, g.node_count()); });
    const auto init = parse_initial(root, g.node_count());
    const auto times = time_grid(root.at("times"));
    std::vector<ne::ClosureSpec> specs;
    if (const auto list = root.find("schemes")) {
        for (std::size_t k = 0; k < list->size(); ++k) {
            const Node s = list->index(k);
            ne::ClosureSpec spec;
            const std::string name = s.raw().is_string() ? s.string() : s.at("scheme").string();
            spec.scheme = s.guard([&] { return ne::parse_closure_scheme(name); });
            spec.order = spec.scheme == ne::ClosureScheme::KirkwoodPair ? 2 : 1;
            if (!s.raw().is_string() && s.has("order")) spec.order = static_cast<int>(s.at("order").count());
            s.guard([&] { ne::validate(spec, params.model); });
            specs.push_back(spec);
        }
    } else {
        specs = {{ne::ClosureScheme::Nimfa, 1}, {ne::ClosureScheme::SplitIndependent, 1},
                 {ne::ClosureScheme::SplitHilbert, 1}};
    }
    if (specs.empty()) root.at("schemes").fail("list at least one closure scheme");
    const bool exact = root.boolean("exact", true);
    if (exact) {
        const std::size_t cap = params.model == ne::Model::SIS ? ne::kMasterMaxSis : ne::kMasterMaxSir;
        if (g.node_count() > cap) root.at("exact").fail("state-space cap exceeded");
    }
    return [=](const SeedStream&, Output& out) {
        std::optional<ne::MasterSolution> master;
        if (exact) master = ne::exact_master(g, params, init, times);
        std::vector<ne::ClosureSolution> sols;
        json schemes = json::array();
        for (const auto& s : specs) {
            sols.push_back(ne::solve_closure(g, params, init, s, times));
            json info{{"column", column_name(s)},
                      {"scheme", ne::closure_scheme_name(s.scheme)},
                      {"order", s.order},
                      {"equations", sols.back().equations},
                      {"clamped_points", sols.back().clamp_count},
                      {"kirkwood_fallbacks", sols.back().fallback_count}};
            if (master) {
                double dev = 0.0;
                for (std::size_t t = 0; t < times.size(); ++t)
                    for (std::size_t i = 0; i < g.node_count(); ++i)
                        dev = std::max(dev, std::abs(sols.back().infected[t][i] - master->infected[t][i]));
                info["max_abs_deviation"] = dev;
            }
            schemes.push_back(info);
        }
        std::ostringstream csv;
        csv << "time,node";
        if (master) csv << ",exact";
        for (const auto& s : specs) csv << ',' << column_name(s);
        csv << '\n';
        for (std::size_t t = 0; t < times.size(); ++t)
            for (std::size_t i = 0; i < g.node_count(); ++i) {
                csv << csv_number(times[t]) << ',' << i;
                if (master) csv << ',' << csv_number(master->infected[t][i]);
                for (const auto& sol : sols) csv << ',' << csv_number(sol.infected[t][i]);
                csv << '\n';
            }
        out.results_csv = csv.str();
        out.summary["schemes"] = schemes;
        if (params.model == ne::Model::SIS) {
            const auto th = ne::nimfa_threshold(g, params);
            out.summary["threshold"] = {
                {"spectral_radius", th.spectral_radius},
                {"ratio", th.ratio},
                {"regime", th.regime == ne::Criticality::Subcritical ? "subcritical" : "supercritical"}};
        }
    };
}

// population-sir ------------------------------------------------------------

Runner plan_population(const Node& root)
{
    ne::PopulationSIR p;
    p.population = root.at("population").number();
    p.tau = root.at("tau").number();
    p.gamma = root.at("gamma").number();
    p.s0 = root.at("s0").number();
    p.i0 = root.at("i0").number();
    p.r0 = root.number("r0", 0.0);
    root.guard([&] { ne::validate(p); });
    const auto times = time_grid(root.at("times"));
    struct Firms {
        double tau;
        std::size_t count;
        double horizon;
    };
    std::optional<Firms> firms;
    if (const auto f = root.find("portfolio")) {
        firms = Firms{f->at("tau").number(), positive_count(*f, "firms", 1000), positive_number(*f, "horizon")};
        if (firms->tau < 0.0) f->at("tau").fail("must be nonnegative");
        if (firms->horizon > times.back()) f->at("horizon").fail("must not exceed the last grid time");
    }
    return [=](const SeedStream& seed, Output& out) {
        const auto traj = ne::integrate_population_sir(p, times);
        std::ostringstream csv;
        csv << "time,s,i,r,cumulative_infected\n";
        double residual = 0.0;
        for (std::size_t k = 0; k < traj.times.size(); ++k) {
            csv << csv_number(traj.times[k]) << ',' << csv_number(traj.s[k]) << ',' << csv_number(traj.i[k]) << ','
                << csv_number(traj.r[k]) << ',' << csv_number(traj.cumulative_infected[k]) << '\n';
            residual = std::max(residual, std::abs(traj.s[k] + traj.i[k] + traj.r[k] - p.population) / p.population);
        }
        out.results_csv = csv.str();
        out.summary["conservation_residual"] = residual;
        out.summary["final"] = {{"s", traj.s.back()}, {"i", traj.i.back()}, {"r", traj.r.back()}};
        if (firms) {
            const ne::PortfolioHazard hazard(traj, firms->tau);
            const auto t = hazard.sample_infection_times(firms->count, seed);
            const double hits = static_cast<double>(
                std::count_if(t.begin(), t.end(), [&](double v) { return v <= firms->horizon; }));
            const double freq = hits / static_cast<double>(firms->count);
            out.summary["portfolio"] = {
                {"infection_probability", hazard.infection_probability(firms->horizon)},
                {"simulated_frequency", freq},
                {"standard_error", std::sqrt(freq * (1.0 - freq) / static_cast<double>(firms->count))}};
        }
    };
}

// game ------------------------------------------------------------------------

Runner plan_game(const Node& root)
{
    const auto spec = parse_game(root);
    game::Profile start(spec.agents.size(), 0.0);
    if (const auto s = root.find("start")) {
        start = s->numbers();
        if (start.size() != spec.agents.size()) s->fail("one starting level per agent");
        for (std::size_t i = 0; i < start.size(); ++i)
            if (start[i] < 0.0 || start[i] > 1.0) s->index(i).fail("profile outside [0,1]^N");
    }
    const int rounds = static_cast<int>(positive_count(root, "max_rounds", 200));
    return [=](const SeedStream&, Output& out) {
        std::ostringstream csv;
        csv << "mode,agent,x,p,eu\n";
        for (bool insured : {false, true}) {
            const auto r = game::nash_iterate(spec, insured, start, rounds);
            const auto p = game::infection_probabilities(r.profile, spec);
            for (std::size_t i = 0; i < r.profile.size(); ++i)
                csv << (insured ? "insured" : "uninsured") << ',' << i << ',' << csv_number(r.profile[i]) << ','
                    << csv_number(p[i]) << ',' << csv_number(game::expected_utility(i, r.profile, spec, insured))
                    << '\n';
            out.summary[insured ? "insured" : "uninsured"] = json::parse(game::report_json(r, spec, insured));
        }
        out.summary["welfare_difference"] =
            out.summary["insured"]["welfare"].get<double>() - out.summary["uninsured"]["welfare"].get<double>();
        out.results_csv = csv.str();
    };
}

// price-classical -------------------------------------------------------------

struct ClaimsSource {
    std::vector<double> values;
    std::optional<aggregation::CollectiveModel> model;
    double horizon = 1.0;
    std::size_t reps = 0;

    std::vector<double> draw(const SeedStream& seed) const
    {
        if (!model) return values;
        return aggregation::simulate_total(*model, horizon, reps, seed).values;
    }
};

ClaimsSource parse_claims(const Node& n)
{
    ClaimsSource c;
    if (n.has("values")) {
        c.values = n.at("values").numbers();
        if (c.values.empty()) n.at("values").fail("empty sample");
        return c;
    }
    const Node m = n.at("collective");
    c.model = parse_collective(m);
    c.horizon = m.number("horizon", 1.0);
    if (!(c.horizon > 0.0)) m.at("horizon").fail("must be positive");
    c.reps = positive_count(m, "replications", 1000);
    return c;
}

Runner plan_classical(const Node& root)
{
    const auto claims = parse_claims(root.at("claims"));
    struct Row {
        std::string name;
        double parameter;
        std::optional<pricing::PremiumPrinciple> principle;
        std::optional<pricing::RiskMeasure> measure;
    };
    std::vector<Row> rows;
    if (const auto list = root.find("principles"))
        for (std::size_t k = 0; k < list->size(); ++k) {
            const Node p = list->index(k);
            const std::string type = p.at("type").string();
            using pricing::PremiumPrinciple;
            if (type == "variance" || type == "stddev") {
                const double a = p.at("a").number();
                if (!(a > 0.0)) p.at("a").fail("loading a > 0 required");
                rows.push_back({type, a,
                                type == "variance" ? PremiumPrinciple::variance(a) : PremiumPrinciple::standard_deviation(a),
                                {}});
            } else if (type == "exponential") {
                const double g = p.at("gamma").number();
                if (!(g > 0.0)) p.at("gamma").fail("γ > 0 required");
                rows.push_back({type, g, PremiumPrinciple::exponential(g), {}});
            } else if (type == "wang") {
                rows.push_back({type, 0.0, PremiumPrinciple::wang(parse_distortion(p.at("psi"))), {}});
            } else {
                p.at("type").fail("unknown principle '" + type + "' (allowed: variance, stddev, exponential, wang)");
            }
        }
    if (const auto list = root.find("risk_measures"))
        for (std::size_t k = 0; k < list->size(); ++k) {
            auto rho = parse_risk_measure(list->index(k));
            rows.push_back({rho.name(), rho.parameter, {}, rho});
        }
    if (rows.empty()) root.fail("list at least one principle or risk measure");
    return [=](const SeedStream& seed, Output& out) {
        const auto s = claims.draw(seed);
        std::vector<double> position(s.size());
        for (std::size_t r = 0; r < s.size(); ++r) position[r] = -s[r];
        std::ostringstream csv;
        csv << "name,parameter,value\n";
        json values = json::array();
        for (const auto& row : rows) {
            const double v = row.principle ? pricing::classical_premium(s, *row.principle) : (*row.measure)(position);
            csv << row.name << ',' << csv_number(row.parameter) << ',' << csv_number(v) << '\n';
            values.push_back({{"name", row.name}, {"parameter", row.parameter}, {"value", v}});
        }
        out.results_csv = csv.str();
        out.summary["claims"] = sample_summary(s);
        out.summary["premiums"] = values;
    };
}

// price-systematic ------------------------------------------------------------

Runner plan_systematic(const Node& root)
{
    const Node cells_node = root.at("cells");
    std::vector<pricing::LlnCell> cells;
    std::vector<double> cumulative;
    double total = 0.0;
    for (std::size_t k = 0; k < cells_node.size(); ++k) {
        const Node c = cells_node.index(k);
        const double prob = c.at("probability").number();
        if (!(prob > 0.0)) c.at("probability").fail("must be positive");
        total += prob;
        cumulative.push_back(total);
        pricing::LlnCell cell{std::nullopt, parse_distribution(c.at("severity"))};
        if (c.has("poisson_rate")) {
            cell.poisson_rate = c.at("poisson_rate").number();
            if (*cell.poisson_rate < 0.0) c.at("poisson_rate").fail("must be nonnegative");
        }
        cells.push_back(std::move(cell));
    }
    if (cells.empty()) cells_node.fail("list at least one factor cell");
    if (std::abs(total - 1.0) > 1e-9) cells_node.fail("cell probabilities must sum to one");
    const std::size_t firms = positive_count(root, "firms", 100);
    const std::size_t paths = positive_count(root, "paths", 200);
    const std::size_t inner = positive_count(root, "reps_per_path", 10);
    if (inner < 2) root.at("reps_per_path").fail("insufficient conditional replication");
    const double offset = root.number("offset", 0.0);
    const auto rho = parse_risk_measure(root.at("risk_measure"));

    struct PerCell {
        std::string name;
        double price;
        std::vector<double> payoff;
    };
    std::vector<PerCell> hedges;
    if (const auto list = root.find("hedges"))
        for (std::size_t k = 0; k < list->size(); ++k) {
            const Node h = list->index(k);
            PerCell p{h.string("name", "hedge" + std::to_string(k)), h.at("price").number(), h.at("payoff").numbers()};
            if (p.payoff.size() != cells.size()) h.at("payoff").fail("one payoff per factor cell");
            hedges.push_back(std::move(p));
        }
    struct Span {
        std::vector<std::vector<double>> basis;
        std::vector<double> prices, lower, upper;
    };
    std::optional<Span> span;
    if (const auto s = root.find("span")) {
        span = Span{s->at("basis").matrix(), s->at("prices").numbers(), s->at("lower").numbers(),
                    s->at("upper").numbers()};
        for (std::size_t k = 0; k < span->basis.size(); ++k)
            if (span->basis[k].size() != cells.size()) s->at("basis").index(k).fail("one payoff per factor cell");
        const std::size_t d = span->basis.size();
        if (d == 0 || span->prices.size() != d || span->lower.size() != d || span->upper.size() != d)
            s->fail("hedge span arrays must have equal nonzero length");
        for (std::size_t k = 0; k < d; ++k)
            if (span->lower[k] > span->upper[k]) s->at("lower").index(k).fail("hedge coefficient box must have lower ≤ upper");
    }
    pricing::PremiumConstraints cons;
    if (const auto c = root.find("constraints")) {
        if (c->has("rho_max")) cons.rho_max = c->at("rho_max").number();
        if (c->has("cost_max")) cons.cost_max = c->at("cost_max").number();
    }

    return [=](const SeedStream& seed, Output& out) {
        const std::size_t n = paths * inner;
        std::vector<std::size_t> cell_of_path(paths);
        for (std::size_t o = 0; o < paths; ++o) {
            const double u = seed.child(o).child(0).rng().uniform();
            cell_of_path[o] = static_cast<std::size_t>(std::lower_bound(cumulative.begin(), cumulative.end(), u) -
                                                       cumulative.begin());
            cell_of_path[o] = std::min(cell_of_path[o], cells.size() - 1);
        }
        std::vector<double> claims(n);
        parallel_for(n, [&](std::size_t r) {
            const std::size_t o = r / inner, q = r % inner;
            Rng rng = seed.child(o).child(1 + q).rng();
            double s = 0.0;
            for (std::size_t f = 0; f < firms; ++f) s += cells[cell_of_path[o]].draw(rng);
            claims[r] = s / static_cast<double>(firms);
        });
        std::vector<std::string> tags(n);
        for (std::size_t r = 0; r < n; ++r) tags[r] = std::to_string(r / inner);
        const auto d = pricing::decompose_nonsystemic(tags, claims, offset);

        pricing::HedgeFamily family;
        for (const auto& h : hedges) {
            pricing::HedgeCandidate c{h.name, std::vector<double>(n), h.price};
            for (std::size_t r = 0; r < n; ++r) c.payoff[r] = h.payoff[cell_of_path[r / inner]];
            family.candidates.push_back(std::move(c));
        }
        if (span) {
            pricing::HedgeSpan sp{{}, span->prices, span->lower, span->upper};
            for (const auto& b : span->basis) {
                std::vector<double> col(n);
                for (std::size_t r = 0; r < n; ++r) col[r] = b[cell_of_path[r / inner]];
                sp.basis.push_back(std::move(col));
            }
            family.span = std::move(sp);
        }
        const auto best = pricing::systematic_premium(d.systematic, family, rho, cons);

        std::ostringstream csv;
        csv << "hedge,hedge_cost,residual_risk,premium,selected\n";
        auto row = [&](const std::string& name, const std::vector<double>& payoff, double price) {
            std::vector<double> residual(n);
            for (std::size_t r = 0; r < n; ++r) residual[r] = -d.systematic[r] - payoff[r];
            const double risk = rho(residual);
            csv << name << ',' << csv_number(-price) << ',' << csv_number(risk) << ',' << csv_number(-price + risk)
                << ',' << (best.hedge == name ? 1 : 0) << '\n';
        };
        row("none", std::vector<double>(n, 0.0), 0.0);
        for (const auto& c : family.candidates) row(c.name, c.payoff, c.price);
        if (best.hedge == "span")
            csv << "span," << csv_number(best.hedge_cost) << ',' << csv_number(best.residual_risk) << ','
                << csv_number(best.premium) << ",1\n";
        out.results_csv = csv.str();

        std::ostringstream dec;
        dec << "replication,path,cell,claims,systematic,idiosyncratic\n";
        for (std::size_t r = 0; r < n; ++r)
            dec << r << ',' << r / inner << ',' << cell_of_path[r / inner] << ',' << csv_number(claims[r]) << ','
                << csv_number(d.systematic[r]) << ',' << csv_number(d.idiosyncratic[r]) << '\n';
        out.extra_files["decomposition.csv"] = dec.str();

        json cell_info = json::array();
        for (const auto& c : cells) cell_info.push_back({{"mean", c.mean()}, {"sd", c.standard_deviation()}});
        out.summary["cells"] = cell_info;
        out.summary["decomposition"] = {{"replications", n},
                                        {"paths", paths},
                                        {"systematic_mean", stats::mean(d.systematic)},
                                        {"idiosyncratic_mean", stats::mean(d.idiosyncratic)},
                                        {"covariance", stats::covariance(d.systematic, d.idiosyncratic)}};
        out.summary["premium"] = {{"value", best.premium},
                                  {"hedge", best.hedge},
                                  {"hedge_cost", best.hedge_cost},
                                  {"residual_risk", best.residual_risk},
                                  {"coefficients", best.coefficients},
                                  {"risk_measure", rho.name()}};
    };
}

// price-systemic --------------------------------------------------------------

Runner plan_systemic(const Node& root)
{
    pricing::SystemicProblem p;
    p.customers = positive_count(root, "customers", 1);
    p.menu.coverage = root.has("coverage") ? root.at("coverage").numbers() : std::vector<double>{1.0};
    p.choices = root.has("choices") ? root.at("choices").counts() : std::vector<std::size_t>(p.customers, 0);
    const Node losses = root.at("losses");
    const std::string type = losses.at("type").string();
    std::vector<double> amounts, probs;
    std::size_t reps = positive_count(losses, "replications", 1000);
    bool stratified = false;
    if (type == "binary") {
        amounts = losses.at("amounts").numbers();
        probs = losses.at("probabilities").numbers();
        if (amounts.size() != p.customers) losses.at("amounts").fail("one amount per customer");
        if (probs.size() != p.customers) losses.at("probabilities").fail("one probability per customer");
        for (std::size_t i = 0; i < p.customers; ++i) {
            if (amounts[i] < 0.0) losses.at("amounts").index(i).fail("losses must be nonnegative");
            if (probs[i] < 0.0 || probs[i] > 1.0) losses.at("probabilities").index(i).fail("must lie in [0,1]");
        }
        const std::string sampling = losses.string("sampling", "random");
        if (sampling == "stratified")
            stratified = true;
        else if (sampling != "random")
            losses.at("sampling").fail("unknown sampling '" + sampling + "' (allowed: random, stratified)");
        p.fixed = pricing::FixedLosses{std::vector<std::vector<double>>(reps, std::vector<double>(p.customers, 0.0))};
    } else if (type == "game") {
        p.game = pricing::GameLosses{parse_game(losses.at("game")), reps, SeedStream(0), 200};
    } else {
        losses.at("type").fail("unknown loss model '" + type + "' (allowed: binary, game)");
    }
    if (const auto e = root.find("other_assets")) {
        p.other_assets = e->raw().is_array() ? e->numbers() : std::vector<double>(reps, e->number());
        if (p.other_assets.size() != reps) e->fail("other assets must be replication-aligned");
    }
    const Node acc = root.at("acceptance");
    p.acceptance = {parse_risk_measure(acc.at("net_assets")), parse_risk_measure(acc.at("cyber_result"))};
    const Node grid = root.at("grid");
    p.grid = {grid.at("step").number(), grid.number("lower", 0.0), grid.at("upper").number(),
              grid.boolean("symmetric", false)};
    if (const auto c = root.find("criterion")) {
        const std::string ct = c->at("type").string();
        if (ct == "weighted")
            p.criterion = pricing::Criterion::weighted(c->at("weights").numbers());
        else if (ct != "competition")
            c->at("type").fail("unknown criterion '" + ct + "' (allowed: competition, weighted)");
    }
    root.guard([&] { pricing::validate(p); });

    return [=](const SeedStream& seed, Output& out) {
        auto problem = p;
        if (problem.fixed) {
            auto& y = problem.fixed->ground_up;
            for (std::size_t i = 0; i < problem.customers; ++i) {
                Rng rng = seed.child(0).child(i).rng();
                std::vector<std::size_t> order(reps);
                std::iota(order.begin(), order.end(), 0);
                if (stratified)
                    for (std::size_t k = reps; k > 1; --k)
                        std::swap(order[k - 1], order[static_cast<std::size_t>(rng.uniform() * static_cast<double>(k))]);
                for (std::size_t r = 0; r < reps; ++r) {
                    const double u = stratified ? (static_cast<double>(order[r]) + 0.5) / static_cast<double>(reps)
                                                : rng.uniform();
                    if (u < probs[i]) y[r][i] = amounts[i];
                }
            }
        } else {
            problem.game->seed = seed.child(1);
        }
        const auto res = pricing::systemic_premium_search(problem);
        const std::size_t nj = problem.menu.coverage.size();
        std::ostringstream csv;
        csv << "point";
        for (std::size_t i = 0; i < problem.customers; ++i)
            for (std::size_t j = 0; j < nj; ++j) csv << ",pi_" << i << '_' << j;
        csv << ",rho_e,rho_y,accept_e,accept_y,admissible,minimal,selected\n";
        std::vector<char> minimal(res.evaluated.size(), 0);
        for (auto m : res.minimal) minimal[m] = 1;
        for (std::size_t k = 0; k < res.evaluated.size(); ++k) {
            const auto& pt = res.evaluated[k];
            csv << k;
            for (double v : pt.premiums.values) csv << ',' << csv_number(v);
            csv << ',' << csv_number(pt.result.rho_e) << ',' << csv_number(pt.result.rho_y) << ','
                << int(pt.result.accept_e) << ',' << int(pt.result.accept_y) << ',' << int(pt.result.admissible())
                << ',' << int(minimal[k]) << ',' << int(k == res.selected) << '\n';
        }
        out.results_csv = csv.str();
        json mins = json::array();
        for (auto m : res.minimal) mins.push_back(res.evaluated[m].premiums.values);
        out.summary["evaluated"] = res.evaluated.size();
        out.summary["admissible"] = res.admissible.size();
        out.summary["minimal"] = mins;
        out.summary["selected"] = res.evaluated[res.selected].premiums.values;
        out.summary["choices"] = problem.choices;
        out.summary["upward_closed"] = res.upward_closed;
    };
}

}  // namespace

Runner plan_scenario(const Node& root)
{
    const std::string kind = root.at("kind").string();
    if (kind == "frequency-sim") return plan_frequency(root);
    if (kind == "collective-sim") return plan_collective(root);
    if (kind == "epidemic-sim") return plan_epidemic(root);
    if (kind == "closure-compare") return plan_closure(root);
    if (kind == "population-sir") return plan_population(root);
    if (kind == "game") return plan_game(root);
    if (kind == "price-classical") return plan_classical(root);
    if (kind == "price-systematic") return plan_systematic(root);
    if (kind == "price-systemic") return plan_systemic(root);
    root.at("kind").fail("unknown kind '" + kind +
                         "' (allowed: frequency-sim, collective-sim, epidemic-sim, closure-compare, population-sir, "
                         "game, price-classical, price-systematic, price-systemic)");
}

}  // namespace cyber::cli
