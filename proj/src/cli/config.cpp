#include "config.hpp"

#include <cmath>
#include <limits>

#include "cyber/core/format.hpp"

namespace cyber::cli {

Node Node::at(const std::string& key) const
{
    if (!j_->is_object()) fail("expected an object");
    const auto it = j_->find(key);
    if (it == j_->end()) throw ConfigError(path_ + "/" + key, "missing required field");
    return Node(*it, path_ + "/" + key);
}

std::optional<Node> Node::find(const std::string& key) const
{
    if (!j_->is_object()) fail("expected an object");
    const auto it = j_->find(key);
    if (it == j_->end() || it->is_null()) return std::nullopt;
    return Node(*it, path_ + "/" + key);
}

Node Node::index(std::size_t i) const
{
    if (!j_->is_array()) fail("expected an array");
    if (i >= j_->size()) fail("index out of range");
    return Node((*j_)[i], path_ + "/" + std::to_string(i));
}

std::size_t Node::size() const
{
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
}

double Node::number() const
{
    if (!j_->is_number()) fail("expected a number");
    const double v = j_->get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
}

std::uint64_t Node::integer() const
{
    if (j_->is_number_unsigned()) return j_->get<std::uint64_t>();
    if (j_->is_number_integer()) {
        const auto v = j_->get<std::int64_t>();
        if (v < 0) fail("expected a nonnegative integer");
        return static_cast<std::uint64_t>(v);
    }
    fail("expected a nonnegative integer");
}

std::size_t Node::count() const
{
    return static_cast<std::size_t>(integer());
}

bool Node::boolean() const
{
    if (!j_->is_boolean()) fail("expected true or false");
    return j_->get<bool>();
}

std::string Node::string() const
{
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
}

std::vector<double> Node::numbers() const
{
    std::vector<double> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = index(i).number();
    return out;
}

std::vector<std::size_t> Node::counts() const
{
    std::vector<std::size_t> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = index(i).count();
    return out;
}

std::vector<std::vector<double>> Node::matrix() const
{
    std::vector<std::vector<double>> out(size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = index(i).numbers();
    return out;
}

double Node::number(const std::string& key, double fallback) const
{
    const auto n = find(key);
    return n ? n->number() : fallback;
}

std::size_t Node::count(const std::string& key, std::size_t fallback) const
{
    const auto n = find(key);
    return n ? n->count() : fallback;
}

std::string Node::string(const std::string& key, const std::string& fallback) const
{
    const auto n = find(key);
    return n ? n->string() : fallback;
}

bool Node::boolean(const std::string& key, bool fallback) const
{
    const auto n = find(key);
    return n ? n->boolean() : fallback;
}

std::string csv_number(double v)
{
    return format_double(v);
}

severity::Distribution parse_distribution(const Node& n)
{
    using severity::Distribution;
    const std::string family = n.at("family").string();
    return n.guard([&] {
        if (family == "lognormal") return Distribution::lognormal(n.at("mu").number(), n.at("sigma").number());
        if (family == "gamma") return Distribution::gamma(n.at("shape").number(), n.at("scale").number());
        if (family == "pert")
            return Distribution::pert(n.at("min").number(), n.at("mode").number(), n.at("max").number());
        if (family == "gpd")
            return Distribution::gpd(n.at("xi").number(), n.at("sigma").number(), n.number("loc", 0.0));
        if (family == "beta") return Distribution::beta(n.at("a").number(), n.at("b").number());
        if (family == "kernel") return Distribution::kernel(n.at("data").numbers(), n.number("bandwidth", 0.0));
        if (family == "truncated_normal")
            return Distribution::truncated_normal(n.at("mu").number(), n.at("sigma").number());
        if (family == "exponential") return Distribution::exponential(n.at("rate").number());
        if (family == "degenerate") return Distribution::degenerate(n.at("value").number());
        if (family == "composite")
            return Distribution::composite(parse_distribution(n.at("body")), parse_distribution(n.at("tail")),
                                           n.at("threshold").number());
        n.at("family").fail("unknown family '" + family +
                            "' (allowed: lognormal, gamma, pert, gpd, beta, kernel, truncated_normal, exponential, "
                            "degenerate, composite)");
    });
}

frequency::IntensityFunction parse_intensity(const Node& n)
{
    using frequency::IntensityFunction;
    if (n.raw().is_number()) return n.guard([&] { return IntensityFunction::constant(n.number()); });
    const std::string type = n.at("type").string();
    return n.guard([&] {
        if (type == "constant") return IntensityFunction::constant(n.at("rate").number());
        if (type == "piecewise_linear")
            return IntensityFunction::piecewise_linear(n.at("times").numbers(), n.at("values").numbers());
        if (type == "gam")
            return IntensityFunction::gam(n.at("f").number(), n.at("times").numbers(), n.at("g").numbers());
        if (type == "sum") {
            const Node terms = n.at("terms");
            std::vector<std::pair<double, IntensityFunction>> parts;
            for (std::size_t i = 0; i < terms.size(); ++i) {
                const Node t = terms.index(i);
                parts.emplace_back(t.at("weight").number(), parse_intensity(t.at("intensity")));
            }
            return IntensityFunction::weighted_sum(std::move(parts));
        }
        n.at("type").fail("unknown intensity type '" + type + "' (allowed: constant, piecewise_linear, gam, sum)");
    });
}

frequency::FactorModel parse_factor_model(const Node& n)
{
    using namespace frequency;
    FactorModel m;
    const Node dyn = n.at("dynamics");
    const std::string type = dyn.at("type").string();
    if (type == "mean_reverting") {
        m.dynamics = MeanReverting{dyn.at("speed").numbers(), dyn.at("level").numbers(), dyn.at("vol").numbers(),
                                   dyn.at("x0").numbers(), dyn.number("dt", 0.01)};
    } else if (type == "deterministic") {
        m.dynamics = DeterministicPath{FactorPath{dyn.at("times").numbers(), dyn.at("values").matrix()}};
    } else {
        dyn.at("type").fail("unknown factor dynamics '" + type + "' (allowed: mean_reverting, deterministic)");
    }
    if (const auto link = n.find("link")) {
        const std::string lt = link->at("type").string();
        if (lt == "identity")
            m.link = IdentityLink{};
        else if (lt == "affine")
            m.link = AffineLink{link->at("a").number(), link->at("b").numbers()};
        else if (lt == "exp_affine")
            m.link = ExpAffineLink{link->at("a").number(), link->at("b").numbers()};
        else
            link->at("type").fail("unknown link '" + lt + "' (allowed: identity, affine, exp_affine)");
    }
    n.guard([&] { validate(m); });
    return m;
}

aggregation::ArrivalSpec parse_arrivals(const Node& n)
{
    using namespace aggregation;
    const std::string type = n.at("type").string();
    if (type == "poisson") return PoissonArrivals{parse_intensity(n.at("intensity"))};
    if (type == "cox") return CoxArrivals{parse_factor_model(n.at("model")), n.number("multiplier", 1.0)};
    if (type == "hawkes") {
        frequency::HawkesSpec spec;
        if (n.has("mu")) {
            spec = frequency::HawkesSpec::univariate(parse_intensity(n.at("mu")), n.at("alpha").number(),
                                                     n.at("beta").number());
        } else {
            const Node base = n.at("baseline");
            for (std::size_t i = 0; i < base.size(); ++i) spec.baseline.push_back(parse_intensity(base.index(i)));
            spec.block = n.at("block").counts();
            spec.alpha = n.at("alpha").matrix();
            spec.beta = n.at("beta").matrix();
        }
        n.guard([&] { frequency::validate(spec); });
        return HawkesArrivals{std::move(spec)};
    }
    n.at("type").fail("unknown arrival type '" + type + "' (allowed: poisson, cox, hawkes)");
}

netepidemic::Graph parse_graph(const Node& n)
{
    namespace ne = netepidemic;
    const std::string type = n.at("type").string();
    return n.guard([&] {
        if (type == "path") return ne::path(n.at("n").count());
        if (type == "star") return ne::star(n.at("n").count());
        if (type == "complete") return ne::complete(n.at("n").count());
        if (type == "tree") return ne::tree(n.at("branching").count(), n.at("depth").count());
        if (type == "triangle_pendant") return ne::triangle_pendant();
        if (type == "er")
            return ne::generate_er(n.at("n").count(), n.at("p").number(), SeedStream(n.count("seed", 0)));
        if (type == "ba")
            return ne::generate_ba(n.at("n").count(), n.at("m").count(), SeedStream(n.count("seed", 0)));
        if (type == "edges") {
            ne::Graph g(n.at("n").count());
            const Node edges = n.at("edges");
            for (std::size_t k = 0; k < edges.size(); ++k) {
                const auto e = edges.index(k).counts();
                if (e.size() != 2) edges.index(k).fail("an edge is a pair of node indices");
                edges.index(k).guard([&] { g.add_edge(e[0], e[1]); });
            }
            return g;
        }
        n.at("type").fail("unknown graph type '" + type +
                          "' (allowed: path, star, complete, tree, triangle_pendant, er, ba, edges)");
    });
}

netepidemic::SpreadParams parse_spread(const Node& n)
{
    netepidemic::SpreadParams p;
    p.tau = n.at("tau").number();
    p.gamma = n.at("gamma").number();
    if (const auto e = n.find("epsilon")) p.epsilon = e->raw().is_array() ? e->numbers() : std::vector{e->number()};
    const std::string model = n.string("model", "SIS");
    if (model == "SIS")
        p.model = netepidemic::Model::SIS;
    else if (model == "SIR")
        p.model = netepidemic::Model::SIR;
    else
        n.at("model").fail("unknown model '" + model + "' (allowed: SIS, SIR)");
    return p;
}

pricing::Distortion parse_distortion(const Node& n)
{
    if (n.has("power")) {
        auto d = pricing::Distortion::power(n.at("power").number());
        n.guard([&] { pricing::validate(d); });
        return d;
    }
    return n.guard([&] { return pricing::Distortion::grid(n.at("u").numbers(), n.at("psi").numbers()); });
}

pricing::RiskMeasure parse_risk_measure(const Node& n)
{
    using pricing::RiskMeasure;
    const std::string type = n.at("type").string();
    RiskMeasure rho;
    if (type == "var")
        rho = RiskMeasure::value_at_risk(n.at("lambda").number());
    else if (type == "avar")
        rho = RiskMeasure::average_value_at_risk(n.at("lambda").number());
    else if (type == "entropic")
        rho = RiskMeasure::entropic(n.at("gamma").number());
    else if (type == "distortion")
        rho = RiskMeasure::distorted(parse_distortion(n.at("psi")));
    else if (type == "expectation")
        rho = RiskMeasure::expectation();
    else
        n.at("type").fail("unknown risk measure '" + type + "' (allowed: var, avar, entropic, distortion, expectation)");
    n.guard([&] { pricing::validate(rho); });
    return rho;
}

namespace {

game::Curve parse_curve(const Node& n)
{
    if (n.raw().is_number()) return game::Curve::polynomial({n.number()});
    if (n.has("coefficients")) return game::Curve::polynomial(n.at("coefficients").numbers());
    if (n.has("scale")) return game::Curve::exponential(n.at("scale").number(), n.at("rate").number());
    n.fail("a curve is a number, {coefficients: [...]} or {scale, rate}");
}

game::Utility parse_utility(const Node& n)
{
    const std::string type = n.at("type").string();
    if (type == "linear") return game::LinearUtility{};
    if (type == "exponential") return game::ExponentialUtility{n.at("a").number()};
    if (type == "log") return game::ShiftedLogUtility{n.number("shift", 0.0)};
    n.at("type").fail("unknown utility '" + type + "' (allowed: linear, exponential, log)");
}

}  // namespace

game::GameSpec parse_game(const Node& n)
{
    game::GameSpec g;
    const Node agents = n.at("agents");
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const Node a = agents.index(i);
        game::AgentSpec s;
        s.initial_wealth = a.at("wealth").number();
        if (const auto u = a.find("utility")) s.utility = parse_utility(*u);
        s.loss = a.at("loss").number();
        s.cost = parse_curve(a.at("cost"));
        s.attack = parse_curve(a.at("attack"));
        g.agents.push_back(std::move(s));
    }
    g.contagion = n.at("contagion").matrix();
    const std::string rule = n.string("premium", "fair");
    if (rule == "fair")
        g.premium_rule = game::PremiumRule::Fair;
    else if (rule == "fixed") {
        g.premium_rule = game::PremiumRule::Fixed;
        g.fixed_premiums = n.at("fixed_premiums").numbers();
    } else
        n.at("premium").fail("unknown premium rule '" + rule + "' (allowed: fair, fixed)");
    if (const auto c = n.find("coverage")) g.coverage = c->numbers();
    n.guard([&] { game::validate(g); });
    return g;
}

}  // namespace cyber::cli
