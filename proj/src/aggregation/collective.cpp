#include "cyber/aggregation/collective.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "cyber/core/errors.hpp"
#include "cyber/core/format.hpp"
#include "cyber/core/parallel.hpp"
#include "cyber/core/portfolio.hpp"

namespace cyber::aggregation {

using frequency::IntensityFunction;

void validate(const CollectiveModel& model)
{
    if (const auto* cox = std::get_if<CoxArrivals>(&model.frequency)) {
        frequency::validate(cox->model);
        require(cox->multiplier >= 0.0, "Cox arrivals: multiplier >= 0 required");
    } else if (const auto* shared = std::get_if<SharedFactorArrivals>(&model.frequency)) {
        require(shared->multiplier >= 0.0, "shared-factor arrivals: multiplier >= 0 required");
    } else if (const auto* hawkes = std::get_if<HawkesArrivals>(&model.frequency)) {
        frequency::validate(hawkes->spec);
    }
    if (model.coupling) {
        require(std::holds_alternative<PoissonArrivals>(model.frequency), "coupling requires Poisson arrivals");
        require(model.coupling->theta >= 1.0, "θ ≥ 1 required");
    }
}

namespace {

std::size_t arrival_count(const ArrivalSpec& spec, double horizon, const frequency::FactorPath* shared,
                          const SeedStream& stream)
{
    struct Count {
        double horizon;
        const frequency::FactorPath* shared;
        const SeedStream& stream;
        std::size_t operator()(const PoissonArrivals& p) const
        {
            return frequency::simulate_poisson(p.intensity, horizon, stream.child(0)).size();
        }
        std::size_t operator()(const CoxArrivals& c) const
        {
            const auto path = frequency::simulate_factor_path(c.model, horizon, stream.child(0));
            const auto lambda = IntensityFunction::weighted_sum({{c.multiplier, frequency::intensity_from_path(c.model, path)}});
            return frequency::simulate_poisson(lambda, horizon, stream.child(1)).size();
        }
        std::size_t operator()(const SharedFactorArrivals& s) const
        {
            if (shared == nullptr) throw ValidationError("shared-factor arrivals need a portfolio factor model");
            frequency::FactorModel fm{frequency::DeterministicPath{*shared}, s.link};
            const auto lambda = IntensityFunction::weighted_sum({{s.multiplier, frequency::intensity_from_path(fm, *shared)}});
            return frequency::simulate_poisson(lambda, horizon, stream.child(1)).size();
        }
        std::size_t operator()(const HawkesArrivals& h) const
        {
            std::size_t n = 0;
            for (const auto& s : frequency::simulate_hawkes(h.spec, horizon, stream.child(0))) n += s.size();
            return n;
        }
    };
    return std::visit(Count{horizon, shared, stream}, spec);
}

double one_total(const CollectiveModel& model, double horizon, const frequency::FactorPath* shared,
                 const SeedStream& stream)
{
    if (model.coupling) {
        const auto& poisson = std::get<PoissonArrivals>(model.frequency);
        const auto counts = dependence::CountDistribution::poisson(poisson.intensity.integral(0.0, horizon));
        const auto draw = dependence::coupled_frequency_severity(counts, model.severity, model.coupling->theta, 1,
                                                                 stream, model.coupling->unit_claim);
        double total = 0.0;
        for (double y : draw.front().sizes) total += y;
        return total;
    }
    const std::size_t n = arrival_count(model.frequency, horizon, shared, stream);
    Rng rng = stream.child(2).rng();
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) total += model.severity.sample(rng);
    return total;
}

}  // namespace

WaldMoments wald_moments(double freq_mean, double freq_var, double sev_mean, double sev_var)
{
    require(std::isfinite(freq_mean) && std::isfinite(freq_var) && std::isfinite(sev_mean) && std::isfinite(sev_var),
            "Wald moments: inputs must be finite");
    require(freq_var >= 0.0 && sev_var >= 0.0, "negative variance input");
    require(freq_mean >= 0.0, "Wald moments: claim count mean must be nonnegative");
    return {freq_mean * sev_mean, freq_mean * sev_var + freq_var * sev_mean * sev_mean};
}

LossSample simulate_total(const CollectiveModel& model, double horizon, std::size_t n_reps, const SeedStream& seed)
{
    require(horizon > 0.0, "horizon must be positive");
    require(n_reps >= 1, "n_reps >= 1 required");
    validate(model);
    if (std::holds_alternative<SharedFactorArrivals>(model.frequency))
        throw ValidationError("shared-factor arrivals need a portfolio factor model");
    LossSample out;
    out.horizon = horizon;
    out.label = "collective";
    out.seed_trace = seed.trace();
    out.values.resize(n_reps);
    parallel_for(n_reps, [&](std::size_t r) { out.values[r] = one_total(model, horizon, nullptr, seed.child(r)); });
    return out;
}

PortfolioLoss portfolio_total(const Portfolio& portfolio, const std::vector<CollectiveModel>& module_models,
                              const std::optional<frequency::FactorModel>& shared_factor, double horizon,
                              std::size_t n_paths, const SeedStream& seed, std::size_t reps_per_path)
{
    require(horizon > 0.0, "horizon must be positive");
    require(n_paths >= 1 && reps_per_path >= 1, "replication counts must be >= 1");
    require(module_models.size() == portfolio.module_count(),
            "missing module model: expected " + std::to_string(portfolio.module_count()) + ", got " +
                std::to_string(module_models.size()));
    for (const auto& m : module_models) validate(m);
    if (shared_factor) frequency::validate(*shared_factor);

    const std::size_t n = n_paths * reps_per_path;
    const std::size_t k = module_models.size();
    PortfolioLoss out;
    out.total.horizon = horizon;
    out.total.label = "portfolio";
    out.total.seed_trace = seed.trace();
    out.total.values.assign(n, 0.0);
    out.factor_tags.resize(n);
    const auto modules = portfolio.modules();
    for (std::size_t m = 0; m < k; ++m) {
        LossSample s;
        s.horizon = horizon;
        s.label = "module " + portfolio.categories()[modules[m].category] + "/" +
                  portfolio.groups()[modules[m].group].id;
        s.seed_trace = seed.trace();
        s.values.assign(n, 0.0);
        out.modules.push_back(std::move(s));
    }

    parallel_for(n_paths, [&](std::size_t o) {
        const auto outer = seed.child(o);
        std::optional<frequency::FactorPath> path;
        if (shared_factor) path = frequency::simulate_factor_path(*shared_factor, horizon, outer.child(0));
        for (std::size_t q = 0; q < reps_per_path; ++q) {
            const std::size_t r = o * reps_per_path + q;
            const auto inner = outer.child(1 + q);
            double total = 0.0;
            for (std::size_t m = 0; m < k; ++m) {
                const double v = one_total(module_models[m], horizon, path ? &*path : nullptr, inner.child(m));
                out.modules[m].values[r] = v;
                total += v;
            }
            out.total.values[r] = total;
            out.factor_tags[r] = o;
        }
    });
    out.total.tags = out.factor_tags;
    for (auto& s : out.modules) s.tags = out.factor_tags;
    return out;
}

std::vector<CollectiveModel> scale_by_group_counts(const Portfolio& portfolio, std::vector<CollectiveModel> models)
{
    require(models.size() == portfolio.module_count(), "missing module model");
    const auto modules = portfolio.modules();
    for (std::size_t m = 0; m < models.size(); ++m) {
        const double n = static_cast<double>(portfolio.groups()[modules[m].group].count);
        auto& f = models[m].frequency;
        if (auto* p = std::get_if<PoissonArrivals>(&f)) p->intensity = IntensityFunction::weighted_sum({{n, p->intensity}});
        else if (auto* c = std::get_if<CoxArrivals>(&f)) c->multiplier *= n;
        else if (auto* s = std::get_if<SharedFactorArrivals>(&f)) s->multiplier *= n;
    }
    return models;
}

void write_csv(const LossSample& sample, std::ostream& out)
{
    out << "replication,value\n";
    for (std::size_t r = 0; r < sample.values.size(); ++r) out << r << ',' << format_double(sample.values[r]) << '\n';
}

LossSample read_csv(std::istream& in)
{
    std::string line;
    require(static_cast<bool>(std::getline(in, line)) && line == "replication,value",
            "loss sample CSV: header 'replication,value' expected");
    LossSample s;
    std::size_t expected = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        require(comma != std::string::npos, "loss sample CSV: malformed row '" + line + "'");
        require(std::stoull(line.substr(0, comma)) == expected++, "loss sample CSV: replication index out of order");
        s.values.push_back(parse_double(line.substr(comma + 1)));
    }
    return s;
}

std::string to_json(const LossSample& sample)
{
    nlohmann::json j;
    j["label"] = sample.label;
    j["horizon"] = sample.horizon;
    j["seed"] = sample.seed_trace;
    j["values"] = sample.values;
    if (!sample.tags.empty()) j["tags"] = sample.tags;
    return j.dump();
}

LossSample from_json(const std::string& text)
{
    const auto j = nlohmann::json::parse(text);
    LossSample s;
    s.label = j.value("label", "");
    s.horizon = j.value("horizon", 1.0);
    s.seed_trace = j.value("seed", "");
    s.values = j.at("values").get<std::vector<double>>();
    if (j.contains("tags")) s.tags = j.at("tags").get<std::vector<std::uint64_t>>();
    return s;
}

}  // namespace cyber::aggregation
