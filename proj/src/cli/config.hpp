#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cyber/core/errors.hpp"
#include "cyber/core/random.hpp"
#include "cyber/frequency/intensity.hpp"
#include "cyber/frequency/processes.hpp"
#include "cyber/netepidemic/graph.hpp"
#include "cyber/netepidemic/spread.hpp"
#include "cyber/pricing/risk_measures.hpp"
#include "cyber/severity/distribution.hpp"
#include "cyber/aggregation/collective.hpp"
#include "cyber/game/security.hpp"

namespace cyber::cli {

using nlohmann::json;

class ConfigError : public ValidationError {
public:
    ConfigError(std::string path, const std::string& message)
        : ValidationError(path + ": " + message), path(std::move(path)), message(message)
    {
    }
    std::string path;
    std::string message;
};

/// A JSON value with its pointer path for diagnostics.
class Node {
public:
    Node(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

    const json& raw() const { return *j_; }
    const std::string& path() const { return path_; }

    bool has(const std::string& key) const { return j_->is_object() && j_->contains(key); }
    Node at(const std::string& key) const;
    std::optional<Node> find(const std::string& key) const;
    Node index(std::size_t i) const;
    std::size_t size() const;

    double number() const;
    std::uint64_t integer() const;
    std::size_t count() const;
    bool boolean() const;
    std::string string() const;
    std::vector<double> numbers() const;
    std::vector<std::size_t> counts() const;
    std::vector<std::vector<double>> matrix() const;

    double number(const std::string& key, double fallback) const;
    std::size_t count(const std::string& key, std::size_t fallback) const;
    std::string string(const std::string& key, const std::string& fallback) const;
    bool boolean(const std::string& key, bool fallback) const;

    [[noreturn]] void fail(const std::string& message) const { throw ConfigError(path_, message); }

    /// Runs f, reporting library validation failures at this node.
    template <class F>
    auto guard(F&& f) const -> decltype(f())
    {
        try {
            return f();
        } catch (const ConfigError&) {
            throw;
        } catch (const ValidationError& e) {
            fail(e.what());
        }
    }

private:
    const json* j_;
    std::string path_;
};

severity::Distribution parse_distribution(const Node& n);
frequency::IntensityFunction parse_intensity(const Node& n);
frequency::FactorModel parse_factor_model(const Node& n);
aggregation::ArrivalSpec parse_arrivals(const Node& n);
netepidemic::Graph parse_graph(const Node& n);
netepidemic::SpreadParams parse_spread(const Node& n);
pricing::RiskMeasure parse_risk_measure(const Node& n);
pricing::Distortion parse_distortion(const Node& n);
game::GameSpec parse_game(const Node& n);

/// What a scenario produces; files are written by the caller.
struct Output {
    std::string results_csv;
    json summary = json::object();
    std::map<std::string, std::string> extra_files;
};

using Runner = std::function<void(const SeedStream&, Output&)>;

/// Parses and validates a scenario of the given kind into a runner.
Runner plan_scenario(const Node& root);

std::string csv_number(double v);

}  // namespace cyber::cli
