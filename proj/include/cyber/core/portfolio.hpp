#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace cyber {

/// Cyber risk module m = (c, k): a risk category paired with a homogeneous
/// group of policyholders. Indices are zero-based.
struct RiskModule {
    std::size_t category = 0;
    std::size_t group = 0;

    friend auto operator<=>(const RiskModule&, const RiskModule&) = default;
};

struct Group {
    std::string id;
    std::vector<double> covariates;
    std::size_t count = 1;
};

/// Scenario-level description before validation. Counts are signed so that
/// non-positive input can be reported instead of wrapping.
struct PortfolioConfig {
    std::vector<std::string> categories;
    struct GroupEntry {
        std::string id;
        std::vector<double> covariates;
        std::int64_t count = 0;
    };
    std::vector<GroupEntry> groups;
    std::optional<std::int64_t> declared_total;
};

class Portfolio {
public:
    Portfolio(std::vector<std::string> categories, std::vector<Group> groups);

    const std::vector<std::string>& categories() const { return categories_; }
    const std::vector<Group>& groups() const { return groups_; }

    std::size_t category_count() const { return categories_.size(); }
    std::size_t group_count() const { return groups_.size(); }
    std::size_t module_count() const { return categories_.size() * groups_.size(); }
    std::size_t total_firms() const { return total_; }

    /// Row-major (category, group) order.
    std::vector<RiskModule> modules() const;
    std::size_t module_index(const RiskModule& m) const;

private:
    std::vector<std::string> categories_;
    std::vector<Group> groups_;
    std::size_t total_ = 0;
};

Portfolio build_portfolio(const PortfolioConfig& config);

/// One incident: time in years, owning module, firm index, monetary amount.
struct EventRecord {
    double time = 0.0;
    RiskModule module;
    std::size_t firm = 0;
    double amount = 0.0;
};

}  // namespace cyber
